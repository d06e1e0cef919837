"""Command-line front end: ``convexclust --input data.csv --gamma-grid auto:20``."""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from .admm import AdmmConfig
from .ama import AmaConfig
from .graph import DisconnectedGraphWarning, WeightGraph, build_knn_gaussian_weights
from .io import emit_plot_data, ingest_csv, write_path_json
from .model import ClusterProblem, PenaltyNorm
from .path import SOLVERS, default_grid, gamma_grid, solve_path

log = logging.getLogger("convexclust")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2


@dataclass
class RunConfig:
    input: str
    output: str = "-"
    norm: str = "l2"
    knn: int = 10
    phi: float = 0.5
    gamma_grid: str = "auto:20"
    solver: str = "ama-fast"
    tol: float = 1e-6
    max_iters: int = 100_000
    standardize: bool = False
    emit_plot_data: str | None = None
    zero_tol: float = 0.0


def parse_grid_spec(spec: str):
    """Parse ``list:v1,v2,...``, ``log:lo:hi:count``, ``auto:count`` or a bare list.

    Returns either a validated array or ``("auto", count)``.
    """
    spec = spec.strip()
    kind, _, rest = spec.partition(":")
    if kind == "auto":
        count = int(rest)
        if count < 2:
            raise ValueError("auto grid needs count >= 2")
        return ("auto", count)
    if kind == "log":
        lo, hi, count = rest.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
        if not 0 < lo < hi or count < 2:
            raise ValueError("log grid needs 0 < lo < hi and count >= 2")
        return gamma_grid(np.geomspace(lo, hi, count))
    values = rest if kind == "list" else spec
    return gamma_grid([float(v) for v in values.split(",") if v.strip()])


def run(config: RunConfig) -> int:
    try:
        data = ingest_csv(config.input, standardize=config.standardize)
        norm = PenaltyNorm.parse(config.norm)
        grid_spec = parse_grid_spec(config.gamma_grid)
        if config.solver not in SOLVERS:
            raise ValueError(f"unknown solver {config.solver!r}")
        k = min(config.knn, data.n - 1)
        if data.n > 1:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", DisconnectedGraphWarning)
                graph = build_knn_gaussian_weights(data, k, config.phi)
            for w in caught:
                log.warning("%s", w.message)
        else:
            graph = WeightGraph(1, [], [], [])
        problem = ClusterProblem(data, graph, norm, 0.0)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT

    ama_config = AmaConfig(tol=config.tol, max_iters=config.max_iters,
                           accelerated=config.solver == "ama-fast")
    admm_config = AdmmConfig(max_iters=config.max_iters)
    if isinstance(grid_spec, tuple):
        grid = default_grid(problem, grid_spec[1], ama_config, config.zero_tol)
    else:
        grid = grid_spec

    path = solve_path(problem, grid, config.solver, ama_config, admm_config,
                      zero_tol=config.zero_tol)
    for e in path:
        log.info("gamma=%.6g clusters=%d iterations=%d converged=%s",
                 e.gamma, e.num_clusters, e.iterations, e.converged)
    try:
        write_path_json(path, config.output)
        if config.emit_plot_data:
            emit_plot_data(path, config.emit_plot_data)
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    if not any(e.converged for e in path):
        log.error("no gamma value converged")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="convexclust",
        description="Convex clustering paths by AMA or ADMM on k-NN Gaussian weights.",
    )
    p.add_argument("--input", required=True, help="CSV file, one observation per row")
    p.add_argument("--output", default="-", help="JSON path records (default: stdout)")
    p.add_argument("--norm", default="l2", help="l1, l2, linf or group:0,1;2,3 (default: l2)")
    p.add_argument("--knn", type=int, default=10, help="neighbors per point (default: 10)")
    p.add_argument("--phi", type=float, default=0.5, help="Gaussian kernel parameter (default: 0.5)")
    p.add_argument("--gamma-grid", default="auto:20",
                   help="list:v1,v2,... | log:lo:hi:count | auto:count (default: auto:20)")
    p.add_argument("--solver", choices=SOLVERS, default="ama-fast")
    p.add_argument("--tol", type=float, default=1e-6, help="AMA duality-gap tolerance")
    p.add_argument("--max-iters", type=int, default=100_000)
    p.add_argument("--standardize", action="store_true", help="center and scale columns")
    p.add_argument("--zero-tol", type=float, default=0.0,
                   help="norm below which an edge difference counts as fused")
    p.add_argument("--emit-plot-data", metavar="CSV",
                   help="also write centroid trajectories in long format")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    config = RunConfig(
        input=args.input, output=args.output, norm=args.norm, knn=args.knn, phi=args.phi,
        gamma_grid=args.gamma_grid, solver=args.solver, tol=args.tol,
        max_iters=args.max_iters, standardize=args.standardize,
        emit_plot_data=args.emit_plot_data, zero_tol=args.zero_tol,
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
