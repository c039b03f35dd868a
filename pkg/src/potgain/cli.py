"""Command-line interface: ``potgain <command> ...``.

Exit codes: 0 ok, 1 verification failure, 2 parse error, 3 domain or
precondition error, 4 non-convergence, 5 resource cap.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import baselines, errors, graph, oracle, rank, series, spectral
from .scores import write_scores_csv, write_sidecar

log = logging.getLogger("potgain")

CACHE_ENV = "POTGAIN_CACHE_DIR"
MANIFEST = "manifest.json"

_CATEGORIES = [
    (errors.DivergenceRiskError, "divergence-risk"),
    (errors.OverflowRiskError, "overflow-risk"),
    (errors.ParseError, "parse"),
    (errors.DomainError, "domain"),
    (errors.NonConvergenceError, "non-convergence"),
    (errors.ResourceCapError, "resource-cap"),
]

_RELATIVE = re.compile(r"^\s*([0-9.]+(?:[eE][-+]?\d+)?)\s*/\s*lambda1\s*$")


def parse_delta(text: str | None, lambda1_fn) -> float | None:
    """``"0.25"`` is absolute; ``"0.5/lambda1"`` is relative to the spectral radius."""
    if text is None:
        return None
    m = _RELATIVE.match(text)
    if m:
        return float(m.group(1)) / lambda1_fn()
    try:
        return float(text)
    except ValueError:
        raise errors.DomainError(f"cannot parse delta {text!r}; use a number or 'r/lambda1'")


class Run:
    """State shared by one command: loaded graph, cached lambda1, manifest data."""

    def __init__(self, args):
        self.args = args
        self.t0 = time.perf_counter()
        self.g = None
        self._spectral = None
        self.parameters: dict = {}
        self.outputs: list[str] = []

    def load(self, path) -> graph.Graph:
        self.g = graph.load_edge_list(path)
        return self.g

    def _cache_path(self) -> Path | None:
        if getattr(self.args, "no_cache", False):
            return None
        root = os.environ.get(CACHE_ENV) or os.path.join(Path.home(), ".cache", "potgain")
        return Path(root) / f"{self.g.fingerprint}.json"

    def spectral(self, tol: float = spectral.DEFAULT_TOL,
                 max_iters: int = spectral.DEFAULT_MAX_ITERS) -> spectral.SpectralEstimate:
        if self._spectral is not None:
            return self._spectral
        path = self._cache_path()
        if path is not None and path.exists():
            try:
                doc = json.loads(path.read_text())
                if doc["converged"] and doc["tol"] <= tol:
                    self._spectral = spectral.SpectralEstimate(
                        doc["lambda1"], doc["iterations"], doc["residual"], doc["converged"])
                    log.info("using cached lambda1 from %s", path)
                    return self._spectral
            except (OSError, ValueError, KeyError):
                log.warning("ignoring unreadable cache file %s", path)
        est = spectral.estimate_spectral_radius(self.g, tol, max_iters)
        if path is not None and est.converged:
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(json.dumps({**est.as_dict(), "tol": tol}))
            except OSError as exc:
                log.warning("could not write lambda1 cache: %s", exc)
        self._spectral = est
        return est

    def lambda1(self) -> float:
        return self.spectral().lambda1

    def outdir(self) -> Path | None:
        out = getattr(self.args, "output", None)
        if out is None:
            return None
        p = Path(out)
        p.mkdir(parents=True, exist_ok=True)
        return p

    def write(self, name: str, writer) -> None:
        d = self.outdir()
        with open(d / name, "w", newline="") as fh:
            writer(fh)
        self.outputs.append(name)

    def finish(self) -> None:
        d = self.outdir()
        if d is None:
            return
        if self.g is not None:
            self.write("id_map.csv", lambda fh: graph.export_id_map(self.g, fh))
        manifest = {
            "command": self.args.command,
            "input": str(getattr(self.args, "input", "")) or None,
            "graph_fingerprint": self.g.fingerprint if self.g is not None else None,
            "load_summary": self.g.summary.as_dict() if self.g is not None else None,
            "parameters": self.parameters,
            "tool_version": __version__,
            "duration_seconds": round(time.perf_counter() - self.t0, 6),
            "outputs": sorted(self.outputs),
        }
        (d / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def cmd_spectral(run: Run) -> int:
    a = run.args
    run.load(a.input)
    est = run.spectral(a.tol, a.max_iters)
    print(json.dumps(est.as_dict()))
    return 0 if est.converged else errors.NonConvergenceError.exit_code


def _compute_metric(run: Run, metric: str):
    a, g = run.args, run.g
    delta = parse_delta(a.delta, run.lambda1)
    if metric == "gpg":
        cfg = series.SeriesConfig(delta=delta, k_max=a.k_max, tol=a.tol)
        return series.geometric_potential_gain(g, cfg, run.spectral())[0]
    if metric == "epg":
        cfg = series.SeriesConfig(k_max=a.k_max, tol=a.tol)
        return series.exponential_potential_gain(g, cfg, run.spectral())[0]
    if metric == "degree":
        return baselines.degree_centrality(g)
    if metric == "katz":
        if delta is None:
            delta = 1.0 / (2.0 * run.lambda1())
        return baselines.katz(g, delta, tol=a.tol, k_max=a.k_max or 100, spectral=run.spectral())
    if metric == "eigenvector":
        return baselines.eigenvector_centrality(g, tol=min(a.tol, 1e-10))
    if metric == "pagerank":
        return baselines.pagerank(g, alpha=a.alpha, tol=a.tol)
    if metric == "communicability":
        return baselines.communicability_centrality(g, tol=a.tol, k_max=a.k_max,
                                                    spectral=run.spectral())
    raise errors.DomainError(f"unknown metric {metric!r}")


def cmd_centrality(run: Run) -> int:
    a = run.args
    g = run.load(a.input)
    scores = _compute_metric(run, a.metric)
    run.parameters = {"metric": a.metric, **scores.params}
    stem = f"scores_{a.metric}"
    if run.outdir() is None:
        write_scores_csv(g, scores, sys.stdout)
    else:
        run.write(f"{stem}.csv", lambda fh: write_scores_csv(g, scores, fh))
        run.write(f"{stem}.json", lambda fh: write_sidecar(scores, fh, manifest=MANIFEST))
    run.finish()
    if not scores.converged and a.metric in ("eigenvector", "pagerank"):
        print(f"error [non-convergence]: {scores.warnings[0]}", file=sys.stderr)
        return errors.NonConvergenceError.exit_code
    return 0


def cmd_convergence(run: Run) -> int:
    a = run.args
    g = run.load(a.input)
    delta = parse_delta(a.delta, run.lambda1) if a.variant == "geometric" else None
    cfg = series.SeriesConfig(delta=delta, k_max=a.k_max, k_ref=a.k_ref)
    report = series.convergence_curve(g, cfg, a.variant, run.spectral())
    run.parameters = {**report.header(), "k_max": report.terms, "k_ref": a.k_ref}
    if run.outdir() is None:
        series.write_convergence_csv(report, sys.stdout)
    else:
        run.write("convergence.csv", lambda fh: series.write_convergence_csv(report, fh))
        run.write("convergence.json",
                  lambda fh: series.write_convergence_header(report, fh, manifest=MANIFEST))
    run.finish()
    return 0


def cmd_sweep(run: Run) -> int:
    a = run.args
    g = run.load(a.input)
    if a.deltas:
        grid = [parse_delta(t, run.lambda1) for t in a.deltas.split(",")]
    else:
        lo, hi = parse_delta(a.lo, run.lambda1), parse_delta(a.hi, run.lambda1)
        grid = list(np.geomspace(lo, hi, a.points))
    metrics = a.metrics.split(",")
    result = rank.delta_sweep(g, grid, metrics, tol=a.tol, alpha=a.alpha, spectral=run.spectral())
    run.parameters = {"delta_grid": result.delta_grid, "metrics": metrics, "tol": a.tol,
                      "alpha": a.alpha, "lambda1": result.lambda1}
    if run.outdir() is None:
        result.write_csv(sys.stdout)
    else:
        run.write("sweep.csv", result.write_csv)
    run.finish()
    return 0


def cmd_correlate(run: Run) -> int:
    a = run.args
    g = run.load(a.input)
    delta = parse_delta(a.delta, run.lambda1)
    table = rank.correlation_table(g, delta, tol=a.tol, alpha=a.alpha, spectral=run.spectral())
    run.parameters = {"delta": delta, "tol": a.tol, "alpha": a.alpha, "lambda1": run.lambda1()}
    if run.outdir() is None:
        table.write_csv(sys.stdout)
    else:
        run.write("correlation.csv", table.write_csv)
    run.finish()
    return 0


def cmd_crossover(run: Run) -> int:
    a = run.args
    c = series.crossover_delta(a.lam, a.lambda1)
    print(json.dumps({"delta_c": c.delta_c, "admissible": c.admissible}))
    return 0


def cmd_verify(run: Run) -> int:
    a = run.args
    report = oracle.verify_corpus(a.seed, a.size, a.threshold)
    for line in report.lines():
        print(line)
    print(f"{'PASS' if report.passed else 'FAIL'}: {report.graphs} graphs")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="potgain", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--threads", type=int, default=1,
                   help="spmv worker threads (default 1: bit-reproducible)")
    p.add_argument("--no-cache", action="store_true",
                   help=f"do not read or write the lambda1 cache (${CACHE_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(sp):
        sp.add_argument("input", help="edge-list file (plain or KONECT)")
        return sp

    def with_output(sp):
        sp.add_argument("-o", "--output", help="output directory (default: CSV to stdout)")
        return sp

    sp = with_input(sub.add_parser("spectral", help="estimate the spectral radius"))
    sp.add_argument("--tol", type=float, default=spectral.DEFAULT_TOL)
    sp.add_argument("--max-iters", type=int, default=spectral.DEFAULT_MAX_ITERS)
    sp.set_defaults(func=cmd_spectral)

    sp = with_output(with_input(sub.add_parser("centrality", help="per-node scores")))
    sp.add_argument("--metric", required=True,
                    choices=["gpg", "epg", "degree", "katz", "eigenvector", "pagerank",
                             "communicability"])
    sp.add_argument("--delta", help="decay: number or 'r/lambda1' (default 1/(2 lambda1))")
    sp.add_argument("--alpha", type=float, default=baselines.DEFAULT_ALPHA)
    sp.add_argument("--tol", type=float, default=series.DEFAULT_TOL)
    sp.add_argument("--k-max", type=int, default=None)
    sp.set_defaults(func=cmd_centrality)

    sp = with_output(with_input(sub.add_parser("convergence", help="epsilon(k) curve")))
    sp.add_argument("--variant", choices=["geometric", "exponential"], default="geometric")
    sp.add_argument("--delta")
    sp.add_argument("--k-max", type=int, default=None)
    sp.add_argument("--k-ref", type=int, default=None)
    sp.set_defaults(func=cmd_convergence)

    sp = with_output(with_input(sub.add_parser("sweep", help="rho(GPG, X) across delta")))
    sp.add_argument("--deltas", help="comma-separated grid (overrides --points/--lo/--hi)")
    sp.add_argument("--points", type=int, default=20)
    sp.add_argument("--lo", default="1e-3/lambda1")
    sp.add_argument("--hi", default="0.999/lambda1")
    sp.add_argument("--metrics", default=",".join(rank.SWEEP_METRICS))
    sp.add_argument("--alpha", type=float, default=baselines.DEFAULT_ALPHA)
    sp.add_argument("--tol", type=float, default=series.DEFAULT_TOL)
    sp.set_defaults(func=cmd_sweep)

    sp = with_output(with_input(sub.add_parser("correlate", help="pairwise rho table")))
    sp.add_argument("--delta", required=True)
    sp.add_argument("--alpha", type=float, default=baselines.DEFAULT_ALPHA)
    sp.add_argument("--tol", type=float, default=series.DEFAULT_TOL)
    sp.set_defaults(func=cmd_correlate)

    sp = sub.add_parser("crossover", help="delta at which both gains' transforms coincide")
    sp.add_argument("lam", type=float, metavar="LAMBDA")
    sp.add_argument("--lambda1", type=float, default=None,
                    help="spectral radius for the admissibility check (default LAMBDA)")
    sp.set_defaults(func=cmd_crossover)

    sp = sub.add_parser("verify", help="sparse vs dense oracle on a random corpus")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--size", type=int, default=50)
    sp.add_argument("--threshold", type=float, default=1e-9)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    graph.set_spmv_threads(args.threads)
    try:
        return args.func(Run(args))
    except errors.PotgainError as exc:
        category = next((name for cls, name in _CATEGORIES if isinstance(exc, cls)), "error")
        print(f"error [{category}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return 2
    finally:
        graph.set_spmv_threads(1)


if __name__ == "__main__":
    sys.exit(main())
