"""Spectral radius and Perron vector by power iteration on ``A + I``.

The identity shift makes ``lambda1 + 1`` strictly dominant in magnitude, so
bipartite graphs (symmetric spectrum) converge instead of oscillating.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph, degrees, is_connected, spmv
from .scores import ScoreVector, make_scores

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITERS = 10_000


@dataclass(frozen=True)
class SpectralEstimate:
    lambda1: float
    iterations: int
    residual: float
    converged: bool

    def as_dict(self) -> dict:
        return asdict(self)


def _check_degree_bound(g: Graph, lam: float) -> None:
    if lam > g.max_degree * (1 + 1e-12):
        log.warning("estimate %.17g exceeds max degree %d", lam, g.max_degree)


def estimate_spectral_radius(
    g: Graph, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS
) -> SpectralEstimate:
    """Largest adjacency eigenvalue from the Rayleigh quotient of the iterate.

    Stops when two successive quotients differ by less than ``tol`` relative.
    Running out of iterations is not an error; ``converged`` is False instead.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.full(g.n, 1.0 / np.sqrt(g.n))
    av = spmv(g, v)
    rq = float(v @ av)
    change = np.inf
    it = 0
    while it < max_iters:
        it += 1
        w = av + v
        v = w / np.linalg.norm(w)
        av = spmv(g, v)
        new = float(v @ av)
        change = abs(new - rq) / abs(new) if new else abs(new - rq)
        rq = new
        if change < tol:
            break
    converged = change < tol
    if not converged:
        log.warning("power iteration did not converge in %d iterations", max_iters)
    _check_degree_bound(g, rq)
    return SpectralEstimate(rq, it, float(change), bool(converged))


def principal_eigenvector(
    g: Graph, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS
) -> ScoreVector:
    """Unit-norm positive eigenvector for ``lambda1`` (eigenvector centrality).

    Iterates until ``||A v - lambda v|| <= tol * lambda`` with ``lambda`` the
    current Rayleigh quotient. On a disconnected graph the result is supported
    on the dominant component(s) and a warning is attached.
    """
    warnings = []
    if not is_connected(g):
        warnings.append("graph is disconnected; Perron vector is component-supported")
        log.warning(warnings[-1])
    v = np.full(g.n, 1.0 / np.sqrt(g.n))
    av = spmv(g, v)
    lam = float(v @ av)
    resid = np.linalg.norm(av - lam * v)
    it = 0
    while resid > tol * lam and it < max_iters:
        it += 1
        w = av + v
        v = w / np.linalg.norm(w)
        av = spmv(g, v)
        lam = float(v @ av)
        resid = np.linalg.norm(av - lam * v)
    converged = bool(resid <= tol * lam)
    if not converged:
        warnings.append(f"eigenvector residual {resid:.3g} above tolerance after {it} iterations")
        log.warning(warnings[-1])
    _check_degree_bound(g, lam)
    # Entries of the Perron vector are >= 0; clear rounding-level negatives.
    v = np.abs(v)
    v /= np.linalg.norm(v)
    return make_scores(
        g,
        "eigenvector",
        v,
        params={"tol": tol, "max_iters": max_iters, "lambda1": lam, "iterations": it},
        converged=converged,
        warnings=tuple(warnings),
    )


def trivial_bounds(g: Graph) -> tuple[float, float]:
    """(lower, upper) bounds on lambda1 from degrees alone."""
    d = degrees(g)
    return max(float(d.mean()), float(np.sqrt(d.max()))), float(d.max())
