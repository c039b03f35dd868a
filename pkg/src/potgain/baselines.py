"""Reference centralities: degree, Katz, eigenvector, PageRank, communicability."""

from __future__ import annotations

import logging

import numpy as np

from .errors import DomainError
from .graph import Graph, degrees, spmv
from .scores import ScoreVector, make_scores
from .series import (
    DEFAULT_TOL,
    accumulate_series,
    check_exponential_lambda,
    check_geometric_delta,
    default_k_max_exponential,
    exponential_coef,
    geometric_coef,
    resolve_lambda1,
)
from .spectral import DEFAULT_MAX_ITERS, SpectralEstimate, principal_eigenvector

log = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.85


def degree_centrality(g: Graph) -> ScoreVector:
    return make_scores(g, "degree", degrees(g).astype(np.float64))


def katz(
    g: Graph,
    delta: float,
    tol: float = DEFAULT_TOL,
    k_max: int = 100,
    spectral: SpectralEstimate | float | None = None,
) -> ScoreVector:
    """Katz score ``(I - delta A)^-1 1``, identity term included.

    Same recurrence as the geometric potential gain, started one term earlier.
    """
    lam = resolve_lambda1(g, spectral)
    check_geometric_delta(delta, lam)
    total, reason = accumulate_series(g, np.ones(g.n), geometric_coef(delta), tol, k_max)
    return make_scores(
        g, "katz", total,
        params={"delta": delta, "tol": tol, "k_max": k_max, "lambda1": lam},
        converged=reason == "tolerance",
    )


def communicability_centrality(
    g: Graph,
    tol: float = DEFAULT_TOL,
    k_max: int | None = None,
    spectral: SpectralEstimate | float | None = None,
) -> ScoreVector:
    """Row sums of ``exp(A)``, i.e. ``sum_j A**j / j! 1``."""
    lam = resolve_lambda1(g, spectral)
    check_exponential_lambda(lam)
    k_max = k_max or default_k_max_exponential(lam)
    total, reason = accumulate_series(g, np.ones(g.n), exponential_coef, tol, k_max)
    return make_scores(
        g, "communicability", total,
        params={"tol": tol, "k_max": k_max, "lambda1": lam},
        converged=reason == "tolerance",
    )


def eigenvector_centrality(
    g: Graph, tol: float = 1e-10, max_iters: int = DEFAULT_MAX_ITERS
) -> ScoreVector:
    return principal_eigenvector(g, tol, max_iters)


def pagerank(
    g: Graph,
    alpha: float = DEFAULT_ALPHA,
    tol: float = 1e-12,
    max_iters: int = 10_000,
) -> ScoreVector:
    """PageRank of the random walk on the row-normalised adjacency matrix.

    Power method ``p <- alpha A D^-1 p + (1 - alpha) / n`` from the uniform
    vector until the L1 change drops below ``tol``. Entries sum to 1.
    """
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    inv_deg = 1.0 / degrees(g)
    n = g.n
    p = np.full(n, 1.0 / n)
    teleport = (1.0 - alpha) / n
    change = np.inf
    it = 0
    while it < max_iters:
        it += 1
        new = alpha * spmv(g, p * inv_deg) + teleport
        new /= new.sum()
        change = float(np.abs(new - p).sum())
        p = new
        if change < tol:
            break
    converged = change < tol
    warnings = ()
    if not converged:
        warnings = (f"PageRank L1 change {change:.3g} above tolerance after {it} iterations",)
        log.warning(warnings[0])
    return make_scores(
        g, "pagerank", p,
        params={"alpha": alpha, "tol": tol, "max_iters": max_iters, "iterations": it},
        converged=converged, warnings=warnings,
    )
