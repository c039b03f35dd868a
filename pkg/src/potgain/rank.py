"""Spearman rank correlation between centralities and delta sweeps over it."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .baselines import (
    degree_centrality,
    eigenvector_centrality,
    katz,
    pagerank,
)
from .errors import DomainError, UndefinedCorrelationError
from .graph import Graph
from .scores import ScoreVector, format_float
from .series import (
    SeriesConfig,
    check_geometric_delta,
    exponential_potential_gain,
    geometric_potential_gain,
    resolve_lambda1,
)
from .spectral import SpectralEstimate

# Scores computed by iterative methods agree to roughly this relative accuracy;
# closer values are ranked as ties when comparing metrics.
METRIC_TIE_RTOL = 1e-9

SWEEP_METRICS = ("degree", "eigenvector", "pagerank", "katz", "epg")
TABLE_METRICS = ("DEG", "EC", "PR", "Katz", "GPG", "EPG")
UNDEFINED = "undefined"


def average_ranks(values, tie_rtol: float = 0.0) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span.

    With ``tie_rtol > 0`` neighbouring sorted values within that relative
    distance are chained into one tie group.
    """
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="stable")
    s = v[order]
    if tie_rtol > 0:
        new_group = np.diff(s) > tie_rtol * np.maximum(np.abs(s[1:]), np.abs(s[:-1]))
    else:
        new_group = np.diff(s) != 0
    starts = np.flatnonzero(np.concatenate([[True], new_group]))
    ends = np.concatenate([starts[1:], [len(s)]])
    group_rank = (starts + ends + 1) / 2.0
    ranks = np.empty(len(v))
    ranks[order] = np.repeat(group_rank, ends - starts)
    return ranks


def spearman_rho(a, b, tie_rtol: float = 0.0) -> float:
    """Pearson correlation of the average-rank vectors of ``a`` and ``b``.

    Raises UndefinedCorrelationError when either input has a single distinct
    value (zero rank variance).
    """
    if isinstance(a, ScoreVector) and isinstance(b, ScoreVector):
        if a.graph_fingerprint != b.graph_fingerprint:
            raise DomainError("score vectors belong to different graphs")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError(f"shape mismatch: {a.shape} vs {b.shape}")
    if len(a) < 2:
        raise DomainError("need at least two observations")
    ra = average_ranks(a, tie_rtol)
    rb = average_ranks(b, tie_rtol)
    ra -= ra.mean()
    rb -= rb.mean()
    den = math.sqrt(float(ra @ ra) * float(rb @ rb))
    if den == 0:
        raise UndefinedCorrelationError("constant ranking; Spearman rho is undefined")
    return float(np.clip((ra @ rb) / den, -1.0, 1.0))


def _rho_or_nan(a, b) -> float:
    try:
        return spearman_rho(a, b, tie_rtol=METRIC_TIE_RTOL)
    except UndefinedCorrelationError:
        return math.nan


def default_delta_grid(lambda1: float, points: int = 20,
                       lo: float = 1e-3, hi: float = 0.999) -> np.ndarray:
    """``points`` log-spaced decays from ``lo/lambda1`` to ``hi/lambda1``."""
    return np.geomspace(lo / lambda1, hi / lambda1, points)


def series_k_max(delta: float, lambda1: float, tol: float, floor: int = 100,
                 cap: int = 1_000_000) -> int:
    """Enough geometric terms for the increment to fall below ``tol``."""
    r = delta * lambda1
    if r <= 0:
        return floor
    return int(min(max(floor, math.ceil(math.log(tol) / math.log(r)) + 10), cap))


@dataclass
class SweepResult:
    delta_grid: list[float]
    lambda1: float
    rho: dict[str, list[float]] = field(default_factory=dict)

    def write_csv(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["delta", "metric", "rho"])
        for metric, values in self.rho.items():
            for d, r in zip(self.delta_grid, values):
                w.writerow([format_float(d), metric, UNDEFINED if math.isnan(r) else format_float(r)])


def delta_sweep(
    g: Graph,
    delta_grid: Sequence[float] | None = None,
    metrics: Sequence[str] = SWEEP_METRICS,
    tol: float = 1e-12,
    alpha: float = 0.85,
    spectral: SpectralEstimate | float | None = None,
) -> SweepResult:
    """Spearman rho of the geometric potential gain against other metrics per delta.

    Katz is recomputed at every delta; the delta-free metrics once. The series
    length at each delta is chosen so the increment reaches ``tol``.
    Undefined correlations (constant rankings) are recorded as NaN.
    """
    unknown = set(metrics) - set(SWEEP_METRICS)
    if unknown:
        raise DomainError(f"unknown sweep metric(s): {sorted(unknown)}")
    lam = resolve_lambda1(g, spectral)
    grid = np.asarray(default_delta_grid(lam) if delta_grid is None else delta_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise DomainError("empty delta grid")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("delta grid must be strictly increasing")
    for d in grid:
        check_geometric_delta(float(d), lam)

    fixed: dict[str, ScoreVector] = {}
    if "degree" in metrics:
        fixed["degree"] = degree_centrality(g)
    if "eigenvector" in metrics:
        fixed["eigenvector"] = eigenvector_centrality(g, tol=min(tol, 1e-10))
    if "pagerank" in metrics:
        fixed["pagerank"] = pagerank(g, alpha=alpha, tol=tol)
    if "epg" in metrics:
        fixed["epg"] = exponential_potential_gain(g, SeriesConfig(tol=tol), lam)[0]

    result = SweepResult([float(d) for d in grid], lam, {m: [] for m in metrics})
    for d in grid:
        d = float(d)
        k_max = series_k_max(d, lam, tol)
        gpg, _ = geometric_potential_gain(g, SeriesConfig(delta=d, k_max=k_max, tol=tol), lam)
        for m in metrics:
            other = katz(g, d, tol=tol, k_max=k_max + 1, spectral=lam) if m == "katz" else fixed[m]
            result.rho[m].append(_rho_or_nan(gpg, other))
    return result


@dataclass
class CorrelationTable:
    metrics: list[str]
    rho: np.ndarray
    delta: float | None = None

    def write_csv(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", *self.metrics])
        for name, row in zip(self.metrics, self.rho):
            w.writerow([name, *(UNDEFINED if math.isnan(r) else format_float(r) for r in row)])


def correlation_table(
    g: Graph,
    delta: float,
    tol: float = 1e-12,
    alpha: float = 0.85,
    spectral: SpectralEstimate | float | None = None,
) -> CorrelationTable:
    """Pairwise Spearman rho over DEG, EC, PR, Katz, GPG and EPG at one delta."""
    lam = resolve_lambda1(g, spectral)
    check_geometric_delta(delta, lam)
    k_max = series_k_max(delta, lam, tol)
    vectors = [
        degree_centrality(g),
        eigenvector_centrality(g, tol=min(tol, 1e-10)),
        pagerank(g, alpha=alpha, tol=tol),
        katz(g, delta, tol=tol, k_max=k_max + 1, spectral=lam),
        geometric_potential_gain(g, SeriesConfig(delta=delta, k_max=k_max, tol=tol), lam)[0],
        exponential_potential_gain(g, SeriesConfig(tol=tol), lam)[0],
    ]
    k = len(vectors)
    rho = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            rho[i, j] = rho[j, i] = _rho_or_nan(vectors[i], vectors[j])
    return CorrelationTable(list(TABLE_METRICS), rho, delta)
