"""Geometric and exponential potential gain by truncated walk series.

Both scores sum weighted walk counts ending at each node::

    geometric    g = sum_{j>=1} delta**(j-1) A**j 1  =  A (I - delta A)^-1 1
    exponential  e = sum_{j>=1} A**j / (j-1)!  1     =  A exp(A) 1

Each term is one sparse matrix-vector product applied to the previous term,
so a run of k terms costs O(k |E|) time and O(|E|) memory.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, IO, Iterable

import numpy as np

from .errors import (
    DivergenceRiskError,
    DomainError,
    OverflowRiskError,
    PoleError,
    UnreliableReferenceError,
)
from .graph import Graph, spmv
from .scores import ScoreVector, make_scores
from .spectral import SpectralEstimate, estimate_spectral_radius

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
DEFAULT_K_MAX_GEOMETRIC = 100
# Multiplies 1/lambda1 when checking admissibility of delta.
SAFETY_MARGIN = 0.9999
# exp(650) ~ 1e282; beyond this the peak series term approaches float overflow.
MAX_LAMBDA1_EXP = 650.0
# Below this epsilon the curve is dominated by rounding and ratios are noise.
RATE_FLOOR = 1e-13


@dataclass(frozen=True)
class SeriesConfig:
    """Parameters of a truncated series run.

    ``delta=None`` means ``1 / (2 lambda1)``; ``k_max=None`` picks the
    variant default; ``k_ref=None`` picks a reference length automatically.
    """

    delta: float | None = None
    k_max: int | None = None
    tol: float = DEFAULT_TOL
    k_ref: int | None = None

    def __post_init__(self):
        if self.delta is not None and not self.delta >= 0:
            raise DomainError(f"delta must be >= 0, got {self.delta}")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.k_max is not None and self.k_max < 1:
            raise DomainError("k_max must be >= 1")
        if self.k_ref is not None and self.k_max is not None and self.k_ref <= self.k_max:
            raise DomainError("k_ref must exceed k_max")


@dataclass
class ConvergenceReport:
    variant: str
    delta: float | None
    lambda1: float
    k: list[int] = field(default_factory=list)
    increment_norm: list[float] = field(default_factory=list)
    partial_norm: list[float] = field(default_factory=list)
    epsilon: list[float] | None = None
    stop_reason: str = "k_max"
    rate_estimate: float | None = None

    @property
    def terms(self) -> int:
        return len(self.k)

    def header(self) -> dict:
        return {
            "variant": self.variant,
            "delta": self.delta,
            "lambda1": self.lambda1,
            "rate_estimate": self.rate_estimate,
            "stop_reason": self.stop_reason,
        }


def _median_tail_ratio(values: Iterable[float]) -> float | None:
    v = np.asarray(list(values), dtype=float)
    if len(v) < 2:
        return None
    tail = v[len(v) - max(2, len(v) // 3):]
    num, den = tail[1:], tail[:-1]
    ok = den > 0
    if not ok.any():
        return None
    return float(np.median(num[ok] / den[ok]))


def accumulate_series(
    g: Graph,
    start: np.ndarray,
    coef: Callable[[int], float],
    tol: float,
    k_max: int,
    report: ConvergenceReport | None = None,
) -> tuple[np.ndarray, str]:
    """Sum ``t_1 = start``, ``t_{s+1} = coef(s) * A t_s`` for up to ``k_max`` terms.

    Stops early once ``||t_k|| / ||partial sum|| < tol``. Returns the sum and
    the stop reason (``"tolerance"`` or ``"k_max"``).
    """
    term = np.array(start, dtype=np.float64)
    total = term.copy()
    reason = "k_max"
    for k in range(1, k_max + 1):
        if k > 1:
            term = coef(k - 1) * spmv(g, term)
            total += term
        inc = float(np.linalg.norm(term))
        part = float(np.linalg.norm(total))
        if report is not None:
            report.k.append(k)
            report.increment_norm.append(inc)
            report.partial_norm.append(part)
        if part == 0 or inc < tol * part:
            reason = "tolerance"
            break
    if report is not None:
        report.stop_reason = reason
        report.rate_estimate = _median_tail_ratio(report.increment_norm)
    return total, reason


def geometric_coef(delta: float) -> Callable[[int], float]:
    return lambda s: delta


def exponential_coef(s: int) -> float:
    return 1.0 / s


def resolve_lambda1(g: Graph, spectral: SpectralEstimate | float | None) -> float:
    if spectral is None:
        spectral = estimate_spectral_radius(g)
    if isinstance(spectral, SpectralEstimate):
        if not spectral.converged:
            log.warning("using unconverged spectral estimate %.6g", spectral.lambda1)
        return spectral.lambda1
    return float(spectral)


def check_geometric_delta(delta: float, lambda1: float) -> None:
    if delta < 0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    limit = SAFETY_MARGIN / lambda1
    if delta >= limit:
        raise DivergenceRiskError(
            f"delta={delta:.6g} is not below {SAFETY_MARGIN}/lambda1 = {limit:.6g} "
            f"(lambda1={lambda1:.6g}); the series would diverge"
        )


def check_exponential_lambda(lambda1: float) -> None:
    if lambda1 > MAX_LAMBDA1_EXP:
        raise OverflowRiskError(
            f"lambda1={lambda1:.6g} exceeds {MAX_LAMBDA1_EXP}; exponential terms would "
            "overflow. Use the geometric variant instead"
        )


def default_k_max_exponential(lambda1: float) -> int:
    # A floor keeps small-lambda1 graphs (single edges, paths) reaching tolerance.
    return max(math.ceil(4 * math.e * lambda1), 30)


def resolve_config(cfg: SeriesConfig | None, variant: str, lambda1: float) -> SeriesConfig:
    cfg = cfg or SeriesConfig()
    delta = cfg.delta
    if variant == "geometric":
        if delta is None:
            delta = 1.0 / (2.0 * lambda1)
        check_geometric_delta(delta, lambda1)
        k_max = cfg.k_max or DEFAULT_K_MAX_GEOMETRIC
    elif variant == "exponential":
        check_exponential_lambda(lambda1)
        k_max = cfg.k_max or default_k_max_exponential(lambda1)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return replace(cfg, delta=delta, k_max=k_max)


def geometric_potential_gain(
    g: Graph,
    cfg: SeriesConfig | None = None,
    spectral: SpectralEstimate | float | None = None,
) -> tuple[ScoreVector, ConvergenceReport]:
    """Geometric potential gain ``A (I - delta A)^-1 1`` by the recurrence
    ``y_1 = A 1``, ``y_j = delta A y_{j-1}``.

    ``spectral`` may be a precomputed estimate (or bare lambda1); otherwise
    one is computed to check that ``delta < 0.9999 / lambda1``.
    """
    lam = resolve_lambda1(g, spectral)
    cfg = resolve_config(cfg, "geometric", lam)
    report = ConvergenceReport("geometric", cfg.delta, lam)
    ones = np.ones(g.n)
    total, _ = accumulate_series(
        g, spmv(g, ones), geometric_coef(cfg.delta), cfg.tol, cfg.k_max, report
    )
    params = {"delta": cfg.delta, "tol": cfg.tol, "k_max": cfg.k_max, "lambda1": lam,
              "terms": report.terms}
    scores = make_scores(g, "gpg", total, params=params,
                         converged=report.stop_reason == "tolerance")
    return scores, report


def exponential_potential_gain(
    g: Graph,
    cfg: SeriesConfig | None = None,
    spectral: SpectralEstimate | float | None = None,
) -> tuple[ScoreVector, ConvergenceReport]:
    """Exponential potential gain ``A exp(A) 1``; ``cfg.delta`` is ignored."""
    lam = resolve_lambda1(g, spectral)
    cfg = resolve_config(cfg, "exponential", lam)
    report = ConvergenceReport("exponential", None, lam)
    total, _ = accumulate_series(
        g, spmv(g, np.ones(g.n)), exponential_coef, cfg.tol, cfg.k_max, report
    )
    params = {"tol": cfg.tol, "k_max": cfg.k_max, "lambda1": lam, "terms": report.terms}
    scores = make_scores(g, "epg", total, params=params,
                         converged=report.stop_reason == "tolerance")
    return scores, report


def _default_k_ref(variant: str, delta: float | None, lambda1: float, k_max: int) -> int:
    if variant == "geometric":
        r = delta * lambda1
        need = 2 if r == 0 else math.ceil(math.log(1e-17) / math.log(r)) + 1
        return max(k_max + 1, min(need, 1_000_000))
    return max(k_max + 1, math.ceil(4 * math.e * lambda1) + 60)


def convergence_curve(
    g: Graph,
    cfg: SeriesConfig | None = None,
    variant: str = "geometric",
    spectral: SpectralEstimate | float | None = None,
) -> ConvergenceReport:
    """Relative error ``||s - s_k|| / ||s||`` of the k-term partial sums.

    The exact score ``s`` is replaced by a long run of ``k_ref`` terms whose
    last increment must be below 1e-12 relative (ideally 1e-14).
    ``rate_estimate`` is the median of ``eps(k+1)/eps(k)`` over the last third
    of the curve, restricted to points above the rounding floor.
    """
    lam = resolve_lambda1(g, spectral)
    cfg = resolve_config(cfg, variant, lam)
    k_ref = cfg.k_ref or _default_k_ref(variant, cfg.delta, lam, cfg.k_max)
    if k_ref <= cfg.k_max:
        raise DomainError("k_ref must exceed k_max")
    coef = geometric_coef(cfg.delta) if variant == "geometric" else exponential_coef
    start = spmv(g, np.ones(g.n))

    ref_report = ConvergenceReport(variant, cfg.delta, lam)
    reference, _ = accumulate_series(g, start, coef, 1e-17, k_ref, ref_report)
    last_rel = ref_report.increment_norm[-1] / ref_report.partial_norm[-1]
    if last_rel > 1e-12:
        raise UnreliableReferenceError(
            f"reference increment at k_ref={k_ref} is {last_rel:.3g} relative; raise k_ref"
        )
    if last_rel > 1e-14:
        log.warning("reference increment %.3g exceeds 1e-14 relative", last_rel)
    ref_norm = np.linalg.norm(reference)

    report = ConvergenceReport(variant, cfg.delta, lam, epsilon=[])
    term = start.copy()
    total = term.copy()
    for k in range(1, cfg.k_max + 1):
        if k > 1:
            term = coef(k - 1) * spmv(g, term)
            total += term
        report.k.append(k)
        report.increment_norm.append(float(np.linalg.norm(term)))
        report.partial_norm.append(float(np.linalg.norm(total)))
        report.epsilon.append(float(np.linalg.norm(reference - total) / ref_norm))
    report.stop_reason = "k_max"
    above = [e for e in report.epsilon if e > RATE_FLOOR]
    report.rate_estimate = _median_tail_ratio(above)
    return report


def write_convergence_csv(report: ConvergenceReport, fh: IO[str]) -> None:
    fh.write("k,increment_norm,epsilon_k\n")
    eps = report.epsilon if report.epsilon is not None else [None] * report.terms
    for k, inc, e in zip(report.k, report.increment_norm, eps):
        fh.write(f"{k},{inc!r},{'' if e is None else repr(e)}\n")


def write_convergence_header(report: ConvergenceReport, fh: IO[str], **extra) -> None:
    doc = report.header()
    doc.update(extra)
    json.dump(doc, fh, indent=2, sort_keys=True)
    fh.write("\n")


@dataclass(frozen=True)
class Crossover:
    delta_c: float
    admissible: bool


def crossover_delta(lam: float, lambda1: float | None = None) -> Crossover:
    """Decay at which the geometric and exponential transforms of ``lam`` agree.

    Solves ``lam / (1 - d lam) = lam exp(lam)`` for ``d``, giving
    ``(exp(lam) - 1) / (lam exp(lam))``. The crossing is admissible when it
    lies below ``1 / lambda1`` (``lambda1`` defaults to ``lam``).
    """
    lam = float(lam)
    if lam == 0:
        raise DomainError("lambda = 0: both transforms vanish for every delta")
    delta_c = -math.expm1(-lam) / lam
    bound = lam if lambda1 is None else float(lambda1)
    return Crossover(delta_c, bool(bound > 0 and delta_c < 1.0 / bound))


def eigenvalue_transforms(lambdas, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Map adjacency eigenvalues to those of ``A (I - delta A)^-1`` and ``A exp(A)``."""
    lam = np.asarray(lambdas, dtype=np.float64)
    denom = 1.0 - delta * lam
    if np.any(np.abs(denom) <= 4 * np.finfo(float).eps):
        raise PoleError(f"delta * lambda = 1 for some eigenvalue (delta={delta})")
    return lam / denom, lam * np.exp(lam)
