"""Potential-gain centralities on sparse undirected graphs.

Geometric and exponential potential gain via truncated walk series, the
baseline centralities they are compared with, and Spearman rank analysis.
"""

__version__ = "0.1.0"

from .baselines import (
    communicability_centrality,
    degree_centrality,
    eigenvector_centrality,
    katz,
    pagerank,
)
from .graph import Graph, degrees, load_edge_list, spmv
from .rank import correlation_table, delta_sweep, spearman_rho
from .scores import ScoreVector
from .series import (
    ConvergenceReport,
    SeriesConfig,
    convergence_curve,
    crossover_delta,
    eigenvalue_transforms,
    exponential_potential_gain,
    geometric_potential_gain,
)
from .spectral import SpectralEstimate, estimate_spectral_radius, principal_eigenvector

__all__ = [
    "ConvergenceReport", "Graph", "ScoreVector", "SeriesConfig", "SpectralEstimate",
    "communicability_centrality", "convergence_curve", "correlation_table",
    "crossover_delta", "degree_centrality", "degrees", "delta_sweep",
    "eigenvalue_transforms", "eigenvector_centrality", "estimate_spectral_radius",
    "exponential_potential_gain", "geometric_potential_gain", "katz",
    "load_edge_list", "pagerank", "principal_eigenvector", "spearman_rho", "spmv",
]
