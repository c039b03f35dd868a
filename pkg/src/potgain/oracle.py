"""Dense brute-force references for small graphs.

Everything here is O(n^2) memory and O(n^3) time and exists to check the
sparse series against independent computations. None of it is on the path
used for real datasets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NonConvergenceError, ResourceCapError
from .graph import Graph

DEFAULT_CAP = 2_000
EXPM_TAYLOR_TERMS = 30


def dense_from_graph(g: Graph, cap: int = DEFAULT_CAP) -> np.ndarray:
    if g.n > cap:
        raise ResourceCapError(f"dense oracle limited to {cap} nodes, graph has {g.n}")
    A = np.zeros((g.n, g.n))
    for i in range(g.n):
        A[i, g.col_indices[g.row_offsets[i]:g.row_offsets[i + 1]]] = 1.0
    return A


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # Tournament schedule: each round pairs every index at most once, so the
    # rotations of a round commute and can be applied together.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            p, q = np.array(pairs).T
            rounds.append((p, q))
        players = [players[0], players[-1], *players[1:-1]]
    return rounds


def dense_symmetric_eigen(
    A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps of plane rotations until the off-diagonal Frobenius norm is below
    ``tol``. Returns eigenvalues in descending order and the matching
    orthonormal eigenvectors as columns.
    """
    A = np.array(A, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T, rtol=0, atol=1e-12):
        raise DomainError("matrix must be square and symmetric")
    V = np.eye(n)
    rounds = _round_robin(n)

    def off_norm(M):
        return float(np.linalg.norm(M - np.diag(np.diag(M))))

    for _ in range(max_sweeps):
        if off_norm(A) < tol:
            break
        for p, q in rounds:
            apq = A[p, q]
            active = apq != 0
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (A[q, q] - A[p, p]) / (2.0 * apq)
            with np.errstate(over="ignore"):
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            J = np.eye(n)
            J[p, p] = c
            J[q, q] = c
            J[p, q] = s
            J[q, p] = -s
            A = J.T @ A @ J
            A = 0.5 * (A + A.T)
            V = V @ J
    else:
        if off_norm(A) >= tol:
            raise NonConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    evals = np.diag(A).copy()
    order = np.argsort(-evals, kind="stable")
    return evals[order], V[:, order]


def dense_eigenvector(A: np.ndarray) -> tuple[float, np.ndarray]:
    """(lambda1, unit positive Perron vector)."""
    evals, V = dense_symmetric_eigen(A)
    v = V[:, 0]
    if v.sum() < 0:
        v = -v
    return float(evals[0]), v / np.linalg.norm(v)


def _gauss_solve(M: np.ndarray, b: np.ndarray) -> np.ndarray:
    M = np.array(M, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    n = len(b)
    scale = np.abs(M).max()
    for k in range(n):
        piv = k + int(np.argmax(np.abs(M[k:, k])))
        if abs(M[piv, k]) <= 1e-14 * scale:
            raise DomainError("singular system")
        if piv != k:
            M[[k, piv]] = M[[piv, k]]
            b[[k, piv]] = b[[piv, k]]
        f = M[k + 1:, k] / M[k, k]
        M[k + 1:, k:] -= np.outer(f, M[k, k:])
        b[k + 1:] -= f * b[k]
    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - M[k, k + 1:] @ x[k + 1:]) / M[k, k]
    return x


def dense_neumann_solve(
    A: np.ndarray, delta: float, lambda1: float | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Exact (geometric gain, Katz) by solving ``(I - delta A) x = 1``.

    Returns ``(A x, x)``.
    """
    if lambda1 is None:
        lambda1 = float(dense_symmetric_eigen(A)[0][0])
    if not delta * lambda1 < 1:
        raise DomainError(f"delta * lambda1 = {delta * lambda1:.6g} >= 1")
    n = A.shape[0]
    x = _gauss_solve(np.eye(n) - delta * A, np.ones(n))
    return A @ x, x


def dense_expm(A: np.ndarray, lambda1: float | None = None) -> np.ndarray:
    """``exp(A)`` by scaling and squaring a 30-term Taylor polynomial.

    The scaling exponent is ``max(0, ceil(log2(lambda1)) + 2)``; without
    ``lambda1`` the max absolute row sum (an upper bound on it) is used.
    """
    n = A.shape[0]
    if lambda1 is None:
        lambda1 = float(np.abs(A).sum(axis=1).max())
    s = max(0, math.ceil(math.log2(lambda1)) + 2) if lambda1 > 0 else 0
    B = A / 2.0 ** s
    I = np.eye(n)
    E = I.copy()
    for k in range(EXPM_TAYLOR_TERMS, 0, -1):
        E = I + (B @ E) / k
    for _ in range(s):
        E = E @ E
    return E


def dense_expm_action(A: np.ndarray, lambda1: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Exact (communicability ``exp(A) 1``, exponential gain ``A exp(A) 1``)."""
    c = dense_expm(A, lambda1) @ np.ones(A.shape[0])
    return c, A @ c


def dense_pagerank(A: np.ndarray, alpha: float = 0.85) -> np.ndarray:
    """Power iteration on the full (column-stochastic) Google matrix."""
    n = A.shape[0]
    Abar = A / A.sum(axis=1, keepdims=True)
    G = alpha * Abar.T + (1.0 - alpha) / n
    p = np.full(n, 1.0 / n)
    for _ in range(math.ceil(math.log(1e-17) / math.log(alpha)) + 50):
        p = G @ p
        p /= p.sum()
    return p


def brute_force_rank(values) -> np.ndarray:
    """Average ranks by pairwise counting: ``#smaller + (#equal + 1) / 2``."""
    v = np.asarray(values, dtype=np.float64)
    ranks = np.empty(len(v))
    for i, x in enumerate(v):
        smaller = equal = 0
        for y in v:
            if y < x:
                smaller += 1
            elif y == x:
                equal += 1
        ranks[i] = smaller + (equal + 1) / 2.0
    return ranks


def brute_force_spearman(a, b) -> float:
    ra, rb = brute_force_rank(a), brute_force_rank(b)
    n = len(ra)
    ma, mb = sum(ra) / n, sum(rb) / n
    cov = sum((x - ma) * (y - mb) for x, y in zip(ra, rb))
    va = sum((x - ma) ** 2 for x in ra)
    vb = sum((y - mb) ** 2 for y in rb)
    return cov / math.sqrt(va * vb)


def random_connected_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    """Random spanning tree overlaid with G(n, p) edges; always connected."""
    perm = rng.permutation(n)
    src = [int(perm[i]) for i in range(1, n)]
    dst = [int(perm[rng.integers(0, i)]) for i in range(1, n)]
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    src = np.concatenate([src, iu[keep]])
    dst = np.concatenate([dst, ju[keep]])
    return Graph.from_index_arrays(src, dst, labels=[str(i) for i in range(n)])


def random_corpus(seed: int, size: int, n_range=(5, 60), p_range=(0.1, 0.6)) -> list[Graph]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(size):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        p = float(rng.uniform(*p_range))
        out.append(random_connected_graph(rng, n, p))
    return out


def max_rel_dev(x, ref) -> float:
    x = np.asarray(x, dtype=float)
    ref = np.asarray(ref, dtype=float)
    return float(np.max(np.abs(x - ref) / np.abs(ref)))


@dataclass
class VerificationReport:
    threshold: float
    graphs: int = 0
    max_dev: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v <= self.threshold for v in self.max_dev.values())

    def update(self, metric: str, dev: float) -> None:
        self.max_dev[metric] = max(self.max_dev.get(metric, 0.0), dev)

    def lines(self) -> list[str]:
        out = []
        for metric, dev in self.max_dev.items():
            status = "PASS" if dev <= self.threshold else "FAIL"
            out.append(f"{status} {metric:<16} max_rel_dev={dev:.3e} (threshold {self.threshold:.0e})")
        return out


def verify_corpus(seed: int = 0, size: int = 50, threshold: float = 1e-9) -> VerificationReport:
    """Compare every sparse centrality with its dense counterpart on a random corpus."""
    from .baselines import communicability_centrality, eigenvector_centrality, katz, pagerank
    from .series import SeriesConfig, exponential_potential_gain, geometric_potential_gain
    from .spectral import estimate_spectral_radius

    report = VerificationReport(threshold)
    for g in random_corpus(seed, size):
        A = dense_from_graph(g)
        lam_dense, ec_dense = dense_eigenvector(A)
        est = estimate_spectral_radius(g, tol=1e-14)
        lam = est.lambda1
        delta = 0.5 / lam
        gpg_dense, katz_dense = dense_neumann_solve(A, delta, lam_dense)
        comm_dense, epg_dense = dense_expm_action(A, lam_dense)

        tight = SeriesConfig(delta=delta, tol=1e-15, k_max=400)
        report.update("spectral_radius", abs(lam - lam_dense) / lam_dense)
        report.update("gpg", max_rel_dev(geometric_potential_gain(g, tight, lam)[0].values, gpg_dense))
        report.update("katz", max_rel_dev(katz(g, delta, tol=1e-15, k_max=400, spectral=lam).values, katz_dense))
        report.update("epg", max_rel_dev(
            exponential_potential_gain(g, SeriesConfig(tol=1e-15), lam)[0].values, epg_dense))
        report.update("communicability", max_rel_dev(
            communicability_centrality(g, tol=1e-15, spectral=lam).values, comm_dense))
        report.update("eigenvector", max_rel_dev(eigenvector_centrality(g, tol=1e-13).values, ec_dense))
        report.update("pagerank", max_rel_dev(pagerank(g, tol=1e-14).values, dense_pagerank(A)))
        report.graphs += 1
    return report
