import numpy as np
import pytest

from potgain import Graph
from potgain.oracle import random_corpus

ACCEPTANCE_LINES = []


def record_criterion(number, name, passed, detail=""):
    """Log one acceptance line; ``passed=None`` marks a skipped optional check."""
    status = "SKIP" if passed is None else "PASS" if passed else "FAIL"
    line = f"[{status}] criterion {number}: {name}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def complete_graph(n):
    return Graph.from_edges((i, j) for i in range(n) for j in range(i + 1, n))


def cycle_graph(n):
    return Graph.from_edges((i, (i + 1) % n) for i in range(n))


def star_graph(leaves):
    return Graph.from_edges((0, i) for i in range(1, leaves + 1))


def path_graph(n):
    return Graph.from_edges((i, i + 1) for i in range(n - 1))


def gnp_graph(n, p, seed):
    """G(n, p) restricted to its non-isolated nodes."""
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    return Graph.from_index_arrays(iu[keep], ju[keep])


def preferential_attachment(n, m, seed=0):
    """Edge arrays of a preferential-attachment graph on ``n`` nodes.

    Starts from a clique on ``m + 1`` nodes; every later node draws ``m``
    targets uniformly from the list of edge endpoints, i.e. proportionally
    to degree. Repeated targets collapse when the graph is built.
    """
    rng = np.random.default_rng(seed)
    src = np.empty(n * m, dtype=np.int64)
    dst = np.empty(n * m, dtype=np.int64)
    ends = np.empty(2 * n * m, dtype=np.int64)
    k = e = 0
    for i in range(m + 1):
        for j in range(i):
            src[k], dst[k] = i, j
            ends[e], ends[e + 1] = i, j
            k += 1
            e += 2
    draws = rng.random((n, m))
    for v in range(m + 1, n):
        t = ends[(draws[v] * e).astype(np.int64)]
        src[k:k + m] = v
        dst[k:k + m] = t
        ends[e:e + m] = v
        ends[e + m:e + 2 * m] = t
        k += m
        e += 2 * m
    return src[:k], dst[:k]


@pytest.fixture
def k3():
    return complete_graph(3)


@pytest.fixture
def star4():
    return star_graph(4)


@pytest.fixture
def p3():
    return path_graph(3)


@pytest.fixture
def single_edge():
    return Graph.from_edges([("a", "b")])


@pytest.fixture(scope="session")
def corpus():
    """50 random connected graphs, n in [5, 60], edge density in [0.1, 0.6]."""
    return random_corpus(seed=20240601, size=50)
