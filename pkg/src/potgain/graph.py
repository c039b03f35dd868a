"""Undirected simple graphs in compressed sparse row (CSR) form.

Every undirected edge {u, v} is stored twice, once in each row, with each
row's neighbour list sorted ascending. Nodes carry their original labels;
internal indices follow first-appearance order in the input.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, EmptyGraphError, ParseError

log = logging.getLogger(__name__)

COMMENT_PREFIXES = ("%", "#")

_spmv_threads = 1


def set_spmv_threads(n: int) -> None:
    """Set the worker count used by :func:`spmv` (1 = sequential, bit-reproducible)."""
    global _spmv_threads
    if n < 1:
        raise ValueError("thread count must be >= 1")
    _spmv_threads = int(n)


@dataclass(frozen=True)
class LoadSummary:
    nodes_read: int = 0
    edges_read: int = 0
    self_loops_dropped: int = 0
    duplicates_collapsed: int = 0
    isolated_dropped: int = 0

    def as_dict(self) -> dict:
        return {
            "nodes_read": self.nodes_read,
            "edges_read": self.edges_read,
            "self_loops_dropped": self.self_loops_dropped,
            "duplicates_collapsed": self.duplicates_collapsed,
            "isolated_dropped": self.isolated_dropped,
        }


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable symmetric adjacency structure.

    Use :func:`load_edge_list` or :meth:`Graph.from_edges` rather than the
    constructor; they enforce the structural invariants.
    """

    row_offsets: np.ndarray
    col_indices: np.ndarray
    labels: tuple[str, ...]
    summary: LoadSummary = field(default_factory=LoadSummary)

    @property
    def n(self) -> int:
        return len(self.row_offsets) - 1

    @property
    def m(self) -> int:
        return len(self.col_indices) // 2

    @cached_property
    def index_of(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def csr(self) -> sp.csr_matrix:
        data = np.ones(len(self.col_indices), dtype=np.float64)
        return sp.csr_matrix(
            (data, self.col_indices, self.row_offsets), shape=(self.n, self.n)
        )

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(np.asarray(self.row_offsets, dtype="<i8").tobytes())
        h.update(np.asarray(self.col_indices, dtype="<i8").tobytes())
        for lab in self.labels:
            h.update(lab.encode("utf-8"))
            h.update(b"\0")
        return h.hexdigest()[:16]

    @cached_property
    def max_degree(self) -> int:
        return int(degrees(self).max())

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, fingerprint={self.fingerprint})"

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[object, object]]) -> "Graph":
        """Build from (label, label) pairs with the same cleaning rules as the loader."""
        index: dict[str, int] = {}
        src, dst = [], []
        for u, v in edges:
            src.append(index.setdefault(str(u), len(index)))
            dst.append(index.setdefault(str(v), len(index)))
        return _build(np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64), list(index))

    @classmethod
    def from_index_arrays(
        cls, src: np.ndarray, dst: np.ndarray, labels: Sequence[str] | None = None
    ) -> "Graph":
        """Build from parallel arrays of integer endpoints (labels default to ``str(i)``)."""
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        n = int(max(src.max(initial=-1), dst.max(initial=-1))) + 1
        if labels is None:
            labels = [str(i) for i in range(n)]
        elif len(labels) < n:
            raise ValueError("fewer labels than node indices")
        return _build(src, dst, list(labels))


def _build(src: np.ndarray, dst: np.ndarray, labels: list[str]) -> Graph:
    edges_read = len(src)
    loops = src == dst
    n_loops = int(loops.sum())
    src, dst = src[~loops], dst[~loops]

    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    n_all = len(labels)
    key = np.unique(lo * max(n_all, 1) + hi)
    duplicates = len(lo) - len(key)
    lo, hi = key // max(n_all, 1), key % max(n_all, 1)

    present = np.zeros(n_all, dtype=bool)
    present[lo] = True
    present[hi] = True
    isolated = n_all - int(present.sum())
    if isolated:
        log.warning("dropping %d isolated node(s)", isolated)
    if not present.any():
        raise EmptyGraphError("graph has no edges after removing self-loops")

    # Renumber surviving nodes, keeping first-appearance order.
    remap = np.cumsum(present) - 1
    lo, hi = remap[lo], remap[hi]
    kept_labels = tuple(lab for lab, keep in zip(labels, present) if keep)
    n = len(kept_labels)

    rows = np.concatenate([lo, hi])
    cols = np.concatenate([hi, lo])
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    row_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=row_offsets[1:])
    cols = cols.astype(np.int64)
    row_offsets.setflags(write=False)
    cols.setflags(write=False)

    summary = LoadSummary(
        nodes_read=n_all,
        edges_read=edges_read,
        self_loops_dropped=n_loops,
        duplicates_collapsed=duplicates,
        isolated_dropped=isolated,
    )
    return Graph(row_offsets, cols, kept_labels, summary)


def load_edge_list(source: str | os.PathLike | IO) -> Graph:
    """Read a whitespace-separated edge list.

    Accepts plain two-column files and KONECT files: ``%``/``#`` lines are
    comments and columns after the second (weights, timestamps) are ignored.
    ``source`` may be a path, a text stream or a binary stream.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return load_edge_list(fh)
    if isinstance(source, io.TextIOBase):
        lines: Iterable = source
    else:
        lines = io.TextIOWrapper(source, encoding="utf-8", errors="replace")

    index: dict[str, int] = {}
    src: list[int] = []
    dst: list[int] = []
    for lineno, line in enumerate(lines, start=1):
        s = line.strip()
        if not s or s.startswith(COMMENT_PREFIXES):
            continue
        tok = s.split()
        if len(tok) < 2:
            raise ParseError(f"expected two node labels, got {len(tok)} token(s)", line=lineno)
        u = index.get(tok[0])
        if u is None:
            u = index[tok[0]] = len(index)
        v = index.get(tok[1])
        if v is None:
            v = index[tok[1]] = len(index)
        src.append(u)
        dst.append(v)
    if not src:
        raise EmptyGraphError("no edges found in input")
    g = _build(np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64), list(index))
    log.info("loaded %r: %s", g, g.summary.as_dict())
    return g


def degrees(g: Graph) -> np.ndarray:
    return np.diff(g.row_offsets)


def spmv(g: Graph, x: np.ndarray, threads: int | None = None) -> np.ndarray:
    """Adjacency action ``y[i] = sum of x[j] over neighbours j of i``.

    With more than one thread the rows are split into contiguous blocks; each
    row is still reduced sequentially, so results match the single-threaded path.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise DimensionError(f"vector of shape {x.shape} does not match n={g.n}")
    threads = _spmv_threads if threads is None else threads
    if threads <= 1 or g.n < 10_000:
        return g.csr @ x
    bounds = np.linspace(0, g.n, threads + 1).astype(int)
    out = np.empty(g.n)

    def work(b):
        lo, hi = bounds[b], bounds[b + 1]
        out[lo:hi] = g.csr[lo:hi] @ x

    with ThreadPoolExecutor(threads) as pool:
        list(pool.map(work, range(threads)))
    return out


def is_connected(g: Graph) -> bool:
    from scipy.sparse.csgraph import connected_components

    ncomp, _ = connected_components(g.csr, directed=False)
    return ncomp == 1


def canonical_edges(g: Graph) -> list[tuple[str, str]]:
    """Edges as label pairs with ``u < v`` lexicographically, sorted."""
    rows = np.repeat(np.arange(g.n), degrees(g))
    mask = rows < g.col_indices
    out = []
    for i, j in zip(rows[mask], g.col_indices[mask]):
        a, b = g.labels[i], g.labels[j]
        out.append((a, b) if a < b else (b, a))
    out.sort()
    return out


def export_edge_list(g: Graph, fh: IO[str]) -> None:
    for a, b in canonical_edges(g):
        fh.write(f"{a} {b}\n")


def export_id_map(g: Graph, fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["internal_index", "original_label"])
    w.writerows(enumerate(g.labels))
