from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .graph import Graph


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Per-node centrality values bound to the graph they were computed on."""

    metric: str
    values: np.ndarray
    graph_fingerprint: str
    params: dict = field(default_factory=dict)
    converged: bool = True
    warnings: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    @property
    def descriptor(self) -> dict:
        return {"metric": self.metric, "parameters": self.params}


def make_scores(g: Graph, metric: str, values: np.ndarray, **kw) -> ScoreVector:
    values = np.asarray(values, dtype=np.float64)
    values.setflags(write=False)
    return ScoreVector(metric, values, g.fingerprint, **kw)


def format_float(x: float) -> str:
    return repr(float(x))


def write_scores_csv(g: Graph, scores: ScoreVector, fh: IO[str]) -> None:
    """``original_label,score`` rows, descending score, ties broken by label."""
    if scores.graph_fingerprint != g.fingerprint:
        raise ValueError("scores were computed on a different graph")
    order = sorted(range(g.n), key=lambda i: (-scores.values[i], g.labels[i]))
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["original_label", "score"])
    for i in order:
        w.writerow([g.labels[i], format_float(scores.values[i])])


def write_sidecar(scores: ScoreVector, fh: IO[str], manifest: str | None = None) -> None:
    doc = dict(scores.descriptor)
    doc["graph_fingerprint"] = scores.graph_fingerprint
    doc["converged"] = scores.converged
    if scores.warnings:
        doc["warnings"] = list(scores.warnings)
    if manifest is not None:
        doc["manifest"] = manifest
    json.dump(doc, fh, indent=2, sort_keys=True)
    fh.write("\n")
