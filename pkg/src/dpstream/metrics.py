"""Utility metrics comparing an original snapshot with a synthetic one."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Snapshot, degrees

METRICS = ("eigen_overlap", "degree_kl", "assortativity_re", "density_re", "clustering_re")

KL_SMOOTHING = 1e-9
RE_FLOOR = 1e-12


@dataclass(frozen=True)
class MetricValue:
    name: str
    value: float
    timestamp: int = -1
    flagged: bool = False


def eigenvector_centrality(s: Snapshot, max_iter: int = 1000, tol: float = 1e-9) -> np.ndarray:
    """Principal eigenvector of the adjacency matrix by power iteration.

    Iterates on ``A + I`` (same eigenvectors) so bipartite graphs converge.
    Returns zeros for a graph without edges.
    """
    n = s.num_nodes
    if n == 0 or not len(s.edges):
        return np.zeros(n)
    a = s.adjacency()
    x = np.full(n, 1.0 / math.sqrt(n))
    for _ in range(max_iter):
        y = a @ x + x
        y /= np.linalg.norm(y)
        if np.linalg.norm(y - x) <= tol * np.linalg.norm(y):
            x = y
            break
        x = y
    return x


def top_nodes(centrality: np.ndarray, k: int) -> np.ndarray:
    # ties go to the smaller node id
    order = np.lexsort((np.arange(len(centrality)), -centrality))
    return order[:k]


def eigen_node_overlap(orig: Snapshot, syn: Snapshot, fraction: float = 0.01) -> float:
    n = max(orig.num_nodes, syn.num_nodes)
    if n == 0 or not len(orig.edges) or not len(syn.edges):
        return 0.0
    k = math.ceil(fraction * n)
    a = top_nodes(eigenvector_centrality(orig), k)
    b = top_nodes(eigenvector_centrality(syn), k)
    return len(np.intersect1d(a, b)) / k


def degree_histogram(s: Snapshot, max_degree: int | None = None) -> np.ndarray:
    d = degrees(s).astype(np.int64)
    size = (max_degree if max_degree is not None else (d.max() if d.size else 0)) + 1
    return np.bincount(d, minlength=size).astype(float)


def kl_divergence(p, q, smoothing: float = KL_SMOOTHING) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    p = p / p.sum() if p.sum() > 0 else np.full_like(p, 1.0 / len(p))
    q = q / q.sum() if q.sum() > 0 else np.full_like(q, 1.0 / len(q))
    p = (p + smoothing) / (1 + smoothing * len(p))
    q = (q + smoothing) / (1 + smoothing * len(q))
    return float(np.sum(p * np.log(p / q)))


def degree_kl(orig: Snapshot, syn: Snapshot) -> float:
    do, ds = degrees(orig), degrees(syn)
    top = int(max(do.max() if do.size else 0, ds.max() if ds.size else 0))
    if not do.size and not ds.size:
        return 0.0
    return max(kl_divergence(degree_histogram(orig, top), degree_histogram(syn, top)), 0.0)


def assortativity(s: Snapshot) -> float:
    """Degree Pearson correlation over edge endpoints; NaN when undefined."""
    if not len(s.edges):
        return float("nan")
    d = degrees(s)
    x = np.concatenate([d[s.edges[:, 0]], d[s.edges[:, 1]]])
    y = np.concatenate([d[s.edges[:, 1]], d[s.edges[:, 0]]])
    sx, sy = x.std(), y.std()
    if sx == 0 or sy == 0:
        return float("nan")
    return float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))


def density(s: Snapshot) -> float:
    n = s.num_nodes
    if n < 2:
        return 0.0
    return 2.0 * len(s.edges) / (n * (n - 1))


def transitivity(s: Snapshot) -> float:
    """Global clustering: 3 * triangles / connected triples; NaN without triples."""
    if not len(s.edges):
        return float("nan")
    a = s.adjacency()
    d = np.asarray(a.sum(axis=1)).ravel()
    triples = float(np.sum(d * (d - 1)))
    if triples == 0:
        return float("nan")
    closed = float((a @ a).multiply(a).sum())
    return closed / triples


def relative_error(orig_value: float, syn_value: float) -> tuple[float, bool]:
    """RE with a floored denominator; an undefined original or synthetic value
    falls back to the absolute difference (NaN taken as 0) and is flagged."""
    if math.isnan(orig_value) or math.isnan(syn_value):
        a = 0.0 if math.isnan(orig_value) else orig_value
        b = 0.0 if math.isnan(syn_value) else syn_value
        return abs(a - b), True
    return abs(orig_value - syn_value) / max(abs(orig_value), RE_FLOOR), False


def assortativity_re(orig: Snapshot, syn: Snapshot) -> float:
    return relative_error(assortativity(orig), assortativity(syn))[0]


def density_re(orig: Snapshot, syn: Snapshot) -> float:
    return relative_error(density(orig), density(syn))[0]


def clustering_re(orig: Snapshot, syn: Snapshot) -> float:
    return relative_error(transitivity(orig), transitivity(syn))[0]


_SCALARS = {"assortativity_re": assortativity, "density_re": density,
            "clustering_re": transitivity}


def evaluate(orig: Snapshot, syn: Snapshot, names=METRICS, timestamp: int | None = None,
             fraction: float = 0.01) -> list[MetricValue]:
    t = orig.timestamp if timestamp is None else timestamp
    out = []
    for name in names:
        if name == "eigen_overlap":
            out.append(MetricValue(name, eigen_node_overlap(orig, syn, fraction), t))
        elif name == "degree_kl":
            out.append(MetricValue(name, degree_kl(orig, syn), t))
        elif name in _SCALARS:
            f = _SCALARS[name]
            value, flagged = relative_error(f(orig), f(syn))
            out.append(MetricValue(name, value, t, flagged))
        else:
            raise ValueError(f"unknown metric {name!r}")
    return out


@dataclass
class MetricsReport:
    """Metric records keyed by run. Aggregates average each run over its
    timestamps, then take mean and population std across runs."""

    records: list[tuple[int, int, MetricValue]] = field(default_factory=list)

    def add(self, run: int, seed: int, values):
        self.records.extend((run, seed, mv) for mv in values)

    def run_means(self, name: str) -> np.ndarray:
        runs: dict[int, list[float]] = {}
        for run, _, mv in self.records:
            if mv.name == name:
                runs.setdefault(run, []).append(mv.value)
        return np.array([np.mean(v) for _, v in sorted(runs.items())])

    def metric_names(self) -> list[str]:
        return list(dict.fromkeys(mv.name for _, _, mv in self.records))

    def aggregate(self) -> dict[str, tuple[float, float]]:
        out = {}
        for name in self.metric_names():
            means = self.run_means(name)
            out[name] = (float(np.mean(means)), float(np.std(means)))
        return out
