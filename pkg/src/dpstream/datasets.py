"""Small synthetic streams for tests and demos."""

from __future__ import annotations

import numpy as np

from .graph import GraphStream, Snapshot


def planted_partition(sizes, p_in: float, p_out: float, seed=None, timestamp: int = 1) -> Snapshot:
    """Stochastic block model with equal in/out probabilities per block."""
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = len(labels)
    i, j = np.triu_indices(n, 1)
    p = np.where(labels[i] == labels[j], p_in, p_out)
    hit = rng.random(len(p)) < p
    return Snapshot(timestamp, n, np.stack([i[hit], j[hit]], axis=1))


def constant_stream(s: Snapshot, length: int) -> GraphStream:
    return GraphStream(tuple(Snapshot(t, s.num_nodes, s.edges) for t in range(1, length + 1)))


def evolving_stream(sizes, p_in: float, p_out: float, length: int, churn: float = 0.05,
                    growth: int = 0, seed=None) -> GraphStream:
    """Planted-partition stream where each step rewires a ``churn`` fraction of
    edges and appends ``growth`` nodes to random blocks."""
    rng = np.random.default_rng(seed)
    sizes = list(sizes)
    labels = np.repeat(np.arange(len(sizes)), sizes)
    s = planted_partition(sizes, p_in, p_out, rng)
    edges = {tuple(e) for e in s.edges.tolist()}
    snaps = [Snapshot(1, len(labels), np.array(sorted(edges)).reshape(-1, 2))]
    for t in range(2, length + 1):
        labels = np.concatenate([labels, rng.integers(0, len(sizes), growth)])
        n = len(labels)
        drop = rng.random(len(edges)) < churn
        kept = [e for e, d in zip(sorted(edges), drop) if not d]
        need = len(edges) - len(kept) + growth * 2
        edges = set(map(tuple, kept))
        while need > 0:
            u, v = rng.integers(0, n, 2)
            if u == v:
                continue
            same = labels[u] == labels[v]
            if rng.random() < (p_in if same else p_out) / p_in:
                e = (min(u, v), max(u, v))
                if e not in edges:
                    edges.add(e)
                    need -= 1
        snaps.append(Snapshot(t, n, np.array(sorted(edges)).reshape(-1, 2)))
    return GraphStream(tuple(snaps))


def degree_corrected_partition(sizes, mean_degree: float, mixing: float = 0.1,
                               gamma: float = 2.5, seed=None, timestamp: int = 1) -> Snapshot:
    """Degree-corrected block model with Pareto node weights.

    A ``mixing`` share of every node's expected degree goes to other blocks.
    Heavy-tailed weights give hubs, so top-fraction centrality is meaningful.
    """
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = len(labels)
    w = rng.pareto(gamma - 1, n) + 1
    w *= mean_degree / w.mean()
    block_w = np.bincount(labels, weights=w)
    i, j = np.triu_indices(n, 1)
    same = labels[i] == labels[j]
    wij = w[i] * w[j]
    p = np.where(same, (1 - mixing) * wij / block_w[labels[i]],
                 mixing * wij / (w.sum() - block_w[labels[i]]))
    hit = rng.random(len(p)) < np.clip(p, 0, 1)
    return Snapshot(timestamp, n, np.stack([i[hit], j[hit]], axis=1))
