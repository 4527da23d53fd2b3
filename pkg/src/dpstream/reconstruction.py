"""Rebuild a graph from noisy degrees and inter-community edge counts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .community import CommunityPartition
from .dp import NoiseSource
from .graph import Snapshot

IN, OUT = 0, 1


@dataclass(frozen=True, eq=False)
class SyntheticSnapshot(Snapshot):
    seed: int | None = None
    variant: str = ""


def intra_prob(dx: float, dy: float, total: float) -> float:
    """Chung-Lu edge probability inside one community, clamped to [0, 1]."""
    if total <= 0:
        return 0.0
    return float(min(max(dx * dy / total, 0.0), 1.0))


def expected_cross(h_x: float, v_ab: float, v_row_sum: float) -> float:
    """Share of a node's outside degree expected to land in community b."""
    if v_row_sum <= 0:
        return 0.0
    return h_x * v_ab / v_row_sum


def inter_prob(e_xb: float, e_ya: float, denom: float) -> float:
    """Edge probability between x in C_a and y in C_b. ``denom`` is the sum of
    expected edges from all of C_b towards C_a."""
    if denom <= 0:
        return 0.0
    return float(min(max(e_xb * e_ya / denom, 0.0), 1.0))


def _bernoulli_pairs(p: np.ndarray, ns: NoiseSource) -> np.ndarray:
    return ns.uniform(p.shape) < p


def gen_intra(part: CommunityPartition, d_in_hat: np.ndarray, ns: NoiseSource) -> np.ndarray:
    chunks = []
    for members in part.members():
        if len(members) < 2:
            continue
        d = d_in_hat[members]
        total = d.sum()
        if total <= 0:
            continue
        i, j = np.triu_indices(len(members), 1)
        p = np.clip(d[i] * d[j] / total, 0.0, 1.0)
        hit = _bernoulli_pairs(p, ns)
        chunks.append(np.stack([members[i[hit]], members[j[hit]]], axis=1))
    return np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)


def expected_cross_matrix(part: CommunityPartition, d_out_hat: np.ndarray,
                          v_hat: np.ndarray) -> np.ndarray:
    """``E[x, b]``: expected edges from node x to community b (0 for its own)."""
    v = v_hat.copy()
    np.fill_diagonal(v, 0.0)
    row = v.sum(axis=1)
    share = np.divide(v, row[:, None], out=np.zeros_like(v), where=row[:, None] > 0)
    return d_out_hat[:, None] * share[part.labels]


def inter_block_probs(e_x: np.ndarray, e_y: np.ndarray) -> np.ndarray:
    denom = e_y.sum()
    if denom <= 0:
        return np.zeros((len(e_x), len(e_y)))
    return np.clip(np.outer(e_x, e_y) / denom, 0.0, 1.0)


def gen_inter(part: CommunityPartition, d_out_hat: np.ndarray, v_hat: np.ndarray,
              ns: NoiseSource) -> np.ndarray:
    members = part.members()
    e = expected_cross_matrix(part, d_out_hat, v_hat)
    chunks = []
    a_idx, b_idx = np.nonzero(np.triu(v_hat, 1) > 0)
    for a, b in zip(a_idx, b_idx):
        ca, cb = members[a], members[b]
        p = inter_block_probs(e[ca, b], e[cb, a])
        hit = _bernoulli_pairs(p, ns)
        x, y = np.nonzero(hit)
        chunks.append(np.stack([ca[x], cb[y]], axis=1))
    return np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)


@dataclass
class EdgeDelta:
    """Deficits between target and generated degrees, ``2N`` entries.

    Entry ``2 * x + side`` belongs to node x, side 0 = intra, 1 = inter.
    """

    delta_nodes: np.ndarray
    delta_edges: float


def _side_degrees(edges: np.ndarray, labels: np.ndarray, n: int):
    u, v = edges[:, 0], edges[:, 1]
    intra = labels[u] == labels[v]
    h_in = np.bincount(np.concatenate([u[intra], v[intra]]), minlength=n)
    h_out = np.bincount(np.concatenate([u[~intra], v[~intra]]), minlength=n)
    return h_in.astype(np.int64), h_out.astype(np.int64)


def edge_delta(edges: np.ndarray, part: CommunityPartition, d_in_hat, d_out_hat,
               m_pert: float) -> EdgeDelta:
    n = len(d_in_hat)
    h_in, h_out = _side_degrees(edges, part.labels[:n], n)
    dm = np.empty(2 * n)
    dm[0::2] = d_in_hat - h_in
    dm[1::2] = d_out_hat - h_out
    return EdgeDelta(dm, _edge_target(m_pert) - len(edges))


def _edge_target(m_pert: float) -> int:
    return max(int(np.round(m_pert)), 0)


@dataclass
class _Workspace:
    labels: np.ndarray
    adj: list[set] = field(default_factory=list)
    h: np.ndarray = None
    m: int = 0

    @classmethod
    def build(cls, edges: np.ndarray, labels: np.ndarray):
        n = len(labels)
        adj = [set() for _ in range(n)]
        for u, v in edges:
            adj[u].add(int(v))
            adj[v].add(int(u))
        h_in, h_out = _side_degrees(edges, labels, n)
        return cls(labels, adj, np.stack([h_in, h_out], axis=1), len(edges))

    def side(self, u: int, v: int) -> int:
        return IN if self.labels[u] == self.labels[v] else OUT

    def add(self, u: int, v: int):
        self.adj[u].add(v)
        self.adj[v].add(u)
        s = self.side(u, v)
        self.h[u, s] += 1
        self.h[v, s] += 1
        self.m += 1

    def remove(self, u: int, v: int):
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        s = self.side(u, v)
        self.h[u, s] -= 1
        self.h[v, s] -= 1
        self.m -= 1

    def edges(self) -> np.ndarray:
        out = [(u, v) for u, nb in enumerate(self.adj) for v in nb if u < v]
        return np.array(out, dtype=np.int64).reshape(-1, 2)


def post_process(edges: np.ndarray, part: CommunityPartition, d_in_hat: np.ndarray,
                 d_out_hat: np.ndarray, m_pert: float, ns: NoiseSource) -> np.ndarray:
    """Add or remove edges node by node, largest degree deficit first, until
    the edge count reaches the rounded noisy total.

    Each node's quota is recomputed from the current graph when its turn
    comes and never exceeds the edges still missing (or in excess).
    """
    n = len(d_in_hat)
    labels = part.labels[:n]
    target = _edge_target(m_pert)
    ws = _Workspace.build(np.asarray(edges, dtype=np.int64).reshape(-1, 2), labels)
    if ws.m == target:
        return ws.edges()
    est = np.stack([np.asarray(d_in_hat, float), np.asarray(d_out_hat, float)], axis=1)
    deficit = (est - ws.h).ravel()
    adding = ws.m < target
    order = np.argsort(-deficit if adding else deficit, kind="stable")
    nodes = np.arange(n)
    for entry in order:
        u, side = divmod(int(entry), 2)
        gap = est[u, side] - ws.h[u, side]
        if adding:
            quota = min(int(np.round(max(gap, 0.0))), target - ws.m)
            if quota <= 0:
                continue
            same = labels == labels[u]
            pool = nodes[same if side == IN else ~same]
            if ws.adj[u]:
                pool = pool[~np.isin(pool, list(ws.adj[u]))]
            pool = pool[pool != u]
            if not len(pool):
                continue
            for v in ns.choice(pool, size=min(quota, len(pool)), replace=False):
                ws.add(u, int(v))
            if ws.m >= target:
                break
        else:
            quota = min(int(np.round(max(-gap, 0.0))), ws.m - target)
            if quota <= 0:
                continue
            pool = np.array(sorted(v for v in ws.adj[u] if ws.side(u, v) == side), dtype=np.int64)
            if not len(pool):
                continue
            for v in ns.choice(pool, size=min(quota, len(pool)), replace=False):
                ws.remove(u, int(v))
            if ws.m <= target:
                break
    return ws.edges()


def reconstruct(part: CommunityPartition, d_in_hat: np.ndarray, d_out_hat: np.ndarray,
                v_hat: np.ndarray, m_pert: float, ns: NoiseSource,
                post: bool = True) -> np.ndarray:
    edges = np.concatenate([gen_intra(part, d_in_hat, ns),
                            gen_inter(part, d_out_hat, v_hat, ns)])
    if post:
        edges = post_process(edges, part, d_in_hat, d_out_hat, m_pert, ns)
    return edges
