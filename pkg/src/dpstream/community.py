"""Private community division and the reuse-or-repartition judgment."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .dp import NoiseSource, exponential_choose, laplace_perturb
from .graph import Snapshot

DEFAULT_GROUP_SIZE = 20
DEFAULT_RHO = 0.5


@dataclass(frozen=True)
class CommunityPartition:
    labels: np.ndarray = field(repr=False)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).copy()
        if labels.size:
            k = int(labels.max()) + 1
            if labels.min() < 0 or np.any(np.bincount(labels, minlength=k) == 0):
                raise ValueError("community ids must be dense 0..K-1 with no empty id")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, labels) -> "CommunityPartition":
        """Relabel arbitrary ids densely, in order of first appearance."""
        labels = np.asarray(labels, dtype=np.int64)
        if not labels.size:
            return cls(labels)
        _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        return cls(rank[inv])

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    @property
    def num_communities(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def members(self) -> list[np.ndarray]:
        order = np.argsort(self.labels, kind="stable")
        bounds = np.cumsum(np.bincount(self.labels, minlength=self.num_communities))
        return np.split(order, bounds[:-1]) if self.labels.size else []

    def __eq__(self, other):
        if not isinstance(other, CommunityPartition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash(self.labels.tobytes())


@dataclass(frozen=True)
class SuperNodeGraph:
    """Random node groups with exact edge counts between and within them.

    ``weights[a, b]`` (a != b) counts edges between groups a and b and is
    symmetric; ``weights[a, a]`` counts edges inside group a.
    """

    members: tuple[np.ndarray, ...]
    group_of: np.ndarray
    weights: np.ndarray

    @property
    def total_weight(self) -> float:
        return float(np.triu(self.weights).sum())


def random_supernode_merge(s: Snapshot, group_size: int, ns: NoiseSource) -> SuperNodeGraph:
    if group_size < 1:
        raise ValueError("group_size must be >= 1")
    n = s.num_nodes
    order = ns.permutation(n)
    group_of = np.empty(n, dtype=np.int64)
    group_of[order] = np.arange(n) // group_size
    k = -(-n // group_size)
    gu, gv = group_of[s.edges[:, 0]], group_of[s.edges[:, 1]]
    w = np.zeros((k, k))
    np.add.at(w, (np.minimum(gu, gv), np.maximum(gu, gv)), 1.0)
    w = w + np.triu(w, 1).T
    members = tuple(order[i:i + group_size] for i in range(0, n, group_size))
    return SuperNodeGraph(members, group_of, w)


# ---------------------------------------------------------------------------
# Louvain

def _as_adjacency(weights) -> sparse.csr_matrix:
    """Weight convention (diag = self-loop weight) to adjacency (diag doubled)."""
    w = sparse.csr_matrix(weights, dtype=float)
    if (w != w.T).nnz:
        raise ValueError("weights must be symmetric")
    if w.nnz and w.data.min() < 0:
        raise ValueError("weights must be non-negative")
    return (w + sparse.diags(w.diagonal())).tocsr()


def _modularity_adj(a: sparse.csr_matrix, labels: np.ndarray) -> float:
    m2 = a.sum()
    if m2 <= 0:
        return 0.0
    k = np.asarray(a.sum(axis=1)).ravel()
    coo = a.tocoo()
    inside = coo.data[labels[coo.row] == labels[coo.col]].sum()
    tot = np.bincount(labels, weights=k)
    return float(inside / m2 - np.sum((tot / m2) ** 2))


def modularity(weights, labels) -> float:
    """Newman modularity of ``labels`` on a weighted graph (diag = self-loops)."""
    return _modularity_adj(_as_adjacency(weights), np.asarray(labels, dtype=np.int64))


def _local_moves(a: sparse.csr_matrix, order: np.ndarray,
                 start: np.ndarray | None = None) -> np.ndarray:
    n = a.shape[0]
    k = np.asarray(a.sum(axis=1)).ravel()
    m2 = k.sum()
    comm = np.arange(n) if start is None else start.copy()
    tot = np.bincount(comm, weights=k, minlength=n)
    indptr, indices, data = a.indptr, a.indices, a.data
    moved = True
    while moved:
        moved = False
        for i in order:
            ci = comm[i]
            links: dict[int, float] = {}
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                if j != i:
                    links[comm[j]] = links.get(comm[j], 0.0) + data[p]
            tot[ci] -= k[i]
            best, best_gain = ci, links.get(ci, 0.0) - tot[ci] * k[i] / m2
            for c, w in links.items():
                gain = w - tot[c] * k[i] / m2
                if gain > best_gain + 1e-12:
                    best, best_gain = c, gain
            tot[best] += k[i]
            if best != ci:
                comm[i] = best
                moved = True
    return comm


def _louvain_once(a: sparse.csr_matrix, ns: NoiseSource | None, tol: float):
    n = a.shape[0]
    labels = np.arange(n)
    q = _modularity_adj(a, labels)
    level = a
    while True:
        size = level.shape[0]
        order = ns.permutation(size) if ns is not None else np.arange(size)
        comm = CommunityPartition.from_labels(_local_moves(level, order)).labels
        k = int(comm.max()) + 1
        if k == size:
            break
        new_labels = comm[labels]
        new_q = _modularity_adj(a, new_labels)
        if new_q - q < tol:
            break
        labels, q = new_labels, new_q
        p = sparse.csr_matrix((np.ones(size), (np.arange(size), comm)), shape=(size, k))
        level = (p.T @ level @ p).tocsr()
    # node-level polish on the original graph; only ever raises modularity
    order = ns.permutation(n) if ns is not None else np.arange(n)
    polished = _local_moves(a, order, labels)
    new_q = _modularity_adj(a, polished)
    if new_q > q:
        labels, q = polished, new_q
    return labels, q


def louvain(weights, ns: NoiseSource | None = None, tol: float = 1e-7,
            restarts: int = 1) -> CommunityPartition:
    """Greedy two-phase modularity maximisation (local moves, then aggregation).

    Node visiting order at every level is a permutation drawn from ``ns``
    (natural order when ``ns`` is None), so results are seed-deterministic.
    With ``restarts > 1`` the best of several visiting orders is kept.
    """
    a = _as_adjacency(weights)
    n = a.shape[0]
    if n == 0 or a.sum() <= 0:
        return CommunityPartition.from_labels(np.arange(n))
    best, best_q = None, -np.inf
    for _ in range(restarts if ns is not None else 1):
        labels, q = _louvain_once(a, ns, tol)
        if q > best_q + 1e-12:
            best, best_q = labels, q
    return CommunityPartition.from_labels(best)


# ---------------------------------------------------------------------------
# private division

def _neighbor_lists(s: Snapshot):
    a = s.adjacency()
    return a.indptr, a.indices


def comm_div(s: Snapshot, eps_c: float, group_size: int = DEFAULT_GROUP_SIZE,
             ns: NoiseSource | None = None, rho: float = DEFAULT_RHO) -> CommunityPartition:
    """Partition ``s`` privately with total budget ``eps_c``.

    A ``rho`` share perturbs the supernode graph that Louvain runs on; the
    rest drives one exponential-mechanism reassignment pass over the nodes,
    scored by each node's edge count into every community.
    """
    if not eps_c > 0:
        raise ValueError(f"eps_c must be positive, got {eps_c}")
    if not 0 < rho < 1:
        raise ValueError("rho must be in (0, 1)")
    ns = ns if ns is not None else NoiseSource()
    n = s.num_nodes
    if n == 0:
        return CommunityPartition(np.empty(0, dtype=np.int64))

    sg = random_supernode_merge(s, group_size, ns)
    iu = np.triu_indices(len(sg.members))
    noisy = np.maximum(laplace_perturb(sg.weights[iu], eps_c * rho, 1.0, ns), 0.0)
    w = np.zeros_like(sg.weights)
    w[iu] = noisy
    w = w + np.triu(w, 1).T
    labels = louvain(w, ns).labels[sg.group_of].copy()

    k = int(labels.max()) + 1
    candidates = list(range(k))
    indptr, indices = _neighbor_lists(s)
    eps_ref = eps_c * (1.0 - rho)
    for v in ns.permutation(n):
        scores = np.bincount(labels[indices[indptr[v]:indptr[v + 1]]], minlength=k)
        labels[v] = exponential_choose(candidates, scores, eps_ref, 1.0, ns)
    return CommunityPartition.from_labels(labels)


class DecisionKind(enum.Enum):
    INITIAL = "initial"
    REPARTITION = "repartition"
    REUSE = "reuse"


@dataclass(frozen=True)
class CommunityDecision:
    kind: DecisionKind
    partition: CommunityPartition
    delta_e: float
    eps_c_spent: float

    @property
    def reused(self) -> bool:
        return self.kind is DecisionKind.REUSE


def extend_partition(prev: CommunityPartition, num_nodes: int, ns: NoiseSource) -> CommunityPartition:
    """Keep old assignments; send each new node to a uniformly random existing community."""
    n_new = num_nodes - prev.num_nodes
    if n_new < 0:
        raise ValueError("node universe shrank between timestamps")
    k = prev.num_communities
    extra = ns.integers(k, n_new) if k else np.zeros(n_new, dtype=np.int64)
    return CommunityPartition(np.concatenate([prev.labels, extra]).astype(np.int64))


def determine(t: int, m_pert_t: float, m_pert_prev: float | None, s: Snapshot,
              prev: CommunityPartition | None, threshold: float, eps_c: float,
              ns: NoiseSource, group_size: int = DEFAULT_GROUP_SIZE,
              rho: float = DEFAULT_RHO, force_repartition: bool = False) -> CommunityDecision:
    """Reuse the previous partition unless the noisy edge count moved by more
    than ``threshold``; the first timestamp always partitions."""
    if t < 1:
        raise ValueError("timestamps start at 1")
    if t == 1:
        return CommunityDecision(DecisionKind.INITIAL, comm_div(s, eps_c, group_size, ns, rho),
                                 0.0, eps_c)
    if prev is None or m_pert_prev is None:
        raise ValueError(f"t={t}: previous partition and edge count are required")
    delta_e = abs(m_pert_t - m_pert_prev)
    if force_repartition or delta_e > threshold:
        return CommunityDecision(DecisionKind.REPARTITION,
                                 comm_div(s, eps_c, group_size, ns, rho), delta_e, eps_c)
    return CommunityDecision(DecisionKind.REUSE, extend_partition(prev, s.num_nodes, ns),
                             delta_e, 0.0)
