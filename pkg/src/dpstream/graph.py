"""Graph snapshots, streams, and temporal edge-list ingestion.

Node ids are remapped to a dense range ordered by first appearance
(earliest snapshot first, then ascending external id). Because the node
universe is cumulative, the nodes of snapshot ``t`` are exactly
``0 .. num_nodes - 1`` and a node keeps its id for the rest of the stream.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class ParseError(ValueError):
    pass


def _canonical_edges(edges, num_nodes: int | None = None) -> np.ndarray:
    arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    arr = np.sort(arr, axis=1)
    arr = arr[arr[:, 0] != arr[:, 1]]
    arr = np.unique(arr, axis=0)
    if num_nodes is not None and arr.size and (arr.min() < 0 or arr.max() >= num_nodes):
        raise ValueError("edge endpoint outside node range")
    return arr


@dataclass(frozen=True)
class Snapshot:
    """An undirected simple graph over nodes ``0 .. num_nodes - 1``.

    ``edges`` is an ``(m, 2)`` int array with ``u < v`` in each row, rows
    sorted and unique. Self-loops and duplicates are dropped on construction.
    """

    timestamp: int
    num_nodes: int
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = _canonical_edges(self.edges, self.num_nodes)
        arr.setflags(write=False)
        object.__setattr__(self, "edges", arr)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], num_nodes: int | None = None,
                   timestamp: int = 1) -> "Snapshot":
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if num_nodes is None:
            num_nodes = int(arr.max()) + 1 if arr.size else 0
        return cls(timestamp, num_nodes, arr)

    @property
    def nodes(self) -> range:
        return range(self.num_nodes)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def adjacency(self):
        """Symmetric CSR adjacency matrix."""
        from scipy import sparse

        n = self.num_nodes
        u, v = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * len(u))
        return sparse.csr_matrix(
            (data, (np.concatenate([u, v]), np.concatenate([v, u]))), shape=(n, n))

    def __eq__(self, other):
        if not isinstance(other, Snapshot):
            return NotImplemented
        return (self.timestamp == other.timestamp and self.num_nodes == other.num_nodes
                and np.array_equal(self.edges, other.edges))

    def __hash__(self):
        return hash((self.timestamp, self.num_nodes, self.edges.tobytes()))


@dataclass(frozen=True)
class GraphStream:
    snapshots: tuple[Snapshot, ...]

    def __post_init__(self):
        snaps = tuple(self.snapshots)
        for i, s in enumerate(snaps):
            if s.timestamp != i + 1:
                raise ValueError(f"snapshot {i} has timestamp {s.timestamp}, expected {i + 1}")
            if i and s.num_nodes < snaps[i - 1].num_nodes:
                raise ValueError("node universe must not shrink")
        object.__setattr__(self, "snapshots", snaps)

    def __len__(self):
        return len(self.snapshots)

    def __iter__(self):
        return iter(self.snapshots)

    def __getitem__(self, i):
        return self.snapshots[i]

    @property
    def num_nodes(self) -> int:
        return self.snapshots[-1].num_nodes if self.snapshots else 0

    def head(self, k: int) -> "GraphStream":
        return GraphStream(self.snapshots[:k])


def degrees(s: Snapshot) -> np.ndarray:
    return np.bincount(s.edges.ravel(), minlength=s.num_nodes).astype(float)


def edge_count(s: Snapshot) -> int:
    return int(len(s.edges))


def node_count(s: Snapshot) -> int:
    return int(s.num_nodes)


# ---------------------------------------------------------------------------
# ingestion

@dataclass(frozen=True)
class WindowRule:
    """Maps raw timestamps to snapshot indices.

    ``width=None`` gives one snapshot per distinct raw value; otherwise raw
    values are bucketed as ``(t - t_min) // width`` and empty buckets become
    empty snapshots so indices stay contiguous.
    """

    width: int | None = None

    def assign(self, raw: np.ndarray) -> np.ndarray:
        if self.width is None:
            _, idx = np.unique(raw, return_inverse=True)
            return idx.astype(np.int64)
        if self.width < 1:
            raise ValueError("bucket width must be >= 1")
        return ((raw - raw.min()) // self.width).astype(np.int64)


DISTINCT = WindowRule()

# "# nodes <t> <N>" declares external ids 0..N-1 present at raw timestamp t.
_NODES_DIRECTIVE = "# nodes"


def _read_triples(text: str):
    rows: list[tuple[int, int, int]] = []
    declared: list[tuple[int, int]] = []
    for lineno, line in enumerate(io.StringIO(text), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith(_NODES_DIRECTIVE):
                parts = line[len(_NODES_DIRECTIVE):].split()
                try:
                    declared.append((int(parts[0]), int(parts[1])))
                except (IndexError, ValueError):
                    raise ParseError(f"line {lineno}: malformed nodes directive {line!r}")
            continue
        parts = line.split()
        if len(parts) < 3:
            raise ParseError(f"line {lineno}: expected 'u v t', got {line!r}")
        try:
            rows.append((int(parts[0]), int(parts[1]), int(parts[2])))
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer token in {line!r}")
    return rows, declared


def _build_stream(u: np.ndarray, v: np.ndarray, snap: np.ndarray, n_snaps: int,
                  declared: Sequence[tuple[int, int]] = ()) -> GraphStream:
    # first appearance of every external id (self-loop endpoints do not count)
    keep = u != v
    ext = np.concatenate([u[keep], v[keep]])
    when = np.concatenate([snap[keep], snap[keep]])
    for s_idx, n in declared:
        ext = np.concatenate([ext, np.arange(n, dtype=np.int64)])
        when = np.concatenate([when, np.full(n, s_idx, dtype=np.int64)])
    if ext.size:
        ids, first_when = _first_seen(ext, when)
        order = np.lexsort((ids, first_when))
        ids, first_when = ids[order], first_when[order]
    else:
        ids = np.empty(0, dtype=np.int64)
        first_when = np.empty(0, dtype=np.int64)
    universe = np.searchsorted(first_when, np.arange(n_snaps), side="right")

    # internal id = position in the time-ordered ``ids``
    by_ext = np.argsort(ids, kind="stable")
    ext_sorted = ids[by_ext]

    def lookup(x):
        if not len(ext_sorted):
            return np.full(len(x), -1, dtype=np.int64)
        pos = np.clip(np.searchsorted(ext_sorted, x), 0, len(ext_sorted) - 1)
        return np.where(ext_sorted[pos] == x, by_ext[pos], -1)

    snapshots = []
    mu, mv = lookup(u), lookup(v)
    for k in range(n_snaps):
        sel = (snap == k) & keep
        snapshots.append(Snapshot(k + 1, int(universe[k]), np.stack([mu[sel], mv[sel]], axis=1)))
    return GraphStream(tuple(snapshots))


def _first_seen(ext: np.ndarray, when: np.ndarray):
    order = np.lexsort((when, ext))
    e, w = ext[order], when[order]
    head = np.ones(len(e), dtype=bool)
    head[1:] = e[1:] != e[:-1]
    return e[head], w[head]


def parse_temporal_edges(text: str, window_rule: WindowRule = DISTINCT) -> GraphStream:
    """Parse ``u v t`` lines into a stream with dense, stable node ids."""
    rows, declared = _read_triples(text)
    if not rows and not declared:
        raise ParseError("empty input: no edges found")
    arr = np.array(rows, dtype=np.int64).reshape(-1, 3)
    raw_t = np.concatenate([arr[:, 2], np.array([t for t, _ in declared], dtype=np.int64)])
    idx = window_rule.assign(raw_t)
    n_snaps = int(idx.max()) + 1
    edge_idx = idx[: len(arr)]
    decl = [(int(i), n) for i, (_, n) in zip(idx[len(arr):], declared)]
    return _build_stream(arr[:, 0], arr[:, 1], edge_idx, n_snaps, decl)


def parse_snapshot_files(paths: Sequence[str | os.PathLike]) -> GraphStream:
    """One file per snapshot, ``u v`` per line, in the given order."""
    if not paths:
        raise ParseError("empty input: no snapshot files")
    us, vs, ts = [], [], []
    for k, path in enumerate(paths):
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) < 2:
                    raise ParseError(f"{path}: line {lineno}: expected 'u v', got {line!r}")
                try:
                    us.append(int(parts[0]))
                    vs.append(int(parts[1]))
                except ValueError:
                    raise ParseError(f"{path}: line {lineno}: non-integer token in {line!r}")
                ts.append(k)
    return _build_stream(np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64),
                         np.array(ts, dtype=np.int64), len(paths))


def load_stream(path: str | os.PathLike, fmt: str = "temporal",
                window_rule: WindowRule = DISTINCT) -> GraphStream:
    """Load format ``temporal`` (one file) or ``snapshots`` (a directory or a
    text file listing one snapshot path per line)."""
    if fmt == "temporal":
        with open(path, encoding="utf-8") as fh:
            return parse_temporal_edges(fh.read(), window_rule)
    if fmt == "snapshots":
        if os.path.isdir(path):
            files = sorted(os.path.join(path, f) for f in os.listdir(path)
                           if os.path.isfile(os.path.join(path, f)))
        else:
            base = os.path.dirname(os.path.abspath(path))
            with open(path, encoding="utf-8") as fh:
                files = [os.path.join(base, ln.strip()) for ln in fh
                         if ln.strip() and not ln.startswith("#")]
        return parse_snapshot_files(files)
    raise ValueError(f"unknown format {fmt!r}")


def serialize_stream(stream: Iterable[Snapshot]) -> str:
    """Temporal format with the snapshot index as ``t``.

    A ``# nodes t N`` directive per snapshot preserves isolated nodes and
    empty snapshots, so parsing the output reproduces the stream exactly.
    """
    out = io.StringIO()
    for s in stream:
        out.write(f"{_NODES_DIRECTIVE} {s.timestamp} {s.num_nodes}\n")
        for u, v in s.edges:
            out.write(f"{u} {v} {s.timestamp}\n")
    return out.getvalue()
