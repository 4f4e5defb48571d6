"""Immutable simple undirected graphs and edge-list ingestion.

Edge lists use the SNAP text layout: one ``u v`` pair per line, whitespace
separated, with ``#`` starting a comment line.  Vertex ids are taken as-is,
so ``n`` defaults to ``max id + 1`` and unused ids become isolated vertices.
"""

from __future__ import annotations

import io
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

import numpy as np

from .errors import BoundsError, ParameterError, ParseError


@dataclass(frozen=True)
class IngestOptions:
    n_override: int | None = None
    drop_self_loops: bool = True
    dedupe: bool = True


@dataclass
class IngestSummary:
    lines: int = 0
    comments: int = 0
    pairs: int = 0
    self_loops_dropped: int = 0
    duplicates_dropped: int = 0
    n: int = 0
    m: int = 0

    def as_lines(self) -> list[str]:
        return [f"{k}={v}" for k, v in vars(self).items()]

    def write(self, stream: IO[str] | None = None) -> None:
        stream = stream or sys.stderr
        for line in self.as_lines():
            print(line, file=stream)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``edges`` is an ``(m, 2)`` int64 array with ``u < v`` in every row.  The
    adjacency index is CSR: neighbours of ``v`` are
    ``indices[indptr[v]:indptr[v+1]]`` in ascending order.
    """

    n: int
    edges: np.ndarray
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        n = int(n)
        if n < 0:
            raise ParameterError("vertex count must be non-negative")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0:
                raise BoundsError("negative vertex id")
            if e.max() >= n:
                raise BoundsError(f"vertex id {int(e.max())} out of range for n={n}")
            if np.any(e[:, 0] == e[:, 1]):
                raise ParameterError("self-loops are not allowed")
        e = np.sort(e, axis=1)
        if len(e) and len(np.unique(e[:, 0] * n + e[:, 1])) != len(e):
            raise ParameterError("duplicate edges are not allowed")

        # CSR with sorted neighbour lists
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        indices = dst[order]
        counts = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n, _readonly(np.ascontiguousarray(e)), _readonly(indptr), _readonly(indices))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    __hash__ = None


def degree_array(g: Graph) -> np.ndarray:
    return np.diff(g.indptr)


def active_vertex_count(g: Graph) -> int:
    return int(np.count_nonzero(degree_array(g)))


def iter_edge_pairs(source: Iterable[str], name: str | None = None,
                    summary: IngestSummary | None = None) -> Iterator[tuple[int, int]]:
    """Yield raw ``(u, v)`` pairs from edge-list lines, raising on malformed input."""
    for lineno, line in enumerate(source, 1):
        if summary is not None:
            summary.lines += 1
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            if summary is not None:
                summary.comments += 1
            continue
        parts = s.split()
        if len(parts) < 2:
            raise ParseError(f"expected two vertex ids, got {s!r}", lineno, name)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer vertex id in {s!r}", lineno, name) from None
        if u < 0 or v < 0:
            raise ParseError(f"negative vertex id in {s!r}", lineno, name)
        yield u, v


def ingest(source: Iterable[str], opts: IngestOptions | None = None,
           name: str | None = None) -> tuple[Graph, IngestSummary]:
    opts = opts or IngestOptions()
    summary = IngestSummary()
    flat = np.fromiter(
        (x for pair in iter_edge_pairs(source, name, summary) for x in pair),
        dtype=np.int64,
    )
    pairs = flat.reshape(-1, 2)
    summary.pairs = len(pairs)

    if opts.n_override is not None:
        n = int(opts.n_override)
        if len(pairs) and pairs.max() >= n:
            raise BoundsError(f"vertex id {int(pairs.max())} >= n_override={n}")
    else:
        n = int(pairs.max()) + 1 if len(pairs) else 0

    loops = pairs[:, 0] == pairs[:, 1]
    summary.self_loops_dropped = int(loops.sum())
    if summary.self_loops_dropped:
        if not opts.drop_self_loops:
            raise ParseError("self-loop in input and drop_self_loops is off", source=name)
        pairs = pairs[~loops]

    pairs = np.sort(pairs, axis=1)
    if len(pairs):
        _, first = np.unique(pairs[:, 0] * max(n, 1) + pairs[:, 1], return_index=True)
        ndup = len(pairs) - len(first)
        if ndup:
            if not opts.dedupe:
                raise ParseError("duplicate edge in input and dedupe is off", source=name)
            pairs = pairs[np.sort(first)]
        summary.duplicates_dropped = ndup

    g = Graph.from_edges(n, pairs)
    summary.n, summary.m = g.n, g.m
    return g, summary


def load_edge_list(source: Iterable[str], opts: IngestOptions | None = None) -> Graph:
    return ingest(source, opts)[0]


def read_edge_list(path, opts: IngestOptions | None = None) -> tuple[Graph, IngestSummary]:
    with open(path, "r", encoding="utf-8") as fh:
        return ingest(fh, opts, name=str(path))


def write_edge_list(g: Graph, out: IO[str] | str | Path, header: Iterable[str] = ()) -> None:
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as fh:
            write_edge_list(g, fh, header)
        return
    for line in header:
        out.write(f"# {line}\n")
    buf = io.StringIO()
    np.savetxt(buf, g.edges, fmt="%d", delimiter=" ")
    out.write(buf.getvalue())


def compact_ids(g: Graph) -> tuple[Graph, np.ndarray]:
    """Relabel active vertices to ``0..n_a-1`` preserving order.

    Returns the compacted graph and ``old_ids`` with ``old_ids[new] = old``.
    Isolated vertices are dropped.
    """
    old_ids = np.flatnonzero(degree_array(g))
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[old_ids] = np.arange(len(old_ids))
    return Graph.from_edges(len(old_ids), remap[g.edges]), old_ids
