"""Seeded randomness and the sampling primitives used by every engine."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import ParameterError
from .graph import Graph

_SEED_LIMIT = 2**64


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Deterministic generator for ``seed``; ``key`` selects an independent sub-stream."""
    seed = int(seed)
    if not 0 <= seed < _SEED_LIMIT:
        raise ParameterError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def uniform_vertex_sample(n: int, q: int, rng: np.random.Generator) -> np.ndarray:
    if q < 0:
        raise ParameterError("sample size must be non-negative")
    if q == 0:
        return np.zeros(0, dtype=np.int64)
    if n <= 0:
        raise ParameterError("cannot sample vertices from an empty vertex set")
    return rng.integers(0, n, size=q, dtype=np.int64)


def random_edges_with_replacement(g: Graph, r: int, rng: np.random.Generator) -> np.ndarray:
    if r < 0:
        raise ParameterError("sample size must be non-negative")
    if r == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if g.m == 0:
        raise ParameterError("cannot sample edges from a graph without edges")
    return g.edges[rng.integers(0, g.m, size=r)]


# -- reservoirs --------------------------------------------------------------


@dataclass(frozen=True)
class ReservoirState:
    held_item: tuple[int, int] | None = None
    items_seen: int = 0


def reservoir_update(state: ReservoirState, edge, rng: np.random.Generator) -> ReservoirState:
    """Classic size-1 reservoir: item ``t`` replaces the held one with probability ``1/t``."""
    t = state.items_seen + 1
    if t == 1 or rng.random() * t < 1.0:
        return ReservoirState((int(edge[0]), int(edge[1])), t)
    return ReservoirState(state.held_item, t)


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def _splitmix(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def counter_uniform(key: int, stream: np.ndarray, counter: np.ndarray) -> np.ndarray:
    """Uniforms in ``(0, 1]`` that depend only on ``(key, stream, counter)``."""
    with np.errstate(over="ignore"):
        h = _splitmix(np.uint64(key) + stream.astype(np.uint64) * _GOLDEN)
        h = _splitmix(h ^ counter.astype(np.uint64))
    return ((h >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


class ReservoirBank:
    """``k`` independent size-1 reservoirs fed from one edge stream in chunks.

    Instead of flipping ``k`` coins per item, each reservoir stores the index
    of the next item that will replace its content.  After a replacement at
    item ``t`` the next one is ``floor(t / U) + 1`` with ``U ~ Unif(0, 1]``,
    since P(no replacement in items t+1..T) = t/T.  The retained item is
    therefore distributed exactly as under the per-item 1/t rule.

    Reservoir ``i`` draws its ``j``-th ``U`` from a counter-based hash of
    ``(key, i, j)``, so reservoirs are independent sub-streams and the result
    does not depend on how the stream is chunked.
    """

    def __init__(self, k: int, rng: np.random.Generator, horizon: int | None = None):
        self.k = int(k)
        self.key = int(rng.integers(0, 2**63))
        self.held = np.full((self.k, 2), -1, dtype=np.int64)
        self.next_at = np.ones(self.k, dtype=np.int64)
        self.draws = np.zeros(self.k, dtype=np.int64)
        self.items_seen = 0
        # items beyond the horizon never arrive; clamps the skip draw
        self.horizon = horizon if horizon is not None else np.iinfo(np.int64).max // 4

    def feed(self, chunk: np.ndarray) -> None:
        chunk = np.asarray(chunk, dtype=np.int64).reshape(-1, 2)
        start, end = self.items_seen, self.items_seen + len(chunk)
        active = np.flatnonzero(self.next_at <= end)
        while len(active):
            t = self.next_at[active]
            self.held[active] = chunk[t - start - 1]
            u = counter_uniform(self.key, active, self.draws[active])
            self.draws[active] += 1
            nxt = np.floor(np.minimum(t / u, float(self.horizon))).astype(np.int64) + 1
            self.next_at[active] = nxt
            active = active[nxt <= end]
        self.items_seen = end

    @property
    def filled(self) -> int:
        return self.k if self.items_seen > 0 else 0

    def state(self, i: int) -> ReservoirState:
        if self.items_seen == 0:
            return ReservoirState(None, 0)
        return ReservoirState(tuple(int(x) for x in self.held[i]), self.items_seen)


# -- active vertex sampling --------------------------------------------------


class AccessPort(Protocol):
    def random_edge(self, rng: np.random.Generator) -> tuple[int, int]: ...

    def degree(self, v: int) -> int: ...


class GraphPort:
    """In-memory :class:`AccessPort`; safe for concurrent draws (read-only graph)."""

    def __init__(self, g: Graph):
        if g.m == 0:
            raise ParameterError("graph has no edges")
        self.graph = g

    def random_edge(self, rng):
        u, v = self.graph.edges[rng.integers(self.graph.m)]
        return int(u), int(v)

    def degree(self, v):
        return self.graph.degree(v)


def active_vertex_sample(port: AccessPort, rng: np.random.Generator) -> int | None:
    """Uniform edge, uniform endpoint, keep with probability 1/degree; ``None`` on reject."""
    u, v = port.random_edge(rng)
    w = v if rng.random() < 0.5 else u
    deg = port.degree(w)
    return w if rng.random() * deg < 1.0 else None
