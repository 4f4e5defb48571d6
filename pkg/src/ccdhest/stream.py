"""One-pass and two-pass edge-stream engines.

Streams are consumed in fixed-size chunks; nothing proportional to ``m``
is buffered.  State is the sampled-vertex counters plus the reservoir bank,
except in exact-fallback mode, which keeps one counter per vertex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .ccdh import ccdh_from_degrees
from .errors import StreamIntegrityError
from .estimator import (
    STREAM_ACTIVE,
    STREAM_COINS,
    STREAM_EDGES,
    STREAM_VERTICES,
    CcdhEstimate,
    EstimatorParams,
    SampleBundle,
    estimate_from_active,
    estimate_from_bundle,
    fallback_estimate,
    sample_sizes,
)
from .graph import Graph, iter_edge_pairs
from .samplers import ReservoirBank, make_rng, uniform_vertex_sample

CHUNK = 1 << 16


class EdgeStream:
    """Replayable insertion-only edge stream with a declared length ``m``.

    ``factory`` returns a fresh iterator of ``(k, 2)`` int arrays each time
    the stream is replayed.
    """

    def __init__(self, factory: Callable[[], Iterable[np.ndarray]], m: int):
        self._factory = factory
        self.m = int(m)

    def chunks(self) -> Iterator[np.ndarray]:
        for chunk in self._factory():
            yield np.asarray(chunk, dtype=np.int64).reshape(-1, 2)

    @classmethod
    def from_edges(cls, edges, chunk_size: int = CHUNK) -> "EdgeStream":
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        return cls(lambda: (e[i:i + chunk_size] for i in range(0, len(e), chunk_size)), len(e))

    @classmethod
    def from_graph(cls, g: Graph, order=None, chunk_size: int = CHUNK) -> "EdgeStream":
        e = g.edges if order is None else g.edges[np.asarray(order)]
        return cls.from_edges(e, chunk_size)

    @classmethod
    def from_file(cls, path, m: int, chunk_size: int = CHUNK) -> "EdgeStream":
        """Edge-list file read lazily; each replay re-opens it.  Self-loops are skipped."""

        def gen():
            with open(path, "r", encoding="utf-8") as fh:
                pairs = ((u, v) for u, v in iter_edge_pairs(fh, str(path)) if u != v)
                while True:
                    block = list(itertools.islice(pairs, chunk_size))
                    if not block:
                        return
                    yield np.array(block, dtype=np.int64)

        return cls(gen, m)


@dataclass(frozen=True)
class SpaceReport:
    counters: int
    reservoirs: int
    peak_slots: int
    bits: int

    def as_dict(self) -> dict:
        return {"counters": self.counters, "reservoirs": self.reservoirs,
                "peak_slots": self.peak_slots, "bits": self.bits}


def _id_bits(n: int, m: int) -> int:
    return max(1, math.ceil(math.log2(max(n, m, 2) + 1)))


class _Fingerprint:
    """Order-independent digest of an edge multiset, for replay checks."""

    K = np.uint64(0x9E3779B97F4A7C15)

    def __init__(self):
        self.count = 0
        self.s1 = np.uint64(0)
        self.s2 = np.uint64(0)

    def add(self, chunk: np.ndarray) -> None:
        lo = np.minimum(chunk[:, 0], chunk[:, 1]).astype(np.uint64)
        hi = np.maximum(chunk[:, 0], chunk[:, 1]).astype(np.uint64)
        with np.errstate(over="ignore"):
            self.s1 += np.sum(lo * np.uint64(1_000_003) + hi, dtype=np.uint64)
            self.s2 += np.sum((lo * self.K) ^ (hi + np.uint64(1)), dtype=np.uint64)
        self.count += len(chunk)

    def key(self):
        return self.count, int(self.s1), int(self.s2)


def _check_ids(chunk: np.ndarray, n: int, seen: int, m: int) -> None:
    if seen + len(chunk) > m:
        raise StreamIntegrityError(f"stream longer than declared m={m}")
    if len(chunk) and (chunk.min() < 0 or chunk.max() >= n):
        raise StreamIntegrityError(f"edge endpoint outside 0..{n - 1}")


def _check_length(seen: int, m: int) -> None:
    if seen != m:
        raise StreamIntegrityError(f"stream has {seen} edges, declared m={m}")


class _Counter:
    """Degree counters for a fixed list of watched vertex slots (duplicates allowed)."""

    def __init__(self, watched: np.ndarray):
        self.ids, self.slot_to_id = np.unique(watched, return_inverse=True)
        self.per_id = np.zeros(len(self.ids), dtype=np.int64)

    def feed(self, chunk: np.ndarray) -> None:
        if not len(self.ids):
            return
        ends = chunk.ravel()
        pos = np.searchsorted(self.ids, ends)
        pos[pos == len(self.ids)] = 0
        hit = self.ids[pos] == ends
        self.per_id += np.bincount(pos[hit], minlength=len(self.ids))

    def slots(self) -> np.ndarray:
        return self.per_id[self.slot_to_id]


def _exact_pass(stream: EdgeStream, n: int, m: int, params: EstimatorParams, sizes):
    deg = np.zeros(n, dtype=np.int64)
    seen = 0
    for chunk in stream.chunks():
        _check_ids(chunk, n, seen, m)
        deg += np.bincount(chunk.ravel(), minlength=n)
        seen += len(chunk)
    _check_length(seen, m)
    est = fallback_estimate(ccdh_from_degrees(deg), params.h_prime)
    est.sizes = sizes
    est.space = SpaceReport(n, 0, n, n * _id_bits(n, m))
    return est


def onepass_run(stream: EdgeStream, n: int, m: int, params: EstimatorParams) -> CcdhEstimate:
    if stream.m != m:
        raise StreamIntegrityError(f"stream declares {stream.m} edges, expected m={m}")
    sizes = sample_sizes(n, m, params)
    if params.fallback and sizes.fallback:
        return _exact_pass(stream, n, m, params, sizes)

    counter = _Counter(uniform_vertex_sample(n, sizes.q, make_rng(params.seed, STREAM_VERTICES)))
    bank = ReservoirBank(sizes.r, make_rng(params.seed, STREAM_EDGES), horizon=m)
    seen = 0
    for chunk in stream.chunks():
        _check_ids(chunk, n, seen, m)
        counter.feed(chunk)
        bank.feed(chunk)
        seen += len(chunk)
    _check_length(seen, m)

    est = estimate_from_bundle(SampleBundle(counter.slots(), bank.held), n, m, params.h_prime)
    est.sizes = sizes
    slots = sizes.q + bank.filled
    est.space = SpaceReport(sizes.q, bank.filled, slots,
                            (sizes.q * 2 + bank.filled * 2) * _id_bits(n, m))
    return est


def twopass_run(stream: EdgeStream, n: int, m: int, params: EstimatorParams) -> CcdhEstimate:
    """Active-vertex head via rejection sampling over reservoir edges, two passes."""
    if stream.m != m:
        raise StreamIntegrityError(f"stream declares {stream.m} edges, expected m={m}")
    sizes = sample_sizes(n, m, params)
    if params.fallback and sizes.active_fallback:
        return _exact_pass(stream, n, m, params, sizes)
    qp, r = sizes.q_prime, sizes.r

    # pass 1: q' candidate reservoirs followed by r tail reservoirs
    bank = ReservoirBank(qp + r, make_rng(params.seed, STREAM_EDGES), horizon=m)
    fp1 = _Fingerprint()
    seen = 0
    for chunk in stream.chunks():
        _check_ids(chunk, n, seen, m)
        bank.feed(chunk)
        fp1.add(chunk)
        seen += len(chunk)
    _check_length(seen, m)
    candidates, tail_edges = bank.held[:qp], bank.held[qp:]

    # endpoints are fixed before the second pass
    pick = make_rng(params.seed, STREAM_ACTIVE).random(qp) < 0.5
    chosen = np.where(pick, candidates[:, 1], candidates[:, 0])

    counter = _Counter(chosen)
    fp2 = _Fingerprint()
    seen = 0
    for chunk in stream.chunks():
        _check_ids(chunk, n, seen, m)
        counter.feed(chunk)
        fp2.add(chunk)
        seen += len(chunk)
    _check_length(seen, m)
    if fp1.key() != fp2.key():
        raise StreamIntegrityError("second pass does not replay the first pass")

    degrees = counter.slots()
    accept = make_rng(params.seed, STREAM_COINS).random(qp) * degrees < 1.0
    est = estimate_from_active(degrees[accept], qp, SampleBundle(np.zeros(0), tail_edges),
                               n, m, params.h_prime)
    est.sizes = sizes
    est.accepted = int(accept.sum())
    peak = 2 * (qp + r) + qp
    est.space = SpaceReport(qp, qp + r, peak, peak * _id_bits(n, m))
    return est
