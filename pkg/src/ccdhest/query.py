"""Query-model oracle with per-type accounting, and the two query drivers."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .ccdh import ccdh_from_degrees
from .errors import BoundsError
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
from .graph import Graph, degree_array
from .samplers import make_rng, uniform_vertex_sample


@dataclass
class QueryLog:
    degree: int = 0
    neighbor: int = 0
    edge_exist: int = 0
    random_edge: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def bump(self, kind: str, k: int = 1) -> None:
        with self._lock:
            setattr(self, kind, getattr(self, kind) + k)

    @property
    def total(self) -> int:
        return self.degree + self.neighbor + self.edge_exist + self.random_edge

    def as_dict(self) -> dict:
        return {"degree": self.degree, "neighbor": self.neighbor,
                "edge_exist": self.edge_exist, "random_edge": self.random_edge}


class GraphOracle:
    """Answers Degree / Neighbor / EdgeExist / RandomEdge queries on a fixed graph.

    Neighbours are 1-indexed in ascending id order.  With ``record=True`` the
    oracle keeps the sequence of queries issued (not the answers).
    """

    def __init__(self, g: Graph, record: bool = False):
        self.graph = g
        self.log = QueryLog()
        self.transcript: list[tuple] | None = [] if record else None
        self._deg = degree_array(g)

    def _note(self, *entries: tuple) -> None:
        if self.transcript is not None:
            self.transcript.extend(entries)

    def _check(self, v: int) -> int:
        v = int(v)
        if not 0 <= v < self.graph.n:
            raise BoundsError(f"vertex {v} outside 0..{self.graph.n - 1}")
        return v

    def degree(self, v: int) -> int:
        v = self._check(v)
        self.log.bump("degree")
        self._note(("degree", v))
        return int(self._deg[v])

    def degrees(self, vs) -> np.ndarray:
        """Batch of Degree queries, logged one per vertex."""
        vs = np.asarray(vs, dtype=np.int64)
        if len(vs) and (vs.min() < 0 or vs.max() >= self.graph.n):
            raise BoundsError("vertex outside the graph")
        self.log.bump("degree", len(vs))
        self._note(*(("degree", int(v)) for v in vs))
        return self._deg[vs]

    def neighbor(self, v: int, i: int) -> int | None:
        v = self._check(v)
        self.log.bump("neighbor")
        self._note(("neighbor", v, int(i)))
        if i < 1 or i > self._deg[v]:
            return None
        return int(self.graph.neighbors(v)[i - 1])

    def edge_exist(self, u: int, v: int) -> bool:
        u, v = self._check(u), self._check(v)
        self.log.bump("edge_exist")
        self._note(("edge_exist", u, v))
        return self.graph.has_edge(u, v)

    def random_edge(self, rng: np.random.Generator) -> tuple[int, int]:
        if self.graph.m == 0:
            raise BoundsError("random edge on a graph without edges")
        self.log.bump("random_edge")
        self._note(("random_edge",))
        u, v = self.graph.edges[rng.integers(self.graph.m)]
        return int(u), int(v)

    def random_edges(self, k: int, rng: np.random.Generator) -> np.ndarray:
        if k and self.graph.m == 0:
            raise BoundsError("random edge on a graph without edges")
        self.log.bump("random_edge", k)
        self._note(*(("random_edge",) for _ in range(k)))
        if k == 0:
            return np.zeros((0, 2), dtype=np.int64)
        return self.graph.edges[rng.integers(0, self.graph.m, size=k)]


def _exact_by_degree_queries(oracle: GraphOracle, n: int, h_prime: int) -> CcdhEstimate:
    return fallback_estimate(ccdh_from_degrees(oracle.degrees(np.arange(n))), h_prime)


def nonadaptive_query_estimate(oracle: GraphOracle, n: int, m: int,
                               params: EstimatorParams) -> tuple[CcdhEstimate, QueryLog]:
    """q Degree queries on pre-drawn ids plus r RandomEdge queries, all fixed up front."""
    sizes = sample_sizes(n, m, params)
    if params.fallback and sizes.fallback:
        est = _exact_by_degree_queries(oracle, n, params.h_prime)
    else:
        ids = uniform_vertex_sample(n, sizes.q, make_rng(params.seed, STREAM_VERTICES))
        degs = oracle.degrees(ids)
        edges = oracle.random_edges(sizes.r, make_rng(params.seed, STREAM_EDGES))
        est = estimate_from_bundle(SampleBundle(degs, edges), n, m, params.h_prime)
    est.sizes = sizes
    return est, oracle.log


def run_active_queries(oracle: GraphOracle, n: int, m: int, h_prime: int,
                       q_prime: int, r: int, seed: int) -> CcdhEstimate:
    """Active-vertex driver for explicit sizes.

    Round 1 draws q' random edges; round 2 asks the degree of one endpoint of
    each.  Rejected invocations still cost both queries.
    """
    edge_rng = make_rng(seed, STREAM_EDGES)
    candidates = oracle.random_edges(q_prime, edge_rng)
    pick = make_rng(seed, STREAM_ACTIVE).random(q_prime) < 0.5
    chosen = np.where(pick, candidates[:, 1], candidates[:, 0])
    degrees = oracle.degrees(chosen)
    accept = make_rng(seed, STREAM_COINS).random(q_prime) * degrees < 1.0
    tail_edges = oracle.random_edges(r, edge_rng)
    est = estimate_from_active(degrees[accept], q_prime, SampleBundle(np.zeros(0), tail_edges),
                               n, m, h_prime)
    est.accepted = int(accept.sum())
    return est


def adaptive_query_estimate(oracle: GraphOracle, n: int, m: int,
                            params: EstimatorParams) -> tuple[CcdhEstimate, QueryLog]:
    sizes = sample_sizes(n, m, params)
    if params.fallback and sizes.active_fallback:
        est = _exact_by_degree_queries(oracle, n, params.h_prime)
    else:
        est = run_active_queries(oracle, n, m, params.h_prime, sizes.q_prime, sizes.r, params.seed)
    est.sizes = sizes
    return est, oracle.log
