"""Head/tail ccdh estimator over a vertex-degree sample and an edge sample.

For ``d <= h'`` the estimate is the scaled fraction of sampled vertices with
degree at least ``d``.  For ``d > h'`` it counts vertices whose
edge-sample degree estimate ``m * hits / r`` reaches ``d``.  The active
vertex variant replaces the uniform vertex sample with rejection samples
drawn through random edges and rescales by ``2m / q'``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Protocol

import numpy as np

from .ccdh import Ccdh, exact_ccdh
from .errors import ParameterError
from .graph import Graph, degree_array
from .samplers import make_rng, random_edges_with_replacement, uniform_vertex_sample

DEFAULT_C = 0.01

MODE_SAMPLED = "sampled"
MODE_FALLBACK = "exact-fallback"

# sub-stream keys under the master seed
STREAM_VERTICES = 0
STREAM_EDGES = 1
STREAM_ACTIVE = 2
STREAM_COINS = 3


@dataclass(frozen=True)
class EstimatorParams:
    eps_d: float
    eps_r: float
    h_prime: int
    c: float = DEFAULT_C
    seed: int = 0
    # False forces the sampled schedule even when sample sizes reach n or m
    fallback: bool = True

    def __post_init__(self):
        if not 0 < self.eps_d < 1:
            raise ParameterError(f"eps_d must lie in (0, 1), got {self.eps_d}")
        if not 0 < self.eps_r < 1:
            raise ParameterError(f"eps_r must lie in (0, 1), got {self.eps_r}")
        if not self.c > 0:
            raise ParameterError(f"c must be positive, got {self.c}")
        if int(self.h_prime) != self.h_prime or self.h_prime < 1:
            raise ParameterError(f"h_prime must be a positive integer, got {self.h_prime}")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SampleSizes:
    q: int
    r: int
    q_prime: int
    n: int
    m: int

    @property
    def q_fallback(self) -> bool:
        return self.q >= self.n

    @property
    def r_fallback(self) -> bool:
        return self.r >= self.m

    @property
    def q_prime_fallback(self) -> bool:
        return self.q_prime >= self.n

    @property
    def fallback(self) -> bool:
        """Uniform-vertex engines (one-pass stream, non-adaptive query)."""
        return self.q_fallback or self.r_fallback

    @property
    def active_fallback(self) -> bool:
        """Active-vertex engines (two-pass stream, adaptive query)."""
        return self.q_prime_fallback or self.r_fallback

    @property
    def onepass_total(self) -> int:
        return self.q + self.r

    @property
    def twopass_total(self) -> int:
        return 2 * self.q_prime + self.r


def sample_sizes(n: int, m: int, params: EstimatorParams) -> SampleSizes:
    """``q = ceil(c n ln n / (h' er^2))``, ``r = ceil(c m ln n / (h' ed^2))``,
    ``q' = ceil(c m ln n / (h' er^2))``."""
    if n < 2:
        raise ParameterError("sample sizes need n >= 2")
    if m < 0:
        raise ParameterError("m must be non-negative")
    scale = params.c * math.log(n) / params.h_prime
    q = math.ceil(scale * n / params.eps_r**2)
    r = math.ceil(scale * m / params.eps_d**2)
    q_prime = math.ceil(scale * m / params.eps_r**2)
    return SampleSizes(q, r, q_prime, n, m)


# -- sample bundle and the per-degree rules ----------------------------------


@dataclass
class SampleBundle:
    degree_sample: np.ndarray
    edge_sample: np.ndarray
    endpoint_counts: dict[int, int] = field(default=None)

    def __post_init__(self):
        self.degree_sample = np.asarray(self.degree_sample, dtype=np.int64)
        self.edge_sample = np.asarray(self.edge_sample, dtype=np.int64).reshape(-1, 2)
        if self.endpoint_counts is None:
            ids, counts = np.unique(self.edge_sample.ravel(), return_counts=True)
            self.endpoint_counts = dict(zip(ids.tolist(), counts.tolist()))

    @property
    def q(self) -> int:
        return len(self.degree_sample)

    @property
    def r(self) -> int:
        return len(self.edge_sample)


def approx_degrees(bundle: SampleBundle, m: int) -> dict[int, float]:
    """``d_hat(v) = m * hits(v) / r`` for every sampled endpoint (others are 0)."""
    if bundle.r < 1:
        raise ParameterError("approximate degrees need at least one sampled edge")
    return {v: m * k / bundle.r for v, k in bundle.endpoint_counts.items()}


def head_estimate(bundle: SampleBundle, n: int, d: int) -> float:
    if bundle.q < 1:
        raise ParameterError("head estimate needs at least one sampled vertex")
    return n * int(np.count_nonzero(bundle.degree_sample >= d)) / bundle.q


def tail_estimate(approx: dict[int, float], d: int) -> int:
    return sum(1 for x in approx.values() if x >= d)


def head_estimate_active(accepted_degrees, m: int, q_prime: int, d: int) -> float:
    """``2m * |{accepted with degree >= d}| / q'``; ``q'`` counts rejected draws too."""
    if q_prime < 1:
        raise ParameterError("q' must be at least 1")
    degs = np.asarray(accepted_degrees, dtype=np.int64)
    return 2 * m * int(np.count_nonzero(degs >= d)) / q_prime


# -- assembled estimates ------------------------------------------------------


@dataclass(eq=False)
class CcdhEstimate:
    """Estimate ``values[d]`` for ``d = 0..d_max`` (``values[0]`` is ``n``).

    Entries ``1..boundary`` come from the vertex sample, the rest from
    approximate degrees.  In ``exact-fallback`` mode ``values`` is the exact
    ccdh.
    """

    values: np.ndarray
    boundary: int
    mode: str
    # run metadata filled in by the engines
    sizes: SampleSizes | None = None
    space: object = None
    accepted: int | None = None

    @property
    def d_max(self) -> int:
        return len(self.values) - 1

    def as_dict(self) -> dict[int, float]:
        return {d: float(v) for d, v in enumerate(self.values) if d >= 1}

    def rows(self):
        return ((d, self.values[d]) for d in range(1, len(self.values)))


def _head_values(sorted_degrees: np.ndarray, scale: float, h_prime: int) -> np.ndarray:
    d = np.arange(1, h_prime + 1)
    count = len(sorted_degrees) - np.searchsorted(sorted_degrees, d, side="left")
    return scale * count


def _tail_values(bundle: SampleBundle, m: int, h_prime: int) -> np.ndarray:
    """Counts ``|{v : m*hits(v)/r >= d}|`` for ``d = h'+1 ..``, exact in integers."""
    r = bundle.r
    if r == 0 or not bundle.endpoint_counts:
        return np.zeros(0)
    weight = np.sort(np.fromiter(bundle.endpoint_counts.values(), dtype=np.int64) * m)
    top = int(weight[-1] // r)  # largest d with some d_hat >= d
    if top <= h_prime:
        return np.zeros(0)
    d = np.arange(h_prime + 1, top + 1, dtype=np.int64)
    return (len(weight) - np.searchsorted(weight, d * r, side="left")).astype(float)


def assemble(head: np.ndarray, tail: np.ndarray, n: int, h_prime: int) -> CcdhEstimate:
    values = np.concatenate([[float(n)], head, tail])
    return CcdhEstimate(values, h_prime, MODE_SAMPLED)


def estimate_from_bundle(bundle: SampleBundle, n: int, m: int, h_prime: int) -> CcdhEstimate:
    head = _head_values(np.sort(bundle.degree_sample), n / bundle.q, h_prime)
    return assemble(head, _tail_values(bundle, m, h_prime), n, h_prime)


def estimate_from_active(accepted_degrees, q_prime: int, tail_bundle: SampleBundle,
                         n: int, m: int, h_prime: int) -> CcdhEstimate:
    degs = np.sort(np.asarray(accepted_degrees, dtype=np.int64))
    head = _head_values(degs, 2 * m / q_prime, h_prime)
    return assemble(head, _tail_values(tail_bundle, m, h_prime), n, h_prime)


def fallback_estimate(exact: Ccdh, h_prime: int) -> CcdhEstimate:
    return CcdhEstimate(exact.values.astype(float), h_prime, MODE_FALLBACK)


class SampleProvider(Protocol):
    n: int
    m: int

    def vertex_degrees(self, q: int, rng: np.random.Generator) -> np.ndarray: ...

    def edges(self, r: int, rng: np.random.Generator) -> np.ndarray: ...

    def exact(self) -> Ccdh: ...


class GraphSampleProvider:
    def __init__(self, g: Graph):
        self.graph = g
        self.n, self.m = g.n, g.m
        self._deg = degree_array(g)

    def vertex_degrees(self, q, rng):
        return self._deg[uniform_vertex_sample(self.n, q, rng)]

    def edges(self, r, rng):
        return random_edges_with_replacement(self.graph, r, rng)

    def exact(self):
        return exact_ccdh(self.graph)


def combine_estimate(provider: SampleProvider, n: int, m: int,
                     params: EstimatorParams) -> CcdhEstimate:
    sizes = sample_sizes(n, m, params)
    if params.fallback and sizes.fallback:
        est = fallback_estimate(provider.exact(), params.h_prime)
    else:
        degs = provider.vertex_degrees(sizes.q, make_rng(params.seed, STREAM_VERTICES))
        edges = provider.edges(sizes.r, make_rng(params.seed, STREAM_EDGES))
        est = estimate_from_bundle(SampleBundle(degs, edges), n, m, params.h_prime)
    est.sizes = sizes
    return est
