"""Deterministic synthetic graphs for tests and benchmarks."""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .graph import Graph
from .samplers import make_rng


def star(leaves: int) -> Graph:
    if leaves < 0:
        raise ParameterError("leaves must be non-negative")
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def path(n: int) -> Graph:
    if n < 0:
        raise ParameterError("n must be non-negative")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def matching(pairs: int) -> Graph:
    if pairs < 0:
        raise ParameterError("pairs must be non-negative")
    return Graph.from_edges(2 * pairs, [(2 * i, 2 * i + 1) for i in range(pairs)])


def _decode_pairs(idx: np.ndarray, n: int) -> np.ndarray:
    """Map linear indices over ``{(u, v): u < v}`` (row-major) back to pairs."""
    # row u starts at offset u*n - u*(u+1)/2; invert the quadratic then fix rounding
    idx = idx.astype(np.int64)
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(b * b - 8.0 * idx)) / 2).astype(np.int64)
    start = u * n - u * (u + 1) // 2
    over = start > idx
    u[over] -= 1
    start = u * n - u * (u + 1) // 2
    nxt = (u + 1) * n - (u + 1) * (u + 2) // 2
    under = nxt <= idx
    u[under] += 1
    start = u * n - u * (u + 1) // 2
    v = idx - start + u + 1
    return np.stack([u, v], axis=1)


def gnp(n: int, p: float, seed: int = 0) -> Graph:
    if n < 0 or not 0 <= p <= 1:
        raise ParameterError("need n >= 0 and 0 <= p <= 1")
    rng = make_rng(seed)
    total = n * (n - 1) // 2
    k = int(rng.binomial(total, p)) if total else 0
    idx = np.sort(rng.choice(total, size=k, replace=False)) if k else np.zeros(0, dtype=np.int64)
    return Graph.from_edges(n, _decode_pairs(idx, n))


def chung_lu_weights(n: int, exponent: float, avg_degree: float,
                     max_degree: float | None = None) -> np.ndarray:
    """Expected degrees ``w_i ~ (i+1)^(-1/(exponent-1))`` scaled to the target mean,
    then capped (default cap ``sqrt(n * avg_degree)``)."""
    if exponent <= 1:
        raise ParameterError("power-law exponent must exceed 1")
    w = np.arange(1, n + 1, dtype=float) ** (-1.0 / (exponent - 1.0))
    w *= avg_degree / w.mean()
    cap = math.sqrt(n * avg_degree) if max_degree is None else max_degree
    return np.minimum(w, cap)


def chung_lu(n: int, exponent: float = 2.5, avg_degree: float = 10.0,
             max_degree: float | None = None, seed: int = 0) -> Graph:
    """Fast Chung-Lu: draw ``Poisson(W/2)`` endpoint pairs proportional to weight,
    then drop self-loops and repeated pairs."""
    if n < 2:
        raise ParameterError("chung-lu needs n >= 2")
    w = chung_lu_weights(n, exponent, avg_degree, max_degree)
    rng = make_rng(seed)
    k = int(rng.poisson(w.sum() / 2))
    prob = w / w.sum()
    ends = rng.choice(n, size=(k, 2), p=prob)
    ends = ends[ends[:, 0] != ends[:, 1]]
    ends = np.sort(ends, axis=1)
    _, first = np.unique(ends[:, 0] * n + ends[:, 1], return_index=True)
    ends = ends[np.sort(first)]
    # shuffle so the stream order carries no degree information
    ends = ends[rng.permutation(len(ends))]
    return Graph.from_edges(n, ends)
