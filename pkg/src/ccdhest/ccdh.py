"""Exact degree statistics and the bi-criteria approximation check.

``C(d)`` is the number of vertices of degree at least ``d``.  It is stored
densely for ``d = 0..d_max`` and read as zero past ``d_max``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Mapping

import numpy as np

from .errors import InvariantError, ParameterError, ParseError, UndefinedInputError
from .graph import Graph, degree_array


@dataclass(frozen=True, eq=False)
class Ccdh:
    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1 or len(v) == 0:
            raise InvariantError("ccdh needs at least the C(0) entry")
        if v[0] != self.n:
            raise InvariantError(f"C(0)={v[0]} but n={self.n}")
        if np.any(np.diff(v) > 0):
            d = int(np.flatnonzero(np.diff(v) > 0)[0])
            raise InvariantError(f"ccdh increases between d={d} and d={d + 1}")
        if np.any(v < 0):
            raise InvariantError("negative ccdh entry")

    @property
    def d_max(self) -> int:
        return len(self.values) - 1

    def __call__(self, d: int) -> int:
        return int(self.values[d]) if 0 <= d < len(self.values) else 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ccdh):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    __hash__ = None


def degree_histogram(g: Graph) -> np.ndarray:
    deg = degree_array(g)
    if g.n == 0:
        return np.zeros(1, dtype=np.int64)
    return np.bincount(deg).astype(np.int64)


def exact_ccdh(g: Graph) -> Ccdh:
    return ccdh_from_degrees(degree_array(g))


def ccdh_from_degrees(degrees) -> Ccdh:
    deg = np.asarray(degrees, dtype=np.int64)
    if len(deg) == 0:
        return Ccdh(0, np.zeros(1, dtype=np.int64))
    hist = np.bincount(deg)
    values = np.cumsum(hist[::-1])[::-1].astype(np.int64)
    return Ccdh(len(deg), values)


def ccdh_at_real(c: Ccdh, x: float) -> int:
    if x < 0:
        raise ParameterError("ccdh argument must be non-negative")
    return c(math.ceil(x))


def h_index(c: Ccdh) -> int:
    d = np.arange(len(c.values))
    ok = (c.values >= d) & (d >= 1)
    return int(d[ok].max()) if ok.any() else 0


def z_index(c: Ccdh) -> float:
    d = np.arange(1, len(c.values))
    vals = c.values[1:]
    support = vals > 0
    if not support.any():
        raise UndefinedInputError("z-index is undefined for a graph without edges")
    return float(np.sqrt(d[support] * vals[support].astype(float)).min())


# -- bi-criteria check -------------------------------------------------------


@dataclass
class BmaVerdict:
    passed: bool
    violations: list[tuple[int, float, float, float]] = field(default_factory=list)

    @property
    def worst(self) -> tuple[int, float, float, float] | None:
        """Violation with the largest distance outside its band."""
        if not self.violations:
            return None
        return max(self.violations, key=lambda v: max(v[2] - v[1], v[1] - v[3]))

    def summary(self) -> dict:
        worst = self.worst
        out = {"pass": self.passed, "violation_count": len(self.violations), "worst": None}
        if worst is not None:
            d, est, lo, hi = worst
            out["worst"] = {"d": d, "estimate": est, "lower": lo, "upper": hi,
                            "excess": max(lo - est, est - hi)}
        return out


def _as_fraction(eps: float, name: str) -> Fraction:
    if not 0 < eps < 1:
        raise ParameterError(f"{name} must lie in (0, 1), got {eps}")
    # decimal reading: 0.1 means 1/10, so (1 + 0.1) * 10 is exactly 11
    return Fraction(repr(float(eps))).limit_denominator(10**6)


def scaled_ceil(d: np.ndarray, factor: Fraction) -> np.ndarray:
    """Exact ``ceil(factor * d)`` for a non-negative rational factor."""
    a, b = factor.numerator, factor.denominator
    return -((-a * d) // b)


def estimate_vector(estimate, n: int) -> np.ndarray:
    """Dense float view ``est[d]`` for ``d = 0..n`` of a sparse/dense estimate."""
    out = np.zeros(n + 1, dtype=float)
    if hasattr(estimate, "values") and hasattr(estimate, "mode"):
        estimate = estimate.values
    if isinstance(estimate, Ccdh):
        estimate = estimate.values
    if isinstance(estimate, Mapping):
        for d, v in estimate.items():
            d = int(d)
            if 0 <= d <= n:
                out[d] = float(v)
        return out
    arr = np.asarray(estimate, dtype=float)
    k = min(len(arr), n + 1)
    out[:k] = arr[:k]
    return out


def bma_bounds(exact: Ccdh, eps_d: float, eps_r: float) -> tuple[np.ndarray, np.ndarray]:
    """Lower/upper bands for ``d = 1..n`` (index ``d-1``)."""
    fd = _as_fraction(eps_d, "eps_d")
    fr = _as_fraction(eps_r, "eps_r")
    d = np.arange(1, exact.n + 1, dtype=np.int64)
    padded = np.zeros(max(exact.n, exact.d_max) * 2 + 3, dtype=np.int64)
    padded[:len(exact.values)] = exact.values
    at_plus = padded[np.minimum(scaled_ceil(d, 1 + fd), len(padded) - 1)]
    at_minus = padded[scaled_ceil(d, 1 - fd)]
    lo = float(1 - fr) * at_plus
    hi = float(1 + fr) * at_minus
    return lo, hi


def bma_check(exact: Ccdh, estimate, eps_d: float, eps_r: float) -> BmaVerdict:
    """Check ``(1-er) C((1+ed) d) <= est(d) <= (1+er) C((1-ed) d)`` for d in 1..n.

    ``estimate`` may be a mapping ``d -> value`` (missing keys read as 0), a
    dense array indexed by ``d``, or a :class:`CcdhEstimate`.
    """
    lo, hi = bma_bounds(exact, eps_d, eps_r)
    est = estimate_vector(estimate, exact.n)[1:]
    bad = np.flatnonzero((est < lo) | (est > hi))
    violations = [(int(i + 1), float(est[i]), float(lo[i]), float(hi[i])) for i in bad]
    return BmaVerdict(not violations, violations)


# -- CSV --------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    return str(int(f)) if f.is_integer() else repr(f)


def write_ccdh_csv(rows, out: IO[str]) -> None:
    """Write ``degree,ccdh`` rows; ``rows`` is an iterable of ``(d, value)``."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["degree", "ccdh"])
    for d, v in rows:
        w.writerow([int(d), _fmt(v)])


def ccdh_rows(c: Ccdh):
    return enumerate(c.values.tolist())


def read_ccdh_csv(src: IO[str], name: str | None = None) -> dict[int, float]:
    reader = csv.reader(src)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty ccdh file", source=name) from None
    if [h.strip() for h in header] != ["degree", "ccdh"]:
        raise ParseError(f"bad header {header!r}", 1, name)
    out: dict[int, float] = {}
    for lineno, row in enumerate(reader, 2):
        if not row:
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 columns, got {len(row)}", lineno, name)
        try:
            d = int(row[0])
            v = float(row[1])
        except ValueError:
            raise ParseError(f"malformed row {row!r}", lineno, name) from None
        if d < 0 or d in out:
            raise ParseError(f"bad or repeated degree {d}", lineno, name)
        out[d] = v
    return out


def ccdh_from_rows(rows: dict[int, float]) -> Ccdh:
    """Build an exact :class:`Ccdh` from parsed CSV rows (must be integral, dense)."""
    if 0 not in rows:
        raise InvariantError("exact ccdh must contain the d=0 row")
    d_max = max(rows)
    if sorted(rows) != list(range(d_max + 1)):
        raise InvariantError("exact ccdh rows must cover 0..d_max without gaps")
    vals = np.array([rows[d] for d in range(d_max + 1)])
    if not np.all(vals == np.round(vals)):
        raise InvariantError("exact ccdh values must be integers")
    return Ccdh(int(vals[0]), vals.astype(np.int64))
