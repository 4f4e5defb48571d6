"""Set-disjointness gadget graphs with closed-form degree structure.

Two families:

* ``general``: five vertices ``5i..5i+4`` per index.  Every vertex has
  degree at most 1 unless the strings intersect, in which case exactly one
  vertex (``5j``) has degree 2.
* ``hindex``: five blocks A..E of ``M`` vertices plus isolated padding.
  B and C vertices all have degree ``h``.  The single intersecting index
  gives one A vertex of degree ``6h/4``.  The h-index is always ``h``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .ccdh import exact_ccdh, h_index
from .errors import GadgetValidationError, ParameterError
from .graph import Graph, degree_array

GENERAL = "general"
HINDEX = "hindex"


@dataclass(frozen=True)
class DisjointnessInstance:
    M: int
    x: tuple[int, ...]
    y: tuple[int, ...]
    promise: bool = True

    def __post_init__(self):
        if len(self.x) != self.M or len(self.y) != self.M:
            raise ParameterError("x and y must have length M")
        if any(b not in (0, 1) for b in self.x + self.y):
            raise ParameterError("x and y must be bit strings")
        if self.promise and self.overlap > 1:
            raise ParameterError("promise violated: strings share more than one 1")

    @property
    def overlap(self) -> int:
        return sum(a & b for a, b in zip(self.x, self.y))

    @property
    def intersecting(self) -> bool:
        return self.overlap > 0


def gen_disjointness_instance(M: int, intersecting: bool,
                              rng: np.random.Generator) -> DisjointnessInstance:
    if M < 1:
        raise ParameterError("M must be at least 1")
    # each index independently takes one of (0,0), (0,1), (1,0)
    kind = rng.integers(0, 3, size=M)
    x = (kind == 2).astype(int)
    y = (kind == 1).astype(int)
    if intersecting:
        j = int(rng.integers(M))
        x[j] = y[j] = 1
    return DisjointnessInstance(M, tuple(x.tolist()), tuple(y.tolist()))


@dataclass(frozen=True)
class GadgetSpec:
    kind: str
    M: int
    h: int | None = None
    n_total: int | None = None

    def __post_init__(self):
        if self.kind not in (GENERAL, HINDEX):
            raise ParameterError(f"unknown gadget kind {self.kind!r}")
        if self.M < 1:
            raise ParameterError("M must be at least 1")
        if self.kind == HINDEX:
            if self.h is None or self.h < 4 or self.h % 4:
                raise ParameterError(f"h must be a positive multiple of 4, got {self.h}")
            if self.M < self.h:
                raise ParameterError(f"need M >= h, got M={self.M}, h={self.h}")
            if self.n_total is not None and self.n_total < 5 * self.M:
                raise ParameterError(f"n_total must be at least 5M={5 * self.M}")

    @property
    def n(self) -> int:
        if self.kind == GENERAL:
            return 5 * self.M
        return self.n_total if self.n_total is not None else 5 * self.M

    @property
    def m(self) -> int:
        # hindex: h edges per x-index and h per y-index
        return 2 * self.M if self.kind == GENERAL else 2 * self.h * self.M


def gen_general_gadget(inst: DisjointnessInstance) -> Graph:
    edges = []
    for i in range(inst.M):
        b = 5 * i
        edges.append((b, b + 1) if inst.x[i] else (b + 1, b + 3))
    for i in range(inst.M):
        b = 5 * i
        edges.append((b, b + 2) if inst.y[i] else (b + 2, b + 4))
    return Graph.from_edges(5 * inst.M, edges)


def gen_hindex_gadget(inst: DisjointnessInstance, h: int, n_total: int | None = None) -> Graph:
    """Blocks A, B, C, D, E occupy ids ``[0,M), [M,2M), ..., [4M,5M)``."""
    spec = GadgetSpec(HINDEX, inst.M, h, n_total)
    M = inst.M
    A, B, C, D, E = (k * M for k in range(5))
    idx = np.arange(M)
    offs = np.arange(h)
    edges = []
    for bits, mid, far in ((inst.x, B, D), (inst.y, C, E)):
        split = np.where(np.asarray(bits) == 1, 3 * h // 4, h // 4)
        target = mid + (idx[:, None] + offs[None, :]) % M
        near = offs[None, :] < split[:, None]
        source = np.where(near, A + idx[:, None], far + idx[:, None])
        edges.append(np.stack([source.ravel(), target.ravel()], axis=1))
    return Graph.from_edges(spec.n, np.concatenate(edges))


def build_gadget(spec: GadgetSpec, inst: DisjointnessInstance) -> Graph:
    if spec.M != inst.M:
        raise ParameterError("spec and instance disagree on M")
    if spec.kind == GENERAL:
        return gen_general_gadget(inst)
    return gen_hindex_gadget(inst, spec.h, spec.n_total)


@dataclass
class ValidationReport:
    ok: bool
    checked: list[str] = field(default_factory=list)
    failure: str | None = None


def _expect(report: ValidationReport, claim: str, cond: bool, detail: str) -> None:
    if not cond:
        report.ok = False
        report.failure = f"{claim}: {detail}"
        raise GadgetValidationError(claim, detail)
    report.checked.append(claim)


def validate_gadget(g: Graph, spec: GadgetSpec, inst: DisjointnessInstance) -> ValidationReport:
    """Check size, degree structure and the closed-form ccdh; raise on the first mismatch."""
    rep = ValidationReport(True)
    _expect(rep, "vertex count", g.n == spec.n, f"n={g.n}, expected {spec.n}")
    _expect(rep, "edge count", g.m == spec.m, f"m={g.m}, expected {spec.m}")
    c = exact_ccdh(g)
    deg = degree_array(g)
    hit = inst.intersecting

    if spec.kind == GENERAL:
        M = spec.M
        _expect(rep, "C(1) = active vertices", c(1) == 4 * M - hit,
                f"C(1)={c(1)}, expected {4 * M - hit}")
        _expect(rep, "C(2) = 1 iff intersecting", c(2) == int(hit), f"C(2)={c(2)}")
        _expect(rep, "no degree above 2", c(3) == 0, f"C(3)={c(3)}")
        _expect(rep, "h-index 1", h_index(c) == 1, f"h={h_index(c)}")
        return rep

    M, h = spec.M, spec.h
    bc = deg[M:3 * M]
    _expect(rep, "B and C degrees equal h", bool(np.all(bc == h)),
            f"degrees {sorted(set(bc.tolist()))}")
    de = deg[3 * M:5 * M]
    _expect(rep, "D and E degrees at most 3h/4", int(de.max()) <= 3 * h // 4,
            f"max {int(de.max())}")
    want_a = np.array([{(0, 0): h // 2, (1, 0): h, (0, 1): h, (1, 1): 6 * h // 4}[xy]
                       for xy in zip(inst.x, inst.y)])
    bad = np.flatnonzero(deg[:M] != want_a)
    _expect(rep, "A degrees in {h/2, h, 6h/4}", len(bad) == 0,
            f"a_{int(bad[0])} has degree {int(deg[bad[0]])}" if len(bad) else "")
    _expect(rep, "isolated padding", bool(np.all(deg[5 * M:] == 0)), "edge in padding")
    _expect(rep, "h-index exactly h", h_index(c) == h, f"h={h_index(c)}")
    _expect(rep, "C(d) > h for d <= h", c(h) > h, f"C(h)={c(h)}")
    top = 6 * h // 4
    if hit:
        vals = [c(d) for d in range(h + 1, top + 1)]
        _expect(rep, "C(d) = 1 for h < d <= 6h/4", all(v == 1 for v in vals), f"{vals}")
    else:
        _expect(rep, "C(d) = 0 for d > h", c(h + 1) == 0, f"C(h+1)={c(h + 1)}")
    _expect(rep, "C(d) = 0 for d > 6h/4", c(top + 1) == 0, f"C({top + 1})={c(top + 1)}")
    return rep


def sidecar(spec: GadgetSpec, inst: DisjointnessInstance, seed: int | None = None) -> str:
    data = {"kind": spec.kind, "M": spec.M, "h": spec.h, "n_total": spec.n,
            "x": list(inst.x), "y": list(inst.y), "intersecting": inst.intersecting,
            "seed": seed}
    return json.dumps(data, indent=2)
