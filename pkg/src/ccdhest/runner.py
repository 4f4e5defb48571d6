"""Engine dispatch and run reports shared by the CLI and the benchmark loop."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

from .ccdh import bma_check, exact_ccdh, h_index, z_index
from .errors import ParameterError, UndefinedInputError
from .estimator import CcdhEstimate, EstimatorParams, sample_sizes
from .graph import Graph, active_vertex_count
from .query import GraphOracle, adaptive_query_estimate, nonadaptive_query_estimate
from .stream import EdgeStream, onepass_run, twopass_run

MODELS = ("stream1", "stream2", "query-na", "query-ad")
SCHEMA = 1


@dataclass
class Timer:
    phases: dict[str, float] = field(default_factory=dict)

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.phases[name] = self.phases.get(name, 0.0) + 1000 * (time.perf_counter() - t0)


def graph_stats(g: Graph, exact=None) -> dict:
    exact = exact if exact is not None else exact_ccdh(g)
    try:
        z = z_index(exact)
    except UndefinedInputError:
        z = None
    return {"n": g.n, "m": g.m, "n_a": active_vertex_count(g), "h": h_index(exact), "z": z}


def resolve_h_prime(value, exact) -> int:
    """``"auto"`` means the exact h-index (at least 1)."""
    if value in (None, "auto"):
        return max(1, h_index(exact))
    try:
        h = int(value)
    except (TypeError, ValueError):
        raise ParameterError(f"h-prime must be 'auto' or a positive integer, got {value!r}") from None
    if h < 1:
        raise ParameterError(f"h-prime must be positive, got {h}")
    return h


def run_model(model: str, g: Graph, params: EstimatorParams,
              stream: EdgeStream | None = None) -> tuple[CcdhEstimate, dict | None]:
    """Run one engine; returns the estimate and the query log (query models only)."""
    if model not in MODELS:
        raise ParameterError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
    if model in ("stream1", "stream2"):
        stream = stream if stream is not None else EdgeStream.from_graph(g)
        run = onepass_run if model == "stream1" else twopass_run
        return run(stream, g.n, g.m, params), None
    oracle = GraphOracle(g)
    drive = nonadaptive_query_estimate if model == "query-na" else adaptive_query_estimate
    est, log = drive(oracle, g.n, g.m, params)
    return est, log.as_dict()


def samples_section(n: int, m: int, params: EstimatorParams) -> dict:
    s = sample_sizes(n, m, params)
    return {
        "q": s.q, "r": s.r, "q_prime": s.q_prime,
        "fallback": s.fallback, "active_fallback": s.active_fallback,
        "q_over_n": s.q / n, "r_over_m": s.r / m if m else None,
        "q_prime_over_n": s.q_prime / n,
        "onepass_total": s.onepass_total, "twopass_total": s.twopass_total,
    }


def estimate_report(model: str, g: Graph, params: EstimatorParams, est: CcdhEstimate,
                    query_log: dict | None, exact, timer: Timer, stats: dict | None = None) -> dict:
    verdict = bma_check(exact, est, params.eps_d, params.eps_r)
    report = {
        "schema": SCHEMA,
        "model": model,
        "mode": est.mode,
        "graph_stats": stats if stats is not None else graph_stats(g, exact),
        "params": params.as_dict(),
        "samples": samples_section(g.n, g.m, params),
        "bma": verdict.summary(),
        "timing_ms": dict(timer.phases),
    }
    if est.accepted is not None:
        report["samples"]["accepted"] = est.accepted
    if est.space is not None:
        report["space"] = est.space.as_dict()
    if query_log is not None:
        report["query_log"] = query_log
    return report
