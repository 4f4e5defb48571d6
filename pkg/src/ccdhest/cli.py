"""Command-line front end.

Exit codes: 0 success / BMA pass, 1 BMA fail or gadget validation failure,
2 usage or parameter error, 3 I/O, parse or integrity error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import synth
from .ccdh import (
    bma_check,
    ccdh_from_rows,
    ccdh_rows,
    exact_ccdh,
    read_ccdh_csv,
    write_ccdh_csv,
)
from .errors import (
    CcdhError,
    GadgetValidationError,
    ParameterError,
)
from .estimator import DEFAULT_C, EstimatorParams
from .gadgets import (
    GENERAL,
    HINDEX,
    GadgetSpec,
    build_gadget,
    gen_disjointness_instance,
    sidecar,
    validate_gadget,
)
from .graph import IngestOptions, compact_ids, read_edge_list, write_edge_list
from .runner import (
    MODELS,
    SCHEMA,
    Timer,
    estimate_report,
    graph_stats,
    resolve_h_prime,
    run_model,
)
from .samplers import make_rng
from .stream import EdgeStream

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class _Usage(Exception):
    pass


def _open_out(path):
    if path in (None, "-"):
        return _Stdout()
    return open(path, "w", encoding="utf-8", newline="")


class _Stdout:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        sys.stdout.flush()
        return False


def _dump_json(obj, path, default_stream=None) -> None:
    text = json.dumps(obj, indent=2)
    if path in (None, "-"):
        print(text, file=default_stream or sys.stdout)
    else:
        Path(path).write_text(text + "\n", encoding="utf-8")


def _load(args, timer: Timer | None = None):
    opts = IngestOptions(n_override=getattr(args, "n", None))
    if timer is not None:
        with timer.phase("ingest"):
            g, summary = read_edge_list(args.input, opts)
    else:
        g, summary = read_edge_list(args.input, opts)
    if not args.quiet:
        summary.write(sys.stderr)
    if getattr(args, "compact", False):
        g, old_ids = compact_ids(g)
        if args.mapping:
            np.savetxt(args.mapping, old_ids, fmt="%d")
        return g, summary, True
    return g, summary, False


def _params(args, exact) -> EstimatorParams:
    return EstimatorParams(args.eps_d, args.eps_r, resolve_h_prime(args.h_prime, exact),
                           args.c, args.seed, fallback=not args.no_fallback)


def _stream_for(args, g, summary, compacted):
    # a file replay only matches the graph if ingest removed nothing but self-loops
    if compacted or summary.duplicates_dropped:
        return EdgeStream.from_graph(g)
    return EdgeStream.from_file(args.input, g.m)


# -- subcommands --------------------------------------------------------------


def cmd_exact(args) -> int:
    g, _, _ = _load(args)
    c = exact_ccdh(g)
    with _open_out(args.csv) as out:
        write_ccdh_csv(ccdh_rows(c), out)
    stats = {"schema": SCHEMA, **graph_stats(g, c)}
    _dump_json(stats, args.json, sys.stderr if args.csv in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_estimate(args) -> int:
    timer = Timer()
    g, summary, compacted = _load(args, timer)
    with timer.phase("exact"):
        exact = exact_ccdh(g)
    params = _params(args, exact)
    stream = _stream_for(args, g, summary, compacted) if args.model.startswith("stream") else None
    with timer.phase("estimate"):
        est, log = run_model(args.model, g, params, stream)
    with _open_out(args.csv) as out:
        write_ccdh_csv(est.rows(), out)
    report = estimate_report(args.model, g, params, est, log, exact, timer)
    _dump_json(report, args.report, sys.stderr if args.csv in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_verify_bma(args) -> int:
    with open(args.exact, encoding="utf-8") as fh:
        exact = ccdh_from_rows(read_ccdh_csv(fh, args.exact))
    with open(args.estimate, encoding="utf-8") as fh:
        est = read_ccdh_csv(fh, args.estimate)
    verdict = bma_check(exact, est, args.eps_d, args.eps_r)
    out = {"schema": SCHEMA, **verdict.summary(),
           "violations": [{"d": d, "estimate": e, "lower": lo, "upper": hi}
                          for d, e, lo, hi in verdict.violations[:args.max_listed]]}
    _dump_json(out, args.json)
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_gadget(args) -> int:
    M = args.m_index
    spec = GadgetSpec(args.kind, M, args.h if args.kind == HINDEX else None, args.n_total)
    inst = gen_disjointness_instance(M, args.intersecting, make_rng(args.seed))
    g = build_gadget(spec, inst)
    validate_gadget(g, spec, inst)
    header = [f"gadget kind={spec.kind} M={M} h={spec.h} n={g.n} m={g.m}"]
    write_edge_list(g, args.output, header)
    side = args.sidecar or f"{args.output}.json"
    Path(side).write_text(sidecar(spec, inst, args.seed) + "\n", encoding="utf-8")
    return EXIT_OK


def _synth_graph(args):
    if args.model == "gnp":
        _need(args, "n", "p")
        return synth.gnp(args.n, args.p, args.seed)
    if args.model == "chung-lu":
        _need(args, "n")
        return synth.chung_lu(args.n, args.exponent, args.avg_degree, args.max_degree, args.seed)
    if args.model == "star":
        _need(args, "leaves")
        return synth.star(args.leaves)
    if args.model == "path":
        _need(args, "n")
        return synth.path(args.n)
    _need(args, "pairs")
    return synth.matching(args.pairs)


def _need(args, *names):
    missing = [f"--{x}" for x in names if getattr(args, x) is None]
    if missing:
        raise _Usage(f"synth {args.model} requires {', '.join(missing)}")


def cmd_synth(args) -> int:
    g = _synth_graph(args)
    write_edge_list(g, args.output if args.output != "-" else sys.stdout)
    return EXIT_OK


def _one_trial(g, exact, model, base_params: dict, seed: int, stream) -> dict:
    timer = Timer()
    try:
        params = EstimatorParams(**{**base_params, "seed": seed})
        with timer.phase("estimate"):
            est, _ = run_model(model, g, params, stream)
        verdict = bma_check(exact, est, params.eps_d, params.eps_r)
        s = verdict.summary()
        excess = s["worst"]["excess"] if s["worst"] else 0.0
        return {"seed": seed, "pass": verdict.passed, "mode": est.mode,
                "violations": len(verdict.violations), "worst_excess": excess,
                "ms": timer.phases["estimate"]}
    except CcdhError as exc:
        return {"seed": seed, "error": f"{type(exc).__name__}: {exc}"}


def bench(g, model: str, base_params: dict, trials: int, seed_base: int = 0,
          jobs: int = 1, stream=None) -> dict:
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    exact = exact_ccdh(g)
    seeds = range(seed_base, seed_base + trials)
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            rows = list(pool.map(lambda s: _one_trial(g, exact, model, base_params, s, stream), seeds))
    else:
        rows = [_one_trial(g, exact, model, base_params, s, stream) for s in seeds]
    ok = [r for r in rows if "error" not in r]
    times = np.array([r["ms"] for r in ok]) if ok else np.zeros(1)
    return {
        "schema": SCHEMA,
        "model": model,
        "trials": trials,
        "errors": [r for r in rows if "error" in r],
        "passes": sum(r["pass"] for r in ok),
        "pass_rate": sum(r["pass"] for r in ok) / trials,
        "mean_violations": float(np.mean([r["violations"] for r in ok])) if ok else None,
        "max_violations": max((r["violations"] for r in ok), default=None),
        "max_excess": max((r["worst_excess"] for r in ok), default=None),
        "modes": sorted({r["mode"] for r in ok}),
        "timing_ms": {"p50": float(np.percentile(times, 50)),
                      "p90": float(np.percentile(times, 90)),
                      "max": float(times.max())},
    }


def cmd_bench(args) -> int:
    g, summary, compacted = _load(args)
    exact = exact_ccdh(g)
    base = {"eps_d": args.eps_d, "eps_r": args.eps_r,
            "h_prime": resolve_h_prime(args.h_prime, exact), "c": args.c,
            "fallback": not args.no_fallback}
    EstimatorParams(**base)  # validate once up front
    stream = _stream_for(args, g, summary, compacted) if args.model.startswith("stream") else None
    agg = bench(g, args.model, base, args.trials, args.seed_base, args.jobs, stream)
    agg["params"] = base
    agg["graph_stats"] = graph_stats(g, exact)
    _dump_json(agg, args.json)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _add_input(p, compact=True):
    p.add_argument("input", help="edge-list file (SNAP text layout)")
    p.add_argument("--n", type=int, help="vertex count (default: max id + 1)")
    p.add_argument("--quiet", action="store_true", help="suppress the ingest summary")
    if compact:
        p.add_argument("--compact", action="store_true",
                       help="relabel active vertices to 0..n_a-1 and drop isolated ones")
        p.add_argument("--mapping", help="with --compact, write old ids (one per line) here")


def _add_eps(p):
    p.add_argument("--eps-d", type=float, required=True)
    p.add_argument("--eps-r", type=float, required=True)


def _add_engine(p):
    _add_eps(p)
    p.add_argument("--model", choices=MODELS, default="stream1")
    p.add_argument("--c", type=float, default=DEFAULT_C)
    p.add_argument("--h-prime", default="auto", help="'auto' (exact h) or a positive integer")
    p.add_argument("--no-fallback", action="store_true",
                   help="sample even when q >= n or r >= m instead of computing exactly")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ccdhest", description="Exact and sampled ccdh estimation.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact ccdh and graph statistics")
    _add_input(p)
    p.add_argument("--csv", default="-", help="ccdh CSV output (default stdout)")
    p.add_argument("--json", help="stats JSON output (default: stderr, or stdout with --csv FILE)")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("estimate", help="run one estimator")
    _add_input(p)
    _add_engine(p)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--csv", default="-", help="estimate CSV output (default stdout)")
    p.add_argument("--report", help="run report JSON (default: stderr, or stdout with --csv FILE)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify-bma", help="check an estimate CSV against an exact CSV")
    p.add_argument("exact")
    p.add_argument("estimate")
    _add_eps(p)
    p.add_argument("--json", help="verdict JSON output (default stdout)")
    p.add_argument("--max-listed", type=int, default=50, help="violations to list")
    p.set_defaults(func=cmd_verify_bma)

    p = sub.add_parser("gadget", help="write a validated disjointness gadget")
    p.add_argument("--kind", choices=(GENERAL, HINDEX), required=True)
    p.add_argument("--m", "--m-index", dest="m_index", type=int, required=True,
                   help="instance length M")
    p.add_argument("--h", type=int, help="target h-index (hindex kind, multiple of 4)")
    p.add_argument("--n-total", type=int, help="total vertices incl. isolated padding (hindex)")
    p.add_argument("--intersecting", action="store_true")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--sidecar", help="sidecar JSON path (default: OUTPUT.json)")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("synth", help="write a synthetic graph")
    p.add_argument("--model", choices=("gnp", "chung-lu", "star", "path", "matching"), required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--leaves", type=int)
    p.add_argument("--pairs", type=int)
    p.add_argument("--exponent", type=float, default=2.5, help="chung-lu power-law exponent")
    p.add_argument("--avg-degree", type=float, default=10.0)
    p.add_argument("--max-degree", type=float, help="chung-lu expected-degree cap")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="repeat an estimator over many seeds")
    p.add_argument("--input", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(compact=False, mapping=None)
    _add_engine(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed-base", type=_seed, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", help="aggregate JSON output (default stdout)")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (_Usage, ParameterError) as exc:
        print(f"ccdhest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GadgetValidationError as exc:
        print(f"ccdhest: gadget validation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (CcdhError, OSError) as exc:
        print(f"ccdhest: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
