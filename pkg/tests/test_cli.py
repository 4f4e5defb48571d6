import json
import subprocess
import sys

import numpy as np
import pytest

from ccdhest.ccdh import Ccdh, ccdh_from_rows, read_ccdh_csv
from ccdhest.cli import bench, main
from ccdhest.estimator import EstimatorParams
from ccdhest.graph import Graph, read_edge_list, write_edge_list
from ccdhest.samplers import make_rng
from ccdhest.synth import chung_lu


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_exact_path(tmp_path, capsys):
    src = write(tmp_path, "p.txt", "0 1\n1 2\n")
    code, out, err = run(["exact", src], capsys)
    assert code == 0
    assert out.splitlines() == ["degree,ccdh", "0,3", "1,3", "2,1"]
    stats = json.loads(err[err.index("{"):])
    assert stats == {"schema": 1, "n": 3, "m": 2, "n_a": 3, "h": 1, "z": pytest.approx(2 ** 0.5)}
    assert "pairs=2" in err


def test_exact_empty_with_n(tmp_path, capsys):
    src = write(tmp_path, "e.txt", "")
    code, out, err = run(["exact", src, "--n", "4", "--quiet"], capsys)
    assert code == 0
    assert out.splitlines() == ["degree,ccdh", "0,4"]
    assert json.loads(err)["z"] is None


def test_exact_csv_round_trip(tmp_path, capsys):
    g = chung_lu(3000, seed=5)
    src = str(tmp_path / "g.txt")
    write_edge_list(g, src)
    csv_path, js = str(tmp_path / "c.csv"), str(tmp_path / "s.json")
    assert run(["exact", src, "--csv", csv_path, "--json", js, "--quiet"], capsys)[0] == 0
    with open(csv_path) as fh:
        c = ccdh_from_rows(read_ccdh_csv(fh))
    assert isinstance(c, Ccdh) and c.n == 3000
    assert json.load(open(js))["m"] == g.m


@pytest.mark.parametrize("text", ["0 1\nfoo\n", "0 a\n"])
def test_parse_error_exit_3(tmp_path, capsys, text):
    code, _, err = run(["exact", write(tmp_path, "b.txt", text), "--quiet"], capsys)
    assert code == 3 and "b.txt:" in err


def test_missing_file_exit_3(tmp_path, capsys):
    assert run(["exact", str(tmp_path / "nope.txt")], capsys)[0] == 3


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["estimate"])
    assert exc.value.code == 2


def edge_file_nm(tmp_path, n, m, seed=0):
    rng = make_rng(seed)
    iu = np.triu_indices(n, 1)
    pick = rng.choice(len(iu[0]), size=m, replace=False)
    g = Graph.from_edges(n, np.stack([iu[0][pick], iu[1][pick]], axis=1))
    p = str(tmp_path / f"g{n}_{m}.txt")
    write_edge_list(g, p)
    return p


def test_estimate_query_na_report(tmp_path, capsys):
    src = edge_file_nm(tmp_path, 100, 200)
    rep = str(tmp_path / "r.json")
    args = ["estimate", src, "--model", "query-na", "--eps-d", "0.5", "--eps-r", "0.5",
            "--c", "1", "--h-prime", "5", "--csv", str(tmp_path / "e.csv"), "--report", rep, "--quiet"]
    assert run(args + ["--no-fallback"], capsys)[0] == 0
    report = json.load(open(rep))
    assert report["schema"] == 1
    assert report["query_log"] == {"degree": 369, "neighbor": 0, "edge_exist": 0, "random_edge": 737}
    assert report["samples"]["q_over_n"] == 369 / 100
    assert report["samples"]["r_over_m"] == 737 / 200
    assert set(report["graph_stats"]) == {"n", "m", "n_a", "h", "z"}
    # default keeps the exact fallback, which reads every degree
    assert run(args, capsys)[0] == 0
    assert json.load(open(rep))["query_log"]["degree"] == 100


@pytest.mark.parametrize("model", ["stream1", "stream2", "query-na", "query-ad"])
def test_estimate_fallback_equals_exact_csv(tmp_path, capsys, model):
    src = edge_file_nm(tmp_path, 60, 150, seed=3)
    ex, es = str(tmp_path / "x.csv"), str(tmp_path / "e.csv")
    run(["exact", src, "--csv", ex, "--quiet", "--json", str(tmp_path / "s.json")], capsys)
    code, out, _ = run(["estimate", src, "--model", model, "--eps-d", "0.2", "--eps-r", "0.2",
                        "--c", "5", "--csv", es, "--report", str(tmp_path / "r.json"), "--quiet"],
                       capsys)
    assert code == 0
    report = json.load(open(tmp_path / "r.json"))
    assert report["mode"] == "exact-fallback"
    exact_rows = open(ex).read().splitlines()
    est_rows = open(es).read().splitlines()
    # the estimate CSV starts at d = 1
    assert est_rows == [exact_rows[0]] + exact_rows[2:]
    assert run(["verify-bma", ex, es, "--eps-d", "0.1", "--eps-r", "0.1"], capsys)[0] == 0


def test_estimate_ratio_identity(tmp_path, capsys):
    g = chung_lu(20_000, seed=2)
    src = str(tmp_path / "cl.txt")
    write_edge_list(g, src)
    rep = str(tmp_path / "r.json")
    run(["estimate", src, "--eps-d", "0.2", "--eps-r", "0.2", "--csv", str(tmp_path / "e.csv"),
         "--report", rep, "--quiet"], capsys)
    s = json.load(open(rep))["samples"]
    assert abs(s["q_over_n"] - s["r_over_m"]) <= 1 / 20_000 + 1 / g.m


def test_estimate_stream_from_file_with_duplicates(tmp_path, capsys):
    src = write(tmp_path, "d.txt", "0 1\n1 0\n1 2\n2 3\n3 3\n")
    code, out, _ = run(["estimate", src, "--model", "stream2", "--eps-d", "0.5", "--eps-r", "0.5",
                        "--h-prime", "1", "--quiet", "--report", str(tmp_path / "r.json")], capsys)
    assert code == 0 and out.startswith("degree,ccdh")


def test_verify_bma_cases(tmp_path, capsys):
    star = write(tmp_path, "star.csv", "degree,ccdh\n0,4\n1,4\n2,1\n3,1\n")
    match = write(tmp_path, "match.csv", "degree,ccdh\n0,4\n1,4\n")
    code, out, _ = run(["verify-bma", match, star, "--eps-d", "0.4", "--eps-r", "0.5"], capsys)
    assert code == 1
    verdict = json.loads(out)
    assert verdict["violations"][0]["d"] == 2
    assert run(["verify-bma", star, star, "--eps-d", "0.4", "--eps-r", "0.5"], capsys)[0] == 0
    # absent high-d rows where exact is 0 still pass
    short = write(tmp_path, "short.csv", "degree,ccdh\n1,4\n")
    assert run(["verify-bma", match, short, "--eps-d", "0.4", "--eps-r", "0.5"], capsys)[0] == 0


def test_verify_bma_bad_inputs(tmp_path, capsys):
    good = write(tmp_path, "g.csv", "degree,ccdh\n0,4\n1,4\n")
    bad = write(tmp_path, "b.csv", "degree,ccdh\n0,four\n")
    nonmono = write(tmp_path, "n.csv", "degree,ccdh\n0,4\n1,2\n2,3\n")
    assert run(["verify-bma", good, bad, "--eps-d", "0.1", "--eps-r", "0.1"], capsys)[0] == 3
    assert run(["verify-bma", nonmono, good, "--eps-d", "0.1", "--eps-r", "0.1"], capsys)[0] == 3


def test_gadget_general(tmp_path, capsys):
    out = str(tmp_path / "gen.txt")
    assert run(["gadget", "--kind", "general", "--m", "2", "--intersecting", "-o", out], capsys)[0] == 0
    g, _ = read_edge_list(out)
    assert g.m == 4
    side = json.load(open(out + ".json"))
    assert side["intersecting"] is True and side["M"] == 2
    code, csv_out, _ = run(["exact", out, "--n", "10", "--quiet"], capsys)
    assert "2,1" in csv_out.splitlines()


def test_gadget_hindex(tmp_path, capsys):
    out = str(tmp_path / "h.txt")
    assert run(["gadget", "--kind", "hindex", "--h", "4", "--m-index", "4", "--intersecting",
                "-o", out], capsys)[0] == 0
    code, csv_out, err = run(["exact", out, "--quiet"], capsys)
    assert "6,1" in csv_out.splitlines()
    assert json.loads(err)["h"] == 4


def test_gadget_bad_h_writes_nothing(tmp_path, capsys):
    out = tmp_path / "bad.txt"
    code, _, err = run(["gadget", "--kind", "hindex", "--h", "5", "--m", "8", "-o", str(out)], capsys)
    assert code == 2 and "multiple of 4" in err
    assert not out.exists()


@pytest.mark.parametrize("argv,n,m", [
    (["--model", "star", "--leaves", "5"], 6, 5),
    (["--model", "matching", "--pairs", "2"], 4, 2),
    (["--model", "path", "--n", "4"], 4, 3),
])
def test_synth_shapes(tmp_path, capsys, argv, n, m):
    out = str(tmp_path / "s.txt")
    assert run(["synth", *argv, "-o", out], capsys)[0] == 0
    g, _ = read_edge_list(out)
    assert (g.n, g.m) == (n, m)


def test_synth_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for p in (a, b):
        run(["synth", "--model", "gnp", "--n", "1000", "--p", "0.01", "--seed", "7", "-o", str(p)], capsys)
    assert a.read_bytes() == b.read_bytes()
    run(["synth", "--model", "chung-lu", "--n", "2000", "--exponent", "2.2", "--max-degree", "50",
         "-o", str(a)], capsys)
    g, _ = read_edge_list(a)
    assert np.diff(g.indptr).max() < 120


def test_synth_missing_flag(capsys):
    assert run(["synth", "--model", "gnp", "--n", "10"], capsys)[0] == 2


def test_bench_trials_one_matches_single(tmp_path, capsys):
    g = chung_lu(3000, seed=4)
    base = {"eps_d": 0.3, "eps_r": 0.3, "h_prime": 8, "c": 0.01}
    agg = bench(g, "stream1", base, trials=1, seed_base=5)
    from ccdhest.ccdh import bma_check, exact_ccdh
    from ccdhest.runner import run_model
    est, _ = run_model("stream1", g, EstimatorParams(**base, seed=5))
    v = bma_check(exact_ccdh(g), est, 0.3, 0.3)
    assert agg["passes"] == int(v.passed) and agg["max_violations"] == len(v.violations)


def test_bench_fallback_always_passes(tmp_path, capsys):
    src = edge_file_nm(tmp_path, 50, 100, seed=1)
    code, out, _ = run(["bench", "--input", src, "--model", "query-ad", "--eps-d", "0.2",
                        "--eps-r", "0.2", "--c", "5", "--trials", "6", "--jobs", "3", "--quiet"], capsys)
    agg = json.loads(out)
    assert code == 0 and agg["pass_rate"] == 1.0 and agg["modes"] == ["exact-fallback"]


def test_module_entry_point(tmp_path):
    src = write(tmp_path, "p.txt", "0 1\n1 2\n")
    res = subprocess.run([sys.executable, "-m", "ccdhest", "exact", src, "--quiet"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("degree,ccdh")
