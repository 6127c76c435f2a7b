import json
import subprocess
import sys

import pytest

from gridroute.cli import eval_expr, main, parse_expr, ExprError, run_sweep
from gridroute.instances import parse_instance


def cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_x_family(capsys):
    code, out, _ = cli(capsys, "simulate", "--family", "x_adversarial", "--lmax", "5", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["time"] == 8 and rep["lb"] == 8 and rep["args"]["lmax"] == 5


def test_simulate_text_and_trace_file(capsys, tmp_path):
    trace = tmp_path / "t.txt"
    code, out, _ = cli(capsys, "simulate", "--family", "random_perm", "--grid", "tri", "--n", "6",
                       "--seed", "3", "--trace-out", str(trace))
    assert code == 0
    assert out.startswith("# args ") and "completion_time" in out and "satisfied" in out
    assert trace.read_text().startswith("step 1:")


def test_simulate_empty_instance(capsys):
    code, out, _ = cli(capsys, "simulate", "--instance", "empty", "--grid", "hex", "--json")
    assert code == 0 and json.loads(out)["time"] == 0


def test_simulate_r_central_half(capsys):
    code, out, _ = cli(capsys, "simulate", "--family", "r_central", "--grid", "hex",
                       "--duplex", "half", "--r", "4", "--json")
    assert code == 0 and json.loads(out)["time"] == 20


def test_simulate_timeout_and_usage(capsys):
    code, _, err = cli(capsys, "simulate", "--family", "x_adversarial", "--lmax", "5",
                       "--max-steps", "2")
    assert code == 3 and "timeout" in err
    with pytest.raises(SystemExit) as e:
        main(["simulate", "--family", "nope"])
    assert e.value.code == 2
    code, _, _ = cli(capsys, "simulate", "--lmax", "3")
    assert code == 2


def test_simulate_tie_break_option(capsys):
    code, out, _ = cli(capsys, "simulate", "--family", "random_lk", "--grid", "tri", "--n", "7",
                       "--l", "2", "--k", "1", "--lmax", "2", "--tie-break", "farthest", "--json")
    assert code == 0 and json.loads(out)["time"] <= 3


def test_generate_writes_instance_and_cert(capsys, tmp_path):
    out = tmp_path / "x.inst"
    code, _, _ = cli(capsys, "generate", "--family", "x_adversarial", "--lmax", "3",
                     "--duplex", "half", "--out", str(out))
    assert code == 0
    inst = parse_instance(out.read_text())
    assert len(inst.demands) == 8
    assert (tmp_path / "x.inst.cert").read_text().startswith("certificate edge-congestion 8")
    code, text, _ = cli(capsys, "bounds", "--grid", "hex", "--l", "1", "--k", "1", "--lmax", "3",
                        "--duplex", "half", "--instance", str(out), "--cert", str(out) + ".cert")
    assert code == 0
    rep = json.loads(text.strip().splitlines()[-1])
    assert rep["congestion_bound"] == 8 and rep["bisection_bound"] == 8


def test_bounds_table(capsys):
    code, out, _ = cli(capsys, "bounds", "--grid", "tri", "--l", "100", "--k", "1", "--lmax", "50")
    assert code == 0
    rep = json.loads(out.strip().splitlines()[-1])
    assert rep["lb2"] == 125 and rep["lb_combined"] == 125


def test_bad_instance_file(capsys, tmp_path):
    p = tmp_path / "bad.inst"
    p.write_text("grid square full rect:2,2\nsquare:0,0 -> square:9,9\n")
    code, _, err = cli(capsys, "simulate", "--instance", str(p))
    assert code == 4 and "line 2" in err
    code, _, _ = cli(capsys, "simulate", "--instance", str(tmp_path / "missing"))
    assert code == 4


def test_verify_good_and_bad(capsys, tmp_path):
    inst = tmp_path / "i.inst"
    inst.write_text("grid square full rect:3,3\nlimits 1 1\nsquare:0,0 -> square:2,0\n")
    good = tmp_path / "good.txt"
    good.write_text("step 1: 0 square:0,0 -> square:1,0\nstep 2: 0 square:1,0 -> square:2,0\n")
    assert cli(capsys, "verify", "--instance", str(inst), "--trace", str(good))[0] == 0
    bad = tmp_path / "bad.txt"
    bad.write_text("step 1: 0 square:0,0 -> square:1,1\n")
    code, out, _ = cli(capsys, "verify", "--instance", str(inst), "--trace", str(bad))
    assert code == 1 and "adjacency" in out and "undelivered" in out


def test_embed_roundtrip(capsys, tmp_path):
    inst = tmp_path / "sq.inst"
    cli(capsys, "generate", "--family", "random_perm", "--grid", "square", "--n", "4",
        "--out", str(inst))
    trace = tmp_path / "sq.txt"
    cli(capsys, "simulate", "--instance", str(inst), "--trace-out", str(trace))
    hex_trace = tmp_path / "hex.txt"
    hex_inst = tmp_path / "hex.inst"
    code, _, _ = cli(capsys, "embed", "--to", "hex", "--trace", str(trace), "--instance", str(inst),
                     "--out", str(hex_trace), "--instance-out", str(hex_inst))
    assert code == 0
    code, _, _ = cli(capsys, "verify", "--instance", str(hex_inst), "--trace", str(hex_trace),
                     "--any-path", "--capacity", "2")
    assert code == 0


def test_color_schedule(capsys, tmp_path):
    inst = tmp_path / "lk.inst"
    cli(capsys, "generate", "--family", "random_lk", "--grid", "tri", "--n", "4", "--l", "2",
        "--k", "2", "--lmax", "2", "--out", str(inst))
    code, out, _ = cli(capsys, "color", "--instance", str(inst), "--method", "greedy", "--schedule")
    assert code == 0 and "cost" in out
    code, _, err = cli(capsys, "color", "--instance", str(inst), "--method", "exact")
    assert code == 4 and "exact limit" in err


def test_sweep_orders_rows_and_checks_expectations(capsys, tmp_path):
    spec = {"cells": [
        {"family": "r_central", "grid": "tri", "params": {"r": {"range": [1, 3]}},
         "expect": ["time == comb(r + 1, 2)", "packets == 6 * comb(r + 1, 2)"]},
        {"family": "x_adversarial", "params": {"lmax": [2, 3]}, "expect": ["time == 2*lmax - 2"]},
    ]}
    rows = run_sweep(spec)
    assert [r["cell"] for r in rows] == [0, 0, 0, 1, 1] and all(r["ok"] for r in rows)
    assert run_sweep(spec, jobs=2) == rows
    p = tmp_path / "s.json"
    p.write_text(json.dumps(spec))
    code, out, _ = cli(capsys, "sweep", str(p))
    assert code == 0 and "# 5 rows, 0 failed" in out
    spec["cells"][1]["expect"] = ["time == 0"]
    p.write_text(json.dumps(spec))
    code, out, _ = cli(capsys, "sweep", str(p))
    assert code == 1 and "FAIL time == 0" in out


def test_sweep_bad_specs(capsys, tmp_path):
    p = tmp_path / "s.json"
    p.write_text("")
    assert cli(capsys, "sweep", str(p))[0] == 0
    p.write_text(json.dumps({"cells": [{"family": "x_adversarial", "params": {"lmax": 3},
                                        "expect": ["__import__('os')"]}]}))
    assert cli(capsys, "sweep", str(p))[0] == 4
    p.write_text(json.dumps({"cells": [{"family": "bogus"}]}))
    assert cli(capsys, "sweep", str(p))[0] == 4


def test_expression_whitelist():
    tree = parse_expr("ceil(a / 2) + max(b, 3) <= 10 and a % 2 == 1", {"a", "b"})
    assert eval_expr(tree, {"a": 5, "b": 4}) is True
    for bad in ("a.__class__", "open('x')", "[x for x in a]", "c + 1", "lambda: 0"):
        with pytest.raises(ExprError):
            parse_expr(bad, {"a"})


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gridroute", "bounds", "--grid", "tri",
                           "--l", "6", "--k", "2", "--lmax", "5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout.strip().splitlines()[-1])["ub"] == 24
