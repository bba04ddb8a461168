import io
import json
import subprocess
import sys

import pytest

from hhbounds.cli import main

SMALL_CONFIG = """
[sweep]
functions =
    lin = x
    one = 1
intervals = 0:1
p = 1, 2
q = 1
specs = first:1:1:1, first:0.5:0.5:0.5
k = 2
l = 1, 2
grid = 7
random_trials = 50
"""


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def fields(text):
    """Parse the human key/value layout."""
    return dict(line.split(None, 1) for line in text.strip().splitlines())


def test_beta_human_and_json():
    code, out, _ = run("beta", "2", "3")
    assert code == 0 and out == "0.08333333333333333\n"
    code, out, _ = run("beta", "2", "3", "--format", "json")
    assert json.loads(out) == {"x": 2.0, "y": 3.0, "beta": pytest.approx(1 / 12, rel=1e-14)}


def test_beta_domain_error_exit_1():
    code, out, err = run("beta", "0", "1")
    assert code == 1 and out == "" and "DomainError" in err


def test_integrate_plain_and_weighted():
    code, out, _ = run("integrate", "--f", "x^2", "--a", "0", "--b", "1")
    assert code == 0 and float(fields(out)["value"]) == pytest.approx(1 / 3, abs=1e-11)
    code, out, _ = run("integrate", "--f", "1", "--a", "0", "--b", "2", "--p", "1", "--q", "2", "--format", "csv")
    header, values = out.strip().splitlines()
    assert header == "value,err_estimate,evals"
    assert float(values.split(",")[0]) == pytest.approx(4 / 3, abs=1e-12)


def test_parse_error_exit_1():
    code, out, err = run("integrate", "--f", "x^", "--a", "0", "--b", "1")
    assert code == 1 and "offset 2" in err


def test_usage_error_exit_1():
    code, _, err = run("bound", "--theorem", "t9", "--f", "x", "--a", "0", "--b", "1")
    assert code == 1 and "error" in err
    code, _, err = run("check-class", "--f", "x")
    assert code == 1 and "--range" in err


def test_check_class_satisfied_and_violated():
    code, out, _ = run("check-class", "--f", "x^2", "--xmax", "10")
    assert code == 0 and fields(out)["status"] == "satisfied_on_samples"
    code, out, _ = run("check-class", "--f", "sqrt(x)", "--range", "0", "1", "--format", "json")
    rec = json.loads(out)
    assert code == 0 and rec["status"] == "violated"
    assert rec["witness_lhs"] > rec["witness_rhs"]


def test_check_class_kinds():
    code, out, _ = run("check-class", "--f", "sin(x)", "--range", "0", "6", "--kind", "quasi")
    assert fields(out)["status"] == "violated"
    code, out, _ = run("check-class", "--f=-x^2", "--range", "-1", "1", "--kind", "convex")
    assert fields(out)["status"] == "violated"


def test_check_class_seed_determinism():
    argv = ("check-class", "--f", "sin(3*x) + 2", "--xmax", "5", "--s", "0.5", "--m", "0.5",
            "--grid", "3", "--trials", "300", "--format", "json")
    assert run(*argv, "--seed", "5")[1] == run(*argv, "--seed", "5")[1]


def test_verify_lemma():
    code, out, _ = run("verify-lemma", "--f", "x^3", "--a", "1", "--b", "2", "--p", "1", "--q", "1")
    rec = fields(out)
    assert code == 0 and rec["pass"] == "pass"
    assert float(rec["lhs"]) == pytest.approx(0.6, abs=1e-11)


def test_bound_t4_equality():
    code, out, _ = run("bound", "--theorem", "t4", "--f", "x", "--a", "0", "--b", "1", "--format", "json")
    rec = json.loads(out)
    assert code == 0 and rec["pass"] is True
    assert rec["bound"] == pytest.approx(1 / 12, abs=1e-15)
    assert rec["lhs"] == pytest.approx(1 / 12, abs=1e-12)
    assert rec["membership"] == "satisfied_on_samples"


@pytest.mark.parametrize(
    "theorem, extra, expected",
    [("t1", (), 1 / 6), ("t2", ("--k", "2"), (1 / 30) ** 0.5), ("t5sharp", ("--s", "0.5", "--k", "2"), 0.105409255)],
)
def test_bound_values(theorem, extra, expected):
    code, out, _ = run("bound", "--theorem", theorem, "--f", "x", "--a", "0", "--b", "1", *extra, "--format", "json")
    assert code == 0
    assert json.loads(out)["bound"] == pytest.approx(expected, rel=1e-8)


def test_bound_violated_hypothesis_does_not_fail_exit():
    argv = ("bound", "--theorem", "t1", "--f", "exp(-10000*(x-0.4)^2)", "--a", "0", "--b", "1",
            "--format", "json")
    # With the default sampling the hump is found and the failed inequality is excused ...
    code, out, _ = run(*argv)
    rec = json.loads(out)
    assert rec["pass"] is False and rec["membership"] == "violated" and code == 0
    # ... with a blind sampler it is a real failure.
    code, out, _ = run(*argv, "--grid", "3", "--trials", "0")
    assert code == 2


def test_hh_exit_codes():
    code, out, _ = run("hh", "--f", "x^2", "--a", "0", "--b", "1")
    assert code == 0 and fields(out)["left_pass"] == "pass"
    code, out, _ = run("hh", "--f=-x^2", "--a", "0", "--b", "1")
    assert code == 2 and fields(out)["right_pass"] == "FAIL"
    code, _, _ = run("bound", "--theorem", "hh", "--f", "exp(x)", "--a", "0", "--b", "2")
    assert code == 0


def test_sweep_small_config(tmp_path):
    cfg = tmp_path / "small.ini"
    cfg.write_text(SMALL_CONFIG)
    code, out, _ = run("sweep", "--config", str(cfg), "--tightest")
    assert code == 0
    assert " 0 fail" in out
    assert "tightest one [0, 1] p=1 q=1 spec=first:1.0:1.0:1.0: T4" in out
    assert "groups without a passing row: 0" in out


def test_sweep_seed_and_output_determinism(tmp_path):
    cfg = tmp_path / "small.ini"
    cfg.write_text(SMALL_CONFIG)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("sweep", "--config", str(cfg), "--seed", "3", "--output", str(a), "--format", "csv")[0] == 0
    assert run("sweep", "--config", str(cfg), "--seed", "3", "--output", str(b), "--format", "csv")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("function,a,b,p,q,sense,s,alpha,m,theorem")


def test_sweep_bad_config(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[sweep]\nfunctions = x\n")
    code, _, err = run("sweep", "--config", str(cfg))
    assert code == 1 and "missing keys" in err
    code, _, err = run("sweep", "--config", str(tmp_path / "nope.ini"))
    assert code == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hhbounds", "beta", "3", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert float(proc.stdout) == pytest.approx(1 / 12, rel=1e-14)
