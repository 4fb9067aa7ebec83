import csv
import io
import json
import math
import subprocess
import sys

import pytest

from pastvar import __version__
from pastvar.cli import EXIT_CHECK_FAILED, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_OK, EXIT_PARSE, MEASURES, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_uniform_past_varentropy(capsys):
    code, out, _ = run(capsys, "eval", "--dist", "family=uniform b=1", "--measure", "past-varentropy", "--t", "0.5")
    assert code == EXIT_OK
    assert out.startswith("past-varentropy(t=0.5) = 0 ")
    assert "method=closed_form" in out


def test_eval_power2_past_entropy(capsys):
    code, out, _ = run(capsys, "eval", "--dist", "family=power k=2", "--measure", "past-entropy",
                       "--t", "0.5", "--format", "json")
    assert code == EXIT_OK
    assert abs(json.loads(out)["value"] - (0.5 + math.log(0.25))) <= 1e-12


def test_eval_twelve_significant_digits(capsys):
    code, out, _ = run(capsys, "eval", "--dist", "family=exponential lambda=1", "--measure",
                       "reversed-hazard", "--t", "1")
    assert code == EXIT_OK
    assert "= 0.581976706869 " in out


def test_eval_quadrature_method_flag(capsys):
    code, out, _ = run(capsys, "eval", "--dist", "family=exponential lambda=1", "--measure",
                       "past-varentropy", "--t", "1", "--method", "quadrature", "--format", "json")
    rec = json.loads(out)
    assert code == EXIT_OK and rec["method"] == "quadrature" and rec["error"] > 0
    assert abs(rec["value"] - 0.079326405792207681) <= 1e-8


@pytest.mark.parametrize("measure", MEASURES)
def test_every_measure_evaluates(capsys, measure):
    spec = "family=exponential lambda=1 | prhr a=2" if measure.startswith("prhr") else "family=weibull shape=2"
    code, out, _ = run(capsys, "eval", "--dist", spec, "--measure", measure, "--t", "0.8",
                       "--alpha", "0.5", "--format", "json")
    assert code == EXIT_OK
    rec = json.loads(out)
    assert math.isfinite(rec["value"]) and rec["error"] >= 0


def test_prhr_measure_needs_prhr_stage(capsys):
    code, _, err = run(capsys, "eval", "--dist", "family=uniform b=1", "--measure",
                       "prhr-past-entropy", "--t", "0.5")
    assert code == EXIT_DOMAIN and "prhr" in err


@pytest.mark.parametrize("argv, expected", [
    (["eval", "--dist", "family=foo", "--measure", "entropy", "--t", "1"], EXIT_PARSE),
    (["eval", "--dist", "family=uniform b=-1", "--measure", "entropy", "--t", "1"], EXIT_DOMAIN),
    (["eval", "--dist", "family=uniform b=1", "--measure", "past-entropy", "--t", "2"], EXIT_DOMAIN),
    (["curve", "--dist", "family=uniform b=1", "--measures", "past-entropy,bogus",
      "--t-min", "0.1", "--t-max", "0.9"], EXIT_PARSE),
    (["curve", "--dist", "family=uniform b=1", "--measures", "past-entropy",
      "--t-min", "0.5", "--t-max", "0.1"], EXIT_DOMAIN),
    (["verify", "--dist", "family=uniform b=1", "--suite", "nonsense"], EXIT_PARSE),
    (["eval", "--dist", "family=exponential lambda=1", "--measure", "past-varentropy",
      "--t", "3", "--method", "quadrature", "--max-subdiv", "1", "--abs-tol", "1e-15",
      "--rel-tol", "1e-15"], EXIT_NUMERIC),
])
def test_exit_codes(capsys, argv, expected):
    code, out, err = run(capsys, *argv)
    assert code == expected
    assert "nan" not in out.lower()
    assert err.startswith("pastvar: ")


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as info:
        main(["eval", "--dist", "family=uniform b=1", "--measure", "nope", "--t", "1"])
    assert info.value.code == 2


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_curve_uniform_past_entropy_is_log_t(capsys):
    code, out, _ = run(capsys, "curve", "--dist", "family=uniform b=1", "--measures", "past-entropy",
                       "--t-min", "0.1", "--t-max", "0.9", "--n-points", "9")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "t,past-entropy,past-entropy_err,past-entropy_method"
    rows = _csv(out)
    assert len(rows) == 9
    ts = [float(r["t"]) for r in rows]
    assert ts == sorted(ts) and len(set(ts)) == 9
    for r in rows:
        assert abs(float(r["past-entropy"]) - math.log(float(r["t"]))) <= 1e-12


def test_curve_power2_constant_varentropy(capsys):
    code, out, _ = run(capsys, "curve", "--dist", "family=power k=2", "--measures", "past-varentropy",
                       "--t-min", "0.05", "--t-max", "0.95", "--n-points", "12")
    assert code == EXIT_OK
    assert all(float(r["past-varentropy"]) == 0.25 for r in _csv(out))


def test_curve_exponential_entropy_increases_to_one(capsys):
    code, out, _ = run(capsys, "curve", "--dist", "family=exponential lambda=1", "--measures",
                       "past-entropy,past-varentropy", "--t-min", "0.1", "--t-max", "5",
                       "--n-points", "30", "--method", "quadrature")
    assert code == EXIT_OK
    h = [float(r["past-entropy"]) for r in _csv(out)]
    assert all(b > a for a, b in zip(h, h[1:]))
    assert h[-1] < 1 and 1 - h[-1] < 0.1


def test_curve_output_stable_and_threads_agree(capsys, tmp_path):
    base = ["curve", "--dist", "family=weibull shape=2 | linear a=2 b=1", "--measures",
            "past-entropy,past-varentropy,mean-inactivity-time", "--t-min", "1.2", "--t-max", "4",
            "--n-points", "16"]
    paths = [tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"]
    assert main(base + ["--out", str(paths[0])]) == EXIT_OK
    assert main(base + ["--out", str(paths[1])]) == EXIT_OK
    assert main(base + ["--out", str(paths[2]), "--jobs", "4"]) == EXIT_OK
    data = [p.read_bytes() for p in paths]
    assert data[0] == data[1] == data[2]


def test_curve_json(capsys):
    code, out, _ = run(capsys, "curve", "--dist", "family=uniform b=2", "--measures", "past-entropy",
                       "--t-min", "0.5", "--t-max", "1.5", "--n-points", "3", "--format", "json")
    payload = json.loads(out)
    assert code == EXIT_OK and payload["version"] == __version__
    assert [row["t"] for row in payload["rows"]] == [0.5, 1.0, 1.5]


def test_verify_power2_all_pass(capsys):
    code, out, _ = run(capsys, "verify", "--dist", "family=power k=2", "--mc-samples", "100000")
    assert code == EXIT_OK
    assert " NO " not in out


def test_verify_uniform_constant_branch(capsys):
    code, out, _ = run(capsys, "verify", "--dist", "family=uniform b=1", "--suite", "characterizations",
                       "--format", "json")
    reports = {r["name"]: r for r in json.loads(out)}
    assert code == EXIT_OK
    assert reports["constant-varentropy"]["applicable"] and reports["constant-varentropy"]["passed"]
    assert reports["constant-varentropy"]["detail"] == "v=0"


def test_verify_weibull_half_upper_bound_not_applicable(capsys):
    code, out, _ = run(capsys, "verify", "--dist", "family=weibull shape=0.5", "--suite", "bounds")
    line = next(ln for ln in out.splitlines() if ln.startswith("logconcave-upper-bound"))
    assert code == EXIT_OK
    assert line.split()[1:3] == ["no", "-"] and "log-concavity failed" in line


def test_mc_command_reports_rng(capsys):
    code, out, _ = run(capsys, "mc", "--dist", "family=exponential lambda=1", "--t", "1",
                       "--mc-samples", "100000", "--seed", "5", "--format", "json")
    payload = json.loads(out)
    assert code == EXIT_OK and payload["seed"] == 5 and "PCG64" in payload["rng"]
    assert all(abs(r["z"]) <= 4 for r in payload["rows"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pastvar", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
