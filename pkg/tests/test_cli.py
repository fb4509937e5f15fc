import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from paramseries import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_zeta(capsys):
    code, out, _ = run(capsys, "eval", "zeta", "--s", "2", "--mu", "1")
    assert code == 0
    assert "1.6449340668" in out


def test_eval_gamma(capsys):
    code, out, _ = run(capsys, "eval", "gamma-loggamma", "--mu", "1")
    assert code == 0 and "0.5772156649" in out


def test_eval_domain_error(capsys):
    code, _, err = run(capsys, "eval", "zeta", "--s", "0.5")
    assert code == 2 and "s must exceed 1" in err


def test_eval_unknown_representation(capsys):
    code, _, err = run(capsys, "eval", "nope")
    assert code == 2 and "unknown representation" in err


def test_eval_invalid_mu(capsys):
    code, _, _ = run(capsys, "eval", "geometric", "--mu=-0.6")
    assert code == 2


def test_eval_not_converged(capsys):
    code, _, err = run(capsys, "eval", "pi-amore", "--max-terms", "10")
    assert code == 3 and "not converged" in err


def test_eval_json_matches_schema(capsys):
    code, out, _ = run(capsys, "eval", "polylog", "--x=-1/2", "--s", "3", "--mu", "1/2",
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    rows = doc if isinstance(doc, list) else [doc]
    for row in rows:
        jsonschema.validate(row, cli.REPORT_SCHEMA)
        assert row["value"].startswith("-0.47259784465889687461862")
        assert row["precision_bits"] == 256


def test_eval_digit_count(capsys):
    for prec in (64, 256, 512):
        _, out, _ = run(capsys, "eval", "geometric", "--x", "1/3", "--prec", str(prec),
                        "--format", "json")
        doc = json.loads(out)
        value = (doc[0] if isinstance(doc, list) else doc)["value"]
        digits = len(value.replace("-", "").replace(".", "").lstrip("0"))
        assert digits == cli.output_digits(prec)


def test_eval_is_byte_identical(capsys):
    args = ("eval", "elliptic-e", "--x", "0.3", "--mu", "1/3", "--format", "json")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_precision_bounds(capsys):
    assert run(capsys, "eval", "zeta", "--prec", "32")[0] == 2
    assert run(capsys, "eval", "zeta", "--prec", "64", "--tol", "1e-40")[0] == 2


def test_unknown_parameter(capsys):
    assert run(capsys, "eval", "zeta", "--x", "1/2")[0] == 2


def test_generic_param_flag(capsys):
    code, out, _ = run(capsys, "eval", "lerch", "--param", "x=0", "--param", "a=2",
                       "--param", "s=3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and (doc[0] if isinstance(doc, list) else doc)["value"].startswith("0.125")


def test_env_default_precision(monkeypatch, capsys):
    monkeypatch.setenv(cli.PREC_ENV, "128")
    _, out, _ = run(capsys, "eval", "geometric", "--format", "json")
    doc = json.loads(out)
    assert (doc[0] if isinstance(doc, list) else doc)["precision_bits"] == 128


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "pi-amore", "--mu-grid", "1/3,1/2,1", "--tol", "1e-10")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["mu", "terms_to_tolerance", "final_error", "tolerance"]
    assert len(rows) == 4 and all(r[1].isdigit() for r in rows[1:])


def test_sweep_empty_grid(capsys):
    code, out, _ = run(capsys, "sweep", "zeta", "--mu-grid", "")
    assert code == 0 and out == "mu,terms_to_tolerance,final_error,tolerance\n"


def test_sweep_invalid_grid(capsys):
    code, out, _ = run(capsys, "sweep", "zeta", "--mu-grid=1,-0.6")
    assert code == 2 and out == ""


def test_sweep_not_reached(capsys):
    _, out, _ = run(capsys, "sweep", "pi-amore", "--mu-grid", "1", "--tol", "1e-12",
                    "--max-terms", "20")
    assert out.splitlines()[1].split(",")[1] == "NotReached"


def test_sweep_is_deterministic(capsys):
    args = ("sweep", "log1p", "--x", "0.9", "--mu-grid", "0.25,0.5,1", "--tol", "1e-20")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_verify_default(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert "FAIL" not in out
    assert "mu-dependent" in out


def test_verify_only_binomial_identity(capsys):
    code, out, _ = run(capsys, "verify", "--only", "binomial-identity", "--n-max", "200")
    assert code == 0 and out.startswith("PASS binomial-identity")


def test_verify_unknown_check(capsys):
    assert run(capsys, "verify", "--only", "nope")[0] == 2


def test_verify_detects_zeta_fault(capsys):
    code, out, _ = run(capsys, "verify", "--inject-zeta-fault", "2")
    assert code == 1 and "FAIL" in out
    # the fault must not leak into later runs
    assert run(capsys, "verify", "--only", "zeta-vs-reference")[0] == 0


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--only", "zeta-bounds", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc[0]["check"] == "zeta-bounds" and doc[0]["passed"]


def test_constants_blocks(capsys):
    code, out, _ = run(capsys, "constants", "--format", "json")
    blocks = {b["constant"]: b for b in json.loads(out)}
    assert code == 0 and set(blocks) == {"pi", "gamma", "M"}
    assert len(blocks["pi"]["entries"]) >= 3
    assert len(blocks["gamma"]["entries"]) >= 4
    assert len(blocks["M"]["entries"]) >= 3
    assert float(blocks["M"]["max_pairwise_delta"]) <= 1e-10
    assert blocks["M"]["headline"] == "1.257746"


def test_optimize(capsys):
    code, out, _ = run(capsys, "optimize", "geometric", "--x", "2/5", "--lo", "0.05", "--hi", "1",
                       "--tol", "1e-12", "--format", "json")
    assert code == 0 and json.loads(out)["terms"] > 0


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0 and "gamma-zeta-tail" in out and "elliptic-k" in out


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "paramseries.cli", "eval", "expneg", "--x", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "0.3678794411714423215955237701614" in proc.stdout


@pytest.mark.parametrize("argv", [[], ["eval"], ["bogus"]])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2
