import csv
import io
import json
import math

import pytest

from torsionlab.algebra import get_precision
from torsionlab.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--format", "json")
    return code, json.loads(text)


# reps ---------------------------------------------------------------------------------


def test_reps_n1():
    code, data = run_json("reps", "--n", "1")
    assert code == 0
    us = sorted(r["u"] for r in data["metabelian"])
    assert us == pytest.approx(sorted([-4 * math.sin(math.pi / 5) ** 2, -4 * math.sin(2 * math.pi / 5) ** 2]))
    assert len(data["graph_manifold"]) == 2
    assert all(r["residual"] < 1e-12 for r in data["metabelian"] + data["graph_manifold"])
    assert {r["p_k"] for r in data["graph_manifold"]} == {5}


def test_reps_n_minus_two():
    code, data = run_json("reps", "--n", "-2")
    assert code == 0 and len(data["metabelian"]) == 3


def test_reps_filters():
    code, data = run_json("reps", "--n", "2", "--j", "2", "--k", "1")
    assert code == 0
    assert [r["j"] for r in data["graph_manifold"]] == [2]
    assert [r["k"] for r in data["metabelian"]] == [1]


def test_reps_presentation_file(tmp_path):
    f = tmp_path / "torus.txt"
    f.write_text("gens: a, b\nrel: a^2 = b^3\n")
    code, data = run_json("reps", "--n", "1", "--presentation-file", str(f))
    assert code == 0
    assert all(r["file_residual"] < 1e-12 for r in data["graph_manifold"])
    assert all(r["file_residual"] is None for r in data["metabelian"])


@pytest.mark.parametrize(
    "argv",
    [
        ["reps", "--n", "0"],
        ["reps", "--n", "-1"],
        ["reps", "--n", "1", "--j", "3"],
        ["reps", "--n", "20000"],
        ["reps", "--n", "1", "--presentation-file", "/nonexistent/file"],
        ["torsion", "--n", "1", "--j", "1"],
        ["torsion", "--n", "1", "--j", "1", "--N", "-1"],
        ["torsion", "--n", "1", "--k", "1", "--N", "2"],
        ["asymptotics", "--n", "1", "--Nmax", "0"],
        ["verify", "--n", "0"],
        ["verify", "--n", "1,x"],
        ["limits", "--n", "1", "--precision-bits", "20"],
        ["bogus"],
        ["limits"],
    ],
)
def test_invalid_input_exit_two(argv, capsys):
    code, _ = run(*argv)
    assert code == 2
    err = capsys.readouterr().err
    assert err.strip()


def test_diagnostic_names_precondition(capsys):
    run("asymptotics", "--n", "1", "--Nmax", "0")
    assert "Nmax" in capsys.readouterr().err
    run("reps", "--n", "1", "--j", "3")
    assert "j" in capsys.readouterr().err


def test_bad_presentation_file(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("gens: a\nrel: b = a\n")
    assert run("reps", "--n", "1", "--presentation-file", str(f))[0] == 2


# torsion ------------------------------------------------------------------------------


def test_torsion_full_cycle_json():
    code, data = run_json("torsion", "--n", "1", "--j", "1", "--N", "5")
    assert code == 0
    assert data["log_magnitude"] == pytest.approx(2 * (math.log(3) - math.log(2)), abs=1e-13)
    assert data["provenance"] == "product-of-pieces"


def test_torsion_n_zero():
    code, data = run_json("torsion", "--n", "1", "--j", "1", "--N", "0")
    assert code == 0
    assert data["value_re"] == 1 and data["value_im"] == 0


def test_torsion_oracle():
    code, data = run_json("torsion", "--n", "2", "--j", "2", "--N", "3", "--oracle")
    assert code == 0
    names = {c["oracle"] for c in data["oracles"]}
    assert names == {"klein-generic-engine", "fox-presentation-complex", "gluing-klein-factor"}
    assert all(c["delta"] < 1e-9 for c in data["oracles"])


def test_torsion_oracle_with_presentation_file(tmp_path):
    f = tmp_path / "t25.txt"
    f.write_text("gens: a, b\nrel: a^2 = b^5\n")
    code, data = run_json("torsion", "--n", "2", "--j", "1", "--N", "2", "--oracle", "--presentation-file", str(f))
    assert code == 0 and all(c["ok"] for c in data["oracles"])


def test_torsion_oracle_file_must_have_two_generators(tmp_path):
    f = tmp_path / "one.txt"
    f.write_text("gens: a\nrel: a^2\n")
    assert run("torsion", "--n", "2", "--j", "1", "--N", "2", "--oracle", "--presentation-file", str(f))[0] == 2


def test_torsion_table_and_csv():
    code, table = run("torsion", "--n", "1", "--j", "2", "--N", "4")
    assert code == 0
    assert table.splitlines()[0].split() == ["field", "value"]
    code, text = run("torsion", "--n", "1", "--j", "2", "--N", "4", "--format", "csv")
    rows = {r["field"]: r["value"] for r in csv.DictReader(io.StringIO(text))}
    assert float(rows["log_magnitude"]) == pytest.approx(json.loads(run("torsion", "--n", "1", "--j", "2", "--N", "4", "--format", "json")[1])["log_magnitude"], abs=0)


def test_torsion_extended_precision():
    code, data = run_json("torsion", "--n", "2", "--j", "1", "--N", "4", "--precision-bits", "120")
    assert code == 0
    assert "log_magnitude_str" in data and len(data["log_magnitude_str"]) > 25
    _, ref = run_json("torsion", "--n", "2", "--j", "1", "--N", "4")
    assert data["log_magnitude"] == pytest.approx(ref["log_magnitude"], abs=1e-12)


def test_precision_does_not_leak():
    run("torsion", "--n", "1", "--j", "1", "--N", "2", "--precision-bits", "150")
    assert get_precision() == 53
    _, data = run_json("torsion", "--n", "1", "--j", "1", "--N", "2")
    assert "log_magnitude_str" not in data


def test_precision_from_environment(monkeypatch):
    monkeypatch.setenv("TORSIONLAB_PRECISION_BITS", "96")
    code, data = run_json("torsion", "--n", "1", "--j", "1", "--N", "2")
    assert code == 0 and "log_magnitude_str" in data
    assert get_precision() == 53
    monkeypatch.setenv("TORSIONLAB_PRECISION_BITS", "12")
    assert run("limits", "--n", "1")[0] == 2


# asymptotics and limits ---------------------------------------------------------------------


def test_asymptotics_final_error():
    code, text = run("asymptotics", "--n", "1", "--j", "1", "--Nmax", "50", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == ["N", "seq", "limit", "abs_error"]
    assert int(rows[-1]["N"]) == 50 and float(rows[-1]["abs_error"]) < 1e-9


def test_asymptotics_all_j():
    code, text = run("asymptotics", "--n", "2", "--Nmax", "4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0])[0] == "j"
    assert {r["j"] for r in rows} == {"1", "2", "3", "4"}
    code, data = run_json("asymptotics", "--n", "2", "--Nmax", "4")
    assert [r["j"] for r in data["reports"]] == [1, 2, 3, 4]


def test_limits_n2():
    code, data = run_json("limits", "--n", "2")
    assert code == 0
    assert [v["exact"] for v in data["limits"]] == ["(log 5 - log 2)/3", "(log 5 - log 2)/9"]
    assert data["minimum"]["exact"] == "(log 5 - log 2)/9"
    assert data["minimum"]["value"] == pytest.approx((math.log(5) - math.log(2)) / 9, abs=1e-16)


def test_limits_n1_singleton():
    code, data = run_json("limits", "--n", "1")
    assert len(data["limits"]) == 1


def test_limits_table():
    code, text = run("limits", "--n", "2")
    assert code == 0
    assert "(log 5 - log 2)/9" in text and "yes" in text


# verify ---------------------------------------------------------------------------------


def test_verify_n1():
    code, text = run("verify", "--n", "1")
    assert code == 0
    assert text.rstrip().endswith("all checks passed")
    assert "FAIL" not in text


def test_verify_json():
    code, data = run_json("verify", "--n", "1,2", "--seed", "3")
    assert code == 0 and data["passed"] and data["seed"] == 3
    assert {r["n"] for r in data["results"]} == {None, 1, 2}


def test_verify_failure_exit_one(monkeypatch, capsys):
    import torsionlab.verify as verify

    monkeypatch.setattr(verify, "GLOBAL_CHECKS", verify.GLOBAL_CHECKS + [("algebra", "always-fails", lambda rng: (False, "forced"))])
    code, text = run("verify", "--n", "1")
    assert code == 1
    assert "FAIL algebra/always-fails" in text
    assert "forced" in capsys.readouterr().err


# determinism ------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["reps", "--n", "2", "--format", "json"],
        ["torsion", "--n", "2", "--j", "2", "--N", "3", "--oracle", "--format", "csv"],
        ["asymptotics", "--n", "-2", "--Nmax", "8"],
        ["limits", "--n", "-3", "--format", "json"],
        ["verify", "--n", "2", "--seed", "7", "--format", "json"],
    ],
)
def test_identical_config_identical_output(argv):
    assert run(*argv) == run(*argv)
