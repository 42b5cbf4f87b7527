import json
from pathlib import Path

import pytest

from pnsmerge.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, "--json", *argv)
    return code, json.loads(out) if out.strip() else None


class TestBounds:
    def test_degenerate(self, capsys):
        code, rep = run_json(capsys, "bounds", DATA / "x_trial.json", DATA / "y_degenerate.json")
        assert code == 0
        assert rep["pns"] == [0.1, 0.2]
        assert rep["single"]["pns"] == [0.1, 0.5]
        assert rep["binding_case"] == "phi_d0"

    def test_uninformative(self, capsys):
        code, rep = run_json(capsys, "bounds", DATA / "x_trial.json", DATA / "y_uninformative.json")
        assert code == 0 and rep["pns"] == [0.1, 0.5]

    def test_incompatible(self, capsys):
        code, rep = run_json(capsys, "bounds", DATA / "x_incompatible.json", DATA / "y_incompatible.json")
        assert code == 2
        assert rep["compatible"] is False
        assert "[p'01=0] q00 - lambda_max <= P(Y=0)" in rep["violated"]

    def test_verify(self, capsys):
        code, rep = run_json(capsys, "bounds", "--verify", DATA / "x_trial.json", DATA / "y_degenerate.json")
        assert code == 0 and rep["verify"]["agrees"] is True

    def test_csv_counts(self, capsys):
        code, rep = run_json(capsys, "bounds", DATA / "x_half_counts.csv", DATA / "y_point.json")
        assert code == 0 and rep["pns"] == [0.0, 0.0]

    def test_dump_polytope(self, capsys, tmp_path):
        target = tmp_path / "poly.json"
        code, _ = run_json(capsys, "--dump-polytope", target, "bounds", DATA / "x_trial.json", DATA / "y_degenerate.json")
        assert code == 0
        assert len(json.loads(target.read_text())["C_tilde"]) == 7

    def test_text_output(self, capsys):
        code, out, _ = run(capsys, "bounds", DATA / "x_trial.json", DATA / "y_degenerate.json")
        assert code == 0 and 'pns: [0.1, 0.2]' in out


class TestErrors:
    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "maxent", DATA / "nope.json")
        assert code == 1 and "cannot read" in err

    def test_malformed(self, capsys):
        code, _, _ = run(capsys, "bounds", DATA / "malformed.json", DATA / "y_degenerate.json")
        assert code == 1

    def test_bad_usage(self, capsys):
        assert run(capsys, "bounds")[0] == 1

    def test_sweep_config_error(self, capsys, tmp_path):
        code, _, _ = run(capsys, "sweep", DATA / "sweep_bad_steps.json", "--out", tmp_path / "o.csv")
        assert code == 1


class TestCompat:
    def test_compatible(self, capsys):
        code, rep = run_json(capsys, "compat", "--verify", DATA / "x_trial.json", DATA / "y_degenerate.json")
        assert code == 0 and rep["compatible"] and rep["verify"]["agrees"]

    def test_incompatible(self, capsys):
        code, rep = run_json(capsys, "compat", DATA / "x_incompatible.json", DATA / "y_incompatible.json")
        assert code == 2 and rep["method"] == "certificate"


class TestMaxent:
    def test_single(self, capsys):
        code, rep = run_json(capsys, "maxent", DATA / "x_trial.json")
        assert code == 0 and rep["lambda_x"] == 0.2 and rep["pns"] == 0.3

    def test_point_identified(self, capsys):
        code, rep = run_json(capsys, "maxent", DATA / "x_half_counts.csv", DATA / "y_point.json")
        assert code == 0 and rep["entropy_bits"] == 0.0 and rep["lambda_x"] == 0.5

    def test_incompatible(self, capsys):
        code, _ = run_json(capsys, "maxent", DATA / "x_incompatible.json", DATA / "y_incompatible.json")
        assert code == 2


class TestInfo:
    def test_report(self, capsys):
        code, rep = run_json(capsys, "info", DATA / "x_half_counts.csv", "--lambda", "0.5")
        assert code == 0 and rep["i_nz_z"] == 1.0 and rep["i_xz_given_nz"] == 0.0

    def test_marginal_falsified(self, capsys):
        code, rep = run_json(capsys, "info", "--hyp", "0.5", "--trial-y", DATA / "y_deterministic.json")
        assert code == 3 and rep["falsified"] is True

    def test_conditional_falsified(self, capsys):
        code, rep = run_json(capsys, "info", "--hyp", "0.5", "--trivariate", DATA / "xor_trivariate.json")
        assert code == 3 and rep["criterion"] == "conditional_info"

    def test_not_falsified(self, capsys):
        code, rep = run_json(capsys, "info", "--hyp", "1.0", "--trial-y", DATA / "y_deterministic.json")
        assert code == 0 and rep["falsified"] is False

    def test_needs_dataset(self, capsys):
        assert run(capsys, "info", "--hyp", "0.5")[0] == 1


class TestSweepCommand:
    def test_writes_csv(self, capsys, tmp_path):
        out = tmp_path / "grid.csv"
        code, rep = run_json(capsys, "sweep", DATA / "sweep_small.json", "--out", out)
        assert code == 0 and rep["rows"] == 75
        assert len(out.read_text().splitlines()) == 76


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ("bounds", DATA / "x_trial.json", DATA / "y_degenerate.json"),
            ("maxent", DATA / "x_trial.json", DATA / "y_uninformative.json"),
            ("info", DATA / "x_trial.json", "--lambda", "0.2"),
        ],
    )
    def test_byte_identical(self, capsys, argv):
        first = run(capsys, "--json", *argv)[1]
        second = run(capsys, "--json", *argv)[1]
        assert first == second

    def test_sweep_byte_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "sweep", DATA / "sweep_small.json", "--out", a)
        run(capsys, "sweep", DATA / "sweep_small.json", "--out", b, "--workers", "2")
        assert a.read_bytes() == b.read_bytes()
