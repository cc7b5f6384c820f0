"""Tests for the command-line front end: output schemas, exit codes and
byte-level determinism."""

import json
import subprocess
import sys

import pytest

from cvmdi.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRate:
    def test_default_parameters_worked_value(self, capsys):
        code, out, err = run_cli(capsys, "rate", "--tau-a", "0.98", "--tau-b", "0.6")
        assert code == 0
        payload = json.loads(out)
        assert payload["rate"] == pytest.approx(0.379392191958814, rel=1e-10)
        assert payload["secure"] is True
        assert payload["formula_tag"] == "min-chi-asymmetric"
        assert "rate" in err

    def test_mirror_insecure_still_exit_zero(self, capsys):
        code, out, _ = run_cli(capsys, "rate", "--tau-a", "0.6", "--tau-b", "0.98")
        assert code == 0
        payload = json.loads(out)
        assert payload["rate"] == pytest.approx(-1.08803005629537, rel=1e-10)
        assert payload["secure"] is False

    def test_thermal_knowledge(self, capsys):
        code, out, _ = run_cli(
            capsys, "rate", "--tau-a", "0.8", "--tau-b", "0.5",
            "--knowledge", "thermal", "--omega-a", "1.3", "--omega-b", "2.0",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["rate"] == pytest.approx(-1.98781796518937, rel=1e-10)

    def test_flag_validation_exit_two(self, capsys):
        code, _, err = run_cli(capsys, "rate", "--tau-a", "1.5", "--tau-b", "0.6")
        assert code == 2
        assert "--tau-a" in err

    def test_missing_thermal_omegas_exit_two(self, capsys):
        code, _, err = run_cli(
            capsys, "rate", "--tau-a", "0.9", "--tau-b", "0.6",
            "--knowledge", "thermal",
        )
        assert code == 2
        assert "--omega-a" in err

    def test_domain_error_exit_one(self, capsys):
        # lossless symmetric links with epsilon = 0 hit the chi pole
        code, _, err = run_cli(
            capsys, "rate", "--tau-a", "1.0", "--tau-b", "1.0", "--epsilon", "0.0"
        )
        assert code == 1
        assert "error" in err

    def test_unknown_flag_exit_two(self, capsys):
        assert run_cli(capsys, "rate", "--bogus", "1")[0] == 2

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "rate.json"
        code, out, _ = run_cli(
            capsys, "rate", "--tau-a", "0.95", "--tau-b", "0.9",
            "--output", str(target),
        )
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())["secure"] is True


class TestDeterminism:
    def test_rate_byte_identical(self, capsys):
        argv = ("rate", "--tau-a", "0.93", "--tau-b", "0.71")
        _, out1, _ = run_cli(capsys, *argv)
        _, out2, _ = run_cli(capsys, *argv)
        assert out1 == out2

    def test_verify_byte_identical(self, capsys):
        argv = ("verify", "--seed", "11", "--scenarios", "3", "--samples", "40")
        _, out1, _ = run_cli(capsys, *argv)
        _, out2, _ = run_cli(capsys, *argv)
        assert out1 == out2

    def test_optics_byte_identical(self, capsys):
        argv = ("optics-sim", "--trials", "100", "--seed", "4")
        _, out1, _ = run_cli(capsys, *argv)
        _, out2, _ = run_cli(capsys, *argv)
        assert out1 == out2


class TestSweep:
    def test_csv_shape_and_values(self, capsys):
        code, out, err = run_cli(
            capsys, "sweep", "--tau-a-min", "0.9", "--tau-a-max", "1.0",
            "--steps-a", "3", "--tau-b-min", "0.9", "--tau-b-max", "1.0",
            "--steps-b", "3",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "tau_a,tau_b,chi,rate,secure"
        assert len(lines) == 10
        assert "9 cells" in err

    def test_json_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--steps-a", "2", "--steps-b", "2",
            "--tau-a-min", "0.8", "--tau-a-max", "0.9",
            "--tau-b-min", "0.8", "--tau-b-max", "0.9", "--format", "json",
        )
        assert code == 0
        payload = json.loads(out)
        assert len(payload) == 4
        assert set(payload[0]) == {"tau_a", "tau_b", "chi", "rate", "secure", "error"}

    def test_bad_range_exit_two(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--tau-a-min", "0.9",
                               "--tau-a-max", "0.5")
        assert code == 2
        assert "--tau-a" in err


class TestRelayScan:
    def test_summary_names_alice_extreme(self, capsys):
        code, out, err = run_cli(capsys, "relay-scan", "--total", "0.588",
                                 "--steps", "11")
        assert code == 0
        assert len(out.splitlines()) == 12
        assert "tau_a=1.000000" in err

    def test_total_validation(self, capsys):
        assert run_cli(capsys, "relay-scan", "--total", "1.5")[0] == 2


class TestAttackOpt:
    def test_report_schema(self, capsys):
        code, out, _ = run_cli(
            capsys, "attack-opt", "--tau-a", "0.9", "--tau-b", "0.7",
            "--omega-a", "2", "--omega-b", "2",
            "--grid-n", "61", "--refine-n", "121",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["gap"] >= -1e-4
        assert payload["bisector_distance"] <= 2.0 * payload["cell_size"]
        assert payload["n_evaluated"] > 0

    def test_even_grid_rejected(self, capsys):
        code, _, err = run_cli(
            capsys, "attack-opt", "--tau-a", "0.9", "--tau-b", "0.7",
            "--omega-a", "2", "--omega-b", "2", "--grid-n", "100",
        )
        assert code == 2
        assert "--grid-n" in err


class TestVerify:
    def test_exit_zero_and_margins_report(self, capsys):
        code, out, err = run_cli(
            capsys, "verify", "--seed", "7", "--scenarios", "4", "--samples", "50"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["all_pass"] is True
        assert set(payload["checks"]) == {
            "monotone_thermal", "monotone_chi", "p_prime_positive",
            "lambda_minimization", "classify_nu_regions",
        }
        assert err.count("pass") == 5


class TestOpticsSim:
    def test_report(self, capsys):
        code, out, _ = run_cli(capsys, "optics-sim", "--trials", "300", "--seed", "2")
        assert code == 0
        payload = json.loads(out)
        assert payload["passed"] is True
        assert payload["max_phase_error"] <= 1e-12
        assert payload["control_fail_fraction"] >= 0.99


class TestConsoleEntryPoint:
    def test_module_invocation(self):
        result = subprocess.run(
            [sys.executable, "-m", "cvmdi.cli", "rate",
             "--tau-a", "0.98", "--tau-b", "0.6"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert json.loads(result.stdout)["secure"] is True
