"""The command-line frontend, exercised through real subprocesses."""

import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

import frozen

PKG_SRC = str(Path(__file__).resolve().parent.parent / "src")


def run_cli(*args, env_extra=None):
    import os
    env = dict(os.environ)
    env["PYTHONPATH"] = PKG_SRC + os.pathsep + env.get("PYTHONPATH", "")
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "kkit.cli", *args],
                          capture_output=True, text=True, env=env)


@pytest.fixture()
def system_file(tmp_path):
    path = tmp_path / "system.txt"
    path.write_text("shape: 1 1\nE(x1) - 2\n")
    return str(path)


class TestParseCommand:
    def test_echo_canonical(self):
        out = run_cli("parse", "--formula", "E(x)=2")
        assert out.returncode == 0
        assert out.stdout.strip() == "E(x) = 2"

    def test_parse_error_exit_3(self):
        out = run_cli("parse", "--formula", "E(x = 2")
        assert out.returncode == 3

    def test_usage_error_exit_2(self):
        out = run_cli("parse")
        assert out.returncode == 2


class TestJacCommand:
    def test_prints_formal_jacobian(self, system_file):
        out = run_cli("jac", "--system", system_file)
        assert out.returncode == 0
        assert out.stdout.strip() == "J[1][1] = E(x1)"


class TestCertifyAndCheck:
    def test_certify_emits_valid_certificate(self, system_file, tmp_path):
        cert_path = tmp_path / "cert.json"
        out = run_cli("certify", "--system", system_file,
                      "--box", "[0.6, 0.8]", "--out", str(cert_path))
        assert out.returncode == 0, out.stderr
        data = json.loads(cert_path.read_text())
        assert data["system"].startswith("shape: 1 1")
        lo = _dyadic_fraction(data["box"][0][0])
        hi = _dyadic_fraction(data["box"][0][1])
        assert lo <= frozen.LN2_F <= hi
        assert hi - lo < Fraction(1, 10 ** 10)

        check = run_cli("check", "--cert", str(cert_path))
        assert check.returncode == 0

    def test_certify_failure_exit_4(self, system_file, tmp_path):
        out = run_cli("certify", "--system", system_file, "--box", "[-0.4, 0.4]")
        assert out.returncode == 4

    def test_check_rejects_mutation(self, system_file, tmp_path):
        cert_path = tmp_path / "cert.json"
        run_cli("certify", "--system", system_file, "--box", "[0.6, 0.8]",
                "--out", str(cert_path))
        data = json.loads(cert_path.read_text())
        lo, hi = data["jacobian"]["entries"][0][0]
        data["jacobian"]["entries"][0][0] = [_negate(hi), _negate(lo)]
        data["jacobian"]["det"] = data["jacobian"]["entries"][0][0]
        bad = cert_path.with_name("bad.json")
        bad.write_text(json.dumps(data))
        out = run_cli("check", "--cert", str(bad))
        assert out.returncode == 4


class TestSolveCommand:
    def test_region_unsat_exit_zero_with_status(self, tmp_path):
        formula = tmp_path / "f.txt"
        formula.write_text("E(x) = x\n")
        out = run_cli("solve", "--formula", str(formula), "--radius", "10")
        assert out.returncode == 0
        payload = json.loads(out.stdout)
        assert payload["status"] == "REGION-UNSAT"
        assert "timing_seconds" not in payload

    def test_sat(self, tmp_path):
        formula = tmp_path / "f.txt"
        formula.write_text("E(x) = 2\n")
        out = run_cli("solve", "--formula", str(formula))
        assert out.returncode == 0
        assert json.loads(out.stdout)["status"] == "SAT"

    def test_byte_identical_across_workers(self, tmp_path):
        formula = tmp_path / "f.txt"
        formula.write_text("E(x) * E(x) = 4\n")
        outs = []
        for w in ("1", "4"):
            r = run_cli("solve", "--formula", str(formula), "--workers", w)
            payload = json.loads(r.stdout)
            payload["config"]["workers"] = 0
            outs.append(json.dumps(payload, sort_keys=True))
        assert outs[0] == outs[1]

    def test_env_config(self, tmp_path):
        formula = tmp_path / "f.txt"
        formula.write_text("E(x) = 2\n")
        out = run_cli("solve", "--formula", str(formula),
                      env_extra={"KKIT_RADIUS": "4", "KKIT_DEPTH": "32"})
        payload = json.loads(out.stdout)
        assert payload["config"]["max_depth"] == 32

    def test_timing_flag(self, tmp_path):
        formula = tmp_path / "f.txt"
        formula.write_text("E(x) = 2\n")
        out = run_cli("solve", "--formula", str(formula), "--timing")
        assert "timing_seconds" in json.loads(out.stdout)


class TestReduceCommand:
    def test_worked_example(self, tmp_path):
        system = tmp_path / "sys.txt"
        system.write_text("shape: 2 2\n2 * x2 - x1\nE(x1) - 2\n")
        cert_path = tmp_path / "cert.json"
        out = run_cli("certify", "--system", str(system),
                      "--box", "[[0.6, 0.8], [0.3, 0.4]]", "--out", str(cert_path))
        assert out.returncode == 0, out.stderr
        out = run_cli("reduce", "--system", str(system), "--cert", str(cert_path),
                      "--relation", "2;1;0")
        assert out.returncode == 0, out.stderr
        payload = json.loads(out.stdout)
        assert payload["shape"] == [1, 1]
        assert payload["plain_form"].splitlines()[1] == "E(x1)^2 - 2"
        lo = _dyadic_fraction(payload["certified_box"][0][0])
        hi = _dyadic_fraction(payload["certified_box"][0][1])
        assert lo <= frozen.LN2_F / 2 <= hi

    def test_bad_relation_exit_4(self, tmp_path):
        system = tmp_path / "sys.txt"
        system.write_text("shape: 2 2\n2 * x2 - x1\nE(x1) - 2\n")
        cert_path = tmp_path / "cert.json"
        run_cli("certify", "--system", str(system),
                "--box", "[[0.6, 0.8], [0.3, 0.4]]", "--out", str(cert_path))
        out = run_cli("reduce", "--system", str(system), "--cert", str(cert_path),
                      "--relation", "2;5;0")
        assert out.returncode == 4


def _dyadic_fraction(s: str) -> Fraction:
    from kkit.dyadic import Dyadic
    return Dyadic.parse(s).to_fraction()


def _negate(s: str) -> str:
    from kkit.dyadic import Dyadic
    return str(-Dyadic.parse(s))
