import json

import pytest
from click.testing import CliRunner

from cli import main
from conftest import BELL_QUIL

BELL_XASM = """
__qpu__ bell(AcceleratorBuffer q) {
  H(q[0]);
  CX(q[0], q[1]);
  Measure(q[0]);
  Measure(q[1]);
}
"""

RY_XASM = "__qpu__ ry(AcceleratorBuffer q, double t) { Ry(q[0], t); Measure(q[0]); }\n"

RY_ANSATZ = "__qpu__ ansatz(AcceleratorBuffer q, double t) { Ry(q[0], t); }\n"


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def counts(stdout):
    lines = [line.split() for line in stdout.splitlines() if line.strip()]
    return {bits: int(n) for bits, n in lines}


class TestCompile:
    def test_writes_json_ir(self, runner, tmp_path):
        source = write(tmp_path, "bell.xasm", BELL_XASM)
        result = runner.invoke(main, ["compile", str(source)])
        assert result.exit_code == 0, result.output
        assert result.stdout.split() == ["bell", "4"]
        data = json.loads((tmp_path / "bell.json").read_text())
        assert data["composites"][0]["name"] == "bell"

    def test_bad_language(self, runner, tmp_path):
        source = write(tmp_path, "bell.xasm", BELL_XASM)
        assert runner.invoke(main, ["compile", str(source), "--language", "cobol"]).exit_code == 2

    def test_empty_file(self, runner, tmp_path):
        source = write(tmp_path, "empty.xasm", "")
        result = runner.invoke(main, ["compile", str(source)])
        assert result.exit_code == 1
        assert "no kernels found" in result.output

    def test_syntax_error(self, runner, tmp_path):
        source = write(tmp_path, "broken.xasm", "__qpu__ k(AcceleratorBuffer q) {\n  X(q[0];\n}\n")
        result = runner.invoke(main, ["compile", str(source)])
        assert result.exit_code == 1
        assert "SourceSyntaxError" in result.output


class TestTranslate:
    def test_quil_to_openqasm(self, runner, tmp_path):
        source = write(tmp_path, "bell.quil", BELL_QUIL)
        result = runner.invoke(main, ["translate", str(source), "--to", "openqasm"])
        assert result.exit_code == 0, result.output
        assert "h q[0];" in result.stdout and "cx q[0], q[1];" in result.stdout

    def test_unknown_kernel(self, runner, tmp_path):
        source = write(tmp_path, "bell.quil", BELL_QUIL)
        result = runner.invoke(main, ["translate", str(source), "--to", "xasm", "--kernel", "ghz"])
        assert result.exit_code == 2


class TestRun:
    def test_bell_counts(self, runner, tmp_path):
        source = write(tmp_path, "bell.quil", BELL_QUIL)
        result = runner.invoke(main, ["run", str(source), "--shots", "1000", "--seed", "5"])
        assert result.exit_code == 0, result.output
        tallies = counts(result.stdout)
        assert set(tallies) <= {"00", "11"} and sum(tallies.values()) == 1000

    def test_exact_mode(self, runner, tmp_path):
        source = write(tmp_path, "bell.xasm", BELL_XASM)
        result = runner.invoke(main, ["run", str(source), "--shots", "0"])
        assert result.exit_code == 0, result.output
        label, value = result.stdout.split()
        assert label == "exp-val-z" and float(value) == pytest.approx(1.0)

    def test_parameters(self, runner, tmp_path):
        source = write(tmp_path, "ry.xasm", RY_XASM)
        result = runner.invoke(main, ["run", str(source), "--params", "3.141592653589793", "--shots", "50"])
        assert result.exit_code == 0, result.output
        assert counts(result.stdout) == {"1": 50}

    def test_wrong_parameter_count(self, runner, tmp_path):
        source = write(tmp_path, "ry.xasm", RY_XASM)
        result = runner.invoke(main, ["run", str(source), "--params", "0.1,0.2"])
        assert result.exit_code == 1
        assert "ArityMismatch" in result.output

    def test_compiled_json(self, runner, tmp_path):
        source = write(tmp_path, "bell.xasm", BELL_XASM)
        assert runner.invoke(main, ["compile", str(source)]).exit_code == 0
        result = runner.invoke(main, ["run", str(tmp_path / "bell.json"), "--shots", "10", "--seed", "1"])
        assert result.exit_code == 0, result.output
        assert sum(counts(result.stdout).values()) == 10

    def test_remote_accelerator(self, runner, tmp_path, reference_server):
        source = write(tmp_path, "bell.quil", BELL_QUIL)
        args = ["run", str(source), "--accelerator", "remote", "--endpoint", reference_server.endpoint]
        result = runner.invoke(main, [*args, "--shots", "200", "--seed", "5"])
        assert result.exit_code == 0, result.output
        tallies = counts(result.stdout)
        assert set(tallies) <= {"00", "11"} and sum(tallies.values()) == 200

    def test_negative_shots(self, runner, tmp_path):
        source = write(tmp_path, "bell.xasm", BELL_XASM)
        assert runner.invoke(main, ["run", str(source), "--shots", "-1"]).exit_code == 2


class TestVqe:
    def test_single_qubit(self, runner, tmp_path):
        source = write(tmp_path, "ansatz.xasm", RY_ANSATZ)
        result = runner.invoke(main, ["vqe", "--ansatz", str(source), "--observable", "pauli:Z0"])
        assert result.exit_code == 0, result.output
        lines = dict(line.split(" ", 1) for line in result.stdout.splitlines())
        assert float(lines["opt-val"]) == pytest.approx(-1.0, abs=1e-6)
        assert len(lines["opt-params"].split()) == 1

    def test_missing_observable(self, runner, tmp_path):
        source = write(tmp_path, "ansatz.xasm", RY_ANSATZ)
        assert runner.invoke(main, ["vqe", "--ansatz", str(source)]).exit_code == 2

    def test_bad_observable_prefix(self, runner, tmp_path):
        source = write(tmp_path, "ansatz.xasm", RY_ANSATZ)
        result = runner.invoke(main, ["vqe", "--ansatz", str(source), "--observable", "spin:Z0"])
        assert result.exit_code == 1


class TestDdcl:
    def test_target_must_be_power_of_two(self, runner, tmp_path):
        source = write(tmp_path, "ansatz.xasm", RY_ANSATZ)
        result = runner.invoke(main, ["ddcl", "--ansatz", str(source), "--target", "0.2,0.3,0.5"])
        assert result.exit_code == 2

    def test_single_qubit_target(self, runner, tmp_path):
        source = write(tmp_path, "ansatz.xasm", RY_ANSATZ)
        result = runner.invoke(
            main,
            ["ddcl", "--ansatz", str(source), "--target", "0.5,0.5", "--step", "0.4", "--initial-parameters", "0.3"],
        )
        assert result.exit_code == 0, result.output
        lines = dict(line.split(" ", 1) for line in result.stdout.splitlines())
        assert float(lines["opt-val"]) < 1e-3


class TestServe:
    def test_port_in_use(self, runner, reference_server):
        result = runner.invoke(main, ["serve", "--port", str(reference_server.port)])
        assert result.exit_code == 1
        assert f"cannot bind 127.0.0.1:{reference_server.port}" in result.output
