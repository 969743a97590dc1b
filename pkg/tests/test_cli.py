import json

import numpy as np
import pytest

from csdsynth.cli import main
from csdsynth.formats import emit_matrix, emit_text, parse_matrix, parse_text
from csdsynth.circuit import Circuit, Cnot, reconstruct
from csdsynth.matcore import frobenius_distance


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def report(text):
    return dict(line.split("=", 1) for line in text.strip().splitlines())


def test_random_deterministic(capsys):
    _, a, _ = run(capsys, "random", 3, "--seed", 12)
    _, b, _ = run(capsys, "random", 3, "--seed", 12)
    _, c, _ = run(capsys, "random", 3, "--seed", 13)
    assert a == b != c
    assert a.startswith("dim 8\n")


def test_random_n1_and_bad_args(capsys):
    code, out, _ = run(capsys, "random", 1)
    assert code == 0 and parse_matrix(out).shape == (2, 2)
    assert run(capsys, "random", 0)[0] == 2
    assert run(capsys, "random", 11)[0] == 2
    assert run(capsys, "random", "x")[0] == 2
    assert run(capsys, "random", 2, "--seed", -1)[0] == 2


def test_synth_haar_n3(tmp_path, capsys):
    u = tmp_path / "u.txt"
    c = tmp_path / "c.qasm"
    run(capsys, "random", 3, "--seed", 5, "--out", u)
    code, out, _ = run(capsys, "synth", u, "--out", c)
    assert code == 0
    rep = report(out)
    assert rep["cnot"] == "48" and rep["one_qubit"] == "64"
    assert rep["expected_cnot"] == "48" and rep["lower_bound"] == "14"
    assert float(rep["frobenius_error"]) <= 1e-9
    code, out, _ = run(capsys, "verify", c, u)
    assert code == 0
    assert float(out.strip().split("=")[1]) <= 1e-9


def test_synth_to_stdout_sends_report_to_stderr(tmp_path, capsys):
    u = tmp_path / "u.txt"
    u.write_text(emit_matrix(np.eye(4)))
    code, out, err = run(capsys, "synth", u, "--format", "json")
    assert code == 0
    assert json.loads(out)["n"] == 2
    assert "cnot=8" in err


def test_synth_identity(tmp_path, capsys):
    u = tmp_path / "u.txt"
    u.write_text(emit_matrix(np.eye(8)))
    c = tmp_path / "c.qasm"
    code, out, _ = run(capsys, "synth", u, "--out", c)
    assert code == 0 and float(report(out)["frobenius_error"]) < 1e-10
    circ = parse_text(c.read_text())
    assert max(abs(g.angle) for g in circ.gates if not isinstance(g, Cnot)) < 1e-12


def test_synth_diagonal(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text(" ".join(str(x) for x in np.linspace(-1, 2, 8)))
    code, out, _ = run(capsys, "synth", p, "--diagonal", "--out", tmp_path / "c.qasm")
    rep = report(out)
    assert code == 0 and rep["cnot"] == "6" and rep["one_qubit"] == "8"


def test_synth_flags(tmp_path, capsys):
    u = tmp_path / "u.txt"
    run(capsys, "random", 2, "--out", u)
    code, out, _ = run(capsys, "synth", u, "--no-mirror", "--no-verify", "--out", tmp_path / "c")
    rep = report(out)
    assert code == 0 and rep["cnot"] == "14" and rep["frobenius_error"] == "skipped"


def test_synth_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("dim 2\n1,0 1,0\n")
    assert run(capsys, "synth", bad)[0] == 2
    bad.write_text(emit_matrix(np.array([[1, 1], [0, 1]])))
    assert run(capsys, "synth", bad)[0] == 3
    bad.write_text(emit_matrix(np.eye(3)))
    assert run(capsys, "synth", bad)[0] == 2
    bad.write_text("dim 2\nnan,0 0,0\n0,0 1,0\n")
    assert run(capsys, "synth", bad)[0] == 2
    assert run(capsys, "synth", tmp_path / "missing.txt")[0] == 2
    bad.write_text("1 2 3")
    assert run(capsys, "synth", bad, "--diagonal")[0] == 2


def test_synth_near_unitary_input(tmp_path, capsys):
    # scaled identity: max deviation 2e-8, distance to the nearest unitary 8e-8
    f = tmp_path / "u.txt"
    f.write_text(emit_matrix((1 + 1e-8) * np.eye(64)))
    code, out, _ = run(capsys, "synth", f, "--tol", "1e-7", "--out", tmp_path / "c")
    assert code == 0 and float(report(out)["frobenius_error"]) == pytest.approx(8e-8, rel=1e-3)
    code, _, err = run(capsys, "synth", f, "--tol", "3e-8", "--out", tmp_path / "c")
    assert code == 4 and "verification failed" in err
    assert run(capsys, "synth", f, "--tol", "1e-8")[0] == 3


def test_verify_examples(tmp_path, capsys):
    empty = tmp_path / "e.qasm"
    empty.write_text("qubits 2\n")
    eye = tmp_path / "i.txt"
    eye.write_text(emit_matrix(np.eye(4)))
    code, out, _ = run(capsys, "verify", empty, eye)
    assert code == 0 and out == "frobenius_error=0.000e+00\n"
    cx = tmp_path / "cx.txt"
    cx.write_text(emit_matrix(reconstruct(Circuit(2, [Cnot(1, 2)])).matrix))
    code, out, _ = run(capsys, "verify", empty, cx)
    assert code == 4 and out == "frobenius_error=2.000e+00\n"
    big = tmp_path / "big.txt"
    big.write_text(emit_matrix(np.eye(8)))
    assert run(capsys, "verify", empty, big)[0] == 5
    bad = tmp_path / "bad.qasm"
    bad.write_text("qubits 2\nh q[0];\n")
    assert run(capsys, "verify", bad, eye)[0] == 2
    bad.write_text("qubits 2\nrz(1) q[7];\n")
    assert run(capsys, "verify", bad, eye)[0] == 2


def test_counts(capsys):
    code, out, _ = run(capsys, "counts", 2, 3, 4)
    assert code == 0
    assert out.splitlines() == [
        "n=2 cnot=8 one_qubit=16 lower_bound=3",
        "n=3 cnot=48 one_qubit=64 lower_bound=14",
        "n=4 cnot=224 one_qubit=256 lower_bound=61",
    ]
    assert run(capsys, "counts", 0)[0] == 2


def test_simulate(tmp_path, capsys):
    c = tmp_path / "c.qasm"
    c.write_text(emit_text(Circuit(2, [Cnot(1, 2)])))
    code, out, _ = run(capsys, "simulate", c)
    assert code == 0
    assert frobenius_distance(parse_matrix(out), reconstruct(Circuit(2, [Cnot(1, 2)]))) == 0


def test_stdin(monkeypatch, tmp_path, capsys):
    import io

    u = tmp_path / "u.txt"
    run(capsys, "random", 2, "--seed", 1, "--out", u)
    monkeypatch.setattr("sys.stdin", io.StringIO(u.read_text()))
    code, out, err = run(capsys, "synth", "-")
    assert code == 0 and out.startswith("qubits 2\n") and "cnot=8" in err


@pytest.mark.parametrize("n", range(1, 7))
def test_pipeline_20_instances(n, tmp_path, capsys):
    for seed in range(20):
        u = tmp_path / "u.txt"
        c = tmp_path / "c.json"
        assert run(capsys, "random", n, "--seed", seed, "--out", u)[0] == 0
        assert run(capsys, "synth", u, "--format", "json", "--out", c)[0] == 0
        assert run(capsys, "verify", c, u)[0] == 0


def test_no_command(capsys):
    assert run(capsys)[0] == 2
