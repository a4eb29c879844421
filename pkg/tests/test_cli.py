"""Command-line interface: commands, exit codes, file round trips."""

import json

import pytest

from lambda_hvm.cli import main, parse_circuit


CIRCUIT_T = json.dumps({
    "d": 2, "n": 1,
    "state": {"preset": "T"},
    "ops": [{"measure": {"a": "Z:(1)|X:(0)"}}],
})


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_circuit_valid():
    circ = parse_circuit(CIRCUIT_T)
    assert circ.d == 2 and circ.n == 1
    assert circ.measurement_count() == 1


def test_parse_circuit_errors():
    from lambda_hvm.cli import UsageError

    with pytest.raises(UsageError, match="trivial measurement"):
        parse_circuit(json.dumps({"d": 2, "n": 1, "state": {"preset": "zero"},
                                  "ops": [{"measure": {"a": "Z:(0)|X:(0)"}}]}))
    with pytest.raises(UsageError, match="malformed JSON"):
        parse_circuit("{not json")
    with pytest.raises(UsageError, match="unknown gate"):
        parse_circuit(json.dumps({"d": 2, "n": 1, "state": {"preset": "zero"},
                                  "ops": [{"clifford": {"gate": "nope"}}]}))
    # a unitary that is not Clifford is rejected naming the offending label
    t_gate = [["8; 1,0,0,0", "8; 0,0,0,0"], ["8; 0,0,0,0", "8; 0,1,0,0"]]
    with pytest.raises(UsageError, match="not a Pauli"):
        parse_circuit(json.dumps({"d": 2, "n": 1, "state": {"preset": "zero"},
                                  "ops": [{"clifford": {"matrix": t_gate}}]}))


def test_vertices_command(tmp_path, capsys):
    out = tmp_path / "v.txt"
    code, stdout, _ = run(capsys, "vertices", "-d", "2", "-n", "1", "--out", str(out))
    assert code == 0
    doc = json.loads(stdout)
    assert doc["vertex_count"] == 8
    assert doc["clifford_orbit_sizes"] == [8]
    assert doc["cnc_type_vertices"] == 8
    assert out.exists()


def test_vertices_guard(capsys):
    code, _, err = run(capsys, "vertices", "-d", "1", "-n", "1")
    assert code == 2
    assert err.startswith("error:")


def test_decompose_presets(tmp_path, capsys):
    vfile = tmp_path / "v.txt"
    run(capsys, "vertices", "-d", "2", "-n", "1", "--out", str(vfile))
    code, stdout, _ = run(capsys, "decompose", "-d", "2", "-n", "1",
                          "--state", "T", "--vertices", str(vfile), "--mode", "exact")
    assert code == 0
    doc = json.loads(stdout)
    assert doc["feasible"] and doc["residual"] == "0 (exact)"

    # a vertex decomposes as a point mass
    code, stdout, _ = run(capsys, "decompose", "-d", "2", "-n", "1",
                          "--state", "zero", "--vertices", str(vfile), "--mode", "numeric")
    assert code == 0


def test_decompose_infeasible(tmp_path, capsys):
    state = tmp_path / "bad.json"
    state.write_text(json.dumps({
        "matrix": [["1; 3/2", "1; 0"], ["1; 0", "1; -1/2"]]}))
    code, stdout, err = run(capsys, "decompose", "-d", "2", "-n", "1",
                            "--state", f"@{state}")
    assert code == 3
    assert "violated" in stdout
    assert err.startswith("error:")


def test_simulate_deterministic(tmp_path, capsys):
    circ = tmp_path / "c.json"
    circ.write_text(CIRCUIT_T)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    code1, stdout1, _ = run(capsys, "simulate", "-d", "2", "-n", "1", str(circ),
                            "--shots", "400", "--seed", "7", "--out", str(out1))
    code2, stdout2, _ = run(capsys, "simulate", "-d", "2", "-n", "1", str(circ),
                            "--shots", "400", "--seed", "7", "--out", str(out2))
    assert code1 == code2 == 0
    assert out1.read_bytes() == out2.read_bytes()
    doc1, doc2 = json.loads(stdout1), json.loads(stdout2)
    doc1.pop("out"), doc2.pop("out")
    assert doc1 == doc2
    doc = doc1
    assert doc["p_value"] > 1e-3
    freq = next(c["frequency"] for c in doc["comparison"] if c["outcome"] == [0])
    oracle = next(c["oracle"] for c in doc["comparison"] if c["outcome"] == [0])
    assert abs(freq - oracle) < 0.1


def test_simulate_empty_circuit(tmp_path, capsys):
    circ = tmp_path / "c.json"
    circ.write_text(json.dumps({"d": 2, "n": 1, "state": {"preset": "zero"}, "ops": []}))
    out = tmp_path / "empty.csv"
    code, stdout, _ = run(capsys, "simulate", "-d", "2", "-n", "1", str(circ),
                          "--shots", "10", "--out", str(out))
    assert code == 0
    doc = json.loads(stdout)
    assert "no measurements" in doc["note"]
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 11  # header + one row per shot, no outcome columns


def test_verify_command(capsys):
    code, stdout, _ = run(capsys, "verify", "--suite", "pauli", "-d", "2", "-n", "1")
    assert code == 0
    doc = json.loads(stdout)
    assert doc["passed"] and all(c["passed"] for c in doc["checks"])


def test_verify_unknown_suite(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "bogus", "-d", "2", "-n", "1"])
    assert exc.value.code == 2
