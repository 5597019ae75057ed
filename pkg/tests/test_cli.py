import csv
import io
import json

import pytest

from sdocut.circuit import GateKind
from sdocut.cli import BenchmarkSpec, ExperimentConfig, main
from sdocut.errors import ConfigError
from sdocut.qasm import parse_qasm


def test_gen_round_trip(tmp_path):
    out = tmp_path / "q.qasm"
    assert main(["gen", "--benchmark", "qaoa:6", "--density", "0.3", "--seeds", "1", "--out", str(out)]) == 0
    circ = parse_qasm(out.read_text())
    assert circ == BenchmarkSpec.parse("qaoa:6").build(1)


def test_gen_bv_and_qft(tmp_path):
    out = tmp_path / "bv.qasm"
    assert main(["gen", "--benchmark", "bv:1010", "--out", str(out)]) == 0
    assert sum(g.kind == GateKind.CX for g in parse_qasm(out.read_text()).gates) == 2
    out = tmp_path / "qft.qasm"
    assert main(["gen", "--benchmark", "qft:4", "--out", str(out)]) == 0
    assert parse_qasm(out.read_text()).n_qubits == 4


@pytest.mark.parametrize("mode", ["uncut", "cut", "cut+SDO", "nscc+SDO"])
def test_noiseless_run_is_exact(tmp_path, mode):
    out = tmp_path / "r.json"
    assert main(["run", "--benchmark", "qaoa:6", "--mode", mode, "--seeds", "0", "1", "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["mode"] == mode and rec["seed_count"] == 2
    assert rec["fidelity_mean"] == pytest.approx(1.0, abs=1e-9)
    assert rec["fidelity_stderr"] == pytest.approx(0.0, abs=1e-9)
    assert "wall_time" not in rec


def test_run_is_byte_identical(tmp_path):
    args = ["run", "--benchmark", "qaoa:5", "--mode", "cut+SDO", "--mode", "cut", "--p2", "0.01",
            "--seeds", "0", "1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.DictReader(io.StringIO(a.read_text())))
    assert [r["mode"] for r in rows] == ["cut+SDO", "cut"]


def test_run_with_timing_and_shots(tmp_path):
    out = tmp_path / "t.json"
    assert main(["run", "--benchmark", "bv:101", "--mode", "cut", "--shots", "2000", "--seeds", "0", "1",
                 "--timing", "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["wall_time"] > 0
    assert 0.8 < rec["fidelity_mean"] <= 1.0


def test_config_file(tmp_path):
    cfg = tmp_path / "exp.json"
    out = tmp_path / "o.json"
    cfg.write_text(json.dumps({"benchmark": {"kind": "qaoa", "size": 4, "seed": 2}, "modes": ["uncut", "cut"],
                               "noise": {"p2": 0.01}, "seeds": [0, 1], "out": str(out)}))
    assert main(["run", "--config", str(cfg)]) == 0
    recs = json.loads(out.read_text())
    assert [r["mode"] for r in recs] == ["uncut", "cut"]
    assert recs[0]["fidelity_mean"] < 1.0


def test_exit_codes(tmp_path, capsys):
    assert main(["run", "--benchmark", "qaoa:4", "--mode", "bogus", "--seeds", "0", "1"]) == 2
    assert main(["run", "--benchmark", "qaoa:4", "--seeds", "0"]) == 2
    assert main(["gen", "--benchmark", "nope:3"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad)]) == 2
    bad.write_text(json.dumps({"benchmark": "qaoa:4", "colour": 1}))
    assert main(["run", "--config", str(bad)]) == 2
    qasm = tmp_path / "x.qasm"
    qasm.write_text("OPENQASM 2.0;\nqreg q[2];\nfoo q[0];\n")
    assert main(["scaling", "--benchmark", f"qasm:{qasm}"]) == 2
    assert main(["scaling", "--benchmark", "qft:4", "--max-width", "2", "--max-cuts", "1"]) == 3
    assert main(["scaling", "--benchmark", "qft:4", "--mode", "cut", "--max-width", "1"]) == 2
    assert main(["run", "--benchmark", "qaoa:4", "--p1", "1.5", "--seeds", "0", "1"]) == 2
    with pytest.raises(SystemExit) as e:
        main(["run", "--max-width", "x"])
    assert e.value.code == 2
    capsys.readouterr()


def test_width_cap_exit(tmp_path):
    assert main(["run", "--benchmark", "qaoa:16", "--mode", "uncut", "--seeds", "0", "1"]) == 4


def test_scaling_rows(tmp_path):
    out = tmp_path / "s.json"
    assert main(["scaling", "--benchmark", "qaoa:6", "--out", str(out)]) == 0
    rows = json.loads(out.read_text())
    assert [r["mode"] for r in rows] == ["uncut", "cut+SDO", "nscc+SDO"]
    assert rows[2]["subcircuits"] == 36
    assert rows[0]["subcircuits"] == 1
    out = tmp_path / "one.csv"
    assert main(["scaling", "--benchmark", "qaoa:6", "--mode", "uncut", "--out", str(out)]) == 0
    assert len(list(csv.DictReader(io.StringIO(out.read_text())))) == 1


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"benchmark": "qaoa:4", "seeds": "x"}).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig().validate()
    with pytest.raises(ConfigError):
        BenchmarkSpec("bv", secret="10x")
    assert BenchmarkSpec.parse("qaoa:6").label == "qaoa-6"
