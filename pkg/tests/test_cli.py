import json
from pathlib import Path

import jsonschema
import pytest
import yaml

from swssb import cli
from swssb.experiments import DEFAULTS, KINDS, ExperimentConfig, validate

ROOT = Path(__file__).resolve().parents[1]
SCHEMAS = ROOT / "docs" / "schemas"


def schema(name):
    return json.loads((SCHEMAS / name).read_text())


def cfg(kind, **over):
    data = {"seed": 1}
    data.update(over)
    return ExperimentConfig.from_mapping(data, kind)


@pytest.mark.parametrize("kind", KINDS)
def test_example_configs_are_valid(kind):
    data = yaml.safe_load((ROOT / "docs" / "configs" / f"{kind}.yaml").read_text())
    jsonschema.validate(data, schema("config.schema.json"))
    assert validate(ExperimentConfig.from_mapping(data, kind)) == []


def test_validation_messages():
    assert "seed required" in validate(ExperimentConfig.from_mapping({}, "bounds-fuzz"))
    msgs = validate(cfg("decohered-ising-exact", alphas=[0.5, 1.0], p_grid=[0.1, 0.7]))
    assert any("α ∈ (0,1)" in m for m in msgs)
    assert any("p ∈ [0, 1/2]" in m for m in msgs)
    msgs = validate(cfg("rbim-mc", sweeps=100, thermalization=200))
    assert any("sweeps must exceed thermalization" in m for m in msgs)
    assert validate(cfg("entropy-response", alpha=0.0))
    assert validate(cfg("decohered-ising-exact", L=4))  # resource ceiling
    assert validate(ExperimentConfig.from_mapping({"seed": 1}, "nope"))


def test_missing_seed_exits_nonzero(tmp_path, capsys):
    conf = tmp_path / "c.yaml"
    conf.write_text("n_cases: 5\n")
    assert cli.main(["bounds-fuzz", "--config", str(conf), "--out", str(tmp_path / "o")]) == 2
    assert "seed required" in capsys.readouterr().err


def test_kind_mismatch(tmp_path):
    conf = tmp_path / "c.yaml"
    conf.write_text("kind: spin-glass\nseed: 1\n")
    assert cli.main(["bounds-fuzz", "--config", str(conf)]) == 2


def test_validate_only(tmp_path, capsys):
    assert cli.main(["spin-glass", "--seed", "3", "--validate-only"]) == 0
    assert "config ok" in capsys.readouterr().out


@pytest.mark.parametrize("kind,extra", [
    ("bounds-fuzz", {"n_cases": 30}),
    ("tfd-check", {"n_cases": 12}),
    ("spin-glass", {}),
    ("decohered-ising-exact", {"p_grid": [0.1, 0.4]}),
    ("susceptibility", {}),
    ("entropy-response", {"n_cases": 4}),
    ("thermal-scan", {"n_qubits": 6, "betas": [1.0, 2.0], "separations": [1, 3]}),
])
def test_runs_are_deterministic_and_schema_valid(tmp_path, kind, extra):
    conf = tmp_path / "c.yaml"
    conf.write_text(yaml.safe_dump({"seed": 5, **extra}))
    outs = []
    for k, threads in enumerate((1, 2)):
        out = tmp_path / f"run{k}"
        code = cli.main([kind, "--config", str(conf), "--out", str(out), "--threads", str(threads)])
        assert code == 0
        outs.append(out)
    a = (outs[0] / f"{kind}.csv").read_bytes()
    assert a == (outs[1] / f"{kind}.csv").read_bytes()
    assert a.splitlines()[0].count(b",") >= 1
    man = json.loads((outs[0] / "manifest.json").read_text())
    jsonschema.validate(man, schema("manifest.schema.json"))
    assert man["passed"] and man["config"]["seed"] == 5


def test_json_output(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["spin-glass", "--seed", "2", "--out", str(out), "--format", "json"]) == 0
    doc = json.loads((out / "spin-glass.json").read_text())
    jsonschema.validate(doc, schema("results.schema.json"))
    assert doc["summary"]["chi_sg"] == pytest.approx(DEFAULTS["spin-glass"]["n_qubits"])


def test_failed_check_gives_exit_code_one(tmp_path, monkeypatch):
    from swssb import experiments as ex

    def broken(p, seed, threads):
        return ex.Result([{"x": 1}], [ex.Check("always fails", False)])

    monkeypatch.setitem(ex.RUNNERS, "spin-glass", broken)
    out = tmp_path / "o"
    assert cli.main(["spin-glass", "--seed", "1", "--out", str(out)]) == 1
    man = json.loads((out / "manifest.json").read_text())
    assert man["passed"] is False


def test_small_rbim_run(tmp_path):
    out = tmp_path / "o"
    conf = tmp_path / "c.yaml"
    conf.write_text(yaml.safe_dump({"seed": 1, "sizes": [4, 8], "p_grid": [0.05, 0.2, 0.35],
                                    "samples": 8, "sweeps": 400, "thermalization": 100}))
    code = cli.main(["rbim-mc", "--config", str(conf), "--out", str(out)])
    assert code in (0, 1)  # a tiny run may legitimately report insufficient statistics
    man = json.loads((out / "manifest.json").read_text())
    assert man["checks"][0]["name"] == "statistics"
    assert (out / "rbim-mc.csv").exists()
