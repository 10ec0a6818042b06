import csv
import io
import json
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from dysonize.cli import COMMANDS, RunConfig, main


def run_cli(*args, env=None):
    proc = subprocess.run([sys.executable, "-m", "dysonize.cli", *args], capture_output=True, text=True, env=env)
    return proc.returncode, proc.stdout, proc.stderr


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_verify_su2(capsys):
    assert main(["verify-algebra", "--two-s", "2"]) == 0
    out = rows(capsys.readouterr().out)
    assert len(out) == 3 and all(r["passed"] == "true" for r in out)


def test_verify_super_with_mapped_sets(capsys):
    assert main(["verify-algebra", "--two-s", "3", "--algebra", "super", "--include-mapped"]) == 0
    out = rows(capsys.readouterr().out)
    assert len(out) == 3 * 28
    assert {r["operator_set"] for r in out} == {"super", "super_dyson", "super_anti_dyson"}


def test_compare_antiferromagnet(capsys):
    assert main(["compare", "--model", "heisenberg_AFM", "--lx", "2", "--ly", "1", "--two-s", "1"]) == 0
    (row,) = rows(capsys.readouterr().out)
    assert row["matched"] == "true" and row["dim_a"] == "4"


def test_degenerate_spin_is_validation_error():
    code, out, err = run_cli("build", "--two-s", "0")
    assert code == 2 and "degenerate spin" in err and out == ""


@pytest.mark.parametrize("args", [["nonsense"], ["build", "--J", "abc"], ["build", "--boundary", "spiral"]])
def test_parse_errors(args, capsys):
    assert main(args) == 2
    assert capsys.readouterr().err.startswith("error: parse")


def test_invalid_model_is_validation_error(capsys):
    assert main(["build", "--model", "heisenberg_FM", "--representation", "mapped_truncated"]) == 2
    assert "error: invalid" in capsys.readouterr().err


def test_non_bipartite_cluster(capsys):
    assert main(["build", "--model", "heisenberg_AFM", "--lx", "3", "--boundary", "periodic"]) == 2
    assert "bipartite" in capsys.readouterr().err


def test_build_reports_both_residuals(capsys):
    assert main(["build", "--model", "heisenberg_FM", "--representation", "mapped_transcribed", "--two-s", "2"]) == 0
    out = {r["quantity"]: r["value"] for r in rows(capsys.readouterr().out)}
    assert float(out["residual_dynamical"]) < 1e-12 < float(out["residual_kinematic"])
    assert out["dim"] == "9"


def test_build_flags_negative_ferromagnet(capsys):
    assert main(["build", "--J", "-1"]) == 0
    assert "flag" in capsys.readouterr().out


def test_check_failure_exit_status(capsys):
    # the ferro t-J transcription is not self-adjoint under its metric
    assert main(["build", "--model", "tJ_ferro", "--representation", "mapped_transcribed", "--tau", "0.5",
                 "--two-s", "2"]) == 1
    assert "check failed: metric self-adjointness" in capsys.readouterr().err


def test_spectrum_rows(capsys):
    assert main(["spectrum", "--model", "heisenberg_FM"]) == 0
    out = rows(capsys.readouterr().out)
    assert [float(r["real"]) for r in out] == pytest.approx([-0.25, -0.25, -0.25, 0.75])


def test_factors_rows(capsys):
    assert main(["factors", "--two-s", "2", "--variant", "dyson"]) == 0
    out = rows(capsys.readouterr().out)
    assert [float(r["value"]) for r in out] == pytest.approx([1, 1, 0.5 ** 0.5])


def test_audit_structured(capsys):
    assert main(["audit", "--model", "heisenberg_FM", "--two-s", "3", "--format", "structured"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["exact"] is True and doc["reference_energy"] == pytest.approx(-9 / 4)


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = RunConfig("compare", model="heisenberg_AFM", two_s=2, lx=2, ly=2, boundary="periodic")
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert main(["compare", "--config", str(path), "--two-s", "1", "--format", "structured"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["spec_a"]["two_s"] == 1 and doc["report"]["dim_a"] == 16


def test_bad_config_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["build", "--config", str(path)]) == 2
    path.write_text(json.dumps({"command": "build", "spec": {"colour": "red"}}))
    assert main(["build", "--config", str(path)]) == 2


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DYSONIZE_OUTPUT_DIR", str(tmp_path))
    assert main(["factors", "--two-s", "1"]) == 0
    assert (tmp_path / "factors.csv").read_text().startswith("variant,fermion_sector,u,value\n")
    explicit = tmp_path / "sub" / "x.json"
    assert main(["factors", "--format", "structured", "--output", str(explicit)]) == 0
    assert json.loads(explicit.read_text())["tables"]


def test_rows_are_deterministic(capsys):
    outs = []
    for _ in range(2):
        main(["spectrum", "--model", "tJ_AF", "--representation", "mapped_substituted", "--tau", "0.3"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1] and len(outs[0].splitlines()) == 10


configs = st.builds(
    RunConfig,
    command=st.sampled_from(COMMANDS),
    model=st.sampled_from(["heisenberg_FM", "heisenberg_AFM", "tJ_ferro", "tJ_AF"]),
    J=st.floats(-5, 5, allow_nan=False),
    tau=st.floats(-5, 5, allow_nan=False),
    two_s=st.integers(1, 6),
    lx=st.integers(1, 4),
    tau_values=st.lists(st.floats(-1, 1, allow_nan=False), max_size=4).map(tuple),
    include_mapped=st.booleans(),
    output_format=st.sampled_from(["rows", "structured"]),
    output_path=st.none() | st.text(min_size=1, max_size=8),
)


@settings(max_examples=60, deadline=None)
@given(configs)
def test_config_round_trip(cfg):
    text = json.dumps(cfg.to_dict(), sort_keys=True)
    assert RunConfig.from_dict(json.loads(text)) == cfg
