"""Command-line contract: golden outputs, exit codes, artifacts, determinism."""

import json

import pytest

from rotortree import (DivergenceSpec, TreeParams, config_to_json,
                       divergence_target, synthesize, target_to_json)
from rotortree.cli import main

P3 = TreeParams(3)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def divergence_files(tmp_path_factory):
    """Target and synthesized config JSON for the k=3, T=6 divergence family."""
    root = tmp_path_factory.mktemp("div6")
    spec = DivergenceSpec(P3, 6)
    target, mode = divergence_target(spec)
    result = synthesize(target, default_rotor=mode)
    target_path = root / "target.json"
    config_path = root / "config.json"
    target_path.write_text(json.dumps(target_to_json(target)))
    config_path.write_text(json.dumps(config_to_json(result.config)))
    return target_path, config_path


def test_kernels_golden_lines(capsys):
    code, out, _ = run_cli(capsys, "kernels", "--k", "3", "--what", "i",
                           "--x", "1", "--t", "3")
    assert code == 0 and out.strip() == "4/3^0 = 4"
    code, out, _ = run_cli(capsys, "kernels", "--k", "3", "--what", "H",
                           "--x", "0", "--t", "2")
    assert code == 0
    assert out.strip() == "3/3^2 = 1/3 ≈ 0.333333333333"
    code, out, _ = run_cli(capsys, "kernels", "--k", "3", "--what", "tmax",
                           "--x", "10")
    assert code == 0 and out.strip() == "20"
    code, out, _ = run_cli(capsys, "kernels", "--k", "3", "--what", "inf",
                           "--x", "1", "--t", "1", "--a", "-1")
    assert code == 0 and out.strip() == "2/3^1 = 2/3 ≈ 0.666666666667"


def test_kernels_usage_errors(capsys):
    code, _, err = run_cli(capsys, "kernels", "--k", "3", "--what", "i", "--x", "1")
    assert code == 2 and "needs" in err
    code, _, err = run_cli(capsys, "kernels", "--k", "2", "--what", "i",
                           "--x", "1", "--t", "1")
    assert code == 2
    code, _, _ = run_cli(capsys, "kernels", "--k", "3", "--what", "bogus",
                         "--x", "1", "--t", "1")
    assert code == 2


def test_simulate_divergence_prints_discrepancy(capsys, divergence_files, tmp_path):
    _, config_path = divergence_files
    out_dir = tmp_path / "sim"
    code, out, _ = run_cli(capsys, "simulate", "--config", str(config_path),
                           "--T", "6", "--out", str(out_dir))
    assert code == 0
    assert "188/3^5" in out
    traj = (out_dir / "trajectory.csv").read_text().splitlines()
    assert traj[0].startswith("# manifest_hash=")
    assert traj[1] == "t,vertex,chips,rotor"
    dec = (out_dir / "decomposition.csv").read_text().splitlines()
    assert dec[1] == "vertex,s,coefficient,value-exact,value-decimal"
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert traj[0].split("=", 1)[1] == manifest["hash"]
    disc = json.loads((out_dir / "discrepancy.json").read_text())
    assert disc["discrepancy"] == "188/3^5"
    assert disc["origin_decomposition_total"] == "188/3^5"
    assert disc["_manifest_hash"] == manifest["hash"]


def test_simulate_empty_config(capsys, tmp_path):
    cfg = tmp_path / "empty.json"
    cfg.write_text(json.dumps({"k": 3, "chips": {}, "rotors": {}}))
    code, out, _ = run_cli(capsys, "simulate", "--config", str(cfg), "--T", "4")
    assert code == 0 and "0/3^0 = 0" in out


def test_simulate_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"k": 3,')
    code, _, err = run_cli(capsys, "simulate", "--config", str(bad), "--T", "2")
    assert code == 2 and err


def test_simulate_budget_exit(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "big.json"
    cfg.write_text(json.dumps({"k": 3, "chips": {"": "19683"}, "rotors": {}}))
    monkeypatch.setenv("ROTOR_TREE_BUDGET", "10")
    code, _, err = run_cli(capsys, "simulate", "--config", str(cfg), "--T", "9")
    assert code == 3 and "budget" in err.lower()


def test_force_round_trip(capsys, divergence_files, tmp_path):
    target_path, _ = divergence_files
    out_dir = tmp_path / "forced"
    code, out, _ = run_cli(capsys, "force", "--target", str(target_path),
                           "--default-rotor", "toward_origin",
                           "--out", str(out_dir))
    assert code == 0
    assert "verified 100%" in out
    cfg = json.loads((out_dir / "config.json").read_text())
    assert cfg["k"] == 3 and cfg["even"] is True
    placements = (out_dir / "placements.csv").read_text().splitlines()
    assert placements[1] == "stage,vertex,epsilon"


def test_force_parity_violation_is_usage_error(capsys, tmp_path):
    bad = tmp_path / "parity.json"
    bad.write_text(json.dumps(
        {"k": 3, "horizon": 2, "radius": 1, "residues": {"0@2": 2}}))
    code, _, err = run_cli(capsys, "force", "--target", str(bad))
    assert code == 2 and "parity" in err


def test_force_empty_target(capsys, tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"k": 3, "horizon": 2, "radius": 2, "residues": {}}))
    code, out, _ = run_cli(capsys, "force", "--target", str(empty))
    assert code == 0 and "verified 100%" in out and "0 chips" in out


def test_diverge_analytic_table(capsys):
    code, out, _ = run_cli(capsys, "diverge", "--k", "3", "--T", "4,6")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("T,discrepancy-exact")
    assert lines[1].startswith("4,4/3^2,")
    assert lines[2].startswith("6,188/3^5,")


def test_diverge_both_mode_matches(capsys):
    code, out, _ = run_cli(capsys, "diverge", "--k", "3", "--T", "4,6",
                           "--mode", "both")
    assert code == 0
    assert out.count("188/3^5") == 2  # analytic and simulated columns agree


def test_diverge_odd_horizon(capsys):
    code, _, err = run_cli(capsys, "diverge", "--k", "3", "--T", "5")
    assert code == 2 and "even" in err


def test_diverge_simulate_cap(capsys):
    code, _, err = run_cli(capsys, "diverge", "--k", "4", "--T", "8",
                           "--mode", "simulate")
    assert code == 2 and "cap" in err


def test_diverge_writes_growth_csv(capsys, tmp_path):
    out_dir = tmp_path / "growth"
    code, _, _ = run_cli(capsys, "diverge", "--k", "4", "--T", "8,16",
                         "--out", str(out_dir))
    assert code == 0
    lines = (out_dir / "growth.csv").read_text().splitlines()
    assert lines[0].startswith("# manifest_hash=")
    assert len(lines) == 4


def test_deterministic_rerun_bytes(capsys, divergence_files, tmp_path):
    target_path, _ = divergence_files
    out_dir = tmp_path / "rerun"
    run_cli(capsys, "force", "--target", str(target_path),
            "--default-rotor", "toward_origin", "--out", str(out_dir))
    first = {p.name: p.read_bytes() for p in out_dir.iterdir()}
    run_cli(capsys, "force", "--target", str(target_path),
            "--default-rotor", "toward_origin", "--out", str(out_dir))
    second = {p.name: p.read_bytes() for p in out_dir.iterdir()}
    assert first == second


def test_verify_suite_exit_codes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--suite", "decomposition")
    assert code == 0
    assert "PASS" in out and "FAIL" not in out


def test_unknown_subcommand(capsys):
    assert run_cli(capsys, "frobnicate")[0] == 2
