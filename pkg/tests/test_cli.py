import json

import numpy as np
import pytest

from diskcurv.cli import main

SMALL = {"mesh": {"n_radial": 12, "n_angular": 48}}


def write_config(tmp_path, extra=None, name="config.json"):
    cfg = dict(SMALL)
    if extra:
        cfg = {**cfg, **extra}
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_solve_writes_artifacts(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["--config", cfg, "--out", str(out), "solve"]) == 0
    sol = (out / "solution.csv").read_text().splitlines()
    assert sol[0] == "node_id,x,y,u"
    report = json.loads((out / "report.json").read_text())
    assert report["converged"] is True
    assert report["gauss_bonnet_residual"] <= 1e-4
    assert set(report["energy"]) == {"dirichlet", "area_log", "boundary_linear",
                                     "boundary_log", "f_rho", "total"}
    assert (out / "mesh_nodes.csv").exists()
    assert (out / "mesh_triangles.csv").exists()


def test_solve_limit_both_sides(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["--config", cfg, "--out", str(tmp_path / "o0"),
                 "solve-limit", "--side", "0"]) == 0
    assert main(["--config", cfg, "--out", str(tmp_path / "o2"),
                 "solve-limit", "--side", "2pi"]) == 0
    rep0 = json.loads((tmp_path / "o0" / "report.json").read_text())
    rep2 = json.loads((tmp_path / "o2" / "report.json").read_text())
    assert rep0["rho"] == 0.0
    assert rep2["rho"] == pytest.approx(2.0 * np.pi)


def test_infeasible_exits_3(tmp_path, capsys):
    cfg = write_config(tmp_path, {
        "curvature": {"K": {"kind": "constant", "amplitude": -1.0},
                      "h": {"kind": "constant", "amplitude": -1.0}}})
    assert main(["--config", cfg, "--out", str(tmp_path / "o"), "solve"]) == 3
    err = capsys.readouterr().err
    assert "nowhere positive" in err


def test_malformed_config_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"mesh": oops}')
    assert main(["--config", str(bad), "--out", str(tmp_path / "o"), "solve"]) == 1
    err = capsys.readouterr().err
    assert "line 1" in err


def test_group_incompatible_mode_exits_1(tmp_path, capsys):
    cfg = write_config(tmp_path, {
        "curvature": {"K": {"kind": "constant", "amplitude": 1.0},
                      "h": {"kind": "angular-mode", "base": 1.0,
                            "amplitude": 0.5, "mode": 3}}})
    assert main(["--config", cfg, "--out", str(tmp_path / "o"), "solve"]) == 1
    assert "not invariant" in capsys.readouterr().err


def test_check_inequalities(tmp_path):
    cfg = write_config(tmp_path, {
        "inequalities": {"mobius_sweep": [0.0, 0.3, 0.6],
                         "bubble_lambdas": [1.0, 4.0, 16.0],
                         "n_random_fields": 5}})
    out = tmp_path / "ineq"
    assert main(["--config", cfg, "--out", str(out), "check-inequalities"]) == 0
    lines = (out / "deficits.csv").read_text().splitlines()
    assert lines[0] == "family,param,left,right,deficit,constant_used"
    assert len(lines) > 10
    summary = json.loads((out / "inequalities.json").read_text())
    assert summary["violations"] == []


def test_refine_emits_order_table(tmp_path):
    cfg = write_config(tmp_path, {
        "refine": {"levels": [[6, 24], [12, 48], [24, 96]]}})
    out = tmp_path / "ref"
    assert main(["--config", cfg, "--out", str(out), "refine"]) == 0
    lines = (out / "refine.csv").read_text().splitlines()
    assert lines[0].startswith("level,n_radial,n_angular,converged,rho")
    assert len(lines) == 4


def test_perturb_reports_feasible_window(tmp_path):
    cfg = write_config(tmp_path, {
        "perturb": {"epsilons": [0.0, 0.05, 0.1],
                    "bump_K": {"kind": "angular-mode", "amplitude": 1.0,
                               "base": 1.0, "mode": 2},
                    "bump_h": {"kind": "angular-mode", "amplitude": 1.0,
                               "base": 1.0, "mode": 2}}})
    out = tmp_path / "pert"
    assert main(["--config", cfg, "--out", str(out), "perturb"]) == 0
    summary = json.loads((out / "perturb.json").read_text())
    assert summary["max_feasible_epsilon"] >= 0.05
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "epsilon,converged,rho,gb_residual,weak_residual"


def test_verify_passes_on_fine_mesh(tmp_path):
    cfg = write_config(tmp_path, {"mesh": {"n_radial": 32, "n_angular": 128}})
    out = tmp_path / "ver"
    assert main(["--config", cfg, "--out", str(out), "verify"]) == 0
    lines = (out / "verify.csv").read_text().splitlines()
    assert lines[0] == "case,metric,value,threshold,pass"
    assert all(line.endswith(",1") for line in lines[1:])


def test_same_config_bitwise_identical_outputs(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["--config", cfg, "--out", str(tmp_path / "a"), "solve"]) == 0
    assert main(["--config", cfg, "--out", str(tmp_path / "b"), "solve"]) == 0
    assert (tmp_path / "a" / "solution.csv").read_bytes() == \
        (tmp_path / "b" / "solution.csv").read_bytes()
    assert (tmp_path / "a" / "report.json").read_bytes() == \
        (tmp_path / "b" / "report.json").read_bytes()


def test_seed_override_accepted(tmp_path):
    cfg = write_config(tmp_path, {
        "inequalities": {"mobius_sweep": [0.0], "bubble_lambdas": [1.0],
                         "n_random_fields": 2}})
    out = tmp_path / "s"
    assert main(["--config", cfg, "--out", str(out), "--seed", "7",
                 "check-inequalities"]) == 0


def test_outer_scan_strategy_via_config(tmp_path):
    cfg = write_config(tmp_path, {"solver": {
        "max_iterations": 2000, "gradient_tolerance": 1e-7,
        "rho_strategy": "outer-scan", "initial_rho": 3.0, "lbfgs_memory": 10,
        "line_search": {"shrink": 0.5, "sufficient_decrease": 1e-4,
                        "max_backtracks": 60}}})
    out = tmp_path / "scan"
    assert main(["--config", cfg, "--out", str(out), "solve"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["converged"] is True


def test_example_config_is_valid(tmp_path):
    import os
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    example = os.path.join(root, "config.example.json")
    with open(example) as f:
        cfg = json.load(f)
    # shrink the mesh so the smoke run stays fast; everything else as shipped
    cfg["mesh"] = {"n_radial": 12, "n_angular": 48}
    path = tmp_path / "example.json"
    path.write_text(json.dumps(cfg))
    assert main(["--config", str(path), "--out", str(tmp_path / "o"),
                 "solve"]) == 0
