"""Command-line entry point.

Commands: ``solve``, ``solve-limit --side {0,2pi}``, ``check-inequalities``,
``verify``, ``refine``, ``perturb``.  All run parameters live in a JSON
config file (see the repository's ``config.example.json``); the CLI itself
only takes ``--config``, ``--out``, ``--threads`` and ``--seed``.

Exit codes: 0 success, 1 internal or configuration error, 2 endpoint
collapse reported by the joint solve, 3 infeasible problem (a curvature with
no positive part), 4 inequality deficit violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import kernels
from .diagnostics import (
    perturbation_sweep,
    refinement_study,
    residual_report,
    weak_residual,
)
from .energy import TWO_PI
from .errors import ConfigurationError, DiskcurvError, InfeasibleProblemError
from .fields import (
    CurvaturePair,
    CurvatureSpec,
    SymmetryGroup,
    is_symmetric,
    load_tabulated_circle,
    load_tabulated_disk,
    sample_curvatures,
    symmetrize,
)
from .inequalities import (
    interior_bubble,
    lebedev_milin_deficit,
    lebedev_milin_extremal,
    local_deficit,
    mobius_field,
    mt_interior_deficit,
    two_arc_deficit,
    write_deficit_csv,
)
from .mesh import build_mesh, export_mesh
from .solve import (
    LineSearchParams,
    SolveConfig,
    minimize_joint,
    solve_limit_0,
    solve_limit_2pi,
)

DEFAULT_CONFIG = {
    "mesh": {"n_radial": 48, "n_angular": 192},
    "group": {"kind": "cyclic", "k": 2},
    "curvature": {
        "K": {"kind": "constant", "amplitude": 1.0},
        "h": {"kind": "constant", "amplitude": 1.0},
    },
    "solver": {
        "max_iterations": 2000,
        "gradient_tolerance": 1e-7,
        "rho_strategy": "joint",
        "initial_rho": math.pi,
        "lbfgs_memory": 10,
        "line_search": {
            "shrink": 0.5,
            "sufficient_decrease": 1e-4,
            "max_backtracks": 60,
        },
    },
    "seed": 0,
    "inequalities": {
        "mobius_params": [0.0, 0.3, 0.6],
        "mobius_sweep": [0.0, 0.2, 0.4, 0.6, 0.8],
        "bubble_lambdas": [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
        "n_random_fields": 20,
        "epsilon": 0.1,
        "delta": 0.2,
    },
    "refine": {"levels": [[12, 48], [24, 96], [48, 192]]},
    "perturb": {
        "epsilons": [0.0, 0.025, 0.05, 0.1, 0.2, 0.4],
        "bump_K": {"kind": "angular-mode", "amplitude": 1.0, "base": 1.0, "mode": 2},
        "bump_h": {"kind": "angular-mode", "amplitude": 1.0, "base": 1.0, "mode": 2},
    },
}


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = val
    return out


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return DEFAULT_CONFIG
    try:
        with open(path) as f:
            user = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}"
        ) from exc
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(user, dict):
        raise ConfigurationError(f"{path}: top level must be a JSON object")
    return _deep_merge(DEFAULT_CONFIG, user)


def _curvature_spec(entry: dict, mesh, on_circle: bool) -> CurvatureSpec:
    entry = dict(entry)
    kind = entry.pop("kind", "constant")
    if kind == "tabulated":
        path = entry.pop("path", None)
        if path is None:
            raise ConfigurationError("tabulated curvature needs a 'path'")
        loader = load_tabulated_circle if on_circle else load_tabulated_disk
        return loader(path, mesh)
    allowed = {"amplitude", "base", "mode", "center_radius", "width"}
    unknown = set(entry) - allowed
    if unknown:
        raise ConfigurationError(f"unknown curvature parameters: {sorted(unknown)}")
    return CurvatureSpec(kind=kind, **entry)


class Run:
    """Mesh, group, sampled curvatures and solver config for one invocation."""

    def __init__(self, cfg: dict):
        mesh_cfg = cfg["mesh"]
        group_cfg = cfg["group"]
        kind = group_cfg.get("kind", "cyclic")
        k = int(group_cfg.get("k", 2))
        self.mesh = build_mesh(
            int(mesh_cfg["n_radial"]), int(mesh_cfg["n_angular"]),
            group_order=k, dihedral=(kind == "dihedral"),
        )
        if kind == "cyclic":
            self.group = SymmetryGroup.cyclic(self.mesh, k)
        elif kind == "dihedral":
            self.group = SymmetryGroup.dihedral(self.mesh, k)
        else:
            raise ConfigurationError(f"unknown group kind {kind!r}")
        pair = CurvaturePair(
            K=_curvature_spec(cfg["curvature"]["K"], self.mesh, on_circle=False),
            h=_curvature_spec(cfg["curvature"]["h"], self.mesh, on_circle=True),
        )
        self.K, self.h = sample_curvatures(pair, self.mesh)
        for name, arr in (("K", self.K), ("h", self.h)):
            if not is_symmetric(arr, self.group, 1e-10):
                raise ConfigurationError(
                    f"curvature {name} is not invariant under the configured "
                    f"group ({kind} k={k}); for an angular mode the group order "
                    "must divide the mode number"
                )
        s = cfg["solver"]
        self.solve_config = SolveConfig(
            group=self.group,
            max_iterations=int(s["max_iterations"]),
            gradient_tolerance=float(s["gradient_tolerance"]),
            rho_strategy=s["rho_strategy"],
            initial_rho=float(s["initial_rho"]),
            lbfgs_memory=int(s["lbfgs_memory"]),
            line_search=LineSearchParams(
                shrink=float(s["line_search"]["shrink"]),
                sufficient_decrease=float(s["line_search"]["sufficient_decrease"]),
                max_backtracks=int(s["line_search"]["max_backtracks"]),
            ),
        )
        self.seed = int(cfg["seed"])
        self.cfg = cfg


def _write_solution_csv(path, mesh, u) -> None:
    with open(path, "w") as f:
        f.write("node_id,x,y,u\n")
        for i, (x, y) in enumerate(mesh.nodes):
            f.write(f"{i},{float(x)!r},{float(y)!r},{float(u[i])!r}\n")


def _write_report(path, run: Run, result) -> None:
    rep = residual_report(run.mesh, run.K, run.h, result, run.group)
    with open(path, "w") as f:
        json.dump(rep.to_dict(result.rho_min, result.converged,
                              result.iterations), f, indent=2)
        f.write("\n")


def _emit_solution(outdir, run: Run, result) -> None:
    os.makedirs(outdir, exist_ok=True)
    _write_solution_csv(os.path.join(outdir, "solution.csv"),
                        run.mesh, result.u_solution)
    _write_report(os.path.join(outdir, "report.json"), run, result)
    export_mesh(run.mesh, os.path.join(outdir, "mesh_nodes.csv"),
                os.path.join(outdir, "mesh_triangles.csv"))


# ---------------------------------------------------------------- commands ---


def cmd_solve(run: Run, outdir: str) -> int:
    result = minimize_joint(run.mesh, run.K, run.h, run.solve_config)
    _emit_solution(outdir, run, result)
    if result.collapse_side is not None:
        side = "0" if result.collapse_side == 0.0 else "2pi"
        rep = result.endpoint_report
        print(f"mass parameter collapsed toward rho = {side}; the problem "
              f"degenerated to the corresponding limiting regime "
              f"(endpoint excluded by energy comparison: {rep.excluded})",
              file=sys.stderr)
        return 2
    if not result.converged:
        print("solve did not reach the gradient tolerance", file=sys.stderr)
        return 1
    print(f"converged in {result.iterations} iterations, "
          f"rho = {result.rho_min:.8f}, energy = {result.energy.total:.8f}")
    return 0


def cmd_solve_limit(run: Run, outdir: str, side: str) -> int:
    if side == "0":
        result = solve_limit_0(run.mesh, run.h, run.solve_config)
    else:
        result = solve_limit_2pi(run.mesh, run.K, run.solve_config)
    _emit_solution(outdir, run, result)
    if not result.converged:
        print("solve did not reach the gradient tolerance", file=sys.stderr)
        return 1
    print(f"converged in {result.iterations} iterations, "
          f"energy = {result.energy.total:.8f}")
    return 0


def _random_smooth_fields(run: Run, n: int, rng) -> list:
    mesh = run.mesh
    r = mesh.node_radii()
    th = mesh.node_angles()
    fields = []
    for _ in range(n):
        u = np.zeros(mesh.n_nodes)
        for mode in range(5):
            amp_c, amp_s = rng.normal(0.0, 0.5, size=2)
            rad = r ** max(mode, 1)
            u += amp_c * rad * np.cos(mode * th) + amp_s * rad * np.sin(mode * th)
        u += rng.normal(0.0, 0.5) * r**2
        fields.append(u)
    return fields


class DeficitRow:
    """Deficit report with the family parameter filled in."""

    def __init__(self, rep, param, family=None):
        self._rep = rep
        self.family = family if family is not None else rep.family
        self.param = param
        self.left = rep.left
        self.right = rep.right
        self.constant_used = rep.constant_used

    @property
    def deficit(self):
        return self.right - self.left

    def row(self):
        return (f"{self.family},{self.param!r},{self.left!r},{self.right!r},"
                f"{self.deficit!r},{self.constant_used!r}")


def cmd_check_inequalities(run: Run, outdir: str) -> int:
    os.makedirs(outdir, exist_ok=True)
    mesh = run.mesh
    icfg = run.cfg["inequalities"]
    rng = np.random.default_rng(run.seed)
    reports = []
    violations = []
    # discretization slack for the sharp lower bound, reported with results
    slack = max(1e-6, 0.5 / run.mesh.n_radial**2)

    def check(rep, lower=None, upper=None, param=None):
        reports.append(rep)
        tag = f"{rep.family}@{param if param is not None else rep.param}"
        if lower is not None and rep.deficit < lower:
            violations.append(f"{tag}: deficit {rep.deficit:.3e} < {lower:.3e}")
        if upper is not None and rep.deficit > upper:
            violations.append(f"{tag}: deficit {rep.deficit:.3e} > {upper:.3e}")

    # sharp boundary inequality on the swept families
    for t in icfg["mobius_sweep"]:
        u = mobius_field(mesh, (float(t), 0.0))
        rep = lebedev_milin_deficit(mesh, u)
        check(DeficitRow(rep, float(t)), lower=-slack, param=t)
    for lam in icfg["bubble_lambdas"]:
        u = interior_bubble(mesh, float(lam))
        rep = lebedev_milin_deficit(mesh, u)
        check(DeficitRow(rep, float(lam)), lower=-slack, param=lam)
    for i, u in enumerate(_random_smooth_fields(run, icfg["n_random_fields"], rng)):
        rep = lebedev_milin_deficit(mesh, u)
        check(DeficitRow(rep, float(i)), lower=-slack, param=i)
    # equality family: deficit must vanish to discretization accuracy
    for t in icfg["mobius_params"]:
        u = lebedev_milin_extremal(mesh, (float(t), 0.0))
        rep = lebedev_milin_deficit(mesh, u)
        tol = max(1e-3, slack)
        check(DeficitRow(rep, float(t), "lebedev-milin-equality"),
              lower=-tol, upper=tol, param=t)
    # interior forms: boundedness over the bubble sweep (running infimum)
    for variant in ("mean-form", "boundary-mean-form"):
        deficits = []
        for lam in icfg["bubble_lambdas"]:
            u = interior_bubble(mesh, float(lam))
            rep = mt_interior_deficit(mesh, u, variant)
            reports.append(DeficitRow(rep, float(lam)))
            deficits.append(rep.deficit)
        inf_first = min(deficits[: max(2, len(deficits) // 2)])
        inf_all = min(deficits)
        if inf_all < inf_first - 2.0:
            violations.append(
                f"mt-{variant}: running infimum degrades ({inf_first:.3f} -> "
                f"{inf_all:.3f}); deficits are not stabilizing"
            )
    # localized deficits on the symmetrized concentration profile
    eps, delta = float(icfg["epsilon"]), float(icfg["delta"])
    u = symmetrize(mobius_field(mesh, (0.6, 0.0)), run.group)
    u -= float(np.dot(mesh.interior_weights, u)) / mesh.area
    rep1 = local_deficit(mesh, u, "boundary-arc", delta=delta, epsilon=eps,
                         arc_halfwidth=0.8)
    reports.append(DeficitRow(rep1, 0.6))
    rep2 = two_arc_deficit(mesh, u, epsilon=eps, arc_halfwidth=0.8)
    reports.append(DeficitRow(rep2, 0.6))
    ub = interior_bubble(mesh, 4.0)
    ub -= float(np.dot(mesh.interior_weights, ub)) / mesh.area
    rep3 = local_deficit(mesh, ub, "interior-subdomain", delta=delta,
                         epsilon=eps, radius=0.3)
    reports.append(DeficitRow(rep3, 4.0))

    write_deficit_csv(os.path.join(outdir, "deficits.csv"), reports)
    with open(os.path.join(outdir, "inequalities.json"), "w") as f:
        json.dump({"slack": slack, "violations": violations}, f, indent=2)
        f.write("\n")
    if violations:
        for v in violations:
            print(f"deficit violation: {v}", file=sys.stderr)
        return 4
    print(f"all asserted deficits within tolerance (slack {slack:.2e}); "
          f"{len(reports)} evaluations written")
    return 0


def cmd_verify(run: Run, outdir: str) -> int:
    """Reproduce the two closed-form limiting solutions and check residuals."""
    os.makedirs(outdir, exist_ok=True)
    mesh = run.mesh
    rows = ["case,metric,value,threshold,pass"]
    ok = True

    h1 = np.ones(mesh.n_angular)
    res0 = solve_limit_0(mesh, h1, run.solve_config)
    sup = float(np.max(np.abs(res0.u_solution)))
    wr = max(weak_residual(mesh, np.zeros(mesh.n_nodes), h1, res0.u_solution))
    for metric, val, thr in (("sup_norm", sup, 1e-3), ("weak_residual", wr, 1e-6)):
        good = val <= thr
        ok &= good
        rows.append(f"flat-disk,{metric},{val!r},{thr!r},{int(good)}")

    K1 = np.ones(mesh.n_nodes)
    res2 = solve_limit_2pi(mesh, K1, run.solve_config)
    r2 = (mesh.nodes**2).sum(axis=1)
    exact = 2.0 * np.log(2.0 / (1.0 + r2))
    sup = float(np.max(np.abs(res2.u_solution - exact)))
    mass = float(np.dot(mesh.interior_weights, np.exp(res2.u_solution)))
    for metric, val, thr in (("sup_error", sup, 5e-3),
                             ("mass_error", abs(mass - TWO_PI), 1e-3)):
        good = val <= thr
        ok &= good
        rows.append(f"spherical-cap,{metric},{val!r},{thr!r},{int(good)}")

    with open(os.path.join(outdir, "verify.csv"), "w") as f:
        f.write("\n".join(rows) + "\n")
    print("\n".join(rows))
    return 0 if ok else 1


def cmd_refine(run: Run, outdir: str) -> int:
    os.makedirs(outdir, exist_ok=True)
    levels = [tuple(level) for level in run.cfg["refine"]["levels"]]
    group_cfg = run.cfg["group"]

    def problem(nr, na):
        mesh = build_mesh(nr, na, group_order=int(group_cfg["k"]),
                          dihedral=group_cfg["kind"] == "dihedral")
        if group_cfg["kind"] == "dihedral":
            group = SymmetryGroup.dihedral(mesh, int(group_cfg["k"]))
        else:
            group = SymmetryGroup.cyclic(mesh, int(group_cfg["k"]))
        pair = CurvaturePair(
            K=_curvature_spec(run.cfg["curvature"]["K"], mesh, on_circle=False),
            h=_curvature_spec(run.cfg["curvature"]["h"], mesh, on_circle=True),
        )
        K, h = sample_curvatures(pair, mesh)
        cfg = SolveConfig(group=group,
                          max_iterations=run.solve_config.max_iterations,
                          gradient_tolerance=run.solve_config.gradient_tolerance)
        res = minimize_joint(mesh, K, h, cfg)
        return mesh, res, K, h

    table = refinement_study(problem, levels)
    with open(os.path.join(outdir, "refine.csv"), "w") as f:
        f.write("\n".join(table.rows()) + "\n")
    print("\n".join(table.rows()))
    print(f"estimated rho order: {table.rho_order:.3f}")
    return 0 if all(table.converged) else 1


def cmd_perturb(run: Run, outdir: str) -> int:
    os.makedirs(outdir, exist_ok=True)
    mesh = run.mesh
    pcfg = run.cfg["perturb"]
    bump_K = _curvature_spec(pcfg["bump_K"], mesh, on_circle=False).sample_disk(mesh)
    bump_h = _curvature_spec(pcfg["bump_h"], mesh, on_circle=True).sample_circle(mesh)
    sweep = perturbation_sweep(mesh, run.K, run.h, bump_K, bump_h,
                               pcfg["epsilons"], run.solve_config)
    with open(os.path.join(outdir, "sweep.csv"), "w") as f:
        f.write("\n".join(sweep.rows()) + "\n")
    with open(os.path.join(outdir, "perturb.json"), "w") as f:
        json.dump({
            "max_feasible_epsilon": sweep.max_feasible_epsilon,
            "sign_condition_area": sweep.sign_condition_area,
            "sign_condition_boundary": sweep.sign_condition_boundary,
        }, f, indent=2)
        f.write("\n")
    print("\n".join(sweep.rows()))
    print(f"max feasible epsilon: {sweep.max_feasible_epsilon!r}")
    return 0 if sweep.converged[0] else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="diskcurv",
        description="Prescribe interior and boundary curvature on the unit "
                    "disk by joint energy minimization.",
    )
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--threads", type=int, default=0,
                        help="numba thread cap (0 = all cores); reductions "
                             "are serial so results do not depend on it")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config random seed")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve")
    p_limit = sub.add_parser("solve-limit")
    p_limit.add_argument("--side", choices=["0", "2pi"], required=True)
    sub.add_parser("check-inequalities")
    sub.add_parser("verify")
    sub.add_parser("refine")
    sub.add_parser("perturb")
    args = parser.parse_args(argv)

    if args.threads and kernels.ACTIVE_BACKEND == "numba":
        import numba

        numba.set_num_threads(max(1, args.threads))

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = _deep_merge(cfg, {"seed": args.seed})
        run = Run(cfg)
        if args.command == "solve":
            return cmd_solve(run, args.out)
        if args.command == "solve-limit":
            return cmd_solve_limit(run, args.out, args.side)
        if args.command == "check-inequalities":
            return cmd_check_inequalities(run, args.out)
        if args.command == "verify":
            return cmd_verify(run, args.out)
        if args.command == "refine":
            return cmd_refine(run, args.out)
        if args.command == "perturb":
            return cmd_perturb(run, args.out)
        raise ConfigurationError(f"unknown command {args.command!r}")
    except InfeasibleProblemError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except DiskcurvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
