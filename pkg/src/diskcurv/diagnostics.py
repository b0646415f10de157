"""Residuals, curvature-balance verification, convergence and probe studies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .energy import TWO_PI, EnergyBreakdown, energy, log_area_integral, \
    log_boundary_integral
from .errors import ConfigurationError, OutsideAdmissibleSetError
from .fields import SymmetryGroup, symmetry_residual
from .mesh import DiskMesh, _check_field, _check_trace, dirichlet_energy
from .solve import SolveConfig, SolveResult, minimize_joint, solve_limit_0, \
    solve_limit_2pi

__all__ = [
    "DiagnosticsReport",
    "SweepResult",
    "RefinementTable",
    "gauss_bonnet_residual",
    "weak_residual",
    "residual_report",
    "refinement_study",
    "perturbation_sweep",
    "coercivity_probe",
]


@dataclass(frozen=True)
class DiagnosticsReport:
    gauss_bonnet_residual: float
    weak_residual_norm: float
    boundary_residual_norm: float
    rho_constraint_residual: float
    symmetry_residual: float
    energy: EnergyBreakdown

    def to_dict(self, rho: float, converged: bool, iterations: int) -> dict:
        return {
            "gauss_bonnet_residual": self.gauss_bonnet_residual,
            "weak_residual_interior": self.weak_residual_norm,
            "weak_residual_boundary": self.boundary_residual_norm,
            "rho_constraint_residual": self.rho_constraint_residual,
            "symmetry_residual": self.symmetry_residual,
            "rho": rho,
            "energy": self.energy.to_dict(),
            "converged": converged,
            "iterations": iterations,
        }


def gauss_bonnet_residual(mesh: DiskMesh, K: np.ndarray, h: np.ndarray,
                          u_solution: np.ndarray) -> float:
    """| int K e^u + int h e^{u/2} - 2*pi |; the discrete curvature balance."""
    K = _check_field(mesh, K, "K")
    h = _check_trace(mesh, h, "h")
    u = _check_field(mesh, u_solution, "u_solution")
    mass_K = float(np.dot(mesh.interior_weights, K * np.exp(u)))
    mass_h = float(np.dot(mesh.boundary_weights,
                          h * np.exp(0.5 * u[mesh.boundary_nodes])))
    return abs(mass_K + mass_h - TWO_PI)


def weak_residual(mesh: DiskMesh, K: np.ndarray, h: np.ndarray,
                  u_solution: np.ndarray) -> tuple[float, float]:
    """Dual norms of the weak-form residual, split interior/boundary.

    The residual functional over the hat basis is

        r = S u - 2 (w K e^u) + 2 c - 2 (c h e^{u/2})

    (S stiffness, w interior weights, c boundary weights); its dual norm uses
    the stiffness+mass weighting, so values are comparable across mesh sizes.
    """
    K = _check_field(mesh, K, "K")
    h = _check_trace(mesh, h, "h")
    u = _check_field(mesh, u_solution, "u_solution")
    r = mesh.stiffness.matvec(u)
    r -= 2.0 * mesh.interior_weights * K * np.exp(u)
    c = mesh.boundary_weight_vector()
    r += 2.0 * c
    r[mesh.boundary_nodes] -= 2.0 * mesh.boundary_weights * h * np.exp(
        0.5 * u[mesh.boundary_nodes])
    mask = mesh.is_boundary_node()
    r_int = np.where(mask, 0.0, r)
    r_bnd = np.where(mask, r, 0.0)
    return mesh.h1_dual_norm(r_int), mesh.h1_dual_norm(r_bnd)


def rho_constraint_residual(mesh: DiskMesh, K: np.ndarray, h: np.ndarray,
                            u: np.ndarray, rho: float) -> float:
    """Relative mismatch of (2pi-rho)^2/rho against the mass-ratio identity."""
    if not 0.0 < rho < TWO_PI:
        return 0.0  # constraint only constrains interior rho
    lhs = (TWO_PI - rho) ** 2 / rho
    try:
        rhs = math.exp(2.0 * log_boundary_integral(mesh, h, u)
                       - log_area_integral(mesh, K, u))
    except OutsideAdmissibleSetError:
        return math.inf
    return abs(lhs - rhs) / abs(lhs)


def residual_report(mesh: DiskMesh, K: np.ndarray, h: np.ndarray,
                    result: SolveResult, group: SymmetryGroup) -> DiagnosticsReport:
    """Assemble the full diagnostics for a solve result."""
    u_sol = result.u_solution
    wi, wb = weak_residual(mesh, K, h, u_sol)
    return DiagnosticsReport(
        gauss_bonnet_residual=gauss_bonnet_residual(mesh, K, h, u_sol),
        weak_residual_norm=wi,
        boundary_residual_norm=wb,
        rho_constraint_residual=rho_constraint_residual(
            mesh, K, h, result.u_min, result.rho_min),
        symmetry_residual=symmetry_residual(result.u_min, group),
        energy=result.energy,
    )


# ------------------------------------------------------ refinement study ---


@dataclass(frozen=True)
class RefinementTable:
    levels: list            # (n_radial, n_angular) per level
    rho_values: list
    rho_errors: list        # |rho - rho at finest level| (or vs exact if given)
    field_errors: list      # Linf vs reference field, nan when unavailable
    gb_residuals: list
    converged: list
    rho_order: float
    field_order: float

    def rows(self):
        out = ["level,n_radial,n_angular,converged,rho,rho_error,field_error,gb_residual"]
        for i, (nr, na) in enumerate(self.levels):
            out.append(
                f"{i},{nr},{na},{int(self.converged[i])},{self.rho_values[i]!r},"
                f"{self.rho_errors[i]!r},{self.field_errors[i]!r},"
                f"{self.gb_residuals[i]!r}"
            )
        return out


def _estimated_order(errors: Sequence[float]) -> float:
    errs = [e for e in errors if np.isfinite(e) and e > 0.0]
    if len(errs) < 2:
        return math.nan
    rates = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    return float(np.mean(rates))


def refinement_study(problem, levels: Sequence[tuple[int, int]],
                     exact_rho: Optional[float] = None,
                     exact_field=None) -> RefinementTable:
    """Solve the same problem on a ladder of meshes and estimate orders.

    ``problem`` is a callable ``(n_radial, n_angular) -> (mesh, SolveResult,
    K, h)``; levels must at least triple with doubled resolution.  Field
    errors are measured against ``exact_field(x, y)`` when given, otherwise
    skipped; rho errors are against ``exact_rho`` or the finest level.
    """
    if len(levels) < 3:
        raise ConfigurationError("refinement ladder needs at least 3 levels")
    meshes, results = [], []
    for nr, na in levels:
        mesh, res, K, h = problem(nr, na)
        meshes.append((mesh, K, h))
        results.append(res)
    rho_values = [r.rho_min for r in results]
    ref_rho = exact_rho if exact_rho is not None else rho_values[-1]
    rho_errors = [abs(r - ref_rho) for r in rho_values]
    if exact_rho is None:
        rho_errors[-1] = math.nan
    field_errors = []
    for (mesh, K, h), res in zip(meshes, results):
        if exact_field is None or res.u_solution is None:
            field_errors.append(math.nan)
        else:
            ref = exact_field(mesh.nodes[:, 0], mesh.nodes[:, 1])
            field_errors.append(float(np.max(np.abs(res.u_solution - ref))))
    gb = [gauss_bonnet_residual(mesh, K, h, res.u_solution)
          for (mesh, K, h), res in zip(meshes, results)]
    return RefinementTable(
        levels=list(levels), rho_values=rho_values, rho_errors=rho_errors,
        field_errors=field_errors, gb_residuals=gb,
        converged=[r.converged for r in results],
        rho_order=_estimated_order([e for e in rho_errors if np.isfinite(e)]),
        field_order=_estimated_order(field_errors),
    )


# ----------------------------------------------------- perturbation sweep ---


@dataclass(frozen=True)
class SweepResult:
    epsilons: np.ndarray
    converged: list
    rhos: list
    gb_residuals: list
    weak_residuals: list
    rho_residuals: list            # relative mass-balance mismatch per epsilon
    sign_condition_area: list      # int K e^{u of boundary-limit minimizer} > 0
    sign_condition_boundary: list  # int h e^{u/2 of interior-limit minimizer} > 0
    max_feasible_epsilon: float

    def rows(self):
        out = ["epsilon,converged,rho,gb_residual,weak_residual"]
        for i, eps in enumerate(self.epsilons):
            out.append(
                f"{float(eps)!r},{int(self.converged[i])},{float(self.rhos[i])!r},"
                f"{float(self.gb_residuals[i])!r},{float(self.weak_residuals[i])!r}"
            )
        return out


def perturbation_sweep(mesh: DiskMesh, K0: np.ndarray, h0: np.ndarray,
                       bump_K: np.ndarray, bump_h: np.ndarray,
                       epsilons: Sequence[float],
                       config: SolveConfig,
                       gb_tol: float = 1e-4) -> SweepResult:
    """Solve with K = K0 - eps*bump_K, h = h0 - eps*bump_h over an eps grid.

    K0, h0 must be nonnegative, group-symmetric and neither identically zero;
    the sweep records, per eps, convergence, the curvature balance, and the
    cross sign conditions on the two limiting-problem minimizers that the
    general existence statement requires.  ``max_feasible_epsilon`` is the
    largest eps whose solve converged with curvature balance within
    ``gb_tol``.
    """
    K0 = _check_field(mesh, K0, "K0")
    h0 = _check_trace(mesh, h0, "h0")
    if np.min(K0) < 0.0 or np.min(h0) < 0.0:
        raise ConfigurationError("base curvatures must be nonnegative")
    if np.max(np.abs(K0)) == 0.0 or np.max(np.abs(h0)) == 0.0:
        raise ConfigurationError("base curvatures must not be identically zero")
    group = config.group
    for arr, name in ((K0, "K0"), (bump_K, "bump_K")):
        if symmetry_residual(arr, group) > 1e-10:
            raise ConfigurationError(f"{name} is not group-symmetric")
    for arr, name in ((h0, "h0"), (bump_h, "bump_h")):
        if symmetry_residual(arr, group) > 1e-10:
            raise ConfigurationError(f"{name} is not group-symmetric")

    epsilons = np.asarray(sorted(float(e) for e in epsilons))
    converged, rhos, gbs, weaks, rho_res = [], [], [], [], []
    sign_area, sign_bnd = [], []
    max_feasible = 0.0
    for eps in epsilons:
        K = K0 - eps * bump_K
        h = h0 - eps * bump_h
        ok, rho, gb, weak, rrel = False, math.nan, math.nan, math.nan, math.nan
        s_area = s_bnd = False
        try:
            res = minimize_joint(mesh, K, h, config)
            ok = res.converged and res.collapse_side is None
            rho = res.rho_min
            if ok:
                gb = gauss_bonnet_residual(mesh, K, h, res.u_solution)
                weak = max(weak_residual(mesh, K, h, res.u_solution))
                rrel = rho_constraint_residual(mesh, K, h, res.u_min, rho)
            lim0 = solve_limit_0(mesh, h, config)
            lim2 = solve_limit_2pi(mesh, K, config)
            s_area = float(np.dot(mesh.interior_weights,
                                  K * np.exp(lim0.u_min))) > 0.0
            s_bnd = float(np.dot(mesh.boundary_weights, h * np.exp(
                0.5 * lim2.u_min[mesh.boundary_nodes]))) > 0.0
        except Exception:
            ok = False
        converged.append(ok)
        rhos.append(rho)
        gbs.append(gb)
        weaks.append(weak)
        rho_res.append(rrel)
        sign_area.append(s_area)
        sign_bnd.append(s_bnd)
        if ok and np.isfinite(gb) and gb <= gb_tol:
            max_feasible = float(eps)
    return SweepResult(
        epsilons=epsilons, converged=converged, rhos=rhos, gb_residuals=gbs,
        weak_residuals=weaks, rho_residuals=rho_res,
        sign_condition_area=sign_area, sign_condition_boundary=sign_bnd,
        max_feasible_epsilon=max_feasible,
    )


# ------------------------------------------------------- coercivity probe ---


def coercivity_probe(mesh: DiskMesh, K: np.ndarray, h: np.ndarray, rho: float,
                     u_direction: np.ndarray, t_grid: Sequence[float],
                     group: Optional[SymmetryGroup] = None):
    """Least-squares fit of I(t * u_dir, rho) to a*t^2 - b*t + c.

    ``u_direction`` must have zero disk mean and unit H^1 norm (up to 1e-8);
    grid points where the scaled field leaves the admissible set are dropped
    from the fit and their count reported.  Returns ``(a, b, c, n_dropped)``.
    """
    u_direction = _check_field(mesh, u_direction, "u_direction")
    mean = float(np.dot(mesh.interior_weights, u_direction)) / mesh.area
    seminorm = dirichlet_energy(mesh, u_direction)
    l2 = float(np.dot(mesh.interior_weights, u_direction**2))
    h1 = math.sqrt(seminorm + l2)
    if abs(mean) > 1e-8 or abs(h1 - 1.0) > 1e-8:
        raise ConfigurationError(
            f"direction must be zero-mean with unit H1 norm "
            f"(mean={mean:.2e}, norm={h1:.6f}); constants are rejected"
        )
    if group is not None and symmetry_residual(u_direction, group) > 1e-10:
        raise ConfigurationError("probe direction is not group-symmetric")
    ts, vals = [], []
    dropped = 0
    for t in t_grid:
        try:
            vals.append(energy(mesh, K, h, float(t) * u_direction, rho).total)
            ts.append(float(t))
        except OutsideAdmissibleSetError:
            dropped += 1
    if len(ts) < 3:
        raise ConfigurationError("too few admissible grid points for the fit")
    coeffs = np.polyfit(np.asarray(ts), np.asarray(vals), 2)
    a, minus_b, c = float(coeffs[0]), float(coeffs[1]), float(coeffs[2])
    return a, -minus_b, c, dropped
