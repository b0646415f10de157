"""Minimization of the joint energy over symmetric fields.

The solver is a direct method on the symmetry-constrained subspace: a
preconditioned L-BFGS descent with Armijo backtracking, where the
preconditioner is the discrete H^1 operator (stiffness + lumped mass).  Every
iterate is re-symmetrized and shifted to zero disk mean (both no-ops up to
roundoff, since the functional is invariant under constants and the gradient
of a symmetric iterate is symmetric, which is asserted at runtime).  Descent
steps that leave the admissible set raise and are treated as line-search
rejections, so the iterates never cross the boundary of the open set.

The mass parameter rho never appears as a descent variable: for any
admissible field the rho-section of the energy is strictly convex with
infinite one-sided slopes at 0 and 2*pi, so its minimizer is a unique
interior point with a closed form (:func:`diskcurv.energy.optimal_rho`).
The joint minimization therefore descends on u with rho eliminated exactly,
which keeps the rho-derivative at zero along the whole trajectory while
still allowing (and detecting) drift of rho toward an endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .energy import (
    TWO_PI,
    EnergyBreakdown,
    breakdown_limit0,
    breakdown_limit2pi,
    energy,
    energy_at_optimal_rho,
    grad_u,
    log_area_integral,
    log_boundary_integral,
)
from .errors import (
    ConfigurationError,
    InconsistentMinimizerError,
    InfeasibleProblemError,
    OutsideAdmissibleSetError,
    StalledLineSearchError,
)
from .fields import SymmetryGroup, is_symmetric, symmetrize, symmetry_residual, \
    validate_fixed_point_free
from .mesh import DiskMesh, _check_field, _check_trace

__all__ = [
    "LineSearchParams",
    "SolveConfig",
    "SolveResult",
    "EndpointReport",
    "feasible_initializer",
    "minimize_fixed_rho",
    "minimize_joint",
    "solve_limit_0",
    "solve_limit_2pi",
    "normalize_solution",
    "endpoint_exclusion_check",
]


@dataclass(frozen=True)
class LineSearchParams:
    shrink: float = 0.5
    sufficient_decrease: float = 1e-4
    max_backtracks: int = 60
    initial_step: float = 1.0
    step_growth: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.shrink < 1.0:
            raise ConfigurationError("line-search shrink must be in (0,1)")
        if not 0.0 < self.sufficient_decrease < 1.0:
            raise ConfigurationError("sufficient-decrease constant must be in (0,1)")


@dataclass(frozen=True)
class SolveConfig:
    group: SymmetryGroup
    max_iterations: int = 2000
    gradient_tolerance: float = 1e-7
    rho_strategy: str = "joint"          # "joint" | "outer-scan"
    line_search: LineSearchParams = dc_field(default_factory=LineSearchParams)
    normalization: str = "zero-disk-mean"
    initial_rho: float = math.pi
    lbfgs_memory: int = 10
    collapse_tol: float = 1e-6           # rho within this of an endpoint => collapse
    rho_scan_points: int = 7             # for the outer-scan strategy

    def __post_init__(self):
        if self.gradient_tolerance <= 0.0:
            raise ConfigurationError("gradient_tolerance must be positive")
        if not 0.0 < self.initial_rho < TWO_PI:
            raise ConfigurationError("initial_rho must lie strictly in (0, 2*pi)")
        if self.rho_strategy not in ("joint", "outer-scan"):
            raise ConfigurationError(f"unknown rho_strategy {self.rho_strategy!r}")
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be >= 1")


@dataclass(frozen=True)
class EndpointReport:
    """Energy comparison I(u0, rho) - I(u0, endpoint) on a grid toward the endpoint."""

    side: float                      # 0.0 or 2*pi
    rho_values: np.ndarray
    differences: np.ndarray
    dominant_terms: np.ndarray       # 2 rho log rho, or the 2*pi-side analogue
    excluded: bool                   # difference negative at the innermost grid point
    ratio_at_innermost: float        # difference / dominant term there
    hypothesis_ok: bool = True
    message: str = ""


@dataclass(frozen=True)
class SolveResult:
    u_min: np.ndarray                # minimizer, zero disk mean, G-symmetric
    rho_min: float
    u_solution: np.ndarray           # normalized solution field
    energy: EnergyBreakdown
    iterations: int
    converged: bool
    gradient_norm: float
    energy_history: np.ndarray
    collapse_side: Optional[float] = None
    endpoint_report: Optional[EndpointReport] = None
    diagnostics: object = None


# ------------------------------------------------------------- utilities ---


def _zero_mean(mesh: DiskMesh, u: np.ndarray) -> np.ndarray:
    return u - np.dot(mesh.interior_weights, u) / mesh.area


def _validate_inputs(mesh: DiskMesh, group: SymmetryGroup,
                     K: Optional[np.ndarray], h: Optional[np.ndarray]) -> None:
    if group.mesh is not mesh:
        raise ConfigurationError("group was built for a different mesh")
    if group.order < 2 or not validate_fixed_point_free(group, mesh):
        raise ConfigurationError(
            "the symmetry group must move every boundary point (order >= 2, "
            "no common fixed point on the circle); the unconstrained problem "
            "is outside this solver's scope"
        )
    if K is not None and not is_symmetric(K, group, 1e-10):
        raise ConfigurationError("interior curvature K is not group-symmetric")
    if h is not None and not is_symmetric(h, group, 1e-10):
        raise ConfigurationError("boundary curvature h is not group-symmetric")


class _Trace:
    __slots__ = ("u", "iterations", "converged", "gradient_norm", "energies")

    def __init__(self, u, iterations, converged, gradient_norm, energies):
        self.u = u
        self.iterations = iterations
        self.converged = converged
        self.gradient_norm = gradient_norm
        self.energies = np.asarray(energies)


def _minimize(mesh: DiskMesh, group: SymmetryGroup,
              eval_fn: Callable[[np.ndarray], float],
              grad_fn: Callable[[np.ndarray], np.ndarray],
              u0: np.ndarray, config: SolveConfig) -> _Trace:
    """Preconditioned L-BFGS with Armijo backtracking on the symmetric subspace."""
    ls = config.line_search
    u = _zero_mean(mesh, symmetrize(np.asarray(u0, dtype=np.float64), group))
    f = eval_fn(u)  # caller guarantees a feasible start
    energies = [f]
    memory: list[tuple[np.ndarray, np.ndarray, float]] = []
    g = None
    alpha_prev = ls.initial_step
    iterations = 0
    gnorm = math.inf
    gnorm_history: list[float] = []

    for it in range(config.max_iterations):
        if g is None:
            g = _projected_gradient(mesh, group, grad_fn, u)
        gnorm = mesh.h1_dual_norm(g)
        gnorm_history.append(gnorm)
        if gnorm <= config.gradient_tolerance:
            return _Trace(u, iterations, True, gnorm, energies)
        # stagnation window: neither the energy (beyond roundoff) nor the
        # gradient norm is improving, so the iterate sits at the floating-
        # point floor of the functional
        if len(gnorm_history) > 25 and \
                energies[-26] - f <= 1e-13 * (1.0 + abs(f)) and \
                gnorm > 0.5 * min(gnorm_history[-26:-1]):
            return _Trace(u, iterations, False, gnorm, energies)

        d = -_two_loop(mesh, memory, g)
        slope = float(np.dot(g, d))
        if slope >= 0.0:
            memory.clear()
            d = -mesh.h1_solve(g)
            slope = float(np.dot(g, d))

        # decrease requirement up to the rounding resolution of the energy,
        # so quasi-Newton steps keep contracting the gradient even when the
        # per-step decrease falls below one ulp of the functional value
        noise = 8.0 * np.finfo(float).eps * (1.0 + abs(f))
        alpha = min(ls.initial_step, alpha_prev * ls.step_growth)
        accepted = False
        any_admissible = False
        for _ in range(ls.max_backtracks):
            try:
                f_new = eval_fn(u + alpha * d)
            except OutsideAdmissibleSetError:
                alpha *= ls.shrink
                continue
            any_admissible = True
            if f_new <= f + ls.sufficient_decrease * alpha * slope + noise:
                accepted = True
                break
            alpha *= ls.shrink
        if not accepted:
            if not any_admissible:
                raise StalledLineSearchError(
                    "line search could not restore admissibility within "
                    f"{ls.max_backtracks} step reductions"
                )
            return _Trace(u, iterations, gnorm <= config.gradient_tolerance,
                          gnorm, energies)

        u_new = _zero_mean(mesh, symmetrize(u + alpha * d, group))
        f_new = eval_fn(u_new)
        g_new = _projected_gradient(mesh, group, grad_fn, u_new)
        s = u_new - u
        y = g_new - g
        sy = float(np.dot(s, y))
        if sy > 1e-12 * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            memory.append((s, y, 1.0 / sy))
            if len(memory) > config.lbfgs_memory:
                memory.pop(0)
        u, f, g = u_new, f_new, g_new
        energies.append(f)
        alpha_prev = alpha
        iterations = it + 1

    gnorm = mesh.h1_dual_norm(g)
    return _Trace(u, iterations, gnorm <= config.gradient_tolerance, gnorm, energies)


def _projected_gradient(mesh, group, grad_fn, u):
    g = grad_fn(u)
    # gradients of symmetric iterates are symmetric; anything beyond roundoff
    # indicates non-symmetric data slipped in
    res = symmetry_residual(g, group)
    if res > 1e-8 * (1.0 + float(np.max(np.abs(g)))):
        raise ConfigurationError(
            f"gradient lost group symmetry (residual {res:.2e}); "
            "check that the curvature data are symmetric"
        )
    return symmetrize(g, group)


def _two_loop(mesh: DiskMesh, memory, g: np.ndarray) -> np.ndarray:
    """L-BFGS two-loop recursion with the H^1 operator inverse as seed."""
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(memory):
        a = rho * float(np.dot(s, q))
        alphas.append(a)
        q -= a * y
    r = mesh.h1_solve(q)
    for (s, y, rho), a in zip(memory, reversed(alphas)):
        b = rho * float(np.dot(y, r))
        r += (a - b) * s
    return r


# ------------------------------------------------------------ initializer ---


def feasible_initializer(mesh: DiskMesh, K: np.ndarray, h: np.ndarray,
                         group: SymmetryGroup) -> np.ndarray:
    """Construct a symmetric field with positive curvature-weighted integrals.

    Zero works whenever both plain integrals are already positive.  Otherwise
    a plateau of height b is raised on the boundary collar where h > 0 (orbit
    of the most positive boundary node) and doubled until the boundary
    integral is positive, then a plateau of height a on an interior patch
    where K > 0 is doubled until the interior integral is positive; the
    interior patch dominates because its contribution grows like e^a while
    everything else stays fixed.
    """
    K = _check_field(mesh, K, "K")
    h = _check_trace(mesh, h, "h")
    interior = ~mesh.is_boundary_node()
    if float(np.max(K[interior])) <= 0.0:
        raise InfeasibleProblemError(
            "K is nowhere positive in the open disk; the admissible set is empty"
        )
    if float(np.max(h)) <= 0.0:
        raise InfeasibleProblemError(
            "h is nowhere positive on the circle; the admissible set is empty"
        )

    phi = np.zeros(mesh.n_nodes)
    if _area_total(mesh, K, phi) > 0.0 and _boundary_total(mesh, h, phi) > 0.0:
        return phi

    # orbit masks around the most positive samples
    i0 = int(np.argmax(np.where(interior, K, -np.inf)))
    x0_orbit = mesh.nodes[group.perms[:, i0]]
    r_int = min(0.25, 0.5 * (1.0 - float(np.hypot(*mesh.nodes[i0]))))
    d0 = np.min(np.linalg.norm(mesh.nodes[:, None, :] - x0_orbit[None], axis=2), axis=1)
    mask_int = (d0 <= r_int) & (K > 0.0) & interior

    j1 = int(np.argmax(h))
    b1 = mesh.boundary_nodes[j1]
    x1_orbit = mesh.nodes[group.perms[:, b1]]
    d1 = np.min(np.linalg.norm(mesh.nodes[:, None, :] - x1_orbit[None], axis=2), axis=1)
    mask_bd = (d1 <= 0.25) & ~mask_int
    h_full = np.zeros(mesh.n_nodes)
    h_full[mesh.boundary_nodes] = h
    mask_bd &= ~(mesh.is_boundary_node() & (h_full <= 0.0))

    a = b = 1.0
    for _ in range(200):
        phi = np.where(mask_int, a, np.where(mask_bd, b, 0.0))
        if _boundary_total(mesh, h, phi) > 0.0:
            break
        b *= 2.0
    else:
        raise InfeasibleProblemError("could not make the boundary integral positive")
    for _ in range(200):
        phi = np.where(mask_int, a, np.where(mask_bd, b, 0.0))
        if _area_total(mesh, K, phi) > 0.0:
            break
        a *= 2.0
    else:
        raise InfeasibleProblemError("could not make the interior integral positive")

    phi = symmetrize(phi, group)
    if _area_total(mesh, K, phi) <= 0.0 or _boundary_total(mesh, h, phi) <= 0.0:
        raise InfeasibleProblemError(
            "plateau construction failed to produce an admissible symmetric field"
        )
    return phi


def _area_total(mesh, K, u) -> float:
    return float(np.dot(mesh.interior_weights, K * np.exp(u)))


def _boundary_total(mesh, h, u) -> float:
    return float(np.dot(mesh.boundary_weights,
                        h * np.exp(0.5 * u[mesh.boundary_nodes])))


# ----------------------------------------------------------------- solves ---


def minimize_fixed_rho(mesh: DiskMesh, K: np.ndarray, h: np.ndarray,
                       rho: float, init: np.ndarray,
                       config: SolveConfig) -> SolveResult:
    """Minimize the energy in u at frozen mass parameter rho.

    rho = 0 and rho = 2*pi dispatch to the limiting solvers.
    """
    if rho == 0.0:
        return solve_limit_0(mesh, h, config, init=init)
    if rho == TWO_PI:
        return solve_limit_2pi(mesh, K, config, init=init)
    _validate_inputs(mesh, config.group, K, h)

    def eval_fn(u):
        return energy(mesh, K, h, u, rho).total

    def grad_fn(u):
        return grad_u(mesh, K, h, u, rho)

    trace = _minimize(mesh, config.group, eval_fn, grad_fn, init, config)
    u_sol = _normalize(mesh, K, trace.u, rho)
    return SolveResult(
        u_min=trace.u, rho_min=rho, u_solution=u_sol,
        energy=energy(mesh, K, h, trace.u, rho),
        iterations=trace.iterations, converged=trace.converged,
        gradient_norm=trace.gradient_norm, energy_history=trace.energies,
    )


def minimize_joint(mesh: DiskMesh, K: np.ndarray, h: np.ndarray,
                   config: SolveConfig,
                   init: Optional[np.ndarray] = None) -> SolveResult:
    """Minimize the energy over (u, rho) jointly.

    If the optimal rho drifts within ``collapse_tol`` of an endpoint, the
    corresponding limiting problem is solved and the endpoint-exclusion
    comparison is attached to the result instead of failing silently.
    """
    _validate_inputs(mesh, config.group, K, h)
    if init is None:
        init = feasible_initializer(mesh, K, h, config.group)

    if config.rho_strategy == "outer-scan":
        init = _outer_scan_init(mesh, K, h, config, init)

    def eval_fn(u):
        return energy_at_optimal_rho(mesh, K, h, u)[0].total

    def grad_fn(u):
        bd, rho = energy_at_optimal_rho(mesh, K, h, u)
        return grad_u(mesh, K, h, u, rho)

    trace = _minimize(mesh, config.group, eval_fn, grad_fn, init, config)
    breakdown, rho = energy_at_optimal_rho(mesh, K, h, trace.u)

    if min(rho, TWO_PI - rho) <= config.collapse_tol:
        side = 0.0 if rho <= config.collapse_tol else TWO_PI
        if side == 0.0:
            limit = solve_limit_0(mesh, h, config)
        else:
            limit = solve_limit_2pi(mesh, K, config)
        report = endpoint_exclusion_check(mesh, K, h, limit.u_min, side)
        return SolveResult(
            u_min=trace.u, rho_min=rho, u_solution=trace.u.copy(),
            energy=breakdown, iterations=trace.iterations, converged=False,
            gradient_norm=trace.gradient_norm, energy_history=trace.energies,
            collapse_side=side, endpoint_report=report,
        )

    u_sol = normalize_solution(mesh, K, h, trace.u, rho)
    return SolveResult(
        u_min=trace.u, rho_min=rho, u_solution=u_sol, energy=breakdown,
        iterations=trace.iterations, converged=trace.converged,
        gradient_norm=trace.gradient_norm, energy_history=trace.energies,
    )


def _outer_scan_init(mesh, K, h, config, init) -> np.ndarray:
    """Scan a rho grid with frozen-rho solves and return the best minimizer."""
    scan_cfg = SolveConfig(
        group=config.group, max_iterations=max(50, config.max_iterations // 10),
        gradient_tolerance=max(1e-6, config.gradient_tolerance),
        line_search=config.line_search, lbfgs_memory=config.lbfgs_memory,
    )
    grid = TWO_PI * np.linspace(0.1, 0.9, config.rho_scan_points)
    best_u, best_val = init, math.inf
    u = init
    for rho in grid:
        res = minimize_fixed_rho(mesh, K, h, float(rho), u, scan_cfg)
        u = res.u_min
        val = energy_at_optimal_rho(mesh, K, h, u)[0].total
        if val < best_val:
            best_u, best_val = u, val
    return best_u


def solve_limit_0(mesh: DiskMesh, h: np.ndarray, config: SolveConfig,
                  init: Optional[np.ndarray] = None) -> SolveResult:
    """Minimize the rho = 0 limiting energy (prescribes boundary curvature h,
    zero interior curvature); h must be positive somewhere."""
    h = _check_trace(mesh, h, "h")
    _validate_inputs(mesh, config.group, None, h)
    if float(np.max(h)) <= 0.0:
        raise InfeasibleProblemError(
            "h is nowhere positive on the circle; the admissible set is empty"
        )
    if init is None:
        init = _boundary_feasible_init(mesh, h, config.group)

    def eval_fn(u):
        return breakdown_limit0(mesh, h, u).total

    def grad_fn(u):
        return grad_u(mesh, None, h, u, 0.0)

    trace = _minimize(mesh, config.group, eval_fn, grad_fn, init, config)
    # constant shift fixing  int h e^{u/2} = 2*pi
    c = 2.0 * (math.log(TWO_PI) - log_boundary_integral(mesh, h, trace.u))
    return SolveResult(
        u_min=trace.u, rho_min=0.0, u_solution=trace.u + c,
        energy=breakdown_limit0(mesh, h, trace.u),
        iterations=trace.iterations, converged=trace.converged,
        gradient_norm=trace.gradient_norm, energy_history=trace.energies,
    )


def solve_limit_2pi(mesh: DiskMesh, K: np.ndarray, config: SolveConfig,
                    init: Optional[np.ndarray] = None) -> SolveResult:
    """Minimize the rho = 2*pi limiting energy (prescribes interior curvature
    K, geodesic boundary); K must be positive somewhere."""
    K = _check_field(mesh, K, "K")
    _validate_inputs(mesh, config.group, K, None)
    interior = ~mesh.is_boundary_node()
    if float(np.max(K[interior])) <= 0.0:
        raise InfeasibleProblemError(
            "K is nowhere positive in the open disk; the admissible set is empty"
        )
    if init is None:
        init = _area_feasible_init(mesh, K, config.group)

    def eval_fn(u):
        return breakdown_limit2pi(mesh, K, u).total

    def grad_fn(u):
        return grad_u(mesh, K, None, u, TWO_PI)

    trace = _minimize(mesh, config.group, eval_fn, grad_fn, init, config)
    # constant shift fixing  int K e^u = 2*pi
    c = math.log(TWO_PI) - log_area_integral(mesh, K, trace.u)
    return SolveResult(
        u_min=trace.u, rho_min=TWO_PI, u_solution=trace.u + c,
        energy=breakdown_limit2pi(mesh, K, trace.u),
        iterations=trace.iterations, converged=trace.converged,
        gradient_norm=trace.gradient_norm, energy_history=trace.energies,
    )


def _boundary_feasible_init(mesh, h, group) -> np.ndarray:
    phi = np.zeros(mesh.n_nodes)
    if _boundary_total(mesh, h, phi) > 0.0:
        return phi
    j1 = int(np.argmax(h))
    b1 = mesh.boundary_nodes[j1]
    orbit = mesh.nodes[group.perms[:, b1]]
    d1 = np.min(np.linalg.norm(mesh.nodes[:, None, :] - orbit[None], axis=2), axis=1)
    h_full = np.zeros(mesh.n_nodes)
    h_full[mesh.boundary_nodes] = h
    mask = (d1 <= 0.25) & ~(mesh.is_boundary_node() & (h_full <= 0.0))
    b = 1.0
    for _ in range(200):
        phi = np.where(mask, b, 0.0)
        phi = symmetrize(phi, group)
        if _boundary_total(mesh, h, phi) > 0.0:
            return phi
        b *= 2.0
    raise InfeasibleProblemError("could not make the boundary integral positive")


def _area_feasible_init(mesh, K, group) -> np.ndarray:
    phi = np.zeros(mesh.n_nodes)
    if _area_total(mesh, K, phi) > 0.0:
        return phi
    interior = ~mesh.is_boundary_node()
    i0 = int(np.argmax(np.where(interior, K, -np.inf)))
    orbit = mesh.nodes[group.perms[:, i0]]
    r_int = min(0.25, 0.5 * (1.0 - float(np.hypot(*mesh.nodes[i0]))))
    d0 = np.min(np.linalg.norm(mesh.nodes[:, None, :] - orbit[None], axis=2), axis=1)
    mask = (d0 <= r_int) & (K > 0.0) & interior
    a = 1.0
    for _ in range(200):
        phi = np.where(mask, a, 0.0)
        phi = symmetrize(phi, group)
        if _area_total(mesh, K, phi) > 0.0:
            return phi
        a *= 2.0
    raise InfeasibleProblemError("could not make the interior integral positive")


# ---------------------------------------------------------- normalization ---


def _normalize(mesh, K, u_min, rho) -> np.ndarray:
    return u_min + (math.log(rho) - log_area_integral(mesh, K, u_min))


def normalize_solution(mesh: DiskMesh, K: np.ndarray, h: np.ndarray,
                       u_min: np.ndarray, rho: float,
                       tol: float = 1e-6) -> np.ndarray:
    """Shift the minimizer by the constant turning it into a solution field.

    The two candidate constants, log(rho) - log int K e^u and
    2 (log(2pi - rho) - log int h e^{u/2}), agree exactly when the
    mass-balance constraint holds; a disagreement above ``tol`` means the
    pair (u, rho) is not a consistent minimizer.
    """
    if not 0.0 < rho < TWO_PI:
        raise ConfigurationError("normalization requires rho strictly in (0, 2*pi)")
    lk = log_area_integral(mesh, K, u_min)
    lh = log_boundary_integral(mesh, h, u_min)
    c1 = math.log(rho) - lk
    c2 = 2.0 * (math.log(TWO_PI - rho) - lh)
    if abs(c1 - c2) > tol:
        raise InconsistentMinimizerError(
            f"normalization constants disagree: {c1:.10f} vs {c2:.10f}; "
            "the mass-balance constraint is violated"
        )
    u_sol = u_min + c1
    # both identities are implied by the constant choice; verify anyway
    mass_K = math.exp(log_area_integral(mesh, K, u_sol))
    mass_h = math.exp(log_boundary_integral(mesh, h, u_sol))
    if abs(mass_K - rho) > 10 * tol * max(1.0, rho) or \
            abs(mass_h - (TWO_PI - rho)) > 10 * tol * max(1.0, TWO_PI - rho):
        raise InconsistentMinimizerError(
            f"normalized masses ({mass_K:.8f}, {mass_h:.8f}) do not match "
            f"(rho, 2pi-rho) = ({rho:.8f}, {TWO_PI - rho:.8f})"
        )
    return u_sol


# ----------------------------------------------------- endpoint exclusion ---


def endpoint_exclusion_check(mesh: DiskMesh, K: np.ndarray, h: np.ndarray,
                             u0: np.ndarray, side: float,
                             n_points: int = 13) -> EndpointReport:
    """Evaluate I(u0, rho) - I(u0, side) on a geometric grid toward ``side``.

    ``u0`` should minimize the corresponding limiting energy.  A negative
    difference shows the endpoint cannot carry the joint minimum; near the
    endpoint the difference is dominated by 2 rho log rho (side 0) or by
    4 (2pi-rho) log(2pi-rho) (side 2pi).
    """
    if side not in (0.0, TWO_PI):
        raise ConfigurationError("side must be 0 or 2*pi")
    try:
        log_area_integral(mesh, K, u0)
        log_boundary_integral(mesh, h, u0)
    except OutsideAdmissibleSetError as exc:
        return EndpointReport(
            side=side, rho_values=np.array([]), differences=np.array([]),
            dominant_terms=np.array([]), excluded=False,
            ratio_at_innermost=math.nan, hypothesis_ok=False,
            message=(
                "the limiting minimizer leaves the admissible set "
                f"({exc}); the general existence hypothesis fails"
            ),
        )
    offsets = np.geomspace(1e-4, 1.0, n_points)
    base = energy(mesh, K, h, u0, side).total
    if side == 0.0:
        rhos = offsets
        dominant = 2.0 * rhos * np.log(rhos)
    else:
        rhos = TWO_PI - offsets
        dominant = 4.0 * offsets * np.log(offsets)
    diffs = np.array([energy(mesh, K, h, u0, float(r)).total - base for r in rhos])
    ratio = float(diffs[0] / dominant[0])
    return EndpointReport(
        side=side, rho_values=rhos, differences=diffs, dominant_terms=dominant,
        excluded=bool(diffs[0] < 0.0), ratio_at_innermost=ratio,
    )
