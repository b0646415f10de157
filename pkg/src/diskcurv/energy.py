"""The joint curvature energy, its limiting forms, and exact gradients.

For a conformal exponent u on the disk, interior curvature K, boundary
curvature h and mass parameter rho in [0, 2*pi], the energy is

    I(u, rho) = 1/2 int |grad u|^2
                - 2 rho log( int_disk K e^u )
                + 2 int_circle u
                - 4 (2pi - rho) log( int_circle h e^{u/2} )
                + f(rho)

with the correction term f(rho) = 4(2pi-rho)log(2pi-rho) + 2 rho
+ 2 rho log rho, extended continuously to the endpoints.  Everything here is
the *discrete* functional on the mesh quadrature; the gradients below are its
exact derivatives, so finite-difference checks hold to near machine accuracy.

Both log-integrals are evaluated with max-subtraction so no exponential is
ever taken at a positive exponent.  A nonpositive integral raises
:class:`~diskcurv.errors.OutsideAdmissibleSetError`, which optimizers treat
as a backtracking signal rather than clamping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EndpointRhoError, OutsideAdmissibleSetError
from .mesh import DiskMesh, _check_field, _check_trace

TWO_PI = 2.0 * math.pi

__all__ = [
    "EnergyBreakdown",
    "f_correction",
    "log_area_integral",
    "log_boundary_integral",
    "energy",
    "energy_limit0",
    "energy_limit2pi",
    "grad_u",
    "grad_rho",
    "grad_limit0",
    "grad_limit2pi",
    "optimal_rho",
    "rho_stationary",
]


@dataclass(frozen=True)
class EnergyBreakdown:
    """The five summands of the joint energy plus their total."""

    dirichlet: float
    area_log: float
    boundary_linear: float
    boundary_log: float
    f_rho: float
    total: float

    def to_dict(self) -> dict:
        return {
            "dirichlet": self.dirichlet,
            "area_log": self.area_log,
            "boundary_linear": self.boundary_linear,
            "boundary_log": self.boundary_log,
            "f_rho": self.f_rho,
            "total": self.total,
        }


def _check_rho(rho: float, open_interval: bool = False) -> float:
    rho = float(rho)
    if open_interval:
        if not 0.0 < rho < TWO_PI:
            raise EndpointRhoError(
                f"rho={rho!r} not strictly inside (0, 2*pi); "
                "the rho-derivative is infinite at the endpoints"
            )
    elif not 0.0 <= rho <= TWO_PI:
        raise ValueError(f"rho={rho!r} outside [0, 2*pi]")
    return rho


def f_correction(rho: float) -> float:
    """Correction term f(rho); endpoint values are the continuous limits.

    f(0) = 8*pi*log(2*pi) and f(2*pi) = 4*pi + 4*pi*log(2*pi) are hard-coded
    so 0*log(0) is never evaluated.
    """
    rho = _check_rho(rho)
    if rho == 0.0:
        return 8.0 * math.pi * math.log(TWO_PI)
    if rho == TWO_PI:
        return 4.0 * math.pi + 4.0 * math.pi * math.log(TWO_PI)
    sigma = TWO_PI - rho
    return 4.0 * sigma * math.log(sigma) + 2.0 * rho + 2.0 * rho * math.log(rho)


def _area_exp(mesh: DiskMesh, K: np.ndarray, u: np.ndarray):
    """(terms, total, offset) for int K e^u; integral = exp(offset)*total."""
    return kernels.exp_weighted(mesh.interior_weights, K, u, 1.0)


def _boundary_exp(mesh: DiskMesh, h: np.ndarray, u: np.ndarray):
    """(terms, total, offset) for int h e^{u/2} over the boundary nodes."""
    ub = np.ascontiguousarray(u[mesh.boundary_nodes])
    return kernels.exp_weighted(mesh.boundary_weights, h, ub, 0.5)


def log_area_integral(mesh: DiskMesh, K: np.ndarray, u: np.ndarray) -> float:
    """log of int_disk K e^u, stable under concentration of u."""
    K = _check_field(mesh, K, "K")
    u = _check_field(mesh, u, "u")
    _, total, offset = _area_exp(mesh, K, u)
    if total <= 0.0:
        raise OutsideAdmissibleSetError("area", total * math.exp(min(offset, 0.0)))
    return offset + math.log(total)


def log_boundary_integral(mesh: DiskMesh, h: np.ndarray, u: np.ndarray) -> float:
    """log of int_circle h e^{u/2}, stable under concentration of u."""
    h = _check_trace(mesh, h, "h")
    u = _check_field(mesh, u, "u")
    _, total, offset = _boundary_exp(mesh, h, u)
    if total <= 0.0:
        raise OutsideAdmissibleSetError("boundary", total * math.exp(min(offset, 0.0)))
    return offset + math.log(total)


def _compose(dirichlet, area_log, boundary_linear, boundary_log, f_rho):
    total = dirichlet + area_log + boundary_linear + boundary_log + f_rho
    return EnergyBreakdown(dirichlet, area_log, boundary_linear,
                           boundary_log, f_rho, total)


def _boundary_linear(mesh: DiskMesh, u: np.ndarray) -> float:
    return 2.0 * mesh.boundary_weight * float(np.sum(u[mesh.boundary_nodes]))


def energy(mesh: DiskMesh, K: np.ndarray, h: np.ndarray, u: np.ndarray,
           rho: float) -> EnergyBreakdown:
    """Joint energy I(u, rho) on the closed interval 0 <= rho <= 2*pi.

    At rho = 0 the interior term carries coefficient zero, so only the
    boundary integral must be positive (and symmetrically at rho = 2*pi);
    with the correction-term limits the breakdown then reduces exactly to
    the limiting energies.
    """
    rho = _check_rho(rho)
    u = _check_field(mesh, u, "u")
    dirichlet = 0.5 * mesh.stiffness.quadratic_form(u)
    blin = _boundary_linear(mesh, u)
    area_log = 0.0 if rho == 0.0 else -2.0 * rho * log_area_integral(mesh, K, u)
    if rho == TWO_PI:
        blog = 0.0
    else:
        blog = -4.0 * (TWO_PI - rho) * log_boundary_integral(mesh, h, u)
    return _compose(dirichlet, area_log, blin, blog, f_correction(rho))


def breakdown_limit0(mesh: DiskMesh, h: np.ndarray, u: np.ndarray) -> EnergyBreakdown:
    """Breakdown of the rho = 0 limiting energy (flat interior)."""
    u = _check_field(mesh, u, "u")
    dirichlet = 0.5 * mesh.stiffness.quadratic_form(u)
    blin = _boundary_linear(mesh, u)
    blog = -8.0 * math.pi * log_boundary_integral(mesh, h, u)
    return _compose(dirichlet, 0.0, blin, blog, f_correction(0.0))


def breakdown_limit2pi(mesh: DiskMesh, K: np.ndarray, u: np.ndarray) -> EnergyBreakdown:
    """Breakdown of the rho = 2*pi limiting energy (geodesic boundary)."""
    u = _check_field(mesh, u, "u")
    dirichlet = 0.5 * mesh.stiffness.quadratic_form(u)
    blin = _boundary_linear(mesh, u)
    alog = -4.0 * math.pi * log_area_integral(mesh, K, u)
    return _compose(dirichlet, alog, blin, 0.0, f_correction(TWO_PI))


def energy_limit0(mesh: DiskMesh, h: np.ndarray, u: np.ndarray) -> float:
    """Limiting energy at rho = 0 (flat interior, prescribed boundary)."""
    return breakdown_limit0(mesh, h, u).total


def energy_limit2pi(mesh: DiskMesh, K: np.ndarray, u: np.ndarray) -> float:
    """Limiting energy at rho = 2*pi (prescribed interior, geodesic boundary)."""
    return breakdown_limit2pi(mesh, K, u).total


def grad_u(mesh: DiskMesh, K: np.ndarray, h: np.ndarray, u: np.ndarray,
           rho: float) -> np.ndarray:
    """Exact nodal gradient of the discrete energy in u.

    Pairing with the constant field gives zero (discrete shift invariance),
    because the boundary weights sum to 2*pi exactly.
    """
    rho = _check_rho(rho)
    u = _check_field(mesh, u, "u")
    g = mesh.stiffness.matvec(u)
    g += 2.0 * mesh.boundary_weight_vector()
    if rho != 0.0:
        K = _check_field(mesh, K, "K")
        terms, total, offset = _area_exp(mesh, K, u)
        if total <= 0.0:
            raise OutsideAdmissibleSetError("area", total * math.exp(min(offset, 0.0)))
        g -= (2.0 * rho / total) * terms
    if rho != TWO_PI:
        h = _check_trace(mesh, h, "h")
        terms, total, offset = _boundary_exp(mesh, h, u)
        if total <= 0.0:
            raise OutsideAdmissibleSetError("boundary",
                                            total * math.exp(min(offset, 0.0)))
        g[mesh.boundary_nodes] -= (2.0 * (TWO_PI - rho) / total) * terms
    return g


def grad_limit0(mesh: DiskMesh, h: np.ndarray, u: np.ndarray) -> np.ndarray:
    return grad_u(mesh, None, h, u, 0.0)


def grad_limit2pi(mesh: DiskMesh, K: np.ndarray, u: np.ndarray) -> np.ndarray:
    return grad_u(mesh, K, None, u, TWO_PI)


def grad_rho(mesh: DiskMesh, K: np.ndarray, h: np.ndarray, u: np.ndarray,
             rho: float) -> float:
    """d/d rho of the energy; its root is the mass-balance constraint

        (2*pi - rho)^2 / rho = (int h e^{u/2})^2 / int K e^u .
    """
    rho = _check_rho(rho, open_interval=True)
    lk = log_area_integral(mesh, K, u)
    lh = log_boundary_integral(mesh, h, u)
    return -2.0 * lk + 4.0 * lh - 4.0 * math.log(TWO_PI - rho) + 2.0 * math.log(rho)


def optimal_rho(log_area: float, log_boundary: float) -> tuple[float, float]:
    """Unique interior root of the rho-derivative, as (rho, 2*pi - rho).

    The rho-section of the energy is strictly convex with infinite slopes at
    the endpoints, so for any admissible u the optimal mass parameter exists,
    is unique, and solves rho/(2pi-rho)^2 = q with q = exp(L_K - 2 L_h).
    Both returned values are computed cancellation-free.
    """
    logq = log_area - 2.0 * log_boundary
    if logq > 120.0:
        sigma = math.sqrt(TWO_PI) * math.exp(-0.5 * logq)
        return TWO_PI - sigma, sigma
    if logq < -120.0:
        rho = 4.0 * math.pi**2 * math.exp(logq)
        return rho, TWO_PI - rho
    q = math.exp(logq)
    root = math.sqrt(8.0 * math.pi * q + 1.0)
    denom = 4.0 * math.pi * q + 1.0 + root
    rho = 8.0 * math.pi**2 * q / denom
    sigma = TWO_PI * (1.0 + root) / denom
    return rho, sigma


def rho_stationary(mesh: DiskMesh, K: np.ndarray, h: np.ndarray,
                   u: np.ndarray) -> float:
    """Optimal rho for a fixed admissible u."""
    lk = log_area_integral(mesh, K, u)
    lh = log_boundary_integral(mesh, h, u)
    return optimal_rho(lk, lh)[0]


def energy_at_optimal_rho(mesh: DiskMesh, K: np.ndarray, h: np.ndarray,
                          u: np.ndarray):
    """(breakdown, rho) of I(u, .) minimized exactly over the mass parameter.

    This is the merit function of the joint minimization: eliminating rho is
    exact because the rho-section is strictly convex with a unique interior
    root of its derivative.
    """
    u = _check_field(mesh, u, "u")
    lk = log_area_integral(mesh, K, u)
    lh = log_boundary_integral(mesh, h, u)
    rho, sigma = optimal_rho(lk, lh)
    dirichlet = 0.5 * mesh.stiffness.quadratic_form(u)
    blin = _boundary_linear(mesh, u)
    f_rho = 4.0 * sigma * math.log(sigma) + 2.0 * rho + 2.0 * rho * math.log(rho)
    bd = _compose(dirichlet, -2.0 * rho * lk, blin, -4.0 * sigma * lh, f_rho)
    return bd, rho
