"""Moser-Trudinger, Lebedev-Milin, and localized inequality deficits.

Each evaluator returns a :class:`DeficitReport` with deficit = right - left
for an inequality  left <= right.  Constants that the underlying estimates
only assert to exist are never asserted here: ``constant_used`` records the
value added to the right side (default 0), and test families check
boundedness and stabilization of deficits rather than specific constants.

The Lebedev-Milin inequality on the disk,

    log( mean_circle e^u ) <= (1/4pi) int_disk |grad u|^2 + mean_circle u ,

is sharp with constant zero; equality holds exactly on the boundary profiles
``-2 log|1 - conj(a) z|`` of disk automorphisms (see
:func:`lebedev_milin_extremal`), which is the non-compact family that ruins
coercivity without a symmetry constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DiskcurvError, InvalidFieldError
from .mesh import DiskMesh, _check_field, dirichlet_energy

TWO_PI = 2.0 * math.pi

__all__ = [
    "DeficitReport",
    "mobius_field",
    "lebedev_milin_extremal",
    "interior_bubble",
    "lebedev_milin_deficit",
    "mt_interior_deficit",
    "local_deficit",
    "two_arc_deficit",
    "write_deficit_csv",
]


@dataclass(frozen=True)
class DeficitReport:
    family: str
    param: float
    left: float
    right: float
    constant_used: float = 0.0

    @property
    def deficit(self) -> float:
        return self.right - self.left

    def row(self) -> str:
        return (f"{self.family},{self.param!r},{self.left!r},{self.right!r},"
                f"{self.deficit!r},{self.constant_used!r}")


def write_deficit_csv(path, reports) -> None:
    with open(path, "w") as f:
        f.write("family,param,left,right,deficit,constant_used\n")
        for rep in reports:
            f.write(rep.row() + "\n")


# ------------------------------------------------------- test families ---


def mobius_field(mesh: DiskMesh, a) -> np.ndarray:
    """Conformal factor 2 log|phi_a'| of the disk automorphism
    phi_a(z) = (z - a)/(1 - conj(a) z); preserves disk area and arc length.
    """
    a = complex(a[0], a[1]) if not isinstance(a, complex) else a
    if abs(a) >= 1.0:
        raise DiskcurvError(f"automorphism center must satisfy |a| < 1, got {abs(a)}")
    z = mesh.nodes[:, 0] + 1j * mesh.nodes[:, 1]
    # |phi'(z)| = (1 - |a|^2) / |1 - conj(a) z|^2
    return 2.0 * (math.log1p(-abs(a) ** 2) - 2.0 * np.log(np.abs(1.0 - np.conj(a) * z)))


def lebedev_milin_extremal(mesh: DiskMesh, a) -> np.ndarray:
    """Boundary-concentration profile -2 log|1 - conj(a) z|.

    This is half the Mobius conformal factor up to an additive constant; its
    Lebedev-Milin deficit is exactly zero for every |a| < 1.
    """
    a = complex(a[0], a[1]) if not isinstance(a, complex) else a
    if abs(a) >= 1.0:
        raise DiskcurvError(f"automorphism center must satisfy |a| < 1, got {abs(a)}")
    z = mesh.nodes[:, 0] + 1j * mesh.nodes[:, 1]
    return -2.0 * np.log(np.abs(1.0 - np.conj(a) * z))


def interior_bubble(mesh: DiskMesh, lam: float, center=(0.0, 0.0)) -> np.ndarray:
    """Standard interior concentration profile 2 log(2*lam/(1 + lam^2 |x-c|^2)).

    For lam <= n_radial/2 the profile is sampled exactly; beyond that the
    core is narrower than two mesh cells, so values are capped at the peak of
    the finest resolvable profile (a plateau truncation), which keeps the
    quadrature of e^u meaningful for arbitrarily large lam.
    """
    if lam < 1.0:
        raise DiskcurvError(f"concentration parameter must be >= 1, got {lam}")
    cx, cy = center
    if math.hypot(cx, cy) >= 1.0:
        raise DiskcurvError("bubble center must be strictly interior")
    d2 = (mesh.nodes[:, 0] - cx) ** 2 + (mesh.nodes[:, 1] - cy) ** 2
    u = 2.0 * (math.log(2.0 * lam) - np.log1p(lam**2 * d2))
    lam_cap = 0.5 * mesh.n_radial
    if lam > lam_cap:
        u = np.minimum(u, 2.0 * math.log(2.0 * lam_cap))
    return u


# ------------------------------------------------------------ deficits ---


def _boundary_log_mean_exp(mesh: DiskMesh, u: np.ndarray, scale: float = 1.0) -> float:
    ub = scale * u[mesh.boundary_nodes]
    m = float(np.max(ub))
    return m + math.log(float(np.mean(np.exp(ub - m))))


def _area_log_exp(mesh: DiskMesh, u: np.ndarray, weights=None) -> float:
    w = mesh.interior_weights if weights is None else weights
    m = float(np.max(u))
    total = float(np.dot(w, np.exp(u - m)))
    if total <= 0.0:
        raise InvalidFieldError("empty region in localized integral")
    return m + math.log(total)


def lebedev_milin_deficit(mesh: DiskMesh, u: np.ndarray,
                          constant: float = 0.0) -> DeficitReport:
    """Deficit of log(mean_circle e^u) <= (1/4pi) int |grad u|^2 + mean_circle u."""
    u = _check_field(mesh, u, "u")
    left = _boundary_log_mean_exp(mesh, u)
    mean_u = float(np.mean(u[mesh.boundary_nodes]))
    right = dirichlet_energy(mesh, u) / (2.0 * TWO_PI) + mean_u + constant
    return DeficitReport("lebedev-milin", math.nan, left, right, constant)


def mt_interior_deficit(mesh: DiskMesh, u: np.ndarray, variant: str,
                        constant: float = 0.0) -> DeficitReport:
    """Interior Moser-Trudinger deficits.

    variants:
      ``dirichlet``          log int e^u <= (1/16pi) E + C   (needs u = 0 on boundary)
      ``mean-form``          log int e^u <= (1/8pi) E + mean_disk u + C
      ``boundary-mean-form`` log int e^u <= (1/8pi) E + mean_circle u + C

    with E = int |grad u|^2.  The sharp constants C are not asserted.
    """
    u = _check_field(mesh, u, "u")
    if variant == "dirichlet":
        if float(np.max(np.abs(u[mesh.boundary_nodes]))) > 1e-14:
            raise InvalidFieldError(
                "dirichlet variant requires a field vanishing on the boundary"
            )
        coeff = 1.0 / (8.0 * TWO_PI)
        mean = 0.0
    elif variant == "mean-form":
        coeff = 1.0 / (4.0 * TWO_PI)
        mean = float(np.dot(mesh.interior_weights, u)) / mesh.area
    elif variant == "boundary-mean-form":
        coeff = 1.0 / (4.0 * TWO_PI)
        mean = float(np.mean(u[mesh.boundary_nodes]))
    else:
        raise ConfigurationError(f"unknown variant {variant!r}")
    left = _area_log_exp(mesh, u)
    right = coeff * dirichlet_energy(mesh, u) + mean + constant
    return DeficitReport(f"mt-{variant}", math.nan, left, right, constant)


def _region_masks(mesh: DiskMesh, region: str, delta: float,
                  center=(0.0, 0.0), radius: float = 0.3,
                  arc_center: float = 0.0, arc_halfwidth: float = 0.5):
    """Node mask of the region and triangle mask of its delta-neighborhood."""
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    centroids = mesh.nodes[mesh.triangles].mean(axis=1)
    if region == "interior-subdomain":
        if math.hypot(*center) + radius + delta >= 1.0:
            raise ConfigurationError(
                "delta-neighborhood of the interior region touches the boundary"
            )
        d_nodes = np.hypot(x - center[0], y - center[1])
        d_tris = np.hypot(centroids[:, 0] - center[0], centroids[:, 1] - center[1])
        return d_nodes <= radius, d_tris <= radius + delta
    if region == "boundary-arc":
        ang = np.arctan2(y, x)
        cang = np.arctan2(centroids[:, 1], centroids[:, 0])

        def angdist(t):
            return np.abs((t - arc_center + math.pi) % TWO_PI - math.pi)

        on_arc = (angdist(ang) <= arc_halfwidth) & (np.hypot(x, y) > 1.0 - 1e-12)
        # collar: points within distance delta of the arc
        arc_pts = np.column_stack([np.cos(arc_center + np.linspace(
            -arc_halfwidth, arc_halfwidth, 181)),
            np.sin(arc_center + np.linspace(-arc_halfwidth, arc_halfwidth, 181))])
        d_tris = np.min(
            np.linalg.norm(centroids[:, None, :] - arc_pts[None, :, :], axis=2),
            axis=1,
        )
        return on_arc, d_tris <= delta
    raise ConfigurationError(f"unknown region kind {region!r}")


def _collar_energy(mesh: DiskMesh, u: np.ndarray, tri_mask: np.ndarray) -> float:
    """int |grad u|^2 restricted to the marked triangles."""
    tris = mesh.triangles[tri_mask]
    areas = mesh.triangle_areas[tri_mask]
    p = mesh.nodes[tris]
    vals = u[tris]
    gx = np.zeros(len(tris))
    gy = np.zeros(len(tris))
    for i in range(3):
        e = p[:, (i + 2) % 3] - p[:, (i + 1) % 3]
        gx += vals[:, i] * (-e[:, 1])
        gy += vals[:, i] * e[:, 0]
    inv2a = 1.0 / (2.0 * areas)
    return float(np.sum(areas * ((gx * inv2a) ** 2 + (gy * inv2a) ** 2)))


def local_deficit(mesh: DiskMesh, u: np.ndarray, region: str,
                  delta: float = 0.2, epsilon: float = 0.1,
                  constant: float = 0.0, **region_kw) -> DeficitReport:
    """Chen-Li localized deficit over an interior subdomain or boundary arc.

    interior:  16pi log int_{R} e^u  <= int_{R^delta} |grad u|^2 + eps E + C
    boundary:   4pi log int_{arc} e^u <= int_{collar} |grad u|^2 + eps E + C

    requires zero disk mean of u; the constant is empirical and recorded.
    """
    u = _check_field(mesh, u, "u")
    mean = float(np.dot(mesh.interior_weights, u)) / mesh.area
    if abs(mean) > 1e-9:
        raise InvalidFieldError(
            f"localized deficits require zero disk mean, got {mean:.3e}"
        )
    node_mask, tri_mask = _region_masks(mesh, region, delta, **region_kw)
    total_e = dirichlet_energy(mesh, u)
    collar_e = _collar_energy(mesh, u, tri_mask)
    if region == "interior-subdomain":
        w = np.where(node_mask, mesh.interior_weights, 0.0)
        left = 16.0 * math.pi * _area_log_exp(mesh, u, weights=w)
    else:
        ub = u[mesh.boundary_nodes]
        sel = node_mask[mesh.boundary_nodes]
        if not np.any(sel):
            raise ConfigurationError("boundary arc contains no boundary nodes")
        m = float(np.max(ub[sel]))
        val = mesh.boundary_weight * float(np.sum(np.exp(ub[sel] - m)))
        left = 4.0 * math.pi * (m + math.log(val))
    right = collar_e + epsilon * total_e + constant
    return DeficitReport(f"local-{region}", delta, left, right, constant)


def two_arc_deficit(mesh: DiskMesh, u: np.ndarray, epsilon: float = 0.1,
                    arc_halfwidth: float = 0.5, gamma_min: float = 0.05,
                    constant: float = 0.0) -> DeficitReport:
    """Two antipodal arcs each holding a gamma-fraction of boundary mass.

    When both arcs carry mass fraction >= gamma the one-arc bound can be
    summed over the arcs, doubling the coefficient:

        8pi log int_circle e^u <= (1 + 2 eps) int |grad u|^2 + C .
    """
    u = _check_field(mesh, u, "u")
    ub = u[mesh.boundary_nodes]
    m = float(np.max(ub))
    mass = np.exp(ub - m)
    ang = mesh.boundary_angles()
    arc1 = np.abs((ang + math.pi) % TWO_PI - math.pi) <= arc_halfwidth
    arc2 = np.abs(np.abs((ang + math.pi) % TWO_PI - math.pi) - math.pi) <= arc_halfwidth
    total = float(np.sum(mass))
    g1, g2 = float(np.sum(mass[arc1])) / total, float(np.sum(mass[arc2])) / total
    if min(g1, g2) < gamma_min:
        raise ConfigurationError(
            f"arc mass fractions ({g1:.3f}, {g2:.3f}) below gamma={gamma_min}"
        )
    left = 8.0 * math.pi * (m + math.log(mesh.boundary_weight * total))
    right = (1.0 + 2.0 * epsilon) * dirichlet_energy(mesh, u) + constant
    return DeficitReport("two-arc-boundary", arc_halfwidth, left, right, constant)
