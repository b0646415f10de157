"""Discrete unit disk: polar triangulation, quadrature, stiffness operator.

The mesh is polar-structured: one node at the origin, ``n_radial`` concentric
rings of ``n_angular`` uniformly spaced nodes, and one extra node at the
center of every quad cell between consecutive rings.  Each quad is split into
four triangles around its cell-center node, so every rotation by a divisor
angle of the circle *and* every reflection through a compatible axis permutes
the node set exactly and maps triangles onto triangles.  That makes symmetry
an exact discrete invariant instead of an interpolation.

Quadrature is the vertex rule on triangles (each triangle spreads area/3 onto
its corners) and the trapezoid rule in arc length on boundary edges.  Both
are exact for integrands that are affine per element, and the boundary
weights sum to 2*pi exactly, which is what makes the discrete energy exactly
invariant under adding constants to the field.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .errors import ConfigurationError, InvalidFieldError, LinearSolveError

__all__ = [
    "DiskMesh",
    "StiffnessOperator",
    "build_mesh",
    "area_integral",
    "boundary_integral",
    "dirichlet_energy",
    "solve_auxiliary_neumann",
    "export_mesh",
]


class StiffnessOperator:
    """Sparse SPSD operator for the bilinear form  (u, v) -> int <grad u, grad v>.

    Kernel is exactly the constant field: the assembled row sums vanish
    analytically, so the quadratic form is zero iff the field is constant.
    """

    def __init__(self, matrix: sp.csr_matrix):
        self.matrix = matrix
        self._data = matrix.data
        self._indices = matrix.indices
        self._indptr = matrix.indptr

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return kernels.csr_matvec(self._data, self._indices, self._indptr, x)

    def quadratic_form(self, x: np.ndarray) -> float:
        return kernels.csr_quadform(self._data, self._indices, self._indptr, x)


@dataclass(frozen=True, eq=False)
class DiskMesh:
    """Triangulated unit disk with quadrature and boundary structure.

    ``ring_nodes[i, j]`` is the node on ring ``i+1`` (radius ``(i+1)/n_radial``)
    at angle ``2*pi*j/n_angular``; ``cell_nodes[i, j]`` is the cell-center node
    between rings ``i+1`` and ``i+2`` at the half-offset angle.  Node 0 is the
    origin.  ``boundary_nodes`` lists the outer ring in cyclic angular order.
    """

    n_radial: int
    n_angular: int
    nodes: np.ndarray            # (n, 2)
    triangles: np.ndarray        # (m, 3), positively oriented
    boundary_nodes: np.ndarray   # (n_angular,)
    boundary_edges: np.ndarray   # (n_angular, 2)
    ring_nodes: np.ndarray       # (n_radial, n_angular)
    cell_nodes: np.ndarray       # (n_radial - 1, n_angular)
    interior_weights: np.ndarray  # (n,) lumped area weights
    boundary_weight: float        # arc length per boundary node, 2*pi/n_angular
    triangle_areas: np.ndarray    # (m,)
    stiffness: StiffnessOperator = field(repr=False)
    _h1_solver: object = field(repr=False, default=None, compare=False)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def area(self) -> float:
        return float(self.interior_weights.sum())

    @property
    def boundary_length(self) -> float:
        return self.boundary_weight * self.n_angular

    @property
    def boundary_weights(self) -> np.ndarray:
        return np.full(self.n_angular, self.boundary_weight)

    def boundary_weight_vector(self) -> np.ndarray:
        """Boundary weights scattered into a full nodal vector."""
        c = np.zeros(self.n_nodes)
        c[self.boundary_nodes] = self.boundary_weight
        return c

    def node_angles(self) -> np.ndarray:
        return np.arctan2(self.nodes[:, 1], self.nodes[:, 0])

    def node_radii(self) -> np.ndarray:
        return np.hypot(self.nodes[:, 0], self.nodes[:, 1])

    def boundary_angles(self) -> np.ndarray:
        b = self.nodes[self.boundary_nodes]
        return np.arctan2(b[:, 1], b[:, 0])

    def is_boundary_node(self) -> np.ndarray:
        mask = np.zeros(self.n_nodes, dtype=bool)
        mask[self.boundary_nodes] = True
        return mask

    def h1_solve(self, rhs: np.ndarray) -> np.ndarray:
        """Apply (stiffness + lumped mass)^{-1}; the discrete H^1 Riesz map."""
        return self._h1_solver.solve(rhs)

    def h1_dual_norm(self, residual: np.ndarray) -> float:
        """Dual norm sqrt(r . (S+M)^{-1} r); mesh-size comparable."""
        val = float(np.dot(residual, self.h1_solve(residual)))
        return float(np.sqrt(max(val, 0.0)))


def build_mesh(n_radial: int, n_angular: int, group_order: int = 1,
               dihedral: bool = False) -> DiskMesh:
    """Build the polar-structured triangulation of the closed unit disk.

    ``n_angular`` must be divisible by ``group_order`` (and by
    ``2 * group_order`` when a dihedral action is intended) so that the group
    permutes nodes exactly.
    """
    if n_radial < 2:
        raise ConfigurationError(f"n_radial must be >= 2, got {n_radial}")
    if n_angular < 8:
        raise ConfigurationError(f"n_angular must be >= 8, got {n_angular}")
    if group_order < 1:
        raise ConfigurationError(f"group_order must be >= 1, got {group_order}")
    if n_angular % group_order != 0:
        raise ConfigurationError(
            f"n_angular={n_angular} is not divisible by group order {group_order}"
        )
    if dihedral and n_angular % (2 * group_order) != 0:
        raise ConfigurationError(
            f"n_angular={n_angular} is not divisible by 2*k={2 * group_order} "
            "required for a dihedral action"
        )

    nr, na = n_radial, n_angular
    n_ring = nr * na
    n_cell = (nr - 1) * na
    n_nodes = 1 + n_ring + n_cell

    nodes = np.zeros((n_nodes, 2))
    ring_nodes = 1 + np.arange(n_ring).reshape(nr, na)
    cell_nodes = 1 + n_ring + np.arange(n_cell).reshape(nr - 1, na)

    theta = 2.0 * np.pi * np.arange(na) / na
    for i in range(nr):
        r = (i + 1) / nr
        nodes[ring_nodes[i], 0] = r * np.cos(theta)
        nodes[ring_nodes[i], 1] = r * np.sin(theta)
    theta_half = 2.0 * np.pi * (np.arange(na) + 0.5) / na
    for i in range(nr - 1):
        r = (i + 1.5) / nr
        nodes[cell_nodes[i], 0] = r * np.cos(theta_half)
        nodes[cell_nodes[i], 1] = r * np.sin(theta_half)

    jp = (np.arange(na) + 1) % na
    tris = []
    # central fan
    fan = np.column_stack([np.zeros(na, dtype=np.int64),
                           ring_nodes[0], ring_nodes[0][jp]])
    tris.append(fan)
    # four triangles per quad cell, around the cell-center node
    for i in range(nr - 1):
        a, b = ring_nodes[i], ring_nodes[i][jp]
        aa, bb = ring_nodes[i + 1], ring_nodes[i + 1][jp]
        m = cell_nodes[i]
        tris.append(np.column_stack([a, aa, m]))
        tris.append(np.column_stack([aa, bb, m]))
        tris.append(np.column_stack([bb, b, m]))
        tris.append(np.column_stack([b, a, m]))
    triangles = np.vstack(tris).astype(np.int64)

    p = nodes[triangles]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    areas = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    if np.any(areas <= 0.0):
        raise ConfigurationError("degenerate or misoriented triangle produced")

    interior_weights = np.zeros(n_nodes)
    np.add.at(interior_weights, triangles.ravel(),
              np.repeat(areas / 3.0, 3))

    boundary_nodes = ring_nodes[nr - 1].copy()
    boundary_edges = np.column_stack([boundary_nodes, boundary_nodes[jp]])
    boundary_weight = 2.0 * np.pi / na

    stiffness = StiffnessOperator(_assemble_stiffness(nodes, triangles, areas))

    lumped_mass = sp.diags(interior_weights, format="csr")
    h1 = (stiffness.matrix + lumped_mass).tocsc()
    h1_solver = spla.splu(h1)

    return DiskMesh(
        n_radial=nr,
        n_angular=na,
        nodes=nodes,
        triangles=triangles,
        boundary_nodes=boundary_nodes,
        boundary_edges=boundary_edges,
        ring_nodes=ring_nodes,
        cell_nodes=cell_nodes,
        interior_weights=interior_weights,
        boundary_weight=boundary_weight,
        triangle_areas=areas,
        stiffness=stiffness,
        _h1_solver=h1_solver,
    )


def _assemble_stiffness(nodes, triangles, areas) -> sp.csr_matrix:
    """P1 stiffness matrix: K_ij = sum_T area_T <grad phi_i, grad phi_j>."""
    p = nodes[triangles]                      # (m, 3, 2)
    # grad of barycentric i is perp(p_{i+2} - p_{i+1}) / (2 area)
    g = np.empty_like(p)
    for i in range(3):
        e = p[:, (i + 2) % 3] - p[:, (i + 1) % 3]
        g[:, i, 0] = -e[:, 1]
        g[:, i, 1] = e[:, 0]
    g /= (2.0 * areas)[:, None, None]

    local = np.einsum("tid,tjd->tij", g, g) * areas[:, None, None]
    rows = np.repeat(triangles, 3, axis=1).ravel()
    cols = np.tile(triangles, (1, 3)).ravel()
    n = nodes.shape[0]
    mat = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n))
    return mat.tocsr()


def _check_field(mesh: DiskMesh, values: np.ndarray, name: str = "field") -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (mesh.n_nodes,):
        raise InvalidFieldError(
            f"{name} has shape {values.shape}, expected ({mesh.n_nodes},)"
        )
    if not np.all(np.isfinite(values)):
        raise InvalidFieldError(f"{name} contains NaN or Inf")
    return values


def _check_trace(mesh: DiskMesh, values: np.ndarray, name: str = "trace") -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (mesh.n_angular,):
        raise InvalidFieldError(
            f"{name} has shape {values.shape}, expected ({mesh.n_angular},)"
        )
    if not np.all(np.isfinite(values)):
        raise InvalidFieldError(f"{name} contains NaN or Inf")
    return values


def area_integral(mesh: DiskMesh, values: np.ndarray) -> float:
    """Quadrature value of the disk integral of a nodal field."""
    values = _check_field(mesh, values)
    return float(np.dot(mesh.interior_weights, values))


def boundary_integral(mesh: DiskMesh, trace: np.ndarray) -> float:
    """Quadrature value of the circle integral of a boundary trace."""
    trace = _check_trace(mesh, trace)
    return mesh.boundary_weight * float(np.sum(trace))


def dirichlet_energy(mesh: DiskMesh, values: np.ndarray) -> float:
    """int |grad u|^2 over the disk; zero iff the field is constant."""
    values = _check_field(mesh, values)
    return mesh.stiffness.quadratic_form(values)


def solve_auxiliary_neumann(mesh: DiskMesh) -> np.ndarray:
    """Solve -lap w = -4*pi/|disk|, dw/dn = 4*pi/|circle|, zero disk mean.

    The data are discretely compatible by construction (the interior load
    uses the mesh area), so the singular system is solved with a zero-mean
    Lagrange multiplier.  The continuum solution is x^2 + y^2 - 1/2.
    """
    w = mesh.interior_weights
    rhs_field = -(4.0 * np.pi / mesh.area) * w + 2.0 * mesh.boundary_weight_vector()
    n = mesh.n_nodes
    aug = sp.bmat(
        [[mesh.stiffness.matrix, w[:, None]], [w[None, :], None]], format="csc"
    )
    rhs = np.concatenate([rhs_field, [0.0]])
    try:
        sol = spla.splu(aug).solve(rhs)
    except Exception as exc:  # pragma: no cover - singular only if mesh broken
        raise LinearSolveError(f"auxiliary Neumann solve failed: {exc}") from exc
    u = sol[:n]
    u -= np.dot(w, u) / mesh.area
    return u


def export_mesh(mesh: DiskMesh, node_path, triangle_path) -> None:
    """Write node and triangle CSV files.

    Headers: ``node_id,x,y,is_boundary`` and ``t_id,n0,n1,n2``.
    """
    is_b = mesh.is_boundary_node()
    with open(node_path, "w") as f:
        f.write("node_id,x,y,is_boundary\n")
        for i, (x, y) in enumerate(mesh.nodes):
            f.write(f"{i},{float(x)!r},{float(y)!r},{int(is_b[i])}\n")
    with open(triangle_path, "w") as f:
        f.write("t_id,n0,n1,n2\n")
        for t, (a, b, c) in enumerate(mesh.triangles):
            f.write(f"{t},{a},{b},{c}\n")
