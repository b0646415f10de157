"""Nodal fields, boundary traces, curvature specs, and symmetry groups.

A scalar field is a plain float64 array over mesh nodes; a boundary trace is
an array over the boundary nodes in cyclic order.  Symmetry groups act by
exact node-index permutation, which requires the angular resolution to be
divisible by the rotation order (see :func:`diskcurv.mesh.build_mesh`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, InvalidFieldError
from .mesh import DiskMesh, _check_field, _check_trace

__all__ = [
    "SymmetryGroup",
    "CurvatureSpec",
    "CurvaturePair",
    "sample_curvatures",
    "symmetrize",
    "is_symmetric",
    "validate_fixed_point_free",
    "load_tabulated_disk",
    "load_tabulated_circle",
]


class SymmetryGroup:
    """Cyclic or dihedral group acting on a compatible mesh by permutation.

    ``perms[g][i]`` is the node index of ``g`` applied to node ``i``, so a
    field ``f`` composed with ``g`` is ``f[perms[g]]``.  ``boundary_perms``
    is the induced action on the cyclic boundary index.
    """

    def __init__(self, kind: str, k: int, mesh: DiskMesh,
                 perms: np.ndarray, boundary_perms: np.ndarray):
        self.kind = kind
        self.k = k
        self.mesh = mesh
        self.perms = perms
        self.boundary_perms = boundary_perms
        self._validate_isometry()

    @property
    def order(self) -> int:
        return self.perms.shape[0]

    @classmethod
    def cyclic(cls, mesh: DiskMesh, k: int) -> "SymmetryGroup":
        """Rotations by multiples of 2*pi/k."""
        if k < 2:
            raise ConfigurationError(f"cyclic group needs k >= 2, got {k}")
        if mesh.n_angular % k != 0:
            raise ConfigurationError(
                f"n_angular={mesh.n_angular} not divisible by k={k}"
            )
        shifts = (np.arange(k) * (mesh.n_angular // k))
        perms = np.stack([_rotation_perm(mesh, s) for s in shifts])
        bperms = np.stack([_roll_index(mesh.n_angular, s) for s in shifts])
        return cls("cyclic", k, mesh, perms, bperms)

    @classmethod
    def dihedral(cls, mesh: DiskMesh, k: int) -> "SymmetryGroup":
        """Rotations by 2*pi/k plus reflections through the k axes."""
        if k < 2:
            raise ConfigurationError(f"dihedral group needs k >= 2, got {k}")
        if mesh.n_angular % (2 * k) != 0:
            raise ConfigurationError(
                f"n_angular={mesh.n_angular} not divisible by 2k={2 * k} "
                "(required for the reflection action)"
            )
        step = mesh.n_angular // k
        shifts = np.arange(k) * step
        perms = [_rotation_perm(mesh, s) for s in shifts]
        bperms = [_roll_index(mesh.n_angular, s) for s in shifts]
        for m in range(k):
            perms.append(_reflection_perm(mesh, m * step))
            bperms.append(_reflect_index(mesh.n_angular, m * step))
        return cls("dihedral", k, mesh, np.stack(perms), np.stack(bperms))

    def _validate_isometry(self) -> None:
        """Each permutation must preserve triangle adjacency and edge lengths."""
        mesh = self.mesh
        tri_set = {frozenset(t) for t in mesh.triangles.tolist()}
        edges = mesh.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
        lengths = np.linalg.norm(
            mesh.nodes[edges[:, 0]] - mesh.nodes[edges[:, 1]], axis=1
        )
        for g, perm in enumerate(self.perms):
            mapped = perm[mesh.triangles]
            for t in mapped.tolist():
                if frozenset(t) not in tri_set:
                    raise ConfigurationError(
                        f"group element {g} does not map triangles to triangles"
                    )
            mlen = np.linalg.norm(
                mesh.nodes[perm[edges[:, 0]]] - mesh.nodes[perm[edges[:, 1]]],
                axis=1,
            )
            if np.max(np.abs(mlen - lengths)) > 1e-12:
                raise ConfigurationError(
                    f"group element {g} distorts edge lengths beyond 1e-12"
                )


def _roll_index(n: int, shift: int) -> np.ndarray:
    return (np.arange(n) + shift) % n


def _reflect_index(n: int, m_index: int) -> np.ndarray:
    return (m_index - np.arange(n)) % n


def _rotation_perm(mesh: DiskMesh, shift: int) -> np.ndarray:
    perm = np.empty(mesh.n_nodes, dtype=np.int64)
    perm[0] = 0
    idx = _roll_index(mesh.n_angular, shift)
    perm[mesh.ring_nodes] = mesh.ring_nodes[:, idx]
    if mesh.cell_nodes.size:
        perm[mesh.cell_nodes] = mesh.cell_nodes[:, idx]
    return perm


def _reflection_perm(mesh: DiskMesh, m_index: int) -> np.ndarray:
    # axis at angle pi*m/k maps ring angle j to M-j and cell half-angle
    # j+1/2 to M-j-1/2, with M = m_index = m * n_angular / k
    perm = np.empty(mesh.n_nodes, dtype=np.int64)
    perm[0] = 0
    idx = _reflect_index(mesh.n_angular, m_index)
    perm[mesh.ring_nodes] = mesh.ring_nodes[:, idx]
    if mesh.cell_nodes.size:
        cidx = (m_index - 1 - np.arange(mesh.n_angular)) % mesh.n_angular
        perm[mesh.cell_nodes] = mesh.cell_nodes[:, cidx]
    return perm


def symmetrize(values: np.ndarray, group: SymmetryGroup) -> np.ndarray:
    """Orbit average; the linear idempotent projection onto invariant data.

    Accepts a full field or a boundary trace and returns the same kind.
    """
    values = np.asarray(values, dtype=np.float64)
    perms = _perms_for(values, group)
    return values[perms].mean(axis=0)


def is_symmetric(values: np.ndarray, group: SymmetryGroup, tol: float) -> bool:
    """True iff max over group elements and nodes of |f - f(g(x))| <= tol."""
    values = np.asarray(values, dtype=np.float64)
    perms = _perms_for(values, group)
    return float(np.max(np.abs(values[perms] - values[None, :]))) <= tol


def symmetry_residual(values: np.ndarray, group: SymmetryGroup) -> float:
    values = np.asarray(values, dtype=np.float64)
    perms = _perms_for(values, group)
    return float(np.max(np.abs(values[perms] - values[None, :])))


def _perms_for(values: np.ndarray, group: SymmetryGroup) -> np.ndarray:
    if values.shape == (group.mesh.n_nodes,):
        return group.perms
    if values.shape == (group.mesh.n_angular,):
        return group.boundary_perms
    raise InvalidFieldError(
        f"array of shape {values.shape} is neither a field "
        f"({group.mesh.n_nodes},) nor a trace ({group.mesh.n_angular},)"
    )


def validate_fixed_point_free(group: SymmetryGroup, mesh: DiskMesh) -> bool:
    """True iff no boundary node is fixed by every group element.

    The trivial group fixes everything and is rejected.
    """
    if group.order < 2:
        return False
    bidx = np.arange(mesh.n_angular)
    fixed_by_all = np.all(group.boundary_perms == bidx[None, :], axis=0)
    return not bool(np.any(fixed_by_all))


# ------------------------------------------------------- curvature specs ---

_KINDS = ("constant", "radial-bump", "angular-mode", "tabulated")


@dataclass(frozen=True)
class CurvatureSpec:
    """One prescribed-curvature function, for the disk or the circle.

    kinds:
      constant      -> amplitude
      radial-bump   -> base + amplitude * exp(-((r - center_radius)/width)^2)
      angular-mode  -> base + amplitude * r^mode * cos(mode*theta)  (disk)
                       base + amplitude * cos(mode*theta)           (circle)
      tabulated     -> nodal values supplied directly (or loaded from CSV)
    """

    kind: str
    amplitude: float = 1.0
    base: float = 0.0
    mode: int = 0
    center_radius: float = 0.5
    width: float = 0.2
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigurationError(
                f"unknown curvature kind {self.kind!r}; expected one of {_KINDS}"
            )
        for name in ("amplitude", "base", "center_radius", "width"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigurationError(f"curvature parameter {name} not finite")
        if self.kind == "angular-mode" and self.mode < 1:
            raise ConfigurationError("angular-mode requires mode >= 1")

    def sample_disk(self, mesh: DiskMesh) -> np.ndarray:
        r = mesh.node_radii()
        th = mesh.node_angles()
        if self.kind == "constant":
            return np.full(mesh.n_nodes, self.amplitude)
        if self.kind == "radial-bump":
            return self.base + self.amplitude * np.exp(
                -(((r - self.center_radius) / self.width) ** 2)
            )
        if self.kind == "angular-mode":
            return self.base + self.amplitude * r**self.mode * np.cos(self.mode * th)
        return _check_field(mesh, self.values, "tabulated disk curvature")

    def sample_circle(self, mesh: DiskMesh) -> np.ndarray:
        th = mesh.boundary_angles()
        if self.kind == "constant":
            return np.full(mesh.n_angular, self.amplitude)
        if self.kind == "radial-bump":
            raise ConfigurationError("radial-bump is constant on the circle; "
                                     "use kind 'constant' for the boundary")
        if self.kind == "angular-mode":
            return self.base + self.amplitude * np.cos(self.mode * th)
        return _check_trace(mesh, self.values, "tabulated boundary curvature")


@dataclass(frozen=True)
class CurvaturePair:
    """Specs for the interior curvature K and the boundary curvature h."""

    K: CurvatureSpec
    h: CurvatureSpec


def sample_curvatures(pair: CurvaturePair, mesh: DiskMesh):
    """Nodal samples (K on the disk, h on the circle)."""
    return pair.K.sample_disk(mesh), pair.h.sample_circle(mesh)


def load_tabulated_disk(path, mesh: DiskMesh) -> CurvatureSpec:
    """Read a disk curvature from CSV with header ``node_id,value``."""
    ids, vals = _read_two_column_csv(path, "node_id")
    values = np.full(mesh.n_nodes, np.nan)
    values[ids] = vals
    return CurvatureSpec(kind="tabulated",
                         values=_check_field(mesh, values, f"values from {path}"))


def load_tabulated_circle(path, mesh: DiskMesh) -> CurvatureSpec:
    """Read a boundary curvature from CSV with header ``boundary_index,value``."""
    ids, vals = _read_two_column_csv(path, "boundary_index")
    values = np.full(mesh.n_angular, np.nan)
    values[ids] = vals
    return CurvatureSpec(kind="tabulated",
                         values=_check_trace(mesh, values, f"values from {path}"))


def save_tabulated(path, values: np.ndarray, index_name: str) -> None:
    with open(path, "w") as f:
        f.write(f"{index_name},value\n")
        for i, v in enumerate(values):
            f.write(f"{i},{float(v)!r}\n")


def _read_two_column_csv(path, index_name: str):
    with open(path) as f:
        header = f.readline().strip()
        if header != f"{index_name},value":
            raise ConfigurationError(
                f"{path}: expected header '{index_name},value', got {header!r}"
            )
        ids, vals = [], []
        for line in f:
            line = line.strip()
            if not line:
                continue
            a, b = line.split(",")
            ids.append(int(a))
            vals.append(float(b))
    return np.array(ids, dtype=np.int64), np.array(vals)
