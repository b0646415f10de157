import numpy as np
import pytest

from diskcurv.fields import SymmetryGroup
from diskcurv.mesh import build_mesh


@pytest.fixture(scope="session")
def mesh_small():
    return build_mesh(8, 32)


@pytest.fixture(scope="session")
def mesh_med():
    return build_mesh(16, 64)


@pytest.fixture(scope="session")
def z2_small(mesh_small):
    return SymmetryGroup.cyclic(mesh_small, 2)


@pytest.fixture(scope="session")
def z2_med(mesh_med):
    return SymmetryGroup.cyclic(mesh_med, 2)


@pytest.fixture(scope="session")
def d3_small():
    mesh = build_mesh(8, 24, group_order=3, dihedral=True)
    return mesh, SymmetryGroup.dihedral(mesh, 3)


def smooth_random_field(mesh, rng, n_modes=5, scale=0.5):
    """Random combination of harmonic-polynomial modes; smooth on the disk."""
    r = mesh.node_radii()
    th = mesh.node_angles()
    u = np.zeros(mesh.n_nodes)
    for mode in range(n_modes):
        a, b = rng.normal(0.0, scale, size=2)
        rad = r ** max(mode, 1)
        u += a * rad * np.cos(mode * th) + b * rad * np.sin(mode * th)
    u += rng.normal(0.0, scale) * r**2
    return u
