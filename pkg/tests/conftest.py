import numpy as np
import pytest

from idcurv import (
    Geometry,
    csaszar_torus,
    tetrahedron,
    admissible,
    curvature_jacobian,
    u_of_r,
    r_of_u,
    angle_deficits,
)


@pytest.fixture
def tetra_euc():
    return tetrahedron()


@pytest.fixture
def tetra_hyp():
    return tetrahedron(geometry=Geometry.HYPERBOLIC)


@pytest.fixture
def csaszar_euc():
    return csaszar_torus()


@pytest.fixture
def csaszar_i2():
    return csaszar_torus(weight=2.0)


@pytest.fixture
def csaszar_hyp():
    return csaszar_torus(geometry=Geometry.HYPERBOLIC)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def sample_admissible(tri, rng, spread=0.4, scale=1.0, tries=500):
    """Rejection-sample a random admissible radii vector near uniform."""
    for _ in range(tries):
        r = scale * np.exp(rng.uniform(-spread, spread, tri.vertex_count))
        if admissible(tri, r)[0]:
            return r
    raise AssertionError("could not sample an admissible metric")


def fd_jacobian(tri, r, step=1e-6):
    """Finite-difference d K / d u, central differences."""
    u0 = u_of_r(r, tri.geometry)
    n = tri.vertex_count
    J = np.empty((n, n))
    for j in range(n):
        up = u0.copy()
        um = u0.copy()
        up[j] += step
        um[j] -= step
        Kp = angle_deficits(tri, r_of_u(up, tri.geometry))
        Km = angle_deficits(tri, r_of_u(um, tri.geometry))
        J[:, j] = (Kp - Km) / (2.0 * step)
    return J
