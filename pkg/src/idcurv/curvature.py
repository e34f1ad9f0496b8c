"""Vertex curvatures, Gauss-Bonnet checks, the curvature Jacobian, Laplacians.

Curvature conventions: K_i is the angle deficit 2 pi minus the incident corner
angles; R_i = K_i / s_i^2; the alpha variant divides by s_i^alpha instead.

The Jacobian L = dK/du is taken in u_i = ln s_i^2 coordinates, in which it is
symmetric: positive semidefinite with kernel spanned by the all-ones vector in
the Euclidean case, positive definite in the hyperbolic case. The alpha flow
material uses u_i = ln s_i instead, which doubles the matrix; operations that
care accept a `convention` argument.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.linalg

from . import geometry
from .errors import ConditioningError
from .surface import Geometry, euler_characteristic

TWO_PI = 2.0 * np.pi
JACOBIAN_SLACK = 1e-10  # minimum relative triangle slack for derivative assembly

CONVENTIONS = ("log_s2", "log_s")


@dataclasses.dataclass(frozen=True)
class CurvatureField:
    """Per-vertex curvatures; extended=True means extended angles were used."""

    K: np.ndarray
    R: np.ndarray
    R_alpha: np.ndarray
    alpha: float
    extended: bool


@dataclasses.dataclass(frozen=True)
class CurvatureJacobian:
    matrix: np.ndarray
    geometry: Geometry


def angle_deficits(tri, r, extended=False):
    """K_i = 2 pi - sum of incident corner angles, as a plain array."""
    ca = geometry.corner_angles(tri, r, extended=extended)
    incident = np.bincount(
        tri.faces.ravel(), weights=ca.angles.ravel(), minlength=tri.vertex_count
    )
    return TWO_PI - incident


def curvature(tri, r, alpha=2.0, use_extension=False) -> CurvatureField:
    r = np.asarray(r, dtype=float)
    K = angle_deficits(tri, r, extended=use_extension)
    s = geometry.s_of_r(r, tri.geometry)
    return CurvatureField(
        K=K,
        R=K / s**2,
        R_alpha=K / s**alpha,
        alpha=float(alpha),
        extended=bool(use_extension),
    )


def classical_curvature(tri, r, use_extension=False) -> CurvatureField:
    """Angle deficits only (alpha = 0, so R_alpha coincides with K)."""
    return curvature(tri, r, alpha=0.0, use_extension=use_extension)


def average_curvature(tri, r, alpha=2.0) -> float:
    """2 pi chi / sum(r^alpha) (alpha != 0) or 2 pi chi / N (alpha = 0).

    Defined for Euclidean surfaces only.
    """
    if tri.geometry is not Geometry.EUCLIDEAN:
        raise ValueError("average curvature is defined for Euclidean surfaces only")
    chi = euler_characteristic(tri)
    if alpha == 0.0:
        return TWO_PI * chi / tri.vertex_count
    r = np.asarray(r, dtype=float)
    return TWO_PI * chi / float(np.sum(r**alpha))


def gauss_bonnet_residual(tri, r, extended=False) -> float:
    """sum K - 2 pi chi, minus the total area in the hyperbolic case."""
    K = angle_deficits(tri, r, extended=extended)
    residual = float(np.sum(K)) - TWO_PI * euler_characteristic(tri)
    if tri.geometry is Geometry.HYPERBOLIC:
        residual -= geometry.total_area(tri, r, extended=extended)
    return residual


# -- Jacobian ---------------------------------------------------------------------


def _angle_length_derivatives(fl, theta, hyperbolic):
    """(F, 3, 3) array D with D[f, a, e] = d theta_a / d l_e for each face.

    Law-of-cosines differentiation: with side a opposite angle A,
      dA/da = a / (b c sin A),  dA/db = -a cos C / (b c sin A),
    replacing each side by its sinh in the hyperbolic case.
    """
    m = np.sinh(fl) if hyperbolic else fl
    sin_t = np.sin(theta)
    cos_t = np.cos(theta)
    F = fl.shape[0]
    D = np.empty((F, 3, 3))
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        denom = m[:, b] * m[:, c] * sin_t[:, a]
        D[:, a, a] = m[:, a] / denom
        D[:, a, b] = -m[:, a] * cos_t[:, c] / denom
        D[:, a, c] = -m[:, a] * cos_t[:, b] / denom
    return D


def _length_u_derivatives(tri, r, fl, hyperbolic):
    """(F, 3, 3) array E with E[f, e, v] = d l_e / d u_v (zero when v == e)."""
    F = fl.shape[0]
    fw = tri.face_weights()
    E = np.zeros((F, 3, 3))
    if hyperbolic:
        sh = np.sinh(r)
        ch = np.cosh(r)
        sh_l = np.sinh(fl)
    for e in range(3):
        for v in range(3):
            if v == e:
                continue
            w = 3 - e - v
            iv = tri.faces[:, v]
            iw = tri.faces[:, w]
            if hyperbolic:
                E[:, e, v] = (
                    sh[iv] * (sh[iv] * ch[iw] + fw[:, e] * ch[iv] * sh[iw])
                ) / (2.0 * sh_l[:, e])
            else:
                E[:, e, v] = r[iv] * (r[iv] + r[iw] * fw[:, e]) / (2.0 * fl[:, e])
    return E


def curvature_jacobian(tri, r) -> CurvatureJacobian:
    """L = dK/du assembled analytically face by face (u = ln s^2)."""
    r = np.asarray(r, dtype=float)
    fl = geometry.face_lengths(tri, r)
    slack = geometry.triangle_slack(fl)
    if np.min(slack) <= JACOBIAN_SLACK:
        worst = int(np.argmin(slack))
        raise ConditioningError(
            f"face {worst} has relative slack {slack[worst]:.3e}; "
            "angle derivatives are unreliable this close to degeneracy"
        )
    hyperbolic = tri.geometry is Geometry.HYPERBOLIC
    theta = geometry.corner_angles(tri, r).angles
    D = _angle_length_derivatives(fl, theta, hyperbolic)
    E = _length_u_derivatives(tri, r, fl, hyperbolic)
    per_face = np.einsum("fae,fev->fav", D, E)

    N = tri.vertex_count
    L = np.zeros((N, N))
    F = len(tri.faces)
    rows = np.broadcast_to(tri.faces[:, :, None], (F, 3, 3)).ravel()
    cols = np.broadcast_to(tri.faces[:, None, :], (F, 3, 3)).ravel()
    np.add.at(L, (rows, cols), -per_face.ravel())
    return CurvatureJacobian(matrix=L, geometry=tri.geometry)


# -- Laplacian --------------------------------------------------------------------


def _convention_factor(convention):
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; use one of {CONVENTIONS}")
    return 1.0 if convention == "log_s2" else 2.0


def laplacian_apply(tri, r, f, alpha=2.0, convention="log_s2"):
    """(Delta f)_i = (1 / s_i^alpha) sum_j (-L'_ij) f_j.

    L' is the curvature Jacobian in the requested coordinate convention:
    ln s^2 (default) or ln s (the alpha-flow convention, giving 2L).
    Euclidean surfaces only.
    """
    if tri.geometry is not Geometry.EUCLIDEAN:
        raise ValueError("the Laplacian here is defined for Euclidean surfaces only")
    r = np.asarray(r, dtype=float)
    f = np.asarray(f, dtype=float)
    L = curvature_jacobian(tri, r).matrix * _convention_factor(convention)
    s = geometry.s_of_r(r, tri.geometry)
    return -(L @ f) / s**alpha


def laplacian_spectrum(tri, r, return_vectors=False):
    """Eigenvalues of Sigma^{-1/2} L Sigma^{-1/2}, Sigma = diag(s^2), ascending.

    Euclidean surfaces only: the smallest eigenvalue is ~0 with eigenvector
    proportional to r, the rest are positive.
    """
    if tri.geometry is not Geometry.EUCLIDEAN:
        raise ValueError("the Laplacian spectrum here is Euclidean only")
    r = np.asarray(r, dtype=float)
    L = curvature_jacobian(tri, r).matrix
    s = geometry.s_of_r(r, tri.geometry)
    lam = L / np.outer(s, s)
    sym = 0.5 * (lam + lam.T)
    if return_vectors:
        values, vectors = scipy.linalg.eigh(sym)
        return values, vectors
    return scipy.linalg.eigh(sym, eigvals_only=True)
