"""Ricci potential: path integration in u-coordinates, Newton, convexity.

The potential F is the line integral of the 1-form sum_i (K_i - T_i s_i^alpha) du_i
from a base point u0, with T the prescribed curvature (or the running average
in the Euclidean average mode). The form is closed, so the value is path
independent inside the admissible region; the extended variant replaces K by
the constant-extension curvature and is defined on the whole coordinate domain.

Everything in this module works in u_i = ln s_i^2 coordinates. In these
coordinates d(s^alpha)/du = (alpha/2) s^alpha, so the Hessian of F is
L - (alpha/2) diag(T s^alpha).
"""

from __future__ import annotations

import dataclasses
import warnings

import numpy as np
import scipy.linalg

from . import geometry
from .curvature import angle_deficits, average_curvature, curvature_jacobian
from .errors import AdmissibilityError, DomainError, QuadratureError, SolverError
from .geometry import PackingMetric
from .surface import Geometry

AVERAGE_TARGET = "average"
QUAD_TOL = 1e-10
_MAX_QUAD_DEPTH = 48
GRAD_TOL = 1e-11
MAX_NEWTON_ITERATIONS = 200

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclasses.dataclass
class PotentialQuery:
    """A potential evaluation request: integrate from u0 to u.

    target is a per-vertex array, a scalar (broadcast), or the string
    "average" for the running Euclidean average curvature.
    """

    u0: np.ndarray
    u: np.ndarray
    target: object = 0.0
    alpha: float = 2.0
    geometry: Geometry = Geometry.EUCLIDEAN

    def __post_init__(self):
        self.u0 = np.asarray(self.u0, dtype=float)
        self.u = np.asarray(self.u, dtype=float)


def _resolve_target(tri, target, r, alpha):
    if isinstance(target, str):
        if target != AVERAGE_TARGET:
            raise ValueError(f"unknown target spec {target!r}")
        return average_curvature(tri, r, alpha)
    return np.broadcast_to(np.asarray(target, dtype=float), (tri.vertex_count,))


def _one_form(tri, u, target, alpha, extended):
    """Coefficients a_i(u) = K_i - T_i s_i^alpha of the potential 1-form."""
    r = geometry.r_of_u(u, tri.geometry)
    K = angle_deficits(tri, r, extended=extended)
    s = geometry.s_of_r(r, tri.geometry)
    T = _resolve_target(tri, target, r, alpha)
    return K - T * s**alpha


def _panel(tri, ua, du, left, right, target, alpha, extended):
    """16-point Gauss-Legendre estimate of the 1-form integral over one panel."""
    mid = 0.5 * (left + right)
    half = 0.5 * (right - left)
    total = 0.0
    for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
        tau = mid + half * node
        a = _one_form(tri, ua + tau * du, target, alpha, extended)
        total += weight * half * float(a @ du)
    return total


def _segment_integral(tri, ua, ub, target, alpha, extended):
    """Adaptive Gauss-Legendre integral of the 1-form along ua->ub.

    Panels are bisected until the two-half sum agrees with the parent panel;
    the extension's derivative kinks at the admissibility boundary localize
    into a geometrically shrinking chain of panels.
    """
    du = ub - ua
    if not np.any(du):
        return 0.0

    def refine(left, right, whole, budget, depth):
        mid = 0.5 * (left + right)
        lo = _panel(tri, ua, du, left, mid, target, alpha, extended)
        hi = _panel(tri, ua, du, mid, right, target, alpha, extended)
        if abs(lo + hi - whole) < max(budget, 1e-14):
            return lo + hi
        if depth >= _MAX_QUAD_DEPTH:
            raise QuadratureError(
                "segment quadrature did not settle; the integrand may be singular"
            )
        return refine(left, mid, lo, 0.5 * budget, depth + 1) + refine(
            mid, right, hi, 0.5 * budget, depth + 1
        )

    return refine(0.0, 1.0, _panel(tri, ua, du, 0.0, 1.0, target, alpha, extended),
                  QUAD_TOL, 0)


def potential_value(tri, query: PotentialQuery, extended=False, via=()) -> float:
    """F(u) - F(u0) along the straight segment (or a polyline through `via`).

    Non-extended evaluation fails if any quadrature node leaves the admissible
    region; extended evaluation only needs the coordinates to stay in range.
    """
    if query.geometry is not tri.geometry:
        raise ValueError("query geometry does not match the surface")
    if not extended:
        r0 = geometry.r_of_u(query.u0, tri.geometry)
        ok, bad = geometry.admissible(tri, r0)
        if not ok:
            raise AdmissibilityError(f"base point is inadmissible (faces {bad})")
    waypoints = [query.u0, *[np.asarray(v, dtype=float) for v in via], query.u]
    total = 0.0
    for ua, ub in zip(waypoints[:-1], waypoints[1:]):
        total += _segment_integral(tri, ua, ub, query.target, query.alpha, extended)
    return total


def potential_gradient(tri, u, query: PotentialQuery, extended=False):
    """Gradient of the potential at u: K_i - T_i s_i^alpha."""
    return _one_form(tri, np.asarray(u, dtype=float), query.target, query.alpha, extended)


# -- Newton solver ------------------------------------------------------------------


def _hessian(tri, r, target, alpha):
    """Hessian of the potential at r for a fixed target: L - (alpha/2) diag(T s^alpha)."""
    L = curvature_jacobian(tri, r).matrix
    s = geometry.s_of_r(r, tri.geometry)
    T = np.broadcast_to(np.asarray(target, dtype=float), (tri.vertex_count,))
    return L - 0.5 * alpha * np.diag(T * s**alpha)


def newton_solve(tri, r_init, target, alpha=2.0, tol=GRAD_TOL,
                 max_iterations=MAX_NEWTON_ITERATIONS) -> PackingMetric:
    """Solve K_i = T_i s_i^alpha by damped Newton descent in u-coordinates.

    The Euclidean problem with alpha * target identically zero has the scale
    direction in the Hessian kernel; those solves are gauge-fixed on the slice
    sum(u) = const by a rank-one regularization plus projection of each step.
    """
    target = np.broadcast_to(np.asarray(target, dtype=float), (tri.vertex_count,)).copy()
    alpha = float(alpha)
    if np.any(alpha * target > 0.0):
        warnings.warn(
            "alpha * target is positive somewhere; the potential need not be convex "
            "and the solve may find a saddle or fail",
            stacklevel=2,
        )
    r = np.asarray(r_init, dtype=float)
    ok, bad = geometry.admissible(tri, r)
    if not ok:
        raise AdmissibilityError(f"initial metric is inadmissible (faces {bad})")
    u = geometry.u_of_r(r, tri.geometry)
    n = tri.vertex_count
    singular = tri.geometry is Geometry.EUCLIDEAN and not np.any(alpha * target != 0.0)

    def gradient(u_pt):
        return _one_form(tri, u_pt, target, alpha, extended=False)

    g = gradient(u)
    for _ in range(max_iterations):
        norm = float(np.max(np.abs(g)))
        if norm < tol:
            return PackingMetric(geometry.r_of_u(u, tri.geometry), tri.geometry)
        H = _hessian(tri, geometry.r_of_u(u, tri.geometry), target, alpha)
        if singular:
            # kernel is the all-ones direction; pin the scale slice sum(u) = const
            gauge = max(1.0, float(np.trace(H)) / n)
            H = H + (gauge / n) * np.ones((n, n))
        try:
            delta = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular Hessian: {exc}") from exc
        if singular:
            delta = delta - delta.mean()

        phi = float(g @ g)
        lam = 1.0
        accepted = False
        while lam >= 2.0**-60:
            u_try = u + lam * delta
            try:
                r_try = geometry.r_of_u(u_try, tri.geometry)
            except DomainError:
                r_try = None
            if r_try is not None and geometry.admissible(tri, r_try)[0]:
                g_try = gradient(u_try)
                if float(g_try @ g_try) <= (1.0 - 1e-4 * lam) * phi:
                    u, g = u_try, g_try
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            raise SolverError(
                f"line search stalled at gradient norm {norm:.3e}; "
                "the iterate is pinned near the admissibility boundary"
            )
    raise SolverError(
        f"no convergence in {max_iterations} iterations "
        f"(gradient norm {float(np.max(np.abs(g))):.3e})"
    )


# -- convexity diagnostics ------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ConvexityReport:
    eigenvalues: np.ndarray
    definiteness: str
    kernel_alignment: float | None


def convexity_report(tri, r, target, alpha=2.0) -> ConvexityReport:
    """Eigen-structure of the potential Hessian at r for a fixed target."""
    r = np.asarray(r, dtype=float)
    H = _hessian(tri, r, target, alpha)
    H = 0.5 * (H + H.T)
    values, vectors = scipy.linalg.eigh(H)
    scale = max(1.0, float(np.max(np.abs(values))))
    tol = 1e-9 * scale
    if np.all(values > tol):
        definiteness = "positive definite"
    elif np.all(values >= -tol):
        definiteness = "positive semidefinite"
    elif np.all(values < -tol):
        definiteness = "negative definite"
    elif np.all(values <= tol):
        definiteness = "negative semidefinite"
    else:
        definiteness = "indefinite"

    kernel_alignment = None
    small = np.abs(values) <= tol
    if np.any(small):
        v = vectors[:, int(np.argmin(np.abs(values)))]
        ones = np.ones(tri.vertex_count) / np.sqrt(tri.vertex_count)
        kernel_alignment = float(np.abs(v @ ones))
    return ConvexityReport(
        eigenvalues=values, definiteness=definiteness, kernel_alignment=kernel_alignment
    )
