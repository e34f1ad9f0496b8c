"""Symmetric tetrahedron family with two distinct constant-curvature packings.

On the boundary of a tetrahedron with all inversive distances equal to 2, the
radii (1, x, x, x) give an isoceles family: the three edges at vertex 0 have
length sqrt(x^2 + 4x + 1), the three opposite edges sqrt(6) x. The family is
admissible exactly for 0 < x < 4 + sqrt(18).

curvature_residual(x) vanishes precisely when the R-curvature of (1, x, x, x)
is a constant vector. It has a root at x = 1 and a second root in
(2, 4 + sqrt(18)), so two non-proportional packings share the property of
constant curvature.
"""

from __future__ import annotations

import dataclasses
import math
from pathlib import Path

import numpy as np

from .errors import DomainError
from .surface import Geometry, tetrahedron

X_SUP = 4.0 + math.sqrt(18.0)
ROOT_TOL = 1e-12


@dataclasses.dataclass(frozen=True)
class TetraFamily:
    """One member of the family: radii (1, x, x, x) on the I = 2 tetrahedron."""

    x: float

    @property
    def radii(self):
        return np.array([1.0, self.x, self.x, self.x])

    @property
    def spoke_length(self):
        """Length of the three edges at vertex 0."""
        return math.sqrt(self.x**2 + 4.0 * self.x + 1.0)

    @property
    def rim_length(self):
        """Length of the three edges of the opposite face."""
        return math.sqrt(6.0) * self.x

    @property
    def is_admissible(self):
        return 0.0 < self.x < X_SUP

    def surface(self):
        return tetrahedron(weight=2.0, geometry=Geometry.EUCLIDEAN)


def curvature_residual(x) -> float:
    """arcsin((sqrt(6) x / 2) / sqrt(x^2 + 4x + 1)) - pi/3 + 2 pi / (3 (3 x^2 + 1)).

    Zero exactly when the R-curvature of (1, x, x, x) is constant across the
    four vertices. Defined on the admissible interval (0, 4 + sqrt(18)).
    """
    x = float(x)
    if not 0.0 < x < X_SUP:
        raise DomainError(f"x = {x} outside the admissible interval (0, {X_SUP})")
    return _apex_half_angle(x) - math.pi / 3.0 + 2.0 * math.pi / (3.0 * (3.0 * x**2 + 1.0))


def _apex_half_angle(x) -> float:
    # sin of the half apex angle of the isoceles spoke triangle; the ratio
    # tends to 1 as x -> X_SUP, so clip roundoff excess before asin.
    ratio = math.sqrt(6.0) * x / (2.0 * math.sqrt(x**2 + 4.0 * x + 1.0))
    return math.asin(min(ratio, 1.0))


@dataclasses.dataclass(frozen=True)
class SecondRoot:
    x0: float
    curvature: float  # the constant R value of (1, x0, x0, x0)


def find_second_root(lo=2.0, hi=X_SUP - 1e-9, tol=ROOT_TOL) -> SecondRoot:
    """Bisection for the root of curvature_residual in (2, 4 + sqrt(18)).

    The bracket is certified by sign: the residual is negative at 2 and
    positive near the right endpoint. Returns the root and the constant
    curvature of the corresponding packing.
    """
    f_lo = curvature_residual(lo)
    f_hi = curvature_residual(hi)
    if not (f_lo < 0.0 < f_hi):
        raise ArithmeticError(
            f"bracket failure: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
        )
    x = 0.5 * (lo + hi)
    for _ in range(10_000):
        value = curvature_residual(x)
        if abs(value) < tol:
            break
        if value < 0.0:
            lo = x
        else:
            hi = x
        x = 0.5 * (lo + hi)
    else:
        raise ArithmeticError("bisection failed to reach the residual tolerance")

    # at a root the R-curvature is the same at every vertex; read it off at
    # vertex 0 where s = r = 1: R_0 = 2 pi - 3 * (apex angle)
    constant = 2.0 * math.pi - 6.0 * _apex_half_angle(x)
    return SecondRoot(x0=x, curvature=constant)


def f_curve(lo=0.5, hi=8.0, samples=751) -> np.ndarray:
    """(samples, 2) table of (x, curvature_residual(x)) over [lo, hi]."""
    if not (0.0 < lo < hi < X_SUP):
        raise DomainError(f"[{lo}, {hi}] is not inside (0, {X_SUP})")
    if samples < 2:
        raise ValueError("need at least two samples")
    xs = np.linspace(lo, hi, samples)
    values = np.array([curvature_residual(x) for x in xs])
    return np.column_stack([xs, values])


def write_f_curve(path, lo=0.5, hi=8.0, samples=751):
    table = f_curve(lo, hi, samples)
    lines = ["x,f_x"]
    for x, value in table:
        lines.append(f"{x:.17g},{value:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return table
