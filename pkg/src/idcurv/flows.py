"""Combinatorial Ricci flows: normalized, modified, extended, and alpha kinds.

All flows are integrated in the radii directly. The defining equations act on
g = s^2 or on s; converting gives, per vertex,

    dr/dt = (target - R) * r / 2         Euclidean, R-flows (g = r^2)
    dr/dt = (target - R) * sinh(r) / 2   hyperbolic, R-flows (g = tanh^2(r/2))
    dr/dt = (target - R_alpha) * r       Euclidean alpha-flows (on s = r)
    dr/dt = (target - R_alpha) * sinh(r) hyperbolic alpha-flows (on s = tanh(r/2))

Normalized kinds aim at the average curvature, recomputed each evaluation;
modified kinds aim at a prescribed target; extended kinds run through
admissibility failures using the constant angle extension.

The stepper is fixed-step RK4 (or Euler) with automatic step halving when a
step would leave the legal region, plus singularity classification: a radius
collapsing to zero is an essential singularity, a face degenerating at
bounded radii is a removable one (genuine kinds only).
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from pathlib import Path

import numpy as np

from . import geometry
from .curvature import angle_deficits, average_curvature, curvature_jacobian
from .errors import AdmissibilityError, IntegrationError
from .geometry import PackingMetric
from .surface import Geometry

EPS_RADIUS = 1e-8
RADIUS_CAP = 1e8
EPS_TRI = 1e-12  # relative slack below which a face counts as degenerate
MIN_STEP = 1e-14
MAX_HALVINGS = 20


class FlowKind(enum.Enum):
    NORMALIZED_EUCLIDEAN = "normalized-euclidean"
    MODIFIED_EUCLIDEAN = "modified-euclidean"
    EXTENDED_EUCLIDEAN = "extended-euclidean"
    MODIFIED_HYPERBOLIC = "modified-hyperbolic"
    EXTENDED_HYPERBOLIC = "extended-hyperbolic"
    ALPHA_NORMALIZED = "alpha-normalized"
    ALPHA_MODIFIED = "alpha-modified"
    ALPHA_EXTENDED = "alpha-extended"


EXTENDED_KINDS = frozenset(
    {FlowKind.EXTENDED_EUCLIDEAN, FlowKind.EXTENDED_HYPERBOLIC, FlowKind.ALPHA_EXTENDED}
)
ALPHA_KINDS = frozenset(
    {FlowKind.ALPHA_NORMALIZED, FlowKind.ALPHA_MODIFIED, FlowKind.ALPHA_EXTENDED}
)
_KIND_GEOMETRY = {
    FlowKind.NORMALIZED_EUCLIDEAN: Geometry.EUCLIDEAN,
    FlowKind.MODIFIED_EUCLIDEAN: Geometry.EUCLIDEAN,
    FlowKind.EXTENDED_EUCLIDEAN: Geometry.EUCLIDEAN,
    FlowKind.MODIFIED_HYPERBOLIC: Geometry.HYPERBOLIC,
    FlowKind.EXTENDED_HYPERBOLIC: Geometry.HYPERBOLIC,
    FlowKind.ALPHA_NORMALIZED: Geometry.EUCLIDEAN,
}


class Integrator(enum.Enum):
    RK4 = "rk4"
    EULER = "euler"


class EventKind(enum.Enum):
    ESSENTIAL_SINGULARITY = "EssentialSingularity"
    REMOVABLE_SINGULARITY = "RemovableSingularity"
    LEFT_ADMISSIBLE = "LeftAdmissible"
    REENTERED_ADMISSIBLE = "ReenteredAdmissible"
    CONVERGED = "Converged"
    HORIZON_REACHED = "HorizonReached"
    TARGET_SIGN_WARNING = "TargetSignWarning"


TERMINAL_EVENTS = frozenset(
    {
        EventKind.ESSENTIAL_SINGULARITY,
        EventKind.REMOVABLE_SINGULARITY,
        EventKind.CONVERGED,
        EventKind.HORIZON_REACHED,
    }
)


@dataclasses.dataclass(frozen=True)
class FlowEvent:
    t: float
    kind: EventKind
    index: int | None = None


@dataclasses.dataclass
class FlowSpec:
    kind: FlowKind
    alpha: float = 2.0
    target: np.ndarray | None = None
    step: float = 0.01
    t_max: float = 200.0
    tol: float = 1e-8
    integrator: Integrator = Integrator.RK4

    def __post_init__(self):
        if self.step <= 0.0 or self.t_max <= 0.0 or self.tol <= 0.0:
            raise ValueError("step, t_max and tol must be positive")
        if self.target is not None:
            target = np.asarray(self.target, dtype=float)
            if not np.all(np.isfinite(target)):
                raise ValueError("target must be finite")
            self.target = target

    @property
    def effective_alpha(self):
        return float(self.alpha) if self.kind in ALPHA_KINDS else 2.0


@dataclasses.dataclass
class FlowTrace:
    times: np.ndarray
    radii: np.ndarray
    max_err: np.ndarray
    measure: np.ndarray
    extended_region: np.ndarray
    events: list[FlowEvent]

    def terminal_event(self) -> FlowEvent:
        terminal = [e for e in self.events if e.kind in TERMINAL_EVENTS]
        if len(terminal) != 1:
            raise RuntimeError(f"trace holds {len(terminal)} terminal events")
        return terminal[0]

    def write_csv(self, path):
        n = self.radii.shape[1]
        header = "t," + ",".join(f"r_{i}" for i in range(n)) + ",max_err,measure,extended_region"
        lines = [header]
        for k in range(len(self.times)):
            cells = [f"{self.times[k]:.17g}"]
            cells += [f"{v:.17g}" for v in self.radii[k]]
            cells += [
                f"{self.max_err[k]:.17g}",
                f"{self.measure[k]:.17g}",
                str(int(self.extended_region[k])),
            ]
            lines.append(",".join(cells))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def write_events(self, path):
        payload = [
            {"t": e.t, "kind": e.kind.value, "index": e.index} for e in self.events
        ]
        Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


# -- right-hand side ---------------------------------------------------------------


def _needs_target(kind, geom):
    if kind in (FlowKind.MODIFIED_EUCLIDEAN, FlowKind.MODIFIED_HYPERBOLIC,
                FlowKind.EXTENDED_HYPERBOLIC, FlowKind.ALPHA_MODIFIED):
        return True
    if kind is FlowKind.ALPHA_EXTENDED and geom is Geometry.HYPERBOLIC:
        return True
    return False


def _check_spec(tri, spec):
    need = _KIND_GEOMETRY.get(spec.kind)
    if need is not None and tri.geometry is not need:
        raise ValueError(
            f"{spec.kind.value} flow needs a {need.value} surface, got {tri.geometry.value}"
        )
    if _needs_target(spec.kind, tri.geometry):
        if spec.target is None:
            raise ValueError(f"{spec.kind.value} flow requires a target curvature")
    if spec.kind in (FlowKind.NORMALIZED_EUCLIDEAN, FlowKind.ALPHA_NORMALIZED):
        if spec.target is not None:
            raise ValueError("normalized flows compute their own average target")
    if spec.target is not None and spec.target.ndim > 0 and spec.target.shape != (tri.vertex_count,):
        raise ValueError("target length does not match the vertex count")


def _deviation(tri, r, spec):
    """target - R (componentwise), using extended curvature for extended kinds."""
    extended = spec.kind in EXTENDED_KINDS
    alpha = spec.effective_alpha
    K = angle_deficits(tri, r, extended=extended)
    s = geometry.s_of_r(r, tri.geometry)
    R = K / s**alpha
    if spec.target is not None:
        target = spec.target
    else:
        target = average_curvature(tri, r, alpha)
    return target - R


def flow_rhs(tri, r, spec: FlowSpec):
    """Time derivative of the radii under the requested flow."""
    r = np.asarray(r, dtype=float)
    _check_spec(tri, spec)
    return _rhs_unchecked(tri, r, spec)


def _rhs_unchecked(tri, r, spec):
    dev = _deviation(tri, r, spec)
    if tri.geometry is Geometry.EUCLIDEAN:
        factor = r
    else:
        # sinh overflows past r ~ 710; the inf makes the candidate illegal
        # and the driver halts with a step-size report, which is the intent
        with np.errstate(over="ignore"):
            factor = np.sinh(r)
    scale = 1.0 if spec.kind in ALPHA_KINDS else 0.5
    return scale * dev * factor


# -- driver ------------------------------------------------------------------------


def _legal(tri, r, genuine):
    if not np.all(np.isfinite(r)):
        return False
    if np.any(r < EPS_RADIUS) or np.any(r > RADIUS_CAP):
        return False
    if genuine and not geometry.admissible(tri, r)[0]:
        return False
    return True


def _propose(tri, r, k1, h, spec):
    """One explicit step from r; returns the candidate or None if a stage failed."""
    try:
        if spec.integrator is Integrator.EULER:
            return r + h * k1
        k2 = _stage_rhs(tri, r + (0.5 * h) * k1, spec)
        k3 = _stage_rhs(tri, r + (0.5 * h) * k2, spec)
        k4 = _stage_rhs(tri, r + h * k3, spec)
    except (AdmissibilityError, FloatingPointError):
        return None
    return r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _stage_rhs(tri, r, spec):
    if not np.all(np.isfinite(r)) or np.any(r <= 0.0):
        raise AdmissibilityError("stage radii left the positive cone")
    return _rhs_unchecked(tri, r, spec)


def run_flow(tri, r0, spec: FlowSpec):
    """Integrate the flow from r0. Returns (FlowTrace, final PackingMetric).

    Terminal events: Converged (max curvature error below tol), HorizonReached,
    EssentialSingularity (a radius fell to EPS_RADIUS), RemovableSingularity
    (a face degenerated at bounded radii; genuine kinds only). Extended kinds
    additionally log LeftAdmissible / ReenteredAdmissible transitions.
    """
    if isinstance(r0, PackingMetric):
        r0 = r0.radii
    r = np.array(r0, dtype=float)
    if r.shape != (tri.vertex_count,):
        raise ValueError("radii length does not match the vertex count")
    if np.any(r <= 0.0) or not np.all(np.isfinite(r)):
        raise ValueError("initial radii must be positive and finite")
    _check_spec(tri, spec)

    genuine = spec.kind not in EXTENDED_KINDS
    if genuine:
        ok, bad = geometry.admissible(tri, r)
        if not ok:
            raise AdmissibilityError(
                f"genuine flow started outside the admissible cone (faces {bad})"
            )

    times, radii, errs, measures, ext_flags = [], [], [], [], []
    events: list[FlowEvent] = []

    def record(t, rr, err, inside):
        if times and math.isclose(times[-1], t, rel_tol=0.0, abs_tol=1e-300):
            return
        times.append(t)
        radii.append(rr.copy())
        errs.append(err)
        if tri.geometry is Geometry.EUCLIDEAN:
            measures.append(float(rr @ rr))
        else:
            measures.append(geometry.total_area(tri, rr, extended=not genuine))
        ext_flags.append(not inside)

    def finish(final_r):
        trace = FlowTrace(
            times=np.asarray(times),
            radii=np.asarray(radii),
            max_err=np.asarray(errs),
            measure=np.asarray(measures),
            extended_region=np.asarray(ext_flags, dtype=bool),
            events=events,
        )
        return trace, PackingMetric(final_r, tri.geometry)

    if spec.target is not None:
        sign = np.atleast_1d(spec.effective_alpha * spec.target)
        offenders = np.nonzero(sign > 0.0)[0]
        if len(offenders):
            events.append(
                FlowEvent(0.0, EventKind.TARGET_SIGN_WARNING, int(offenders[0]))
            )

    inside = geometry.admissible(tri, r)[0]
    if not genuine and not inside:
        bad = geometry.admissible(tri, r)[1]
        events.append(FlowEvent(0.0, EventKind.LEFT_ADMISSIBLE, int(bad[0])))

    dev = _deviation(tri, r, spec)
    err = float(np.max(np.abs(dev)))
    record(0.0, r, err, inside)
    if err < spec.tol:
        events.append(FlowEvent(0.0, EventKind.CONVERGED, None))
        return finish(r)

    sample_every = max(1, math.floor(0.1 / spec.step))
    t = 0.0
    steps = 0
    h_next = spec.step
    while t < spec.t_max * (1.0 - 1e-15):
        k1 = _rhs_unchecked(tri, r, spec)
        h = min(h_next, spec.t_max - t)
        candidate = None
        accepted = False
        floored = False
        for _ in range(MAX_HALVINGS + 1):
            candidate = _propose(tri, r, k1, h, spec)
            if candidate is not None and _legal(tri, candidate, genuine):
                accepted = True
                break
            if h * 0.5 < MIN_STEP:
                floored = True
                break
            h *= 0.5

        if not accepted:
            if not floored:
                # halving budget spent but the floor not reached: keep the
                # reduced step and retry, so the state can creep up to a wall
                h_next = h * 0.5
                continue
            event = _classify_stall(tri, r, candidate, k1, h, genuine)
            if event is None:
                record(t, r, err, inside)
                trace, _ = finish(r)
                raise IntegrationError(
                    f"step size underflow at t={t:.6g} without a singularity signature",
                    trace=trace,
                )
            record(t, r, err, inside)
            events.append(dataclasses.replace(event, t=t))
            return finish(r)

        h_next = min(spec.step, 2.0 * h)
        r = candidate
        t += h
        steps += 1
        dev = _deviation(tri, r, spec)
        err = float(np.max(np.abs(dev)))

        if not genuine:
            now_inside = geometry.admissible(tri, r)[0]
            if now_inside != inside:
                if now_inside:
                    events.append(FlowEvent(t, EventKind.REENTERED_ADMISSIBLE, None))
                else:
                    bad = geometry.admissible(tri, r)[1]
                    events.append(FlowEvent(t, EventKind.LEFT_ADMISSIBLE, int(bad[0])))
                record(t, r, err, now_inside)
                inside = now_inside

        if np.min(r) < EPS_RADIUS:
            record(t, r, err, inside)
            events.append(
                FlowEvent(t, EventKind.ESSENTIAL_SINGULARITY, int(np.argmin(r)))
            )
            return finish(r)
        if genuine:
            slack = geometry.triangle_slack(geometry.face_lengths(tri, r))
            if float(np.min(slack)) < EPS_TRI:
                record(t, r, err, inside)
                events.append(
                    FlowEvent(t, EventKind.REMOVABLE_SINGULARITY, int(np.argmin(slack)))
                )
                return finish(r)
        if err < spec.tol:
            record(t, r, err, inside)
            events.append(FlowEvent(t, EventKind.CONVERGED, None))
            return finish(r)
        if steps % sample_every == 0:
            record(t, r, err, inside)

    record(t, r, err, inside)
    events.append(FlowEvent(t, EventKind.HORIZON_REACHED, None))
    return finish(r)


def _classify_stall(tri, r, candidate, k1, h, genuine):
    """Decide what stopped the stepper when halving hit the step floor.

    RK4 stage failures leave candidate as None, so the direction k1 with the
    last attempted step doubles as an always-computable Euler probe of where
    the flow was trying to go.
    """
    probes = []
    if candidate is not None and np.all(np.isfinite(candidate)):
        probes.append(candidate)
    if np.all(np.isfinite(k1)):
        probes.append(r + max(h, MIN_STEP) * k1)

    for probe in probes:
        if np.any(probe < EPS_RADIUS):
            return FlowEvent(0.0, EventKind.ESSENTIAL_SINGULARITY, int(np.argmin(probe)))
    if np.any(r < EPS_RADIUS * (1.0 + 1e-6)):
        return FlowEvent(0.0, EventKind.ESSENTIAL_SINGULARITY, int(np.argmin(r)))
    if genuine:
        for probe in probes:
            if np.all(probe > 0.0) and np.all(probe <= RADIUS_CAP):
                ok, bad = geometry.admissible(tri, probe)
                if not ok:
                    return FlowEvent(0.0, EventKind.REMOVABLE_SINGULARITY, int(bad[0]))
        slack = geometry.triangle_slack(geometry.face_lengths(tri, r))
        if float(np.min(slack)) < 1e3 * EPS_TRI:
            return FlowEvent(0.0, EventKind.REMOVABLE_SINGULARITY, int(np.argmin(slack)))
    return None


# -- evolution identity -------------------------------------------------------------


def check_evolution_identity(tri, r, spec: FlowSpec) -> float:
    """Residual between the two sides of the curvature evolution identity.

    For the normalized Euclidean flow (u = ln r^2):
        dR_i/dt = Delta R_i + R_i (R_i - R_av),
    the left side computed by chaining dR/du through the curvature Jacobian
    along the flow direction. The alpha-normalized variant uses u = ln r
    (Jacobian 2L) and reads
        dR_alpha/dt = Delta_alpha R_alpha + alpha R_alpha (R_alpha - R_av).
    """
    if spec.kind not in (FlowKind.NORMALIZED_EUCLIDEAN, FlowKind.ALPHA_NORMALIZED):
        raise ValueError("the evolution identity applies to normalized kinds")
    if tri.geometry is not Geometry.EUCLIDEAN:
        raise ValueError("the evolution identity is stated for Euclidean surfaces")
    r = np.asarray(r, dtype=float)
    alpha = spec.effective_alpha
    K = angle_deficits(tri, r)
    s = geometry.s_of_r(r, tri.geometry)
    R = K / s**alpha
    R_av = average_curvature(tri, r, alpha)
    L = curvature_jacobian(tri, r).matrix
    u_dot = R_av - R

    if spec.kind is FlowKind.NORMALIZED_EUCLIDEAN:
        # dR_i/du_j = L_ij / r_i^2 - R_i delta_ij in the ln r^2 convention
        jac = L / s[:, None] ** 2 - np.diag(R)
        lhs = jac @ u_dot
        rhs = -(L @ R) / s**2 + R * (R - R_av)
    else:
        # ln r convention: the Jacobian doubles and d(s^-alpha)/du = -alpha s^-alpha
        jac = 2.0 * L / s[:, None] ** alpha - alpha * np.diag(R)
        lhs = jac @ u_dot
        rhs = -(2.0 * L @ R) / s**alpha + alpha * R * (R - R_av)
    return float(np.max(np.abs(lhs - rhs)))
