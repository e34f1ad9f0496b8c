"""Command line front end.

Subcommands: validate, curvature, flow, solve, spectrum, example-tetra.
Exit codes: 0 success/converged, 1 I/O failure, 2 invalid input or
precondition failure, 3 singular stop (flow singularity or solver failure),
4 time horizon reached without convergence.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

import numpy as np

from . import tetra
from .curvature import (
    average_curvature,
    curvature,
    gauss_bonnet_residual,
    laplacian_spectrum,
)
from .errors import (
    AdmissibilityError,
    DomainError,
    IntegrationError,
    MeshFormatError,
    SolverError,
    TopologyError,
    WeightError,
)
from .flows import EventKind, FlowKind, FlowSpec, run_flow
from .potential import PotentialQuery, newton_solve, potential_gradient
from .surface import (
    WeightRegime,
    euler_characteristic,
    load_radii,
    load_surface,
    save_radii,
    surface_regime,
    validate_weights,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_SINGULAR = 3
EXIT_HORIZON = 4

_EVENT_EXIT = {
    EventKind.CONVERGED: EXIT_OK,
    EventKind.ESSENTIAL_SINGULARITY: EXIT_SINGULAR,
    EventKind.REMOVABLE_SINGULARITY: EXIT_SINGULAR,
    EventKind.HORIZON_REACHED: EXIT_HORIZON,
}


def _fmt(value) -> str:
    return f"{value:.17g}"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_target(spec, vertex_count):
    """A target is either a number or a path to {"target": [...]} / {"uniform": c}."""
    if spec is None:
        return None
    try:
        return float(spec)
    except ValueError:
        pass
    try:
        data = json.loads(Path(spec).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MeshFormatError(f"{spec}: {exc}") from exc
    if isinstance(data, dict) and "uniform" in data:
        return float(data["uniform"])
    if isinstance(data, dict) and "target" in data:
        target = np.asarray(data["target"], dtype=float)
        if target.shape != (vertex_count,):
            raise MeshFormatError(
                f"target has {target.size} entries for {vertex_count} vertices"
            )
        return target
    raise MeshFormatError(f"{spec}: expected a 'target' or 'uniform' key")


def cmd_validate(args) -> int:
    tri = load_surface(args.mesh)
    regime = WeightRegime(args.regime) if args.regime else surface_regime(args.mesh)
    report = validate_weights(tri, regime)
    verdict = "pass" if report.passed else "fail"
    print(
        f"V={tri.vertex_count} E={tri.edge_count} F={tri.face_count} "
        f"chi={euler_characteristic(tri)} weights:{verdict}"
    )
    for failure in report.failures:
        print(f"  {failure}")
    return EXIT_OK if report.passed else EXIT_INVALID


def cmd_curvature(args) -> int:
    tri = load_surface(args.mesh)
    r = load_radii(args.radii, tri.vertex_count)
    field = curvature(tri, r, alpha=args.alpha, use_extension=args.extended)
    lines = ["i,r_i,K_i,R_i,R_alpha_i"]
    for i in range(tri.vertex_count):
        lines.append(
            f"{i},{_fmt(r[i])},{_fmt(field.K[i])},{_fmt(field.R[i])},{_fmt(field.R_alpha[i])}"
        )
    residual = gauss_bonnet_residual(tri, r, extended=args.extended)
    lines.append(f"# gauss_bonnet_residual = {_fmt(residual)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _build_flow_spec(args, tri):
    target = _load_target(args.target, tri.vertex_count)
    return FlowSpec(
        kind=FlowKind(args.kind),
        alpha=args.alpha,
        target=target,
        step=args.dt,
        t_max=args.tmax,
        tol=args.tol,
    )


def _run_one_flow(mesh_path, radii_path, flow_args, out_dir):
    """Worker for serial and pooled sweeps; returns this run's exit code."""
    tri = load_surface(mesh_path)
    r0 = load_radii(radii_path, tri.vertex_count)
    spec = _build_flow_spec(flow_args, tri)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        trace, final = run_flow(tri, r0, spec)
    except IntegrationError as exc:
        if exc.trace is not None:
            exc.trace.write_csv(out / "trace.csv")
            exc.trace.write_events(out / "events.json")
        print(f"{radii_path}: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    trace.write_csv(out / "trace.csv")
    trace.write_events(out / "events.json")
    save_radii(out / "final_radii.json", final.radii)
    terminal = trace.terminal_event()
    print(f"{radii_path}: {terminal.kind.value} at t={terminal.t:.6g}")
    return _EVENT_EXIT[terminal.kind]


def cmd_flow(args) -> int:
    out_root = Path(args.out) if args.out else Path("flow_out")
    if len(args.radii) == 1:
        return _run_one_flow(args.mesh, args.radii[0], args, out_root)

    runs = [(path, out_root / Path(path).stem) for path in args.radii]
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(
                pool.map(
                    _run_one_flow,
                    [args.mesh] * len(runs),
                    [path for path, _ in runs],
                    [args] * len(runs),
                    [subdir for _, subdir in runs],
                )
            )
    else:
        codes = [
            _run_one_flow(args.mesh, path, args, subdir) for path, subdir in runs
        ]
    return max(codes)


def cmd_solve(args) -> int:
    tri = load_surface(args.mesh)
    r0 = load_radii(args.radii, tri.vertex_count)
    target = _load_target(args.target, tri.vertex_count)
    if target is None:
        # natural default for Euclidean solves; hyperbolic needs --target
        target = average_curvature(tri, r0, alpha=args.alpha)
    metric = newton_solve(tri, r0, target, alpha=args.alpha, tol=args.tol)
    query = PotentialQuery(
        u0=metric.u, u=metric.u, target=target, alpha=args.alpha, geometry=tri.geometry
    )
    grad = potential_gradient(tri, metric.u, query)
    print("r = " + " ".join(_fmt(v) for v in metric.radii))
    print(f"grad_norm = {_fmt(float(np.max(np.abs(grad))))}")
    if args.out:
        save_radii(args.out, metric.radii)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    tri = load_surface(args.mesh)
    r = load_radii(args.radii, tri.vertex_count)
    values = laplacian_spectrum(tri, r)
    lines = ["k,eigenvalue"]
    lines += [f"{k},{_fmt(v)}" for k, v in enumerate(values)]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_example_tetra(args) -> int:
    out = Path(args.out) if args.out else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    tetra.write_f_curve(out / "f_curve.csv")
    root = tetra.find_second_root()

    tri = tetra.TetraFamily(1.0).surface()
    spreads = {}
    constants = {}
    for label, x in (("first", 1.0), ("second", root.x0)):
        radii = tetra.TetraFamily(x).radii
        field = curvature(tri, radii)
        spreads[label] = float(np.max(field.R) - np.min(field.R))
        constants[label] = float(np.mean(field.R))

    payload = {
        "first": {"x": 1.0, "residual": tetra.curvature_residual(1.0),
                  "curvature": constants["first"], "spread": spreads["first"]},
        "second": {"x": root.x0, "residual": tetra.curvature_residual(root.x0),
                   "curvature": constants["second"], "spread": spreads["second"]},
    }
    (out / "roots.json").write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")

    print(f"f(1) = {_fmt(tetra.curvature_residual(1.0))}")
    print(f"second root x0 = {_fmt(root.x0)} (admissible sup {_fmt(tetra.X_SUP)})")
    print(f"constant curvature at x0 = {_fmt(constants['second'])}")
    print(f"curvature spread: first {spreads['first']:.3e}, second {spreads['second']:.3e}")
    ratio = root.x0 / 1.0
    print(f"radii ratio r_1/r_0: first 1, second {_fmt(ratio)} (not proportional)")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idcurv",
        description="Curvature and Ricci flow for inversive distance circle packings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, radii="single"):
        p.add_argument("mesh", help="surface JSON file")
        if radii == "single":
            p.add_argument("--radii", required=True, help="radii JSON file")
        elif radii == "many":
            p.add_argument("--radii", required=True, nargs="+",
                           help="one radii file, or several for a sweep")

    p = sub.add_parser("validate", help="check topology and weight regime")
    p.add_argument("mesh")
    p.add_argument("--regime", choices=[r.value for r in WeightRegime])
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("curvature", help="per-vertex curvature report")
    common(p)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--extended", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("flow", help="integrate a combinatorial Ricci flow")
    common(p, radii="many")
    p.add_argument("--kind", required=True, choices=[k.value for k in FlowKind])
    p.add_argument("--target", help="number, or JSON file with 'target'/'uniform'")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--tmax", type=float, default=200.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", help="output directory (default flow_out)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("solve", help="Newton solve for prescribed curvature")
    common(p)
    p.add_argument("--target", help="number or JSON file; defaults to the average")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--tol", type=float, default=1e-11)
    p.add_argument("--out", help="write the solved radii here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("spectrum", help="eigenvalues of the curvature Jacobian pencil")
    common(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("example-tetra", help="two constant-curvature packings on one surface")
    p.add_argument("--out", help="output directory (default .)")
    p.set_defaults(func=cmd_example_tetra)

    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, MeshFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (TopologyError, WeightError, AdmissibilityError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR


if __name__ == "__main__":
    sys.exit(main())
