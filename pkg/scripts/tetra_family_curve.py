"""Trace the one-parameter tetrahedron family and its two special packings.

The family (1, x, x, x) on the weight-2 tetrahedron has constant R-curvature
exactly where a one-variable residual vanishes. The script samples that
residual over [lo, hi], locates the second root by bisection, verifies the
constant-curvature property of both packings, and writes the curve so it can
be plotted.

Usage:
    python3 scripts/tetra_family_curve.py
    python3 scripts/tetra_family_curve.py --lo 0.5 --hi 7.8 --samples 2001
    python3 scripts/tetra_family_curve.py --out-dir /tmp/tetra
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from idcurv import (
    TetraFamily,
    X_SUP,
    curvature,
    curvature_residual,
    f_curve,
    find_second_root,
    tetrahedron,
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lo", type=float, default=0.5)
    parser.add_argument("--hi", type=float, default=8.0)
    parser.add_argument("--samples", type=int, default=751)
    parser.add_argument("--out-dir", type=Path, default=Path("."))
    args = parser.parse_args(argv)

    if not 0.0 < args.lo < args.hi < X_SUP:
        parser.error(f"need 0 < lo < hi < {X_SUP}")

    curve = f_curve(args.lo, args.hi, args.samples)
    root = find_second_root()
    tri = tetrahedron(weight=2.0)

    print(f"admissible interval of the family: (0, {X_SUP:.12f})")
    print(f"residual at x=1: {curvature_residual(1.0):+.3e}")
    print(f"residual at x=2: {curvature_residual(2.0):+.3e}")
    print(f"second root:     x0 = {root.x0:.15f}")
    print(f"constant R there:     {root.curvature:.15f}")

    for label, radii in (("x=1", np.ones(4)), (f"x={root.x0:.6f}",
                                               TetraFamily(root.x0).radii)):
        R = curvature(tri, radii).R
        print(f"  {label:>12}: R = {R[0]:+.12f}, spread {np.ptp(R):.2e}")

    ratio = TetraFamily(root.x0).radii / np.ones(4)
    print(f"radius ratios between the two packings: {np.round(ratio, 6)}")
    print("the ratios are not constant, so the packings are not proportional")

    args.out_dir.mkdir(parents=True, exist_ok=True)
    curve_path = args.out_dir / "f_curve.csv"
    lines = ["x,f_x"]
    lines += [f"{x:.17g},{y:.17g}" for x, y in curve]
    curve_path.write_text("\n".join(lines) + "\n")

    roots_path = args.out_dir / "roots.json"
    roots_path.write_text(
        json.dumps(
            {
                "first": {"x": 1.0, "residual": curvature_residual(1.0)},
                "second": {
                    "x": root.x0,
                    "residual": curvature_residual(root.x0),
                    "curvature": root.curvature,
                },
            },
            indent=2,
        )
        + "\n"
    )
    print(f"wrote {curve_path} and {roots_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
