#!/usr/bin/env python3
"""Step-halving study of the geodesic integrator.

Prints the endpoint differences |x(steps) - x(2*steps)| for a sphere
geodesic; each halving should shrink the difference by roughly 16x
(fourth-order method).  The flat corpus connections have polynomial
geodesics that the integrator reproduces exactly, so the sphere is the
interesting case.

Usage:
    python3 scripts/rk4_convergence.py [--spec sphere2] [--x0 1.0,1.0] [--v 0.35,0.5]
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from bornbundle import corpus
from bornbundle.charts import geodesic_integrate


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--spec", default="sphere2")
    parser.add_argument("--x0", default="1.0,1.0")
    parser.add_argument("--v", default="0.35,0.5")
    parser.add_argument("--max-steps", type=int, default=256)
    args = parser.parse_args()

    spec = corpus.example(args.spec)
    x0 = tuple(float(c) for c in args.x0.split(","))
    v = tuple(float(c) for c in args.v.split(","))

    steps = 4
    prev = geodesic_integrate(spec, x0, v, steps)
    print(f"{'steps':>8s} {'|x(n) - x(2n)|':>16s} {'contraction':>12s}")
    last_diff = None
    while steps < args.max_steps:
        nxt = geodesic_integrate(spec, x0, v, steps * 2)
        diff = float(np.max(np.abs(prev - nxt)))
        ratio = f"{last_diff / diff:10.1f}x" if last_diff and diff > 0 else ""
        print(f"{steps:8d} {diff:16.3e} {ratio:>12s}")
        last_diff = diff
        prev = nxt
        steps *= 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
