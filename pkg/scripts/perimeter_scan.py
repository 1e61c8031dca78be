"""Perimeter of the unit sphere against its curvature bound along the l2-l4 blend.

    python3 scripts/perimeter_scan.py [--steps 6] [--res 32]
"""

import argparse

import numpy as np

from minkdiff.geodesy import perimeter
from minkdiff.norm import Norm


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=6)
    ap.add_argument("--tmax", type=float, default=0.6)
    ap.add_argument("--res", type=int, default=32)
    ap.add_argument("--samples", type=int, default=16)
    args = ap.parse_args()
    print(f"{'t':>6} {'rho':>10} {'girth':>10} {'bound':>10} {'rho/bound':>10}")
    for t in np.linspace(0.0, args.tmax, args.steps):
        r = perimeter(Norm.blend(float(t)), resolution=args.res, n_samples=args.samples)
        print(f"{t:6.3f} {r['rho']:10.5f} {r['girth']:10.5f} {r['bound']:10.5f} "
              f"{r['rho'] / r['bound']:10.5f}")


if __name__ == "__main__":
    main()
