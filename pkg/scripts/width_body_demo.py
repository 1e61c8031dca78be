"""Build constant-width bodies for a norm and report widths, the curvature identity and umbilics.

    python3 scripts/width_body_demo.py [--t 0.3] [--width 1.5]
"""

import argparse

import numpy as np

from minkdiff import width
from minkdiff.errors import EpsilonTooLarge
from minkdiff.norm import Norm


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t", type=float, default=0.3, help="l2-l4 blend parameter")
    ap.add_argument("--width", type=float, default=1.5)
    ap.add_argument("--grid", type=int, default=1000)
    args = ap.parse_args()
    norm = Norm.blend(args.t)
    try:
        width.make_width_body(norm, args.width, 10.0)
    except EpsilonTooLarge as err:
        eps_max = err.max_epsilon
    print(f"convexity threshold for the perturbation: epsilon < {eps_max:.4g}")
    for frac in (0.0, 0.25, 0.5, 0.9):
        body = width.make_width_body(norm, args.width, frac * eps_max)
        res = width.verify_body(body, grid=args.grid, n_pairs=100)
        print(f"epsilon={frac * eps_max:8.4f}  width dev={res['width_deviation_max']:.2e}  "
              f"identity={res['identity_residual_max']:.2e}  "
              f"umbilics={res['umbilics']:4d}  paired={res['all_paired']}  "
              f"margin={res['convexity_margin']:.3g}")
    r = np.linalg.norm(body.S(np.eye(3)), axis=1)
    print("support points along the axes at the largest epsilon:", np.round(r, 5))


if __name__ == "__main__":
    main()
