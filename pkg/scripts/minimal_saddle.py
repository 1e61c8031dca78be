"""Minimality residuals of the helicoid and a saddle graph across norms.

    python3 scripts/minimal_saddle.py [--samples 12]
"""

import argparse

from minkdiff import charts
from minkdiff.norm import Norm
from minkdiff.variation import minimal_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=12)
    args = ap.parse_args()
    norms = {"euclidean": Norm.euclidean(), "spheroid(1,1,2)": Norm.ellipsoid(1, 1, 2),
             "ellipsoid(2,1,1)": Norm.ellipsoid(2, 1, 1), "blend(0.3)": Norm.blend(0.3)}
    surfaces = {"helicoid": charts.helicoid(1.0),
                "saddle": charts.graph({"20": 1.0, "02": -1.0})}
    n = args.samples
    print(f"{'surface':>9} {'norm':>17} {'max|H|':>10} {'r_H med':>10} {'r_conf med':>10}")
    for sname, chart in surfaces.items():
        for nname, norm in norms.items():
            r = minimal_scan(chart, norm, n, n)
            print(f"{sname:>9} {nname:>17} {r['max_abs_H']:10.2e} "
                  f"{r['r_H_stats']['median']:10.2e} {r['r_conf_stats']['median']:10.2e}")


if __name__ == "__main__":
    main()
