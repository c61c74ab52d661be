"""Compare Monte Carlo mean widths of the direction cap with the simple ball bound.

The ratio column shows where the bound is tight and where the width floor of a
single direction takes over (small cap angle times sqrt(n)).
"""

import argparse

import numpy as np

from qeclipse.bounds import ball_width_bound
from qeclipse.geometry import DifferenceBall, mean_width_estimate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("n,sigma_over_r,estimate,stderr,bound,ratio")
    for n in (2, 4, 16, 64, 256):
        for ratio in (0.5, 1, 2, 4, 8, 32, 128):
            c = np.zeros(n)
            c[0] = 1.0 + ratio
            d = DifferenceBall(c, 1.0)
            est, se = mean_width_estimate(d, args.samples, seed=args.seed)
            bound = ball_width_bound(d)
            print(f"{n},{ratio:g},{est:.5f},{se:.5f},{bound:.5f},{est / bound:.3f}")


if __name__ == "__main__":
    main()
