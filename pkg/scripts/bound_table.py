"""Tabulate both sample-complexity bounds over a small (w, eta) sweep."""

import math

from qeclipse.bounds import prop1_m, prop2_m


def main():
    n, sigma, r = 64, 8.0, 2.0
    print("w,eta,prop1_m,prop2_m(delta=1),prop2_m(delta=4),ratio(delta=1)")
    for w in (0.5, 1.0, 2.0, 4.0, 8.0):
        for eta in (0.01, 0.1, 0.5):
            a = prop1_m(w, eta)
            b1 = prop2_m(w, n, 1.0, sigma, r, eta, log_arg_cap=1e6)
            b4 = prop2_m(w, n, 4.0, sigma, r, eta, log_arg_cap=1e6)
            print(f"{w:g},{eta:g},{a},{b1},{b4},{b1 / a:.3f}")
    print(f"# prop1_m(1, e^-2) = {prop1_m(1.0, math.exp(-2.0))}")


if __name__ == "__main__":
    main()
