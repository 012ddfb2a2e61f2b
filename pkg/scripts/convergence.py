"""Observed time-stepping order on the two-mode benchmark cos x1 + cos 2x2."""

import argparse
import math

import numpy as np

from qgalpha import Grid, InitSpec, SimParams, SimState, build, step_ifrk4


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--alpha", type=float, default=0.75)
    ap.add_argument("--amplitude", type=float, default=0.5)
    ap.add_argument("--t-end", type=float, default=1.0)
    ap.add_argument("--dts", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025, 0.0125])
    args = ap.parse_args(argv)

    theta0 = build(InitSpec("two_mode", args.amplitude, (1, 0), (0, 2)), Grid(args.n))
    params = SimParams(alpha=args.alpha)
    sols = []
    for dt in args.dts:
        s = SimState(0.0, theta0)
        for _ in range(round(args.t_end / dt)):
            s = step_ifrk4(s, params, dt)
        sols.append(s.theta.coeffs)
    diffs = [np.abs(a - b).max() for a, b in zip(sols, sols[1:])]
    print(f"{'dt':>10} {'|u_dt - u_dt/2|':>18} {'order':>8}")
    for i, d in enumerate(diffs):
        order = f"{math.log2(diffs[i - 1] / d):8.3f}" if i else " " * 8
        print(f"{args.dts[i]:10.4g} {d:18.3e} {order}")


if __name__ == "__main__":
    main()
