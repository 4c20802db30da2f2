"""Transition-window width on random 5-regular graphs, k = 2, for n and 4n."""

import argparse

from percolab.estimator import estimate_window
from percolab.topology import build_random_regular


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[1000, 4000])
    ap.add_argument("--precision", type=float, default=2e-4)
    ap.add_argument("--trials", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()
    widths = []
    for n in args.n:
        g = build_random_regular(n, 5, n + 1)
        w = estimate_window(g, 2, (0.25, 0.75), args.precision, args.trials, args.seed)
        widths.append(w.width)
        flags = [s.degraded for s in w.searches]
        print(f"n={n:6d} p(1/4)={w.p_at_low_level:.5f} p(3/4)={w.p_at_high_level:.5f} "
              f"width={w.width:.5f} degraded={flags}")
    for (a, wa), (b, wb) in zip(zip(args.n, widths), zip(args.n[1:], widths[1:])):
        print(f"width({b})/width({a}) = {wb / wa:.3f}  (sqrt({a}/{b}) = {(a / b) ** 0.5:.3f})")


if __name__ == "__main__":
    main()
