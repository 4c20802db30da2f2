"""Rectangle scan on complete configurations of [n]^2 near the critical density."""

import argparse

from percolab.bootstrap import BitConfig, al_rectangle_scan, complete_rows
from percolab.estimator import config_rows, estimate_pc
from percolab.topology import build_lattice


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--scales", type=int, nargs="+", default=[1, 2, 3, 4])
    ap.add_argument("--seed", type=int, default=19)
    args = ap.parse_args()
    g = build_lattice("box", args.n, 2)
    p = estimate_pc(g, 2, 0.5, 0.02, 2000, seed=args.seed, relative=True).p_c_hat
    longest = {ell: [] for ell in args.scales}
    missing = {ell: 0 for ell in args.scales}
    done, start = 0, 0
    while done < args.samples:
        rows = config_rows(g.vertex_count, p, args.seed, start, start + 1000)
        start += 1000
        for row in rows[complete_rows(g, 2, rows)][: args.samples - done]:
            done += 1
            cfg = BitConfig(row)
            for ell in args.scales:
                r = al_rectangle_scan(g, 2, cfg, ell)
                if r is None:
                    missing[ell] += 1
                else:
                    longest[ell].append(r.longest)
    print(f"p = {p:.4f}, {done} complete samples out of {start} drawn")
    for ell in args.scales:
        hist = {m: longest[ell].count(m) for m in sorted(set(longest[ell]))}
        print(f"scale {ell}: none={missing[ell]} longest-side histogram={hist}")


if __name__ == "__main__":
    main()
