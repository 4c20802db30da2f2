"""Regenerate tests/data/golden.json from the naive enumeration oracles.

The values are computed without touching the fast enumeration code, then
frozen so the test suite compares the library against them exactly.
"""

import sys
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402
from percolab.boolean_lab import write_golden  # noqa: E402
from percolab.topology import build_lattice  # noqa: E402


def occupation(g, k):
    adj = oracles.adjacency(g)
    return lambda w: oracles.naive_complete(adj, k, [i for i, b in enumerate(w) if b])


def tribes2(w):
    return any(all(w[2 * i:2 * i + 2]) for i in range(4))


def main():
    half, p = Fraction(1, 2), Fraction(3, 10)
    box = occupation(build_lattice("box", 2, 2), 2)
    torus = occupation(build_lattice("torus", 3, 2), 2)
    cov, corr = oracles.noise_cov_corr(box, 4, half, half)
    entries = {
        "bootstrap[box n=2 d=2;k=2]|p=1/2|success": oracles.success_probability(box, 4, half),
        "bootstrap[box n=2 d=2;k=2]|p=1/2|influence": oracles.influences(box, 4, half)[0],
        "bootstrap[box n=2 d=2;k=2]|p=1/2|eps=1/2|cov": cov,
        "bootstrap[box n=2 d=2;k=2]|p=1/2|eps=1/2|corr": corr,
        "bootstrap[torus n=3 d=2;k=2]|p=3/10|success": oracles.success_probability(torus, 9, p),
        "bootstrap[torus n=3 d=2;k=2]|p=3/10|influence": oracles.influences(torus, 9, p)[0],
        "tribes[2]|p=1/2|influence": oracles.influences(tribes2, 8, half)[0],
        "tribes-revealment[1]": oracles.tribes_revealment_closed_form(1),
        "tribes-revealment[2]": oracles.tribes_revealment_closed_form(2),
    }
    out = ROOT / "tests" / "data" / "golden.json"
    write_golden(out, entries)
    for key, value in sorted(entries.items()):
        print(f"{key}: {value}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
