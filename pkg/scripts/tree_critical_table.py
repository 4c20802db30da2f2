"""Table of the tree critical density p*(d, k) and its minimiser y*."""

from percolab.analytic import p_star, p_star_closed_form


def main(max_d: int = 8):
    print(f"{'d':>2} {'k':>2} {'y*':>12} {'p*':>14} {'closed form':>14}")
    for d in range(3, max_d + 1):
        for k in range(2, d):
            tc = p_star(d, k)
            try:
                closed = f"{p_star_closed_form(d, k):14.10f}"
            except ValueError:
                closed = f"{'-':>14}"
            y = f"{tc.y_star:12.9f}" if tc.y_star is not None else f"{'boundary':>12}"
            print(f"{d:>2} {k:>2} {y} {tc.p_star:14.10f} {closed}")


if __name__ == "__main__":
    main()
