"""Exact noise stability of Majority(9) and Tribes(2) across noise levels.

Prints both the correlation and the covariance of (f(w), f(w^eps)) at p = 1/2.
Tribes(2) is unbalanced (P = 1 - (3/4)^4), so the two normalisations rank the
functions differently at this small size.
"""

from fractions import Fraction

from percolab.boolean_lab import Majority, Padded, Tribes, exact_noise_correlation


def main():
    half = Fraction(1, 2)
    maj, tribes = Majority(9), Padded(Tribes(2), 1)
    print(f"{'eps':>5} {'Corr Maj9':>10} {'Corr Tr2':>10} {'Cov Maj9':>10} {'Cov Tr2':>10}")
    for i in range(1, 10):
        eps = Fraction(i, 10)
        a = exact_noise_correlation(maj, half, eps)
        b = exact_noise_correlation(tribes, half, eps)
        row = [a.corr, b.corr, a.cov, b.cov]
        print(f"{float(eps):5.1f} " + " ".join(f"{float(v):10.4f}" for v in row))


if __name__ == "__main__":
    main()
