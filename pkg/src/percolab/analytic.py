"""Closed forms and root finding: tree critical density, the Keller-Kindler
bound, the witness fraction and the lattice p_c reference curve."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

GRID_POINTS = 1024
TOL = 1e-12
INVGOLD = (math.sqrt(5) - 1) / 2


def _check_dk(d: int, k: int):
    if d < 3 or not 2 <= k <= d - 1:
        raise ValueError(f"need d >= 3 and 2 <= k <= d-1, got d={d}, k={k}")


def binomial_cdf_below(n: int, q, k: int):
    """``P(Binomial(n, q) < k)``; exact for ``Fraction`` inputs."""
    return sum(math.comb(n, j) * q**j * (1 - q) ** (n - j) for j in range(min(k, n + 1)))


def R(y, d: int, k: int):
    """``y / P(Binomial(d-1, 1-y) < k)``."""
    _check_dk(d, k)
    if not 0 < y <= 1:
        raise ValueError(f"y must lie in (0, 1], got {y}")
    return y / binomial_cdf_below(d - 1, 1 - y, k)


def _R_reduced(y: float, d: int, k: int) -> float:
    # R with the factor y cancelled: every term of the tail carries y^(d-1-j) with
    # j <= k-1 <= d-2. Finite at y = 0 exactly when k = d-1.
    s = 0.0
    for j in range(k):
        s += math.comb(d - 1, j) * (1 - y) ** j * y ** (d - 2 - j)
    return math.inf if s == 0 else 1.0 / s


@dataclass(frozen=True)
class TreeCritical:
    d: int
    k: int
    y_star: float | None
    p_star: float

    def to_dict(self):
        return asdict(self)


def _golden(fun, a: float, b: float, tol: float = TOL) -> float:
    c = b - INVGOLD * (b - a)
    e = a + INVGOLD * (b - a)
    fc, fe = fun(c), fun(e)
    while b - a > tol:
        if fc < fe:
            b, e, fe = e, c, fc
            c = b - INVGOLD * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, e, fe
            e = a + INVGOLD * (b - a)
            fe = fun(e)
    return (a + b) / 2


def _slope_sign_part(y: float, d: int, k: int) -> float:
    # R'(y) has the sign of S(y) - y S'(y), S(y) = P(Binomial(d-1, 1-y) < k),
    # S'(y) = (d-1) C(d-2, k-1) (1-y)^(k-1) y^(d-1-k).
    s = binomial_cdf_below(d - 1, 1 - y, k)
    return s - (d - 1) * math.comb(d - 2, k - 1) * (1 - y) ** (k - 1) * y ** (d - k)


def p_star(d: int, k: int) -> TreeCritical:
    """``1 - inf_{0<y<1} R(y)`` by grid bracketing and golden-section search.

    The golden-section minimiser is only good to about sqrt(machine eps) in y,
    so an interior minimiser is then polished by bisection on the sign of R'.
    ``y_star`` is None when the infimum sits at the boundary ``y -> 0``
    (the case ``k = d-1``).
    """
    _check_dk(d, k)
    fun = lambda y: _R_reduced(y, d, k)  # noqa: E731
    grid = np.linspace(0.0, 1.0, GRID_POINTS + 1)
    vals = np.array([fun(y) for y in grid])
    i = int(np.argmin(vals))
    lo, hi = float(grid[max(i - 1, 0)]), float(grid[min(i + 1, GRID_POINTS)])
    y = _golden(fun, lo, hi)
    if y <= 2 * TOL or float(vals[0]) <= fun(y):
        return TreeCritical(d, k, None, 1.0 - float(vals[0]))
    lo, hi = max(lo, TOL), min(hi, 1.0)
    if _slope_sign_part(lo, d, k) < 0 < _slope_sign_part(hi, d, k):
        while hi - lo > TOL:
            mid = (lo + hi) / 2
            if _slope_sign_part(mid, d, k) < 0:
                lo = mid
            else:
                hi = mid
        y = (lo + hi) / 2
    return TreeCritical(d, k, y, 1.0 - fun(y))


def p_star_closed_form(d: int, k: int) -> float:
    """Known closed forms: ``k = 2, d > 3`` and ``k = d - 1``."""
    if k == d - 1:
        return 1.0 - 1.0 / (d - 1)
    if k == 2 and d > 3:
        return 1.0 - (d - 2) ** (2 * d - 5) / ((d - 1) ** (d - 2) * (d - 3) ** (d - 3))
    raise ValueError(f"no closed form for d={d}, k={k}")


def y_star_closed_form(d: int) -> float:
    """Interior minimiser for ``k = 2, d > 3``."""
    if d <= 3:
        raise ValueError("closed form needs d > 3")
    return (d - 1) * (d - 3) / (d - 2) ** 2


def y_hat(p: float, d: int, k: int) -> float:
    """Larger root of ``R(y) = 1 - p`` in (0, 1), for ``0 <= p <= p*``.

    At ``p = p*`` (within 1e-12) the double root ``y*`` is returned.
    """
    if p < 0:
        raise ValueError("p must be nonnegative")
    tc = p_star(d, k)
    if p > tc.p_star + TOL:
        raise ValueError(f"p={p} exceeds p*={tc.p_star}: R(y) = 1 - p has no root in (0, 1)")
    lo = tc.y_star if tc.y_star is not None else 0.0
    if p >= tc.p_star - TOL:
        return lo
    target = 1.0 - p
    hi = 1.0
    while hi - lo > TOL:
        mid = (lo + hi) / 2
        if _R_reduced(mid, d, k) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def h(y, p, d: int, k: int):
    """``(1 - p) P(Binomial(d, 1 - y) < k)``."""
    if not 0 < y <= 1:
        raise ValueError(f"y must lie in (0, 1], got {y}")
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return (1 - p) * binomial_cdf_below(d, 1 - y, k)


@dataclass(frozen=True)
class KKBoundReport:
    p: float
    eps: float
    B: float
    alpha: float
    W: float
    bound: float

    def to_dict(self):
        return asdict(self)


def hypercontractivity_B(p: float) -> float:
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    t = (1 - p) / p
    lt = math.log(t)
    if abs(lt) < 1e-6:
        # removable singularity at p = 1/2; (t - 1/t)/(2 ln t) = sinh(u)/u, u = ln t
        return 1.0 + lt * lt / 6
    return (t - 1 / t) / (2 * lt)


def kk_alpha(eps: float, p: float) -> float:
    c = math.log(2 * hypercontractivity_B(p) * math.e)
    return 1.0 / (eps + c + 3 * math.log(c))


def kk_bound(W: float, eps: float, p: float) -> KKBoundReport:
    """Keller-Kindler upper bound ``(6e+1) W^(alpha(eps) eps)`` on ``Cov(f(w), f(w^eps))``."""
    if W < 0:
        raise ValueError("W must be nonnegative")
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    B = hypercontractivity_B(p)
    alpha = kk_alpha(eps, p)
    bound = (6 * math.e + 1) * W ** (alpha * eps)
    return KKBoundReport(p, eps, B, alpha, W, bound)


def kk_weight(p: float, influences) -> float:
    """``p(1-p) * sum_i I_i^2``."""
    return p * (1 - p) * sum(float(x) ** 2 for x in influences)


def witness_fraction(h_e, d: int, k: int):
    """Lower bound ``c`` on ``|A|/|V|`` for any initially occupied set ``A`` that fills
    a ``d``-regular graph with edge Cheeger constant ``h_e``."""
    if not d < 2 * k + h_e:
        raise ValueError(f"bound inapplicable: needs d < 2k + h_E, got d={d}, 2k + h_E={2 * k + h_e}")
    if isinstance(h_e, Rational):
        return Fraction(h_e + 2 * k - d, 4 * k)
    return (h_e + 2 * k - d) / (4 * k)


def iterated_log(x: float, times: int) -> float:
    for _ in range(times):
        if x <= 0:
            raise ValueError("iterated logarithm undefined: argument became nonpositive")
        x = math.log(x)
    return x


def pc_box_reference(n: float, d: int, k: int, lam: float) -> float:
    """``(lam / log_(k-1) n)^(d-k+1)``; a reference curve with a user-chosen constant."""
    if not 2 <= k <= d:
        raise ValueError(f"need 2 <= k <= d, got d={d}, k={k}")
    ell = iterated_log(float(n), k - 1)
    if ell <= 0:
        raise ValueError(f"iterated log of n={n} is nonpositive")
    return (lam / ell) ** (d - k + 1)
