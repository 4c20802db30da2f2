"""Boolean functions on {-1,1}^m and exact small-instance calculations.

Configuration index convention: bit ``v`` of an integer ``x`` in
``range(2**m)`` is input ``v`` (1 = +1). Exact results use ``Fraction``
arithmetic whenever the densities passed in are rational.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from percolab import _kernels
from percolab.bootstrap import BitConfig
from percolab.topology import GraphTopology

SINGLE_CAP = 20
JOINT_CAP = 13
REVEAL_EXACT_CAP = 12


def as_number(x):
    """Parse ``"1/2"``-style strings and keep rationals exact; other reals become floats."""
    if isinstance(x, str):
        x = Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x)
    return float(x)


def _bits_matrix(m: int) -> np.ndarray:
    idx = np.arange(1 << m, dtype=np.int64)
    return ((idx[:, None] >> np.arange(m)) & 1).astype(np.bool_)


# -- function specs -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BootstrapOccupation:
    graph: GraphTopology
    k: int

    @property
    def arity(self) -> int:
        return self.graph.vertex_count

    def key(self) -> str:
        return f"bootstrap[{self.graph.kind.describe()};k={self.k}]"

    def evaluate_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = np.ascontiguousarray(rows, dtype=np.bool_)
        return _kernels.complete_batch(self.graph.indptr, self.graph.indices, self.k, rows)

    def truth_table(self) -> np.ndarray:
        g = self.graph
        return _kernels.truth_table(g.indptr, g.indices, self.k, g.vertex_count)


@dataclass(frozen=True)
class Majority:
    m: int

    @property
    def arity(self) -> int:
        return self.m

    def key(self) -> str:
        return f"majority[{self.m}]"

    def evaluate_rows(self, rows):
        rows = np.asarray(rows, dtype=np.bool_)
        # sign(0) counts as +1
        return 2 * rows.sum(axis=1) >= self.m

    def truth_table(self):
        return self.evaluate_rows(_bits_matrix(self.m))


@dataclass(frozen=True)
class Tribes:
    """OR of AND over ``2**k`` disjoint tribes of ``k`` bits each."""

    k: int

    @property
    def arity(self) -> int:
        return self.k * 2**self.k

    def key(self) -> str:
        return f"tribes[{self.k}]"

    def evaluate_rows(self, rows):
        rows = np.asarray(rows, dtype=np.bool_)
        tribes = rows.reshape(rows.shape[0], 2**self.k, self.k)
        return tribes.all(axis=2).any(axis=1)

    def truth_table(self):
        return self.evaluate_rows(_bits_matrix(self.arity))


@dataclass(frozen=True, eq=False)
class GeneralizedMajority:
    """``sign(sum_i w_i (x_i - (2p-1)) - s)`` with ``sign(0) = +1``."""

    weights: tuple
    shift: object = 0
    p: object = Fraction(1, 2)

    @classmethod
    def uniform(cls, m: int, shift=0, p=Fraction(1, 2)) -> GeneralizedMajority:
        return cls((1,) * m, shift, p)

    @property
    def arity(self) -> int:
        return len(self.weights)

    def key(self) -> str:
        w = ",".join(str(x) for x in self.weights)
        return f"genmaj[w={w};s={self.shift};p={self.p}]"

    def score_rows(self, rows):
        rows = np.asarray(rows, dtype=np.bool_)
        exact = all(isinstance(v, Rational) for v in (*self.weights, self.shift, self.p))
        if exact:
            w = np.array([Fraction(x) for x in self.weights], dtype=object)
            centre = 2 * Fraction(self.p) - 1
            spins = np.where(rows, 1, -1).astype(object)
            return (spins - centre) @ w - Fraction(self.shift)
        w = np.asarray(self.weights, dtype=float)
        spins = np.where(rows, 1.0, -1.0)
        return (spins - (2 * float(self.p) - 1)) @ w - float(self.shift)

    def evaluate_rows(self, rows):
        return np.asarray(self.score_rows(rows) >= 0, dtype=np.bool_)

    def truth_table(self):
        return self.evaluate_rows(_bits_matrix(self.arity))


@dataclass(frozen=True, eq=False)
class Padded:
    """``inner`` on its first bits, ignoring ``extra`` trailing dummy bits."""

    inner: object
    extra: int

    @property
    def arity(self) -> int:
        return self.inner.arity + self.extra

    def key(self) -> str:
        return f"padded[{self.inner.key()};+{self.extra}]"

    def evaluate_rows(self, rows):
        rows = np.asarray(rows, dtype=np.bool_)
        return self.inner.evaluate_rows(rows[:, : self.inner.arity])

    def truth_table(self):
        # low bits are the inner function's inputs
        return np.tile(self.inner.truth_table(), 2**self.extra)


def evaluate(fspec, omega: BitConfig) -> int:
    if len(omega) != fspec.arity:
        raise ValueError(f"{fspec.key()} takes {fspec.arity} bits, got {len(omega)}")
    return 1 if bool(fspec.evaluate_rows(omega.occupied[None, :])[0]) else -1


# -- exact enumeration ----------------------------------------------------------


@dataclass(frozen=True)
class ExactResult:
    value: object
    enumeration_size: int


@dataclass(frozen=True)
class InfluenceResult:
    influences: list
    total: object
    sum_squares: object
    enumeration_size: int


@dataclass(frozen=True)
class NoiseCorrelationResult:
    cov: object
    corr: object
    variance: object
    enumeration_size: int

    @property
    def value(self):
        return self.corr


def _popcounts(m: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << m, dtype=np.uint64)).astype(np.int64)


def weighted_sum(counts, p, m: int):
    """``sum_a counts[a] p^a (1-p)^(m-a)``: the probability of a set of configurations
    given how many of its members have each number of occupied bits."""
    q = 1 - p
    return sum(int(c) * p**a * q ** (m - a) for a, c in enumerate(counts) if c)


def polynomial_derivative(counts, p, m: int):
    """d/dp of :func:`weighted_sum` at ``p``."""
    q = 1 - p
    total = 0
    for a, c in enumerate(counts):
        if not c:
            continue
        c = int(c)
        if a:
            total += c * a * p ** (a - 1) * q ** (m - a)
        if m - a:
            total -= c * (m - a) * p**a * q ** (m - a - 1)
    return total


def _table(fspec, cap: int) -> np.ndarray:
    if fspec.arity > cap:
        raise ValueError(f"exact enumeration capped at {cap} bits, {fspec.key()} has {fspec.arity}")
    return np.asarray(fspec.truth_table(), dtype=np.bool_)


def success_counts(fspec) -> np.ndarray:
    """Number of configurations with value +1, indexed by how many bits are +1."""
    table = _table(fspec, SINGLE_CAP)
    return np.bincount(_popcounts(fspec.arity)[table], minlength=fspec.arity + 1)


def exact_probability(fspec, p) -> ExactResult:
    p = as_number(p)
    return ExactResult(weighted_sum(success_counts(fspec), p, fspec.arity), 2**fspec.arity)


def exact_success_prob(g: GraphTopology, k: int, p) -> ExactResult:
    """Probability of complete occupation, by enumerating all ``2**|V|`` configurations."""
    return exact_probability(BootstrapOccupation(g, k), p)


def exact_pivotal_counts(fspec) -> np.ndarray:
    """``counts[i, a]``: configurations with ``a`` bits +1 in which bit ``i`` is pivotal."""
    m = fspec.arity
    table = _table(fspec, SINGLE_CAP)
    pc = _popcounts(m)
    idx = np.arange(1 << m, dtype=np.int64)
    out = np.zeros((m, m + 1), dtype=np.int64)
    for i in range(m):
        piv = table != table[idx ^ (1 << i)]
        out[i] = np.bincount(pc[piv], minlength=m + 1)
    return out


def exact_influences(fspec, p) -> InfluenceResult:
    p = as_number(p)
    m = fspec.arity
    infl = [weighted_sum(row, p, m) for row in exact_pivotal_counts(fspec)]
    return InfluenceResult(infl, sum(infl), sum(x * x for x in infl), 2**m)


def exact_expected_pivotal_size(fspec, p):
    return exact_influences(fspec, p).total


def _noise_apply(values: np.ndarray, m: int, p, eps) -> np.ndarray:
    # One application of the per-bit kernel K(x -> x') = (1-eps)[x'=x] + eps P_p(x')
    # along every axis of the 2x...x2 table.
    t = values.reshape((2,) * m)
    q = 1 - p
    for axis in range(m):
        lo = np.take(t, 0, axis=axis)
        hi = np.take(t, 1, axis=axis)
        fresh = eps * (q * lo + p * hi)
        t = np.stack([(1 - eps) * lo + fresh, (1 - eps) * hi + fresh], axis=axis)
    return t.reshape(-1)


def _product_weights(m: int, p) -> np.ndarray:
    w = np.array([1 - p, p], dtype=object if isinstance(p, Fraction) else float)
    out = np.ones(1, dtype=w.dtype)
    for _ in range(m):
        out = np.multiply.outer(w, out).reshape(-1)
    return out


def exact_noise_correlation(fspec, p, eps) -> NoiseCorrelationResult:
    """Exact ``Cov`` and ``Corr`` of ``(f(w), f(w^eps))``."""
    p, eps = as_number(p), as_number(eps)
    m = fspec.arity
    table = _table(fspec, JOINT_CAP)
    exact = isinstance(p, Fraction) and isinstance(eps, Fraction)
    dtype = object if exact else float
    if exact:
        f = np.where(table, Fraction(1), Fraction(-1)).astype(object)
        weights = _product_weights(m, p)
    else:
        p, eps = float(p), float(eps)
        f = np.where(table, 1.0, -1.0)
        weights = _product_weights(m, p).astype(float)
    smoothed = _noise_apply(f.astype(dtype), m, p, eps)
    mean = (weights * f).sum()
    second = (weights * f * smoothed).sum()
    var = 1 - mean * mean
    cov = second - mean * mean
    if var == 0:
        raise ValueError(f"{fspec.key()} is constant at p={p}; correlation undefined")
    return NoiseCorrelationResult(cov, cov / var, var, 4**m)


# -- revealment -------------------------------------------------------------------


@dataclass(frozen=True)
class RevealmentResult:
    delta: object
    expected_queries: object
    per_bit: list = field(default_factory=list)
    exact: bool = True
    trials: int | None = None


def _run_tribes_algorithm(bits, tribe_order, bit_orders, k):
    queried = []
    for t in tribe_order:
        for j in bit_orders[t]:
            i = t * k + j
            queried.append(i)
            if not bits[i]:
                break
        else:
            return queried
    return queried


def tribes_revealment(k: int, *, randomize: bool = True, exact: bool | None = None,
                      trials: int = 100_000, seed: int = 0) -> RevealmentResult:
    """Revealment of the tribe-by-tribe query algorithm at p = 1/2.

    Tribes are visited in uniformly random order and, inside a tribe, bits are
    read in uniformly random order until a -1 appears or the tribe is all +1.
    With ``randomize=False`` both orders are the identity.
    """
    if k < 1:
        raise ValueError("tribe size must be positive")
    tribes = 2**k
    m = k * tribes
    if exact is None:
        exact = m <= REVEAL_EXACT_CAP
    if exact and m > REVEAL_EXACT_CAP:
        raise ValueError(f"exact revealment enumerates configurations x orderings; capped at {REVEAL_EXACT_CAP} bits")

    if not randomize:
        orders = [(tuple(range(tribes)), [tuple(range(k))] * tribes)]
    elif exact:
        orders = [
            (t_order, list(b_orders))
            for t_order in itertools.permutations(range(tribes))
            for b_orders in itertools.product(itertools.permutations(range(k)), repeat=tribes)
        ]
    else:
        orders = None

    if orders is not None and exact:
        hits = np.zeros(m, dtype=np.int64)
        runs = 0
        for bits in itertools.product((False, True), repeat=m):
            for t_order, b_orders in orders:
                for i in _run_tribes_algorithm(bits, t_order, b_orders, k):
                    hits[i] += 1
                runs += 1
        per_bit = [Fraction(int(h), runs) for h in hits]
        return RevealmentResult(max(per_bit), sum(per_bit), per_bit, True, None)

    rng = np.random.default_rng(seed)
    hits = np.zeros(m, dtype=np.int64)
    for _ in range(trials):
        bits = rng.random(m) < 0.5
        if orders is None:
            t_order = rng.permutation(tribes)
            b_orders = [rng.permutation(k) for _ in range(tribes)]
        else:
            t_order, b_orders = orders[0]
        for i in _run_tribes_algorithm(bits, t_order, b_orders, k):
            hits[i] += 1
    per_bit = (hits / trials).tolist()
    expected = float(hits.sum() / trials)
    # every bit is equally likely to be read once the orders are random
    delta = expected / m if randomize else max(per_bit)
    return RevealmentResult(delta, expected, per_bit, False, trials)


# -- golden files -----------------------------------------------------------------


def _format(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def write_golden(path, entries: dict) -> None:
    """Write ``{key: exact value}`` as JSON with values rendered ``"num/den"``."""
    data = {key: _format(v) for key, v in sorted(entries.items())}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_golden(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return {key: Fraction(v) for key, v in json.load(fh).items()}


def binomial_point(n: int, j: int, p=Fraction(1, 2)):
    """``P(Binomial(n, p) = j)``."""
    return math.comb(n, j) * p**j * (1 - p) ** (n - j)
