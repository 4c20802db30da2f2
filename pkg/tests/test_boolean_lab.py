import math
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from percolab.boolean_lab import (
    BootstrapOccupation,
    GeneralizedMajority,
    Majority,
    Padded,
    Tribes,
    as_number,
    binomial_point,
    evaluate,
    exact_expected_pivotal_size,
    exact_influences,
    exact_noise_correlation,
    exact_probability,
    exact_success_prob,
    polynomial_derivative,
    read_golden,
    success_counts,
    tribes_revealment,
    write_golden,
)
from percolab.bootstrap import BitConfig
from percolab.topology import build_lattice, build_random_regular

GOLDEN = read_golden(Path(__file__).parent / "data" / "golden.json")
HALF = F(1, 2)
BOX2 = build_lattice("box", 2, 2)
TORUS3 = build_lattice("torus", 3, 2)


def spins(*xs):
    return BitConfig.from_spins(np.array(xs))


# -- evaluation ------------------------------------------------------------------------


def test_majority_eval():
    assert evaluate(Majority(3), spins(1, 1, -1)) == 1
    assert evaluate(Majority(3), spins(1, -1, -1)) == -1
    assert evaluate(Majority(2), spins(1, -1)) == 1  # tie counts as +1


def test_tribes_eval():
    first_tribe_full = spins(1, 1, -1, -1, -1, -1, -1, -1)
    assert evaluate(Tribes(2), first_tribe_full) == 1
    assert evaluate(Tribes(2), spins(1, -1, -1, 1, 1, -1, -1, 1)) == -1
    assert Tribes(3).arity == 24


def test_generalized_majority_eval():
    f = GeneralizedMajority((1, 0, 0), 0, HALF)
    for x in [(1, -1, -1), (-1, 1, 1), (1, 1, -1), (-1, -1, 1)]:
        assert evaluate(f, spins(*x)) == x[0]


def test_generalized_majority_shift_and_density():
    # centred at 2p - 1 = -1/2: three -1 bits score -3/2, so a shift of -3/2 makes it a tie (+1)
    f = GeneralizedMajority((1, 1, 1), F(-3, 2), F(1, 4))
    assert evaluate(f, spins(-1, -1, -1)) == 1
    g = GeneralizedMajority((1, 1, 1), F(-3, 2) + F(1, 100), F(1, 4))
    assert evaluate(g, spins(-1, -1, -1)) == -1


def test_bootstrap_eval_and_arity_check():
    f = BootstrapOccupation(BOX2, 2)
    assert evaluate(f, spins(1, -1, -1, 1)) == 1
    assert evaluate(f, spins(1, 1, -1, -1)) == -1
    with pytest.raises(ValueError, match="takes 4 bits"):
        evaluate(f, spins(1, 1, 1))


def test_padded_ignores_extra_bits():
    f = Padded(Majority(3), 2)
    table = f.truth_table()
    assert table.size == 32
    assert evaluate(f, spins(1, 1, -1, -1, -1)) == 1
    inner = Majority(3).truth_table()
    assert all(table[i] == inner[i % 8] for i in range(32))


@pytest.mark.parametrize("f", [Majority(5), Tribes(2), GeneralizedMajority((1, 2, 0, 3), 1, F(1, 3)),
                               BootstrapOccupation(TORUS3, 2), Padded(Tribes(1), 3)], ids=lambda f: f.key())
def test_truth_table_bit_order(f):
    # bit v of the index is input v
    table = f.truth_table()
    for idx in [0, 1, 5, 2**f.arity - 1, 2**f.arity // 3]:
        row = np.array([(idx >> v) & 1 for v in range(f.arity)], dtype=bool)
        assert table[idx] == f.evaluate_rows(row[None, :])[0]


# -- exact success probability -------------------------------------------------------------


def test_box2_success():
    assert exact_success_prob(BOX2, 2, HALF).value == F(7, 16)
    assert exact_success_prob(BOX2, 2, HALF).value == GOLDEN["bootstrap[box n=2 d=2;k=2]|p=1/2|success"]


@pytest.mark.parametrize("p", [F(1, 7), F(1, 2), F(5, 6)])
def test_box2_polynomial(p):
    assert exact_success_prob(BOX2, 2, p).value == 2 * p**2 - p**4


def test_torus3_golden():
    assert exact_success_prob(TORUS3, 2, F(3, 10)).value == GOLDEN["bootstrap[torus n=3 d=2;k=2]|p=3/10|success"]


@pytest.mark.parametrize("g", [BOX2, TORUS3, build_random_regular(10, 3, seed=2)], ids=lambda g: g.kind.describe())
def test_extreme_densities(g):
    assert exact_success_prob(g, 2, 1).value == 1
    assert exact_success_prob(g, 2, 0).value == 0


def test_float_density():
    assert exact_success_prob(BOX2, 2, 0.5).value == pytest.approx(7 / 16, abs=1e-15)
    assert isinstance(exact_success_prob(BOX2, 2, "1/2").value, F)


def test_size_cap():
    with pytest.raises(ValueError, match="capped"):
        exact_success_prob(build_lattice("box", 5, 2), 2, HALF)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**20), p=st.fractions(0, 1, max_denominator=20), k=st.integers(1, 3))
def test_success_matches_oracle(seed, p, k):
    g = build_random_regular(8, 3, seed)
    adj = oracles.adjacency(g)
    f = lambda w: oracles.naive_complete(adj, k, [i for i, b in enumerate(w) if b])  # noqa: E731
    assert exact_success_prob(g, k, p).value == oracles.success_probability(f, 8, p)


# -- influences -----------------------------------------------------------------------------


def test_majority3_influences():
    assert exact_influences(Majority(3), HALF).influences == [HALF] * 3


@pytest.mark.parametrize("n", [3, 5, 7])
def test_majority_influence_formula(n):
    res = exact_influences(Majority(n), HALF)
    assert res.influences == [binomial_point(n - 1, n // 2)] * n


@pytest.mark.parametrize("k", [1, 2])
def test_tribes_influence_formula(k):
    expected = HALF ** (k - 1) * (1 - HALF**k) ** (2**k - 1)
    assert exact_influences(Tribes(k), HALF).influences == [expected] * (k * 2**k)


def test_tribes2_golden():
    assert exact_influences(Tribes(2), HALF).influences[0] == GOLDEN["tribes[2]|p=1/2|influence"] == F(27, 128)


def test_box2_influences():
    res = exact_influences(BootstrapOccupation(BOX2, 2), HALF)
    assert res.influences == [F(3, 8)] * 4
    assert res.sum_squares == F(9, 16)
    assert res.total == F(3, 2)


def test_torus3_influence_golden():
    res = exact_influences(BootstrapOccupation(TORUS3, 2), F(3, 10))
    assert set(res.influences) == {GOLDEN["bootstrap[torus n=3 d=2;k=2]|p=3/10|influence"]}


@settings(max_examples=20, deadline=None)
@given(
    weights=st.lists(st.integers(0, 3), min_size=2, max_size=7),
    p=st.fractions(F(1, 10), F(9, 10), max_denominator=10),
)
def test_influences_match_oracle(weights, p):
    f = GeneralizedMajority(tuple(weights), 0, p)
    m = len(weights)
    ev = lambda w: bool(f.evaluate_rows(np.array([w]))[0])  # noqa: E731
    assert exact_influences(f, p).influences == oracles.influences(ev, m, p)


@pytest.mark.parametrize("f", [BootstrapOccupation(TORUS3, 2), BootstrapOccupation(BOX2, 2), Majority(5), Tribes(2)],
                         ids=lambda f: f.key())
@pytest.mark.parametrize("p", [F(1, 10), F(1, 5), F(3, 10), HALF])
def test_russo_identity(f, p):
    # d/dp P(f = +1) equals the expected number of pivotal bits, for increasing f
    assert polynomial_derivative(success_counts(f), p, f.arity) == exact_expected_pivotal_size(f, p)


# -- noise correlation --------------------------------------------------------------------


def test_box2_noise_golden():
    res = exact_noise_correlation(BootstrapOccupation(BOX2, 2), HALF, HALF)
    assert res.cov == GOLDEN["bootstrap[box n=2 d=2;k=2]|p=1/2|eps=1/2|cov"]
    assert res.corr == GOLDEN["bootstrap[box n=2 d=2;k=2]|p=1/2|eps=1/2|corr"] == F(55, 144)
    assert res.enumeration_size == 256


@pytest.mark.parametrize("f", [Majority(3), BootstrapOccupation(BOX2, 2), Tribes(1)], ids=lambda f: f.key())
@pytest.mark.parametrize("p", [F(1, 3), HALF])
def test_noise_endpoints(f, p):
    assert exact_noise_correlation(f, p, 0).corr == 1
    assert exact_noise_correlation(f, p, 1).corr == 0


@pytest.mark.parametrize("f", [Majority(3), BootstrapOccupation(BOX2, 2)], ids=lambda f: f.key())
def test_noise_monotone_in_eps(f):
    grid = [F(i, 10) for i in range(11)]
    vals = [exact_noise_correlation(f, HALF, e).corr for e in grid]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


@settings(max_examples=15, deadline=None)
@given(weights=st.lists(st.integers(-2, 3), min_size=1, max_size=5),
       p=st.fractions(F(1, 10), F(9, 10), max_denominator=10),
       eps=st.fractions(0, 1, max_denominator=10))
def test_noise_matches_double_enumeration(weights, p, eps):
    f = GeneralizedMajority(tuple(weights), F(1, 3), p)
    ev = lambda w: bool(f.evaluate_rows(np.array([w]))[0])  # noqa: E731
    table = f.truth_table()
    if table.all() or not table.any():
        with pytest.raises(ValueError, match="constant"):
            exact_noise_correlation(f, p, eps)
        return
    res = exact_noise_correlation(f, p, eps)
    cov, corr = oracles.noise_cov_corr(ev, len(weights), p, eps)
    assert (res.cov, res.corr) == (cov, corr)
    assert abs(res.cov) <= res.variance


def test_noise_float_path():
    exact = exact_noise_correlation(BootstrapOccupation(BOX2, 2), HALF, HALF).corr
    approx = exact_noise_correlation(BootstrapOccupation(BOX2, 2), 0.5, 0.5).corr
    assert approx == pytest.approx(float(exact), abs=1e-14)


def test_noise_joint_cap():
    with pytest.raises(ValueError, match="capped"):
        exact_noise_correlation(Majority(15), HALF, HALF)


def test_majority9_vs_padded_tribes_values():
    eps = F(1, 5)
    maj = exact_noise_correlation(Majority(9), HALF, eps)
    tribes = exact_noise_correlation(Padded(Tribes(2), 1), HALF, eps)
    assert maj.corr == F(207420889, 320000000)
    assert tribes.corr == F(524564128, 791015625)
    # padding does not change the value
    assert exact_noise_correlation(Tribes(2), HALF, eps).corr == tribes.corr


# -- revealment --------------------------------------------------------------------------


def test_revealment_k1():
    res = tribes_revealment(1)
    assert res.exact and res.delta == F(3, 4) == GOLDEN["tribes-revealment[1]"]
    assert res.per_bit == [F(3, 4)] * 2


def test_revealment_k2_exact():
    res = tribes_revealment(2)
    assert res.delta == GOLDEN["tribes-revealment[2]"] == oracles.tribes_revealment_closed_form(2)
    assert res.delta == res.expected_queries / 8


def test_revealment_fixed_order():
    assert tribes_revealment(1, randomize=False).delta == 1


def test_revealment_decreasing_in_k():
    d1 = tribes_revealment(1).delta
    d2 = tribes_revealment(2).delta
    d3 = tribes_revealment(3, trials=20_000, seed=1)
    assert not d3.exact
    closed = float(oracles.tribes_revealment_closed_form(3))
    sd = math.sqrt(closed / 20_000 / 24)  # loose: per-trial count is at most 24 reads
    assert abs(d3.delta - closed) < 4 * 24 * sd
    assert d1 > d2 > d3.delta


def test_revealment_exact_cap():
    with pytest.raises(ValueError, match="capped"):
        tribes_revealment(3, exact=True)


# -- golden files and parsing --------------------------------------------------------------


def test_golden_roundtrip(tmp_path):
    entries = {"a": F(7, 16), "b": F(-3, 5), "c": F(2)}
    path = tmp_path / "g.json"
    write_golden(path, entries)
    assert read_golden(path) == entries
    assert '"7/16"' in path.read_text()


def test_as_number():
    assert as_number("1/2") == F(1, 2) and isinstance(as_number("1/2"), F)
    assert isinstance(as_number(1), F)
    assert isinstance(as_number(0.3), float)


def test_exact_probability_generic():
    assert exact_probability(Majority(3), HALF).value == HALF
    assert exact_probability(Tribes(1), HALF).value == F(3, 4)
