from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from percolab.topology import build_graph, build_lattice, build_random_regular, edge_cheeger


def symmetric(g):
    pairs = Counter()
    for u in range(g.vertex_count):
        for v in g.neighbours(u):
            pairs[(u, int(v))] += 1
    return all(pairs[(u, v)] == pairs[(v, u)] for u, v in pairs)


def test_box_2x2_is_four_cycle():
    g = build_lattice("box", 2, 2)
    assert g.vertex_count == 4
    assert g.degrees().tolist() == [2, 2, 2, 2]


def test_torus_4x4():
    g = build_lattice("torus", 4, 2)
    assert g.vertex_count == 16
    assert set(g.degrees().tolist()) == {4}


def test_box_3x3_degrees():
    g = build_lattice("box", 3, 2)
    assert g.degrees()[g.vertex((0, 0))] == 2
    assert g.degrees()[g.vertex((1, 1))] == 4
    assert g.degrees()[g.vertex((0, 1))] == 3


def test_row_major_ids():
    g = build_lattice("box", 3, 2)
    assert g.vertex((1, 2)) == 5
    assert g.coords(5) == (1, 2)
    assert sorted(g.neighbours(g.vertex((1, 1))).tolist()) == [1, 3, 5, 7]


@pytest.mark.parametrize("n", [0, -1])
def test_rejects_nonpositive(n):
    with pytest.raises(ValueError):
        build_lattice("box", n, 2)
    with pytest.raises(ValueError):
        build_lattice("box", 3, n)


@pytest.mark.parametrize("n", [1, 2])
def test_rejects_small_torus(n):
    with pytest.raises(ValueError, match="multi-edges"):
        build_lattice("torus", n, 2)


def test_cycle():
    g = build_lattice("cycle", 5)
    assert g.vertex_count == 5 and set(g.degrees().tolist()) == {2}
    with pytest.raises(ValueError):
        build_lattice("cycle", 2)


@settings(max_examples=30, deadline=None)
@given(kind=st.sampled_from(["torus", "box"]), n=st.integers(3, 6), d=st.integers(1, 3))
def test_lattices_symmetric_and_simple(kind, n, d):
    g = build_lattice(kind, n, d)
    assert symmetric(g)
    degs = g.degrees()
    if kind == "torus":
        assert (degs == 2 * d).all()
    else:
        assert degs.min() >= d and degs.max() <= 2 * d
    for v in range(g.vertex_count):
        nb = g.neighbours(v).tolist()
        assert v not in nb and len(nb) == len(set(nb))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(3, 6), axis=st.integers(0, 1), data=st.data())
def test_torus_translation_invariant(n, axis, data):
    g = build_lattice("torus", n, 2)

    def shift(v):
        c = list(g.coords(v))
        c[axis] = (c[axis] + 1) % n
        return g.vertex(c)

    u = data.draw(st.integers(0, g.vertex_count - 1))
    v = data.draw(st.integers(0, g.vertex_count - 1))
    assert (v in g.neighbours(u)) == (shift(v) in g.neighbours(shift(u)))


def test_random_regular_k4():
    g = build_random_regular(4, 3, seed=123)
    assert [sorted(a) for a in g.adjacency()] == [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]


def test_random_regular_parity():
    with pytest.raises(ValueError, match="even"):
        build_random_regular(3, 3, seed=0)


def test_random_regular_range():
    with pytest.raises(ValueError):
        build_random_regular(4, 4, seed=0)
    with pytest.raises(ValueError):
        build_random_regular(10, 2, seed=0)


def test_random_regular_reproducible():
    a = build_random_regular(10, 3, seed=7)
    b = build_random_regular(10, 3, seed=7)
    assert a.dump() == b.dump()
    adj = a.adjacency()
    assert all(len(nb) == 3 and len(set(nb)) == 3 and v not in nb for v, nb in enumerate(adj))
    assert symmetric(a)


def test_random_regular_retry_cap():
    with pytest.raises(RuntimeError, match="rejection"):
        build_random_regular(12, 10, seed=1, max_tries=3)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(6, 60), d=st.integers(3, 5), seed=st.integers(0, 2**32))
def test_random_regular_properties(n, d, seed):
    if n * d % 2 or d >= n:
        return
    g = build_random_regular(n, d, seed)
    assert (g.degrees() == d).all()
    for v in range(n):
        nb = g.neighbours(v).tolist()
        assert v not in nb and len(set(nb)) == d
    assert symmetric(g)


def test_dump_format():
    g = build_lattice("box", 2, 2)
    assert g.dump() == "4 box n=2 d=2\n0: 1 2\n1: 0 3\n2: 0 3\n3: 1 2\n"


def test_cheeger_examples():
    assert edge_cheeger(build_lattice("cycle", 4)) == 1
    assert edge_cheeger(build_random_regular(4, 3, seed=0)) == 2
    assert edge_cheeger(build_lattice("box", 2, 1)) == 1


@pytest.mark.parametrize("n", [4, 5, 6])
def test_cheeger_complete_graph(n):
    # K_n is the unique (n-1)-regular graph on n vertices
    if n * (n - 1) % 2 == 0 and n - 1 >= 3:
        g = build_random_regular(n, n - 1, seed=0)
        assert edge_cheeger(g) == Fraction(-(-n // 2))


@pytest.mark.parametrize(
    "g",
    [
        build_lattice("box", 3, 2),
        build_lattice("torus", 3, 2),
        build_lattice("cycle", 7),
        build_random_regular(10, 3, seed=4),
        build_random_regular(8, 5, seed=9),
    ],
    ids=lambda g: g.kind.describe(),
)
def test_cheeger_matches_enumeration(g):
    edges = [tuple(e) for e in g.edges().tolist()]
    assert edge_cheeger(g) == oracles.cheeger(edges, g.vertex_count)


def test_cheeger_cap():
    with pytest.raises(ValueError, match="exhaustive"):
        edge_cheeger(build_lattice("box", 5, 2))


def test_build_graph_dispatch():
    assert build_graph("rr", 10, 3, seed=1).kind.name == "rr"
    assert build_graph("box", 3, 2).vertex_count == 9
    with pytest.raises(ValueError):
        build_graph("rr", 10, 3)
    with pytest.raises(ValueError):
        build_graph("hex", 3)


def test_graph_is_read_only():
    g = build_lattice("box", 3, 2)
    with pytest.raises(ValueError):
        g.indices[0] = 5
    assert np.array_equal(g.edges()[0], [0, 1])
