"""Deliberately naive reference implementations used only by the tests."""

import itertools
import math
import random
from fractions import Fraction


def adjacency(g):
    return [list(map(int, g.neighbours(v))) for v in range(g.vertex_count)]


def naive_closure(adj, k, occupied):
    """Synchronous rounds straight from the rule; returns the final occupied set."""
    occ = set(occupied)
    while True:
        new = {v for v in range(len(adj)) if v not in occ and sum(u in occ for u in adj[v]) >= k}
        if not new:
            return occ
        occ |= new


def random_order_closure(adj, k, occupied, rng: random.Random):
    """Asynchronous single-site updates in a random order until nothing changes."""
    occ = set(occupied)
    changed = True
    while changed:
        changed = False
        order = list(range(len(adj)))
        rng.shuffle(order)
        for v in order:
            if v not in occ and sum(u in occ for u in adj[v]) >= k:
                occ.add(v)
                changed = True
    return occ


def naive_complete(adj, k, occupied):
    return len(naive_closure(adj, k, occupied)) == len(adj)


def cheeger(edges, n):
    best = None
    for size in range(1, n // 2 + 1):
        for s in itertools.combinations(range(n), size):
            members = set(s)
            cut = sum((a in members) != (b in members) for a, b in edges)
            if best is None or Fraction(cut, size) < best:
                best = Fraction(cut, size)
    return best


def configurations(m):
    return list(itertools.product((False, True), repeat=m))


def prob(w, p):
    return math.prod(p if b else 1 - p for b in w)


def success_probability(f, m, p):
    return sum(prob(w, p) for w in configurations(m) if f(w))


def influences(f, m, p):
    out = []
    for i in range(m):
        total = Fraction(0) if isinstance(p, Fraction) else 0.0
        for w in configurations(m):
            flipped = list(w)
            flipped[i] = not flipped[i]
            if f(w) != f(tuple(flipped)):
                total += prob(w, p)
        out.append(total)
    return out


def noise_cov_corr(f, m, p, eps):
    """Double enumeration over (w, w') with the per-bit resampling kernel."""
    confs = configurations(m)
    val = {w: 1 if f(w) else -1 for w in confs}

    def kernel(x, y):
        r = 1
        for a, b in zip(x, y):
            r *= (1 - eps) * (a == b) + eps * (p if b else 1 - p)
        return r

    mean = sum(prob(w, p) * val[w] for w in confs)
    second = sum(prob(w, p) * val[w] * kernel(w, v) * val[v] for w in confs for v in confs)
    cov = second - mean * mean
    return cov, cov / (1 - mean * mean)


def tribes_revealment_closed_form(k):
    """E|Q|/m for the random-order tribe algorithm at p = 1/2.

    A tribe costs 2(1 - 2^-k) queries on average, and tribe t is reached with
    probability (1 - 2^-k)^(t-1).
    """
    a = 1 - Fraction(1, 2**k)
    per_tribe = 2 * a
    reached = sum(a**t for t in range(2**k))
    return per_tribe * reached / (k * 2**k)
