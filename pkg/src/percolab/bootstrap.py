"""k-neighbour bootstrap closure, pivotal sets and internally spanned rectangles."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from percolab import _kernels
from percolab.topology import GraphTopology

NEVER = _kernels.NEVER


@dataclass(frozen=True, eq=False)
class BitConfig:
    """Initial configuration; ``occupied[v]`` is True where the spin is +1."""

    occupied: np.ndarray
    p: float | None = None
    seed: int | None = None

    def __post_init__(self):
        occ = np.ascontiguousarray(self.occupied, dtype=np.bool_)
        occ.setflags(write=False)
        object.__setattr__(self, "occupied", occ)

    def __len__(self):
        return self.occupied.shape[0]

    @classmethod
    def from_spins(cls, spins, p=None, seed=None) -> BitConfig:
        spins = np.asarray(spins)
        if not np.isin(spins, (-1, 1)).all():
            raise ValueError("spins must be -1 or +1")
        return cls(spins == 1, p, seed)

    @classmethod
    def from_vertices(cls, n: int, vertices, p=None, seed=None) -> BitConfig:
        occ = np.zeros(n, dtype=np.bool_)
        occ[list(vertices)] = True
        return cls(occ, p, seed)

    @classmethod
    def full(cls, n: int) -> BitConfig:
        return cls(np.ones(n, dtype=np.bool_), 1.0)

    @classmethod
    def empty(cls, n: int) -> BitConfig:
        return cls(np.zeros(n, dtype=np.bool_), 0.0)

    @property
    def spins(self) -> np.ndarray:
        return np.where(self.occupied, 1, -1).astype(np.int8)

    def packed(self) -> bytes:
        return np.packbits(self.occupied).tobytes()

    @classmethod
    def from_packed(cls, data: bytes, n: int, p=None, seed=None) -> BitConfig:
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), count=n)
        return cls(bits.astype(np.bool_), p, seed)

    def flipped(self, v: int) -> BitConfig:
        occ = self.occupied.copy()
        occ[v] = not occ[v]
        return BitConfig(occ, self.p, self.seed)

    def dump(self) -> str:
        bits = "".join("1" if b else "0" for b in self.occupied)
        return f"p={self.p} seed={self.seed} {bits}"

    @classmethod
    def parse(cls, line: str) -> BitConfig:
        p_field, seed_field, bits = line.split()
        p = p_field.removeprefix("p=")
        seed = seed_field.removeprefix("seed=")
        occ = np.frombuffer(bits.encode(), dtype=np.uint8) == ord("1")
        return cls(
            occ,
            None if p == "None" else float(p),
            None if seed == "None" else int(seed),
        )


@dataclass(frozen=True, eq=False)
class ClosureResult:
    occupied: np.ndarray
    generation: np.ndarray  # round of occupation, NEVER (-1) for eventually vacant

    @property
    def vacant(self) -> np.ndarray:
        return ~self.occupied

    @property
    def complete(self) -> bool:
        return bool(self.occupied.all())

    @property
    def rounds(self) -> int:
        return int(self.generation.max()) if self.occupied.any() else 0


@dataclass(frozen=True)
class Rectangle:
    anchor: tuple[int, ...]
    sides: tuple[int, ...]

    @property
    def longest(self) -> int:
        return max(self.sides)


def _check(g: GraphTopology, k: int, cfg: BitConfig):
    if len(cfg) != g.vertex_count:
        raise ValueError(f"configuration has {len(cfg)} bits, graph has {g.vertex_count} vertices")
    if k < 1:
        raise ValueError(f"threshold k must be positive, got {k}")


def closure(g: GraphTopology, k: int, init: BitConfig) -> ClosureResult:
    _check(g, k, init)
    gen = _kernels.closure_generations(g.indptr, g.indices, k, init.occupied)
    return ClosureResult(gen != NEVER, gen)


def is_complete(g: GraphTopology, k: int, occupied: np.ndarray) -> bool:
    return bool(_kernels.is_complete(g.indptr, g.indices, k, occupied))


def complete_rows(g: GraphTopology, k: int, rows: np.ndarray) -> np.ndarray:
    """Complete-occupation flags for a ``(trials, n)`` boolean matrix."""
    rows = np.ascontiguousarray(rows, dtype=np.bool_)
    return _kernels.complete_batch(g.indptr, g.indices, k, rows)


def pivotal_set(g: GraphTopology, k: int, cfg: BitConfig) -> np.ndarray:
    """Boolean mask of bits whose flip changes complete occupation.

    Complete occupation is increasing, so only occupied bits can be pivotal
    when it holds and only vacant ones when it fails.
    """
    _check(g, k, cfg)
    occ = cfg.occupied
    base = is_complete(g, k, occ)
    candidates = np.flatnonzero(occ if base else ~occ)
    piv = np.zeros(g.vertex_count, dtype=np.bool_)
    if candidates.size == 0:
        return piv
    rows = np.repeat(occ[None, :], candidates.size, axis=0)
    rows[np.arange(candidates.size), candidates] = ~occ[candidates]
    piv[candidates] = complete_rows(g, k, rows) != base
    return piv


def _check_rectangle(g: GraphTopology, r: Rectangle):
    if g.shape is None:
        raise ValueError("rectangles need a lattice graph")
    n, d = g.shape[0], len(g.shape)
    if len(r.anchor) != d or len(r.sides) != d:
        raise ValueError(f"rectangle dimension does not match the {d}-dimensional lattice")
    for a, s in zip(r.anchor, r.sides):
        if s < 1 or not 0 <= a < n:
            raise ValueError(f"rectangle {r} out of bounds")
        if g.periodic:
            if s > n:
                raise ValueError(f"rectangle {r} longer than the torus side {n}")
        elif a + s > n:
            raise ValueError(f"rectangle {r} does not fit in the box")


def is_internally_spanned(g: GraphTopology, k: int, cfg: BitConfig, r: Rectangle) -> bool:
    """Does the closure restricted to ``r``, using only bits inside ``r``, fill ``r``?"""
    _check(g, k, cfg)
    _check_rectangle(g, r)
    n = g.shape[0]
    sides = np.asarray(r.sides, dtype=np.int64)
    cyclic = np.array([g.periodic and s == n for s in r.sides], dtype=np.bool_)
    anchor = np.asarray(r.anchor, dtype=np.int64)
    return bool(_kernels.subbox_spanned(cfg.occupied, n, anchor, sides, cyclic, k))


def _shapes_with_longest(m: int, d: int):
    for sides in itertools.product(range(1, m + 1), repeat=d):
        if max(sides) == m:
            yield sides


def al_rectangle_scan(g: GraphTopology, k: int, cfg: BitConfig, ell: int) -> Rectangle | None:
    """First internally spanned rectangle with longest side in ``[ell, 2*ell]``.

    Search order: increasing longest side, then lexicographic anchor, then
    decreasing side lengths (so squares win ties at an anchor).
    """
    _check(g, k, cfg)
    if g.shape is None:
        raise ValueError("rectangle scan needs a lattice graph")
    n, d = g.shape[0], len(g.shape)
    if not 1 <= ell <= n:
        raise ValueError(f"scale must lie in [1, {n}], got {ell}")
    for m in range(ell, min(2 * ell, n) + 1):
        best = None
        for sides in _shapes_with_longest(m, d):
            code = _kernels.first_spanned_anchor(
                cfg.occupied, n, d, np.asarray(sides, dtype=np.int64), g.periodic, k
            )
            if code >= 0 and (best is None or code < best[0] or (code == best[0] and sides > best[1])):
                best = (int(code), sides)
        if best is not None:
            anchor = tuple(int(c) for c in np.unravel_index(best[0], g.shape))
            return Rectangle(anchor, tuple(best[1]))
    return None
