"""Finite graphs: lattice tori and boxes, cycles, random regular graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from percolab import _kernels

CHEEGER_MAX_VERTICES = 24
DEFAULT_REGULAR_TRIES = 10_000


@dataclass(frozen=True)
class GraphKind:
    name: str  # "torus", "box", "cycle" or "rr"
    n: int
    d: int = 1
    seed: int | None = None

    def describe(self) -> str:
        if self.name == "cycle":
            return f"cycle n={self.n}"
        if self.name == "rr":
            return f"rr n={self.n} d={self.d} seed={self.seed}"
        return f"{self.name} n={self.n} d={self.d}"

    def to_dict(self) -> dict:
        out = {"graph": self.name, "n": self.n, "d": self.d}
        if self.seed is not None:
            out["graph_seed"] = self.seed
        return out


@dataclass(frozen=True, eq=False)
class GraphTopology:
    """Immutable graph stored as CSR adjacency.

    ``indices[indptr[v]:indptr[v+1]]`` lists the neighbours of ``v``; repeated
    entries encode multi-edges.
    """

    indptr: np.ndarray
    indices: np.ndarray
    kind: GraphKind
    shape: tuple[int, ...] | None = None  # lattice side lengths, row-major ids
    degree_bound: int = field(init=False)

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        deg = np.diff(self.indptr)
        object.__setattr__(self, "degree_bound", int(deg.max()) if deg.size else 0)

    @property
    def vertex_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def periodic(self) -> bool:
        return self.kind.name in ("torus", "cycle")

    def neighbours(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def adjacency(self) -> list[list[int]]:
        return [self.neighbours(v).tolist() for v in range(self.vertex_count)]

    def edges(self) -> np.ndarray:
        """Edge list ``(u, v)`` with ``u < v``, one row per edge (with multiplicity)."""
        src = np.repeat(np.arange(self.vertex_count), self.degrees())
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    def coords(self, v: int) -> tuple[int, ...]:
        if self.shape is None:
            raise ValueError("graph has no lattice coordinates")
        return tuple(int(c) for c in np.unravel_index(v, self.shape))

    def vertex(self, coords) -> int:
        if self.shape is None:
            raise ValueError("graph has no lattice coordinates")
        return int(np.ravel_multi_index(tuple(coords), self.shape))

    def dump(self) -> str:
        params = " ".join(f"{k}={v}" for k, v in self.kind.to_dict().items() if k != "graph")
        lines = [f"{self.vertex_count} {self.kind.name} {params}"]
        for v in range(self.vertex_count):
            nb = " ".join(str(u) for u in sorted(self.neighbours(v).tolist()))
            lines.append(f"{v}: {nb}".rstrip())
        return "\n".join(lines) + "\n"


def _from_edges(n_vertices: int, u: np.ndarray, v: np.ndarray, kind, shape=None) -> GraphTopology:
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n_vertices + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n_vertices), out=indptr[1:])
    return GraphTopology(indptr, dst.astype(np.int64), kind, shape)


def build_lattice(kind: str, n: int, d: int = 1) -> GraphTopology:
    """Nearest-neighbour graph on ``[n]^d`` (box), ``(Z/nZ)^d`` (torus) or ``C_n``."""
    if n < 1 or d < 1:
        raise ValueError(f"side length and dimension must be positive, got n={n}, d={d}")
    if kind == "cycle":
        if n < 3:
            raise ValueError("cycle needs n >= 3")
        kind, d = "torus", 1
        label = GraphKind("cycle", n, 1)
    elif kind == "torus":
        if n < 3:
            raise ValueError("torus needs n >= 3; smaller sides create multi-edges")
        label = GraphKind("torus", n, d)
    elif kind == "box":
        label = GraphKind("box", n, d)
    else:
        raise ValueError(f"unknown lattice kind {kind!r}")

    shape = (n,) * d
    size = n**d
    ids = np.arange(size).reshape(shape)
    us, vs = [], []
    for axis in range(d):
        if kind == "torus":
            nb = np.roll(ids, -1, axis=axis)
            us.append(ids.ravel())
            vs.append(nb.ravel())
        else:
            lo = [slice(None)] * d
            hi = [slice(None)] * d
            lo[axis] = slice(0, n - 1)
            hi[axis] = slice(1, n)
            us.append(ids[tuple(lo)].ravel())
            vs.append(ids[tuple(hi)].ravel())
    u = np.concatenate(us) if us else np.empty(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.empty(0, dtype=np.int64)
    return _from_edges(size, u, v, label, shape)


def build_random_regular(n: int, d: int, seed: int, max_tries: int = DEFAULT_REGULAR_TRIES) -> GraphTopology:
    """Uniform simple ``d``-regular graph via the configuration model with rejection.

    Samples with a loop or a repeated edge are discarded whole, so the result
    is exactly uniform over simple ``d``-regular graphs.
    """
    if (n * d) % 2:
        raise ValueError(f"n*d must be even, got n={n}, d={d}")
    if not 3 <= d < n:
        raise ValueError(f"need 3 <= d < n, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(max_tries):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        u = pairs.min(axis=1)
        v = pairs.max(axis=1)
        if np.any(u == v):
            continue
        code = u * n + v
        if np.unique(code).size != code.size:
            continue
        return _from_edges(n, u, v, GraphKind("rr", n, d, seed))
    raise RuntimeError(
        f"no simple {d}-regular graph on {n} vertices after {max_tries} tries; "
        "d is too large for rejection sampling"
    )


def edge_cheeger(g: GraphTopology) -> Fraction:
    """Edge Cheeger constant by exhaustive subset enumeration."""
    n = g.vertex_count
    if n > CHEEGER_MAX_VERTICES:
        raise ValueError(f"edge_cheeger is exhaustive; at most {CHEEGER_MAX_VERTICES} vertices, got {n}")
    if n < 2:
        raise ValueError("edge_cheeger needs at least two vertices")
    e = g.edges()
    num, den = _kernels.edge_boundary_min(n, e[:, 0].copy(), e[:, 1].copy())
    return Fraction(int(num), int(den))


def build_graph(name: str, n: int, d: int = 2, seed: int | None = None) -> GraphTopology:
    """Dispatch on the CLI graph names."""
    if name in ("torus", "box", "cycle"):
        return build_lattice(name, n, d)
    if name == "rr":
        if seed is None:
            raise ValueError("random regular graphs need a graph seed")
        return build_random_regular(n, d, seed)
    raise ValueError(f"unknown graph {name!r}")
