"""Numba kernels for the bootstrap closure.

Graphs are passed in CSR form (``indptr``, ``indices``); configurations as
boolean occupation arrays. Everything here is allocation-per-call and free of
shared state, so batch kernels may run rows in parallel.
"""

import numpy as np
from numba import config, njit, prange

# The bundled TBB is too old for numba; pick OpenMP up front to skip the probe.
config.THREADING_LAYER = "omp"

NEVER = -1


@njit(cache=True)
def closure_generations(indptr, indices, k, occ0):
    """Synchronous-round generation of every vertex, ``NEVER`` if it stays vacant."""
    n = occ0.shape[0]
    gen = np.full(n, NEVER, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    frontier = np.empty(n, dtype=np.int64)
    nxt = np.empty(n, dtype=np.int64)
    nf = 0
    for v in range(n):
        if occ0[v]:
            gen[v] = 0
            frontier[nf] = v
            nf += 1
    r = 0
    while nf > 0:
        r += 1
        nn = 0
        for i in range(nf):
            u = frontier[i]
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if gen[v] == NEVER:
                    counts[v] += 1
                    if counts[v] == k:
                        gen[v] = r
                        nxt[nn] = v
                        nn += 1
        frontier, nxt = nxt, frontier
        nf = nn
    return gen


@njit(cache=True)
def _complete_into(indptr, indices, k, occ0, occ, counts, stack):
    # Order of occupation is irrelevant for the final set, so a stack suffices.
    n = occ0.shape[0]
    top = 0
    filled = 0
    for v in range(n):
        counts[v] = 0
        occ[v] = occ0[v]
        if occ0[v]:
            stack[top] = v
            top += 1
            filled += 1
    while top > 0:
        top -= 1
        u = stack[top]
        for j in range(indptr[u], indptr[u + 1]):
            v = indices[j]
            if not occ[v]:
                counts[v] += 1
                if counts[v] >= k:
                    occ[v] = True
                    stack[top] = v
                    top += 1
                    filled += 1
    return filled == n


@njit(cache=True)
def is_complete(indptr, indices, k, occ0):
    n = occ0.shape[0]
    occ = np.empty(n, dtype=np.bool_)
    counts = np.empty(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    return _complete_into(indptr, indices, k, occ0, occ, counts, stack)


@njit(parallel=True, cache=True)
def complete_batch(indptr, indices, k, occ_rows):
    """Complete-occupation flag for every row of a (trials, n) boolean matrix."""
    t, n = occ_rows.shape
    out = np.empty(t, dtype=np.bool_)
    for i in prange(t):
        occ = np.empty(n, dtype=np.bool_)
        counts = np.empty(n, dtype=np.int64)
        stack = np.empty(n, dtype=np.int64)
        out[i] = _complete_into(indptr, indices, k, occ_rows[i], occ, counts, stack)
    return out


@njit(parallel=True, cache=True)
def truth_table(indptr, indices, k, n):
    """Complete-occupation indicator for all 2**n configurations.

    Bit ``v`` of the configuration index is the occupation of vertex ``v``.
    """
    size = 1 << n
    out = np.empty(size, dtype=np.bool_)
    block = 4096
    nblocks = (size + block - 1) // block
    for b in prange(nblocks):
        occ0 = np.empty(n, dtype=np.bool_)
        occ = np.empty(n, dtype=np.bool_)
        counts = np.empty(n, dtype=np.int64)
        stack = np.empty(n, dtype=np.int64)
        stop = min(size, (b + 1) * block)
        for mask in range(b * block, stop):
            for v in range(n):
                occ0[v] = (mask >> v) & 1
            out[mask] = _complete_into(indptr, indices, k, occ0, occ, counts, stack)
    return out


@njit(cache=True)
def edge_boundary_min(n, eu, ev):
    """Exact minimiser of |boundary(S)|/|S| over 0 < |S| <= n/2, as (num, den)."""
    best_num = -1
    best_den = 1
    half = n // 2
    m = eu.shape[0]
    for mask in range(1, 1 << n):
        size = 0
        x = mask
        while x:
            x &= x - 1
            size += 1
        if size > half:
            continue
        cut = 0
        for e in range(m):
            if ((mask >> eu[e]) & 1) != ((mask >> ev[e]) & 1):
                cut += 1
        if best_num < 0 or cut * best_den < best_num * size:
            best_num = cut
            best_den = size
    return best_num, best_den


@njit(cache=True)
def _subbox_full(host, host_n, anchor, sides, cyclic, k, sub, counts, stack):
    # Copy the window of a row-major host grid into ``sub``, run the restricted
    # closure on the induced sub-box and report whether it fills up.
    d = sides.shape[0]
    size = 1
    for i in range(d):
        size *= sides[i]
    coord = np.zeros(d, dtype=np.int64)
    for c in range(size):
        rem = c
        for i in range(d - 1, -1, -1):
            coord[i] = rem % sides[i]
            rem //= sides[i]
        hid = 0
        for i in range(d):
            hid = hid * host_n + (anchor[i] + coord[i]) % host_n
        sub[c] = host[hid]
    top = 0
    filled = 0
    for c in range(size):
        counts[c] = 0
        if sub[c]:
            stack[top] = c
            top += 1
            filled += 1
    while top > 0:
        top -= 1
        c = stack[top]
        rem = c
        for i in range(d - 1, -1, -1):
            coord[i] = rem % sides[i]
            rem //= sides[i]
        stride = 1
        for i in range(d - 1, -1, -1):
            s = sides[i]
            for step in (-1, 1):
                x = coord[i] + step
                if x < 0 or x >= s:
                    if not cyclic[i]:
                        continue
                    x %= s
                nb = c + (x - coord[i]) * stride
                if not sub[nb]:
                    counts[nb] += 1
                    if counts[nb] >= k:
                        sub[nb] = True
                        stack[top] = nb
                        top += 1
                        filled += 1
            stride *= s
    return filled == size


@njit(cache=True)
def subbox_spanned(host, host_n, anchor, sides, cyclic, k):
    size = 1
    for i in range(sides.shape[0]):
        size *= sides[i]
    sub = np.empty(size, dtype=np.bool_)
    counts = np.empty(size, dtype=np.int64)
    stack = np.empty(size, dtype=np.int64)
    return _subbox_full(host, host_n, anchor, sides, cyclic, k, sub, counts, stack)


@njit(cache=True)
def first_spanned_anchor(host, host_n, d, sides, periodic, k):
    """Lexicographically first anchor whose sub-box is internally spanned, or -1.

    Returns the anchor encoded row-major over ``host_n**d``.
    """
    cyclic = np.zeros(d, dtype=np.bool_)
    limits = np.empty(d, dtype=np.int64)
    size = 1
    for i in range(d):
        size *= sides[i]
        if periodic:
            limits[i] = host_n
            cyclic[i] = sides[i] == host_n
            if cyclic[i]:
                # A full cyclic axis gives the same region from every offset.
                limits[i] = 1
        else:
            limits[i] = host_n - sides[i] + 1
    sub = np.empty(size, dtype=np.bool_)
    counts = np.empty(size, dtype=np.int64)
    stack = np.empty(size, dtype=np.int64)
    total = 1
    for i in range(d):
        total *= limits[i]
    anchor = np.zeros(d, dtype=np.int64)
    for a in range(total):
        rem = a
        for i in range(d - 1, -1, -1):
            anchor[i] = rem % limits[i]
            rem //= limits[i]
        if _subbox_full(host, host_n, anchor, sides, cyclic, k, sub, counts, stack):
            code = 0
            for i in range(d):
                code = code * host_n + anchor[i]
            return code
    return -1
