"""Hot numeric kernels, JIT-compiled with numba when available.

Every kernel exists twice: a plain-Python reference implementation
(``_*_py``) and, when numba is importable and ``CVRPQUBO_NO_NUMBA`` is not
set, an ``@njit``-compiled twin.  The public name points at whichever path
is active.  Both paths execute the same arithmetic in the same order, so
they produce bit-identical results; ``benchmarks/bench_kernels.py`` compares
their speed.

QUBOs are passed as split arrays: ``h`` holds the diagonal (linear) terms
and ``indptr/indices/data`` a symmetric CSR view of the off-diagonal terms.
All energies here exclude the constant offset; callers add it back.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("CVRPQUBO_NO_NUMBA", "0") in ("", "0")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False

INF = np.inf


def _jit(fn):
    if USE_NUMBA:
        return njit(cache=True)(fn)
    return fn


def _sa_read_py(h, indptr, indices, data, betas, rand_init, rand_flip):
    """One simulated-annealing read: single-bit-flip Metropolis chain.

    ``rand_init`` seeds the start state (bit i set iff rand_init[i] < 0.5);
    ``rand_flip`` supplies one uniform per flip attempt, consumed in sweep
    order so that the chain is a pure function of its inputs.  Returns the
    final state as uint8.
    """
    n = h.shape[0]
    x = np.zeros(n, dtype=np.uint8)
    field = h.copy()
    for i in range(n):
        if rand_init[i] < 0.5:
            x[i] = 1
    for i in range(n):
        if x[i] == 1:
            for p in range(indptr[i], indptr[i + 1]):
                field[indices[p]] += data[p]
    k = 0
    for s in range(betas.shape[0]):
        beta = betas[s]
        for i in range(n):
            delta = (1.0 - 2.0 * x[i]) * field[i]
            u = rand_flip[k]
            k += 1
            if delta <= 0.0 or np.exp(-beta * delta) > u:
                if x[i] == 1:
                    x[i] = 0
                    for p in range(indptr[i], indptr[i + 1]):
                        field[indices[p]] -= data[p]
                else:
                    x[i] = 1
                    for p in range(indptr[i], indptr[i + 1]):
                        field[indices[p]] += data[p]
    return x


def _gray_min_py(h, indptr, indices, data, nvars):
    """Exact QUBO minimum by Gray-code enumeration with O(deg) updates.

    Visits all 2**nvars assignments; ties keep the first minimum in Gray
    order, so the all-zeros state wins on a constant objective.  Returns
    (best assignment, best offset-free energy).
    """
    x = np.zeros(nvars, dtype=np.uint8)
    best = np.zeros(nvars, dtype=np.uint8)
    energy = 0.0
    best_e = 0.0
    total = np.int64(1) << nvars
    k = np.int64(1)
    while k < total:
        # flipped bit = index of lowest set bit of k
        b = 0
        kk = k
        while kk & 1 == 0:
            kk >>= 1
            b += 1
        local = h[b]
        for p in range(indptr[b], indptr[b + 1]):
            if x[indices[p]] == 1:
                local += data[p]
        energy += (1.0 - 2.0 * x[b]) * local
        x[b] ^= 1
        if energy < best_e:
            best_e = energy
            for i in range(nvars):
                best[i] = x[i]
        k += 1
    return best, best_e


def _held_karp_py(tmod, dem, cap):
    """Subset DP over capacity-feasible customer sets on modified distances.

    ``tmod`` is the (n+1)x(n+1) price-modified distance matrix with the
    depot at index 0.  For every feasible nonempty subset the DP yields the
    cheapest open path from the depot, closed back to the depot on read-out.
    Returns (value per mask, best final customer per mask, predecessor
    table); infeasible masks carry +inf.
    """
    n = dem.shape[0]
    size = 1 << n
    demand = np.zeros(size, dtype=np.int64)
    for mask in range(1, size):
        low = mask & (-mask)
        b = 0
        while low & 1 == 0:
            low >>= 1
            b += 1
        demand[mask] = demand[mask & (mask - 1)] + dem[b]
    dp = np.full((size, n), INF)
    parent = np.full((size, n), -1, dtype=np.int8)
    val = np.full(size, INF)
    bestlast = np.full(size, -1, dtype=np.int8)
    for v in range(n):
        if dem[v] <= cap:
            dp[1 << v, v] = tmod[0, v + 1]
    for mask in range(1, size):
        if demand[mask] > cap:
            continue
        for last in range(n):
            if mask & (1 << last) == 0:
                continue
            d = dp[mask, last]
            if d == INF:
                continue
            closed = d + tmod[last + 1, 0]
            if closed < val[mask]:
                val[mask] = closed
                bestlast[mask] = last
            for nxt in range(n):
                if mask & (1 << nxt):
                    continue
                nm = mask | (1 << nxt)
                if demand[nm] > cap:
                    continue
                cand = d + tmod[last + 1, nxt + 1]
                if cand < dp[nm, nxt]:
                    dp[nm, nxt] = cand
                    parent[nm, nxt] = last
    return val, bestlast, parent


def _apply_cut_duals_py(val, cut_masks, cut_betas):
    """Subtract the cut-dual credit sum(beta_S : S intersects mask) in place."""
    size = val.shape[0]
    for mask in range(1, size):
        if val[mask] == INF:
            continue
        for c in range(cut_masks.shape[0]):
            if mask & cut_masks[c]:
                val[mask] -= cut_betas[c]


def _subset_scan_py(bit_indptr, bit_routes, weights, dem, cap):
    """Scan all customer subsets for capacity-cut objectives in Gray order.

    ``bit_indptr``/``bit_routes`` map each customer bit to the support
    routes containing it; ``weights`` are the routes' LP values.  Tracks
    both the rounded violation ceil(D(S)/cap) - sum(y*_r : r hits S)
    (maximized) and the fractional objective sum(y*_r) - D(S)/cap
    (minimized).  Returns (best rounded violation, its mask, best
    fractional objective, its mask); the empty set is the baseline.
    """
    n = bit_indptr.shape[0] - 1
    nroutes = weights.shape[0]
    counts = np.zeros(nroutes, dtype=np.int32)
    lhs = 0.0
    dsum = np.int64(0)
    best_rv = 0.0
    best_rv_mask = np.int64(0)
    best_fo = 0.0
    best_fo_mask = np.int64(0)
    total = np.int64(1) << n
    k = np.int64(1)
    x = np.zeros(n, dtype=np.uint8)
    gray = np.int64(0)
    while k < total:
        b = 0
        kk = k
        while kk & 1 == 0:
            kk >>= 1
            b += 1
        bit = np.int64(1) << b
        gray ^= bit
        if x[b] == 0:
            x[b] = 1
            dsum += dem[b]
            for p in range(bit_indptr[b], bit_indptr[b + 1]):
                r = bit_routes[p]
                if counts[r] == 0:
                    lhs += weights[r]
                counts[r] += 1
        else:
            x[b] = 0
            dsum -= dem[b]
            for p in range(bit_indptr[b], bit_indptr[b + 1]):
                r = bit_routes[p]
                counts[r] -= 1
                if counts[r] == 0:
                    lhs -= weights[r]
        rhs = (dsum + cap - 1) // cap
        rv = rhs - lhs
        if rv > best_rv:
            best_rv = rv
            best_rv_mask = gray
        fo = lhs - dsum / cap
        if fo < best_fo:
            best_fo = fo
            best_fo_mask = gray
        k += 1
    return best_rv, best_rv_mask, best_fo, best_fo_mask


sa_read = _jit(_sa_read_py)
gray_min = _jit(_gray_min_py)
held_karp = _jit(_held_karp_py)
apply_cut_duals = _jit(_apply_cut_duals_py)
subset_scan = _jit(_subset_scan_py)
