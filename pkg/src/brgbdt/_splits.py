"""Compiled split-search kernels for regression trees.

Candidate thresholds sit between consecutive distinct values of a feature.
Scores are the summed squared deviation of the residuals from their side
means, computed on residuals centred at the node mean. Among equal scores
the lowest feature index wins, then the lowest threshold.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _midpoint(lo, hi):
    mid = lo + (hi - lo) / 2.0
    if mid >= hi:
        mid = lo
    return mid


@njit(cache=True)
def _sse(sq, s, c):
    return sq - s * s / c


@njit(cache=True)
def best_split(X, r, idx, min_leaf):
    """Best single axis-aligned split of ``idx``.

    Returns ``(feature, threshold, sse)``; ``feature`` is -1 when no
    admissible split exists.
    """
    n = idx.shape[0]
    d = X.shape[1]
    rc = r[idx] - r[idx].mean()
    tot_s = rc.sum()
    tot_sq = (rc * rc).sum()
    best_f, best_t, best = -1, 0.0, np.inf
    for f in range(d):
        v = X[idx, f]
        order = np.argsort(v, kind="mergesort")
        s = 0.0
        sq = 0.0
        for k in range(1, n):
            a = order[k - 1]
            s += rc[a]
            sq += rc[a] * rc[a]
            if k < min_leaf or n - k < min_leaf:
                continue
            lo, hi = v[a], v[order[k]]
            if not lo < hi:
                continue
            score = _sse(sq, s, k) + _sse(tot_sq - sq, tot_s - s, n - k)
            if score < best:
                best, best_f, best_t = score, f, _midpoint(lo, hi)
    return best_f, best_t, best


@njit(cache=True)
def best_two_level(X, r, idx, min_leaf):
    """Root split minimising the SSE of the best depth-2 tree below it.

    Each child may split once more (or not at all), so the root is chosen
    by exhaustive lookahead rather than by its own one-step gain. Returns
    ``(feature, threshold, sse)`` like :func:`best_split`.
    """
    n = idx.shape[0]
    d = X.shape[1]
    Xn = X[idx]
    rc = r[idx] - r[idx].mean()
    tot_s = rc.sum()
    tot_sq = (rc * rc).sum()

    orders = np.empty((d, n), dtype=np.int64)
    vals = np.empty((d, n))
    for g in range(d):
        orders[g] = np.argsort(Xn[:, g], kind="mergesort")
        for p in range(n):
            vals[g, p] = Xn[orders[g, p], g]

    side = np.zeros(n, dtype=np.int64)
    n_side = np.zeros(2, dtype=np.int64)
    s_side = np.zeros(2)
    sq_side = np.zeros(2)
    cnt = np.zeros(2, dtype=np.int64)
    s = np.zeros(2)
    sq = np.zeros(2)
    last = np.zeros(2)
    child = np.zeros(2)

    best_f, best_t, best = -1, 0.0, np.inf
    for f in range(d):
        side[:] = 1
        s_left = 0.0
        sq_left = 0.0
        for k in range(1, n):
            a = orders[f, k - 1]
            side[a] = 0
            s_left += rc[a]
            sq_left += rc[a] * rc[a]
            if k < min_leaf or n - k < min_leaf:
                continue
            lo, hi = vals[f, k - 1], vals[f, k]
            if not lo < hi:
                continue
            n_side[0], n_side[1] = k, n - k
            s_side[0], s_side[1] = s_left, tot_s - s_left
            sq_side[0], sq_side[1] = sq_left, tot_sq - sq_left
            for c in range(2):
                child[c] = _sse(sq_side[c], s_side[c], n_side[c])
            for g in range(d):
                cnt[:] = 0
                s[:] = 0.0
                sq[:] = 0.0
                for p in range(n):
                    i = orders[g, p]
                    c = side[i]
                    v = vals[g, p]
                    m = cnt[c]
                    if m > 0 and last[c] < v and m >= min_leaf and n_side[c] - m >= min_leaf:
                        score = (_sse(sq[c], s[c], m)
                                 + _sse(sq_side[c] - sq[c], s_side[c] - s[c], n_side[c] - m))
                        if score < child[c]:
                            child[c] = score
                    cnt[c] = m + 1
                    s[c] += rc[i]
                    sq[c] += rc[i] * rc[i]
                    last[c] = v
            score = child[0] + child[1]
            if score < best:
                best, best_f, best_t = score, f, _midpoint(lo, hi)
    return best_f, best_t, best
