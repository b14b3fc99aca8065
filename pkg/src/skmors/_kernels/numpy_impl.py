"""Vectorized numpy versions of the hot kernels.

These are the reference path. The numba module mirrors every function here
with explicit loops; both must agree to round-off.
"""

import numpy as np


def pareto_mask(F):
    """Boolean mask of rows of ``F`` not dominated by any other row (minimization)."""
    F = np.asarray(F, dtype=np.float64)
    # le[a, b]: a <= b on every objective; lt[a, b]: a < b on some objective
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dominated = np.any(le & lt, axis=0)
    return ~dominated


def hv2d(points, ref):
    """Exact dominated area of a bi-objective point set w.r.t. ``ref``.

    Dominated points are harmless: the sweep skips anything that does not
    lower the running second-objective level.
    """
    P = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if P.shape[0] == 0:
        return 0.0
    order = np.lexsort((P[:, 1], P[:, 0]))
    P = P[order]
    # running minimum of f2 seen so far, shifted by one step
    best = np.minimum.accumulate(P[:, 1])
    prev = np.concatenate(([ref[1]], best[:-1]))
    gain = np.clip(prev - P[:, 1], 0.0, None)
    return float(np.sum((ref[0] - P[:, 0]) * gain))


def ehvd_many(front, means, preds, on_front, ref):
    """EHVD for each candidate row.

    ``front`` holds the observed front vectors. ``on_front[i]`` is the row of
    ``front`` occupied by candidate ``i`` or -1 when ``i`` is off the front.
    """
    front = np.asarray(front, dtype=np.float64).reshape(-1, 2)
    base = hv2d(front, ref)
    out = np.empty(means.shape[0])
    for i in range(means.shape[0]):
        k = on_front[i]
        if k >= 0:
            other = np.delete(front, k, axis=0)
        else:
            other = front
        alt = np.vstack([other, preds[i][None, :]])
        out[i] = abs(base - hv2d(alt, ref))
    return out


def nearest_rows(A, B):
    """For each row of ``A``, index of the closest row of ``B`` (first on ties)."""
    d2 = np.sum((A[:, None, :] - B[None, :, :]) ** 2, axis=2)
    return np.argmin(d2, axis=1)
