import numpy as np
from numba import njit


@njit(cache=True)
def pareto_mask(F):
    n, m = F.shape
    mask = np.ones(n, dtype=np.bool_)
    for b in range(n):
        for a in range(n):
            if a == b:
                continue
            le = True
            lt = False
            for j in range(m):
                if F[a, j] > F[b, j]:
                    le = False
                    break
                if F[a, j] < F[b, j]:
                    lt = True
            if le and lt:
                mask[b] = False
                break
    return mask


@njit(cache=True)
def _hv2d_sorted(P, r0, r1):
    area = 0.0
    level = r1
    for k in range(P.shape[0]):
        if P[k, 1] < level:
            area += (r0 - P[k, 0]) * (level - P[k, 1])
            level = P[k, 1]
    return area


@njit(cache=True)
def _sort2(P):
    # lexicographic (f1, f2); insertion sort, fronts are small
    Q = P.copy()
    n = Q.shape[0]
    for i in range(1, n):
        a = Q[i, 0]
        b = Q[i, 1]
        k = i - 1
        while k >= 0 and (Q[k, 0] > a or (Q[k, 0] == a and Q[k, 1] > b)):
            Q[k + 1, 0] = Q[k, 0]
            Q[k + 1, 1] = Q[k, 1]
            k -= 1
        Q[k + 1, 0] = a
        Q[k + 1, 1] = b
    return Q


@njit(cache=True)
def hv2d(points, ref):
    if points.shape[0] == 0:
        return 0.0
    return _hv2d_sorted(_sort2(points), ref[0], ref[1])


@njit(cache=True)
def ehvd_many(front, means, preds, on_front, ref):
    nf = front.shape[0]
    base = hv2d(front, ref)
    out = np.empty(means.shape[0])
    buf = np.empty((nf + 1, 2))
    for i in range(means.shape[0]):
        k = on_front[i]
        c = 0
        for q in range(nf):
            if q == k:
                continue
            buf[c, 0] = front[q, 0]
            buf[c, 1] = front[q, 1]
            c += 1
        buf[c, 0] = preds[i, 0]
        buf[c, 1] = preds[i, 1]
        c += 1
        out[i] = abs(base - hv2d(buf[:c], ref))
    return out


@njit(cache=True)
def nearest_rows(A, B):
    out = np.empty(A.shape[0], dtype=np.int64)
    for i in range(A.shape[0]):
        best = np.inf
        arg = 0
        for k in range(B.shape[0]):
            d = 0.0
            for j in range(A.shape[1]):
                t = A[i, j] - B[k, j]
                d += t * t
            if d < best:
                best = d
                arg = k
        out[i] = arg
    return out
