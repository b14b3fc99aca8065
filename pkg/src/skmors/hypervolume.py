"""Exact bi-objective hypervolume, hypervolume change between fronts, EHVD.

Only m = 2 is supported: the sweep is exact and O(n log n) there, while
exact higher-dimensional algorithms are out of scope.
"""

from __future__ import annotations

import enum

import numpy as np

from . import _kernels
from .errors import InvalidInputError, InvalidReferenceError


class EhvdCase(enum.IntEnum):
    CASE1 = 1  # observed dominates predicted, predicted undominated: HV falls
    CASE2 = 2  # predicted dominates observed, observed on front: HV rises
    CASE3 = 3  # observed dominates predicted, predicted dominated by others
    CASE4 = 4  # predicted dominates observed, observed dominated by others
    CASE5 = 5  # both vectors dominated: HV unchanged


def _points(front) -> np.ndarray:
    P = np.asarray(front, dtype=np.float64)
    if P.size == 0:
        return np.zeros((0, 2))
    P = P.reshape(-1, P.shape[-1]) if P.ndim > 1 else P.reshape(1, -1)
    if P.shape[1] != 2:
        raise InvalidInputError("exact hypervolume is implemented for two objectives only")
    return P


def _check_ref(P, r):
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (2,):
        raise InvalidInputError("reference point must be a 2-vector")
    if P.shape[0] and not np.all(P < r):
        raise InvalidReferenceError("every point must strictly dominate the reference point")
    return r


def hv2d(front, r) -> float:
    """Area dominated by ``front`` and bounded by ``r``.

    >>> hv2d([(1, 3), (2, 2), (3, 1)], (4, 4))
    6.0
    """
    P = _points(front)
    r = _check_ref(P, r)
    if P.shape[0] == 0:
        return 0.0
    return _kernels.hv2d(P, r)


def intersection_hv(A, B, r) -> float:
    """Area of the intersection of the regions dominated by ``A`` and ``B``.

    The intersection of two dominated boxes is the box anchored at their
    componentwise maximum, so the intersection of the unions is the region
    dominated by all pairwise maxima.
    """
    A = _points(A)
    B = _points(B)
    r = _check_ref(A, r)
    _check_ref(B, r)
    if A.shape[0] == 0 or B.shape[0] == 0:
        return 0.0
    corners = np.maximum(A[:, None, :], B[None, :, :]).reshape(-1, 2)
    return _kernels.hv2d(corners, r)


def ehvc(A, B, r) -> float:
    """Symmetric-difference area between the regions dominated by two fronts."""
    val = hv2d(A, r) + hv2d(B, r) - 2.0 * intersection_hv(A, B, r)
    return max(val, 0.0)


def reference_point(means, preds=None, margin=0.1) -> np.ndarray:
    """Worst value over sample means and predictions, pushed out by ``margin`` x observed range."""
    means = np.asarray(means, dtype=np.float64)
    stack = means if preds is None else np.vstack([means, np.asarray(preds, dtype=np.float64)])
    worst = stack.max(axis=0)
    span = means.max(axis=0) - means.min(axis=0)
    fallback = stack.max(axis=0) - stack.min(axis=0)
    span = np.where(span > 0, span, fallback)
    span = np.where(span > 0, span, np.maximum(np.abs(worst), 1.0))
    return worst + margin * span


def _front_slots(front_ids, n):
    slots = np.full(n, -1, dtype=np.int64)
    slots[np.asarray(front_ids, dtype=np.int64)] = np.arange(len(front_ids))
    return slots


def ehvd_all(candidates, front_ids, means, preds, r) -> np.ndarray:
    """EHVD for every design in ``candidates``.

    The substituted front is not re-filtered explicitly: the sweep ignores
    dominated points, which is the same measure.
    """
    means = np.asarray(means, dtype=np.float64)
    preds = np.asarray(preds, dtype=np.float64)
    candidates = np.asarray(candidates, dtype=np.int64)
    front_ids = np.asarray(front_ids, dtype=np.int64)
    front = means[front_ids]
    r = _check_ref(front, r)
    _check_ref(preds[candidates], r)
    slots = _front_slots(front_ids, means.shape[0])[candidates]
    if candidates.size == 0:
        return np.zeros(0)
    return np.asarray(
        _kernels.ehvd_many(front, means[candidates], preds[candidates], slots, r)
    )


def ehvd(i, front_ids, means, preds, r) -> float:
    """|HV(PF) - HV(PF without the observed vector of i, plus its prediction)|."""
    return float(ehvd_all([i], front_ids, means, preds, r)[0])


def _dominated_by_any(v, others) -> bool:
    if others.shape[0] == 0:
        return False
    return bool(np.any(np.all(others <= v, axis=1) & np.any(others < v, axis=1)))


def classify_case(i, front_ids, means, preds, r=None) -> EhvdCase:
    """Which of the five EHVD situations design ``i`` falls in.

    Pairs where neither vector dominates the other are labelled by the sign
    of the hypervolume change (decrease -> 3, increase -> 4, none -> 5).
    """
    means = np.asarray(means, dtype=np.float64)
    preds = np.asarray(preds, dtype=np.float64)
    front_ids = np.asarray(front_ids, dtype=np.int64)
    fb = means[i]
    fh = preds[i]
    others = means[front_ids[front_ids != i]]
    obs_dominated = _dominated_by_any(fb, others)
    pred_dominated = _dominated_by_any(fh, others)

    if np.array_equal(fb, fh) or (obs_dominated and pred_dominated):
        return EhvdCase.CASE5
    obs_first = bool(np.all(fb <= fh) and np.any(fb < fh))
    pred_first = bool(np.all(fh <= fb) and np.any(fh < fb))
    if obs_first:
        return EhvdCase.CASE3 if pred_dominated else EhvdCase.CASE1
    if pred_first:
        return EhvdCase.CASE4 if obs_dominated else EhvdCase.CASE2

    if r is None:
        r = reference_point(means, preds)
    r = np.asarray(r, dtype=np.float64)
    before = hv2d(means[front_ids], r)
    kept = means[front_ids[front_ids != i]] if i in set(front_ids.tolist()) else means[front_ids]
    after = hv2d(np.vstack([kept, fh[None, :]]), r)
    if after < before:
        return EhvdCase.CASE3
    if after > before:
        return EhvdCase.CASE4
    return EhvdCase.CASE5
