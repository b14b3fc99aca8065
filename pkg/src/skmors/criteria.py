"""Posterior distance, score normalization and the (EHVD, PD) selection front."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import pareto_mask
from .errors import InvalidInputError, InvalidStateError


def posterior_distance(means, preds, pred_sd) -> np.ndarray:
    """Distance between sample and predicted mean vectors, inflated by prediction sd.

    Works row-wise on (n, m) arrays or on single m-vectors.
    """
    means = np.asarray(means, dtype=np.float64)
    preds = np.asarray(preds, dtype=np.float64)
    pred_sd = np.asarray(pred_sd, dtype=np.float64)
    if means.shape != preds.shape or means.shape != pred_sd.shape:
        raise InvalidInputError("means, predictions and sds must share a shape")
    if np.any(pred_sd < 0):
        raise InvalidInputError("prediction sds must be nonnegative")
    gap = np.abs(means - preds) + pred_sd
    return np.sqrt(np.sum(gap * gap, axis=-1))


def normalize(values) -> np.ndarray:
    """Min-max scale to [0, 1]; a constant column becomes all zeros."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        return v.copy()
    lo, hi = v.min(), v.max()
    if hi <= lo:
        return np.zeros_like(v)
    return np.clip((v - lo) / (hi - lo), 0.0, 1.0)


@dataclass(frozen=True)
class CriteriaScores:
    ids: np.ndarray
    ehvd: np.ndarray
    pd: np.ndarray

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64)
        ehvd = np.asarray(self.ehvd, dtype=np.float64)
        pd = np.asarray(self.pd, dtype=np.float64)
        if not (ids.shape == ehvd.shape == pd.shape):
            raise InvalidInputError("ids, ehvd and pd must have equal lengths")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "ehvd", ehvd)
        object.__setattr__(self, "pd", pd)

    @property
    def ehvd_norm(self):
        return normalize(self.ehvd)

    @property
    def pd_norm(self):
        return normalize(self.pd)


def _ordered(ids, primary, secondary, members):
    # descending primary, descending secondary, ascending id
    order = np.lexsort((ids[members], -secondary[members], -primary[members]))
    return ids[members][order]


def criteria_front(scores: CriteriaScores) -> np.ndarray:
    """Designs not dominated under joint maximization of (EHVD, PD), in allocation order."""
    if scores.ids.size == 0:
        raise InvalidStateError("criteria front of an empty retained set")
    F = -np.column_stack([scores.ehvd, scores.pd])
    members = np.flatnonzero(pareto_mask(F))
    return _ordered(scores.ids, scores.ehvd, scores.pd, members)


def single_criterion_front(scores: CriteriaScores, which: str) -> np.ndarray:
    """Designs attaining the maximum of one criterion, ties ordered by id."""
    if scores.ids.size == 0:
        raise InvalidStateError("criteria front of an empty retained set")
    if which == "pd":
        vals = scores.pd
    elif which == "ehvd":
        vals = scores.ehvd
    else:
        raise InvalidInputError(f"unknown criterion {which!r}")
    members = np.flatnonzero(vals == vals.max())
    return np.sort(scores.ids[members])


def round_robin(front, budget: int, n: int) -> np.ndarray:
    """One replication per front member per pass until the budget is gone."""
    plan = np.zeros(n, dtype=np.int64)
    front = np.asarray(front, dtype=np.int64)
    if budget <= 0:
        return plan
    if front.size == 0:
        raise InvalidStateError("positive budget but empty criteria front")
    full, rest = divmod(int(budget), front.size)
    plan[front] += full
    plan[front[:rest]] += 1
    return plan
