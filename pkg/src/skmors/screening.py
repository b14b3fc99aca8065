"""Confidence bounds and the Box / Band screening heuristics.

Screening only ever removes designs that are off both the observed and the
predicted front, and only for the current iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import ParetoState
from .errors import InvalidInputError

DEFAULT_OMEGA = 3.0


@dataclass(frozen=True)
class ConfidenceBounds:
    lcb: np.ndarray
    ucb: np.ndarray
    lcb_hat: np.ndarray
    ucb_hat: np.ndarray
    omega: float


@dataclass(frozen=True)
class ScreeningResult:
    retained: np.ndarray
    screened: np.ndarray


def confidence_bounds(means, mean_sd, preds, pred_sd, omega=DEFAULT_OMEGA) -> ConfidenceBounds:
    """Bounds f +/- omega*sd on both the sample side and the prediction side.

    ``mean_sd`` is the standard error of each sample mean (s / sqrt(r)).
    """
    if not omega > 0:
        raise InvalidInputError("omega must be positive")
    means, mean_sd, preds, pred_sd = (np.asarray(a, dtype=np.float64) for a in (means, mean_sd, preds, pred_sd))
    if not (means.shape == mean_sd.shape == preds.shape == pred_sd.shape):
        raise InvalidInputError("bound inputs must share a shape")
    if np.any(mean_sd < 0) or np.any(pred_sd < 0):
        raise InvalidInputError("standard deviations must be nonnegative")
    return ConfidenceBounds(
        lcb=means - omega * mean_sd,
        ucb=means + omega * mean_sd,
        lcb_hat=preds - omega * pred_sd,
        ucb_hat=preds + omega * pred_sd,
        omega=float(omega),
    )


def bounds_from_store(store, preds, pred_var, omega=DEFAULT_OMEGA) -> ConfidenceBounds:
    se = np.sqrt(np.nan_to_num(store.mean_variances, nan=0.0))
    return confidence_bounds(store.means, se, preds, np.sqrt(np.maximum(pred_var, 0.0)), omega)


def _non_front(n, state: ParetoState):
    keep = np.ones(n, dtype=bool)
    keep[state.observed_front] = False
    keep[state.predicted_front] = False
    return np.flatnonzero(keep)


def _result(n, screened):
    screened = np.asarray(sorted(screened), dtype=np.int64)
    mask = np.ones(n, dtype=bool)
    mask[screened] = False
    return ScreeningResult(retained=np.flatnonzero(mask), screened=screened)


def screen_box(bounds: ConfidenceBounds, state: ParetoState) -> ScreeningResult:
    n = bounds.lcb.shape[0]
    candidates = _non_front(n, state)
    u_obs = bounds.ucb[state.observed_front].max(axis=0)
    u_pred = bounds.ucb_hat[state.predicted_front].max(axis=0)
    hit = (bounds.lcb[candidates] > u_obs) & (bounds.lcb_hat[candidates] > u_pred)
    return _result(n, candidates[np.any(hit, axis=1)])


def screen_band(bounds: ConfidenceBounds, state: ParetoState) -> ScreeningResult:
    n = bounds.lcb.shape[0]
    candidates = _non_front(n, state)
    if candidates.size == 0:
        return _result(n, [])
    pf = state.observed_front
    ppf = state.predicted_front
    # nearest front member by distance from this design's LCB to the member's UCB
    u = pf[_kernels.nearest_rows(bounds.lcb[candidates], bounds.ucb[pf])]
    v = ppf[_kernels.nearest_rows(bounds.lcb_hat[candidates], bounds.ucb_hat[ppf])]
    hit = (bounds.lcb[candidates] > bounds.ucb[u]) & (bounds.lcb_hat[candidates] > bounds.ucb_hat[v])
    return _result(n, candidates[np.any(hit, axis=1)])


def screen(bounds: ConfidenceBounds, state: ParetoState, mode: str | None) -> ScreeningResult:
    if mode in (None, "none"):
        return _result(bounds.lcb.shape[0], [])
    if mode == "box":
        return screen_box(bounds, state)
    if mode == "band":
        return screen_band(bounds, state)
    raise InvalidInputError(f"unknown screening mode {mode!r}")
