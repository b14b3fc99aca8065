"""Candidate statistics, Pareto dominance and non-dominated filtering.

All objectives are minimized. Maximization problems must be negated before
they reach this module.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidInputError


class DomRelation(enum.Enum):
    DOMINATES_STRICTLY = "dominates_strictly"
    DOMINATES = "dominates"
    DOMINATED_BY = "dominated_by"
    DOMINATED_STRICTLY_BY = "dominated_strictly_by"
    INCOMPARABLE = "incomparable"
    EQUAL = "equal"

    def is_dominating(self) -> bool:
        return self in (DomRelation.DOMINATES, DomRelation.DOMINATES_STRICTLY)

    def is_dominated(self) -> bool:
        return self in (DomRelation.DOMINATED_BY, DomRelation.DOMINATED_STRICTLY_BY)


def _as_objective_vector(v, name):
    a = np.asarray(v, dtype=np.float64)
    if a.ndim != 1 or a.size < 2:
        raise InvalidInputError(f"{name} must be a 1-D vector with at least 2 objectives")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return a


def dominates(a, b) -> DomRelation:
    """Dominance relation of ``a`` relative to ``b`` under minimization."""
    a = _as_objective_vector(a, "a")
    b = _as_objective_vector(b, "b")
    if a.shape != b.shape:
        raise InvalidInputError(f"length mismatch: {a.size} vs {b.size}")
    if np.array_equal(a, b):
        return DomRelation.EQUAL
    if np.all(a < b):
        return DomRelation.DOMINATES_STRICTLY
    if np.all(b < a):
        return DomRelation.DOMINATED_STRICTLY_BY
    if np.all(a <= b):
        return DomRelation.DOMINATES
    if np.all(b <= a):
        return DomRelation.DOMINATED_BY
    return DomRelation.INCOMPARABLE


def pareto_mask(points) -> np.ndarray:
    F = np.asarray(points, dtype=np.float64)
    if F.ndim != 2 or F.shape[0] == 0:
        raise InvalidInputError("pareto_front needs a non-empty (n, m) array")
    if not np.all(np.isfinite(F)):
        raise InvalidInputError("objective matrix has non-finite entries")
    return _kernels.pareto_mask(F)


def pareto_front(points) -> np.ndarray:
    """Sorted indices of the rows not dominated by any other row.

    Identical vectors do not dominate each other, so duplicates of a front
    point are all returned.
    """
    return np.flatnonzero(pareto_mask(points))


@dataclass
class SampleStore:
    """Per-design replication counts, running means and running M2 sums.

    Every observation is an m-vector, so all objectives of a design share
    the same count.
    """

    n: int
    m: int
    counts: np.ndarray = field(init=False)
    means: np.ndarray = field(init=False)
    m2: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise InvalidInputError("store needs n >= 1 designs and m >= 1 objectives")
        self.counts = np.zeros(self.n, dtype=np.int64)
        self.means = np.zeros((self.n, self.m))
        self.m2 = np.zeros((self.n, self.m))

    @property
    def variances(self) -> np.ndarray:
        """Unbiased sample variances; NaN where fewer than 2 replications exist."""
        out = np.full((self.n, self.m), np.nan)
        ok = self.counts >= 2
        out[ok] = self.m2[ok] / (self.counts[ok, None] - 1)
        return out

    @property
    def mean_variances(self) -> np.ndarray:
        """Variance of each sample mean, s^2 / r."""
        return self.variances / self.counts[:, None]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def record(self, i: int, obs) -> "SampleStore":
        """Fold a batch of observations for design ``i`` into the statistics.

        Uses the pairwise (Chan et al.) merge of batch mean and M2, which is
        algebraically the batch mean update and stays stable for long streams.
        """
        obs = np.asarray(obs, dtype=np.float64)
        if obs.size == 0:
            return self
        obs = obs.reshape(-1, self.m)
        if not np.all(np.isfinite(obs)):
            raise InvalidInputError("observations must be finite")
        if not 0 <= i < self.n:
            raise InvalidInputError(f"design index {i} out of range")
        nb = obs.shape[0]
        bmean = obs.mean(axis=0)
        bm2 = np.sum((obs - bmean) ** 2, axis=0)
        na = self.counts[i]
        tot = na + nb
        delta = bmean - self.means[i]
        self.means[i] = self.means[i] + delta * (nb / tot)
        self.m2[i] = self.m2[i] + bm2 + delta**2 * (na * nb / tot)
        self.counts[i] = tot
        return self

    def copy(self) -> "SampleStore":
        other = SampleStore(self.n, self.m)
        other.counts = self.counts.copy()
        other.means = self.means.copy()
        other.m2 = self.m2.copy()
        return other


def record_replications(store: SampleStore, i: int, obs) -> SampleStore:
    return store.record(i, obs)


@dataclass(frozen=True)
class ParetoState:
    """Observed (sample-mean) and predicted (metamodel) front memberships."""

    observed_front: np.ndarray
    predicted_front: np.ndarray

    @classmethod
    def from_values(cls, means, preds=None) -> "ParetoState":
        obs = pareto_front(means)
        pred = pareto_front(preds) if preds is not None else obs
        return cls(obs, pred)

    def union(self) -> np.ndarray:
        return np.union1d(self.observed_front, self.predicted_front)
