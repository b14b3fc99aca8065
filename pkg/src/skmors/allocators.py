"""Replication allocators: SK-MORS, EQUAL, simplified MOCBA and their SK hybrids.

Every allocator returns an integer plan over all designs that sums exactly
to the per-iteration budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import criteria, hypervolume, screening
from .core import ParetoState, SampleStore, pareto_front
from .errors import ConfigurationError, InvalidInputError

ZERO_DELTA = 1e-12
_TINY = 1e-300


# ---------------------------------------------------------------------------
# EQUAL


def allocate_equal(n: int, budget: int) -> np.ndarray:
    """floor(B/n) to every design, the remainder one each in ascending id order."""
    if n < 1:
        raise InvalidInputError("need at least one design")
    if budget < 0:
        raise InvalidInputError("budget must be nonnegative")
    base, rest = divmod(int(budget), n)
    plan = np.full(n, base, dtype=np.int64)
    plan[:rest] += 1
    return plan


def largest_remainder(weights, budget: int) -> np.ndarray:
    """Integer apportionment of ``budget`` proportional to ``weights``.

    Leftover units go to the largest fractional parts, lower index first on ties.
    """
    w = np.asarray(weights, dtype=np.float64)
    total = w.sum()
    if budget <= 0:
        return np.zeros(w.size, dtype=np.int64)
    if not np.isfinite(total) or total <= 0:
        return allocate_equal(w.size, budget)
    quota = budget * w / total
    plan = np.floor(quota).astype(np.int64)
    short = int(budget - plan.sum())
    if short > 0:
        frac = quota - plan
        order = np.lexsort((np.arange(w.size), -frac))
        plan[order[:short]] += 1
    return plan


# ---------------------------------------------------------------------------
# MOCBA


@dataclass
class MocbaState:
    """Quantities of the simplified MOCBA rules for one set of means/variances."""

    delta: np.ndarray  # (n, n, m): delta[i, p, j] = f_ij - f_pj
    crit_obj: np.ndarray  # (n, n): objective j^i_p
    strongest: np.ndarray  # (n,): p_i
    in_a: np.ndarray  # (n,) bool: member of S_A (labelled dominated)
    alpha: np.ndarray = field(default=None)

    @property
    def s_a(self):
        return np.flatnonzero(self.in_a)

    @property
    def s_b(self):
        return np.flatnonzero(~self.in_a)

    def d_h(self, h):
        """Designs whose strongest dominator is ``h``."""
        return np.flatnonzero(self.strongest == h)

    def d_d(self, d):
        """Members of S_A whose strongest dominator is ``d``."""
        return np.flatnonzero((self.strongest == d) & self.in_a)


def _clamp_delta(delta, means):
    span = means.max(axis=0) - means.min(axis=0)
    floor = ZERO_DELTA * np.where(span > 0, span, 1.0)
    small = np.abs(delta) < floor
    return np.where(small, np.where(delta < 0, -floor, floor), delta)


def mocba_classify(means, tau2) -> MocbaState:
    """Strongest dominators, critical objectives and the S_A / S_B split.

    ``tau2`` is the variance of each mean estimate (s^2 / r, or the
    prediction variance for the SK-fed variant).
    """
    means = np.asarray(means, dtype=np.float64)
    tau2 = np.asarray(tau2, dtype=np.float64)
    n, m = means.shape
    if n < 2:
        raise InvalidInputError("MOCBA needs at least two designs")
    if tau2.shape != means.shape or not np.all(np.isfinite(tau2)):
        raise InvalidInputError("MOCBA needs finite variance estimates for every design")
    delta = _clamp_delta(means[:, None, :] - means[None, :, :], means)
    pair_var = np.maximum(tau2[:, None, :] + tau2[None, :, :], _TINY)
    # signed standardized gap; the probability that p beats i on j is increasing in it
    score = delta * np.abs(delta) / pair_var
    # j^i_p: objective on which p beats i with the lowest probability
    crit = np.argmin(score, axis=2)
    crit_score = np.take_along_axis(score, crit[:, :, None], axis=2)[:, :, 0]
    np.fill_diagonal(crit_score, -np.inf)
    # p_i: design that dominates i with the highest probability
    strongest = np.argmax(crit_score, axis=1)

    idx = np.arange(n)
    sq = delta**2 / pair_var  # squared standardized gap, per objective
    own = sq[idx, strongest, crit[idx, strongest]]
    in_a = np.zeros(n, dtype=bool)
    for h in range(n):
        dh = np.flatnonzero(strongest == h)
        rival = np.inf if dh.size == 0 else np.min(sq[dh, h, crit[dh, h]])
        in_a[h] = own[h] < rival
    return MocbaState(delta=delta, crit_obj=crit, strongest=strongest, in_a=in_a)


def mocba_ratios(state: MocbaState, tau2) -> np.ndarray:
    """Raw allocation ratios; the S_A member with the largest (tau^2/delta)^2 has ratio 1."""
    tau2 = np.asarray(tau2, dtype=np.float64)
    n = tau2.shape[0]
    alpha = np.zeros(n)
    s_a = state.s_a
    if s_a.size == 0:
        return alpha
    p = state.strongest[s_a]
    j = state.crit_obj[s_a, p]
    raw = (tau2[s_a, j] / state.delta[s_a, p, j]) ** 2
    top = raw.max()
    alpha[s_a] = raw / top if top > 0 else 1.0

    s_b = state.s_b
    filled = []
    for d in s_b:
        dd = state.d_d(d)
        if dd.size == 0:
            continue
        jj = state.crit_obj[dd, d]
        ratio = tau2[d, jj] / np.maximum(tau2[dd, jj], _TINY)
        alpha[d] = np.sqrt(np.sum(ratio * alpha[dd] ** 2))
        filled.append(d)
    orphans = [d for d in s_b if d not in set(filled)]
    if orphans:
        alpha[orphans] = np.mean(alpha[filled]) if filled else 1.0
    state.alpha = alpha
    return alpha


def allocate_mocba(means, tau2, budget: int) -> np.ndarray:
    means = np.asarray(means, dtype=np.float64)
    n = means.shape[0]
    if budget <= 0:
        return np.zeros(n, dtype=np.int64)
    state = mocba_classify(means, tau2)
    if state.s_a.size == 0:
        return allocate_equal(n, budget)
    return largest_remainder(mocba_ratios(state, tau2), budget)


# ---------------------------------------------------------------------------
# SK-MORS


@dataclass
class StepInfo:
    """Diagnostics of one allocation step."""

    retained: int
    front_size: int
    screened: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    front: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    ehvd: np.ndarray | None = None
    pd: np.ndarray | None = None


def skmors_iterate(
    means,
    mean_var,
    preds,
    pred_var,
    budget: int,
    screening_mode: str | None = "box",
    omega: float = screening.DEFAULT_OMEGA,
    criterion: str = "both",
):
    """One SK-MORS allocation step over the current sample and metamodel state.

    Returns the plan and a StepInfo. ``criterion`` is ``"both"`` for the
    (EHVD, PD) front, or ``"ehvd"`` / ``"pd"`` for single-criterion variants.
    """
    means = np.asarray(means, dtype=np.float64)
    preds = np.asarray(preds, dtype=np.float64)
    pred_sd = np.sqrt(np.maximum(np.asarray(pred_var, dtype=np.float64), 0.0))
    mean_sd = np.sqrt(np.maximum(np.nan_to_num(np.asarray(mean_var, dtype=np.float64)), 0.0))
    n = means.shape[0]

    state = ParetoState.from_values(means, preds)
    bounds = screening.confidence_bounds(means, mean_sd, preds, pred_sd, omega)
    scr = screening.screen(bounds, state, screening_mode)
    retained = scr.retained

    ref = hypervolume.reference_point(means, preds)
    ehvd = hypervolume.ehvd_all(retained, state.observed_front, means, preds, ref)
    pd = criteria.posterior_distance(means[retained], preds[retained], pred_sd[retained])
    scores = criteria.CriteriaScores(retained, ehvd, pd)
    if criterion == "both":
        front = criteria.criteria_front(scores)
    elif criterion in ("ehvd", "pd"):
        front = criteria.single_criterion_front(scores, criterion)
    else:
        raise InvalidInputError(f"unknown criterion {criterion!r}")

    plan = criteria.round_robin(front, budget, n)
    info = StepInfo(
        retained=int(retained.size),
        front_size=int(front.size),
        screened=scr.screened,
        front=front,
        ehvd=ehvd,
        pd=pd,
    )
    return plan, info


# ---------------------------------------------------------------------------
# uniform interface


@dataclass
class IterationContext:
    """Everything an allocator may look at in one iteration."""

    store: SampleStore
    preds: np.ndarray | None = None
    pred_var: np.ndarray | None = None


@dataclass(frozen=True)
class Allocator:
    name: str
    kind: str  # "skmors" | "equal" | "mocba"
    needs_models: bool
    identify_predicted: bool
    screening_mode: str | None = None
    criterion: str = "both"
    feed_predictions: bool = False
    omega: float = screening.DEFAULT_OMEGA

    def allocate(self, ctx: IterationContext, budget: int):
        store = ctx.store
        n = store.n
        if self.kind == "equal":
            plan = allocate_equal(n, budget)
            return plan, StepInfo(retained=n, front_size=int(np.count_nonzero(plan)))
        if self.kind == "mocba":
            if self.feed_predictions:
                plan = allocate_mocba(ctx.preds, ctx.pred_var, budget)
            else:
                plan = allocate_mocba(store.means, store.mean_variances, budget)
            return plan, StepInfo(retained=n, front_size=int(np.count_nonzero(plan)))
        return skmors_iterate(
            store.means,
            store.mean_variances,
            ctx.preds,
            ctx.pred_var,
            budget,
            screening_mode=self.screening_mode,
            omega=self.omega,
            criterion=self.criterion,
        )

    def identify(self, ctx: IterationContext) -> np.ndarray:
        """Indices declared Pareto-optimal at this point."""
        if self.identify_predicted:
            return pareto_front(ctx.preds)
        return pareto_front(ctx.store.means)


VARIANTS = {
    "SKMORS_none": dict(kind="skmors", needs_models=True, identify_predicted=True, screening_mode="none"),
    "SKMORS_box": dict(kind="skmors", needs_models=True, identify_predicted=True, screening_mode="box"),
    "SKMORS_band": dict(kind="skmors", needs_models=True, identify_predicted=True, screening_mode="band"),
    "SKMORS_PD": dict(kind="skmors", needs_models=True, identify_predicted=True, screening_mode="box", criterion="pd"),
    "SKMORS_HV": dict(kind="skmors", needs_models=True, identify_predicted=True, screening_mode="box", criterion="ehvd"),
    "EQUAL": dict(kind="equal", needs_models=False, identify_predicted=False),
    "EQUAL_SKi": dict(kind="equal", needs_models=True, identify_predicted=True),
    "MOCBA": dict(kind="mocba", needs_models=False, identify_predicted=False),
    "MOCBA_SK": dict(kind="mocba", needs_models=True, identify_predicted=True, feed_predictions=True),
    "MOCBA_SKi": dict(kind="mocba", needs_models=True, identify_predicted=True),
}


def make_allocator(name: str, omega: float = screening.DEFAULT_OMEGA) -> Allocator:
    key = name.replace("-", "_")
    if key not in VARIANTS:
        raise ConfigurationError(f"unknown allocator {name!r}; expected one of {sorted(VARIANTS)}")
    return Allocator(name=key, omega=omega, **VARIANTS[key])
