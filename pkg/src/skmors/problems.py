"""Bi-objective test problems, heteroscedastic noise and candidate-set generation.

WFG3 and WFG4 follow the WFG toolkit definitions (Huband et al., 2006) with
D = 1, S_i = 2i and z_i in [0, 2i]. DTLZ7 follows Deb et al. (2005).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import pareto_mask
from .errors import GenerationError, InvalidInputError

FORMAT_VERSION = 1
NOISE_LEVELS = {
    "zero": (0.0, 0.0),
    "low": (0.001, 0.5),
    "medium": (0.01, 1.0),
    "high": (1.0, 2.0),
}


# ---------------------------------------------------------------------------
# WFG building blocks


def _correct01(y, eps=1e-10):
    y = np.where((y < 0) & (y >= -eps), 0.0, y)
    return np.where((y > 1) & (y <= 1 + eps), 1.0, y)


def s_linear(y, A):
    return _correct01(np.abs(y - A) / np.abs(np.floor(A - y) + A))


def s_multi(y, A, B, C):
    t = np.abs(y - C) / (2.0 * (np.floor(C - y) + C))
    arg = (4.0 * A + 2.0) * np.pi * (0.5 - t)
    return _correct01((1.0 + np.cos(arg) + 4.0 * B * t**2) / (B + 2.0))


def r_sum(y):
    return _correct01(y.mean(axis=-1))


def r_nonsep(y, A):
    n = y.shape[-1]
    num = np.zeros(y.shape[:-1])
    for j in range(n):
        num = num + y[..., j]
        for k in range(A - 1):
            num = num + np.abs(y[..., j] - y[..., (1 + j + k) % n])
    half = np.ceil(A / 2.0)
    den = n * half * (1.0 + 2.0 * A - 2.0 * half) / A
    return _correct01(num / den)


def _shape(x, M, kind):
    """Shape values h_1..h_M from the M-1 position coordinates in ``x``."""
    if kind == "linear":
        a, b = x, 1.0 - x
    else:
        a, b = np.sin(0.5 * np.pi * x), np.cos(0.5 * np.pi * x)
    h = []
    for mm in range(1, M + 1):
        if mm == 1:
            v = np.prod(a[..., : M - 1], axis=-1)
        elif mm < M:
            v = np.prod(a[..., : M - mm], axis=-1) * b[..., M - mm]
        else:
            v = b[..., 0]
        h.append(v)
    return _correct01(np.stack(h, axis=-1))


def wfg(z, M, k, which):
    """Evaluate WFG3 or WFG4 on rows of ``z`` (any M, position count ``k``)."""
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    n = z.shape[1]
    l = n - k
    y = z / (2.0 * np.arange(1, n + 1))
    gap = k // (M - 1)
    if which == "WFG3":
        y = y.copy()
        y[:, k:] = s_linear(y[:, k:], 0.35)
        pairs = [r_nonsep(y[:, k + 2 * i : k + 2 * i + 2], 2) for i in range(l // 2)]
        y = np.column_stack([y[:, :k]] + pairs)
        A = np.zeros(M - 1)
        A[0] = 1.0
        kind = "linear"
    elif which == "WFG4":
        y = s_multi(y, 30.0, 10.0, 0.35)
        A = np.ones(M - 1)
        kind = "concave"
    else:
        raise InvalidInputError(f"unknown WFG problem {which}")
    t = [r_sum(y[:, (i - 1) * gap : i * gap]) for i in range(1, M)]
    t.append(r_sum(y[:, k:]))
    t = np.column_stack(t)
    xM = t[:, -1]
    x = np.maximum(xM[:, None], A) * (t[:, :-1] - 0.5) + 0.5
    h = _shape(x, M, kind)
    S = 2.0 * np.arange(1, M + 1)
    return xM[:, None] + S * h


def dtlz7(x, M=2):
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    f = x[:, : M - 1]
    g = 1.0 + 9.0 / (x.shape[1] - M + 1) * np.sum(x[:, M - 1 :], axis=1)
    h = M - np.sum(f / (1.0 + g)[:, None] * (1.0 + np.sin(3.0 * np.pi * f)), axis=1)
    return np.column_stack([f, (1.0 + g) * h])


# ---------------------------------------------------------------------------
# problems


@dataclass(frozen=True)
class Problem:
    name: str
    d: int
    m: int = 2
    k: int = 0  # position parameters (WFG only)
    proximity_width: float = 0.0

    @property
    def lower(self):
        return np.zeros(self.d)

    @property
    def upper(self):
        if self.name.startswith("WFG"):
            return 2.0 * np.arange(1, self.d + 1)
        return np.ones(self.d)

    @property
    def l(self):
        return self.d - self.k

    def descriptor(self):
        return {"name": self.name, "d": self.d, "m": self.m, "k": self.k,
                "proximity_width": self.proximity_width}


def get_problem(name: str) -> Problem:
    key = name.upper()
    if key == "WFG3":
        # l must be even for the pairwise non-separable reduction
        return Problem("WFG3", d=5, k=1, proximity_width=0.1)
    if key == "WFG4":
        # width of the first monotone lobe of the multimodal shift above 0.35
        return Problem("WFG4", d=5, k=2, proximity_width=1.3 / 122.0)
    if key == "DTLZ7":
        return Problem("DTLZ7", d=2, proximity_width=0.02)
    raise InvalidInputError(f"unknown problem {name!r}")


def eval_true(p: Problem, x) -> np.ndarray:
    """True objective vector(s); rows of ``x`` must lie in the domain box."""
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != p.d:
        raise InvalidInputError(f"{p.name} expects {p.d} decision variables")
    if not np.all(np.isfinite(X)) or np.any(X < p.lower) or np.any(X > p.upper):
        raise InvalidInputError("decision vector outside the domain box")
    if p.name == "DTLZ7":
        F = dtlz7(X, p.m)
    else:
        F = wfg(X, p.m, p.k, p.name)
    return F[0] if single else F


def _dtlz7_grid_front(resolution=20001):
    f1 = np.linspace(0.0, 1.0, resolution)
    F = dtlz7(np.column_stack([f1, np.zeros_like(f1)]))
    best = np.minimum.accumulate(F[:, 1])
    return f1, best


def optimal_designs(p: Problem, rng, n: int) -> np.ndarray:
    """Designs on the Pareto-optimal set via the benchmark's optimal parameterization."""
    if p.name == "DTLZ7":
        f1, best = _dtlz7_grid_front()
        out = []
        while len(out) < n:
            x1 = rng.uniform(0.0, 1.0, size=4 * n)
            f2 = dtlz7(np.column_stack([x1, np.zeros_like(x1)]))[:, 1]
            ref = np.interp(x1, f1, best)
            # keep points whose curve value is not above the best seen to the left
            ok = f2 <= ref + 1e-12
            out.extend(x1[ok].tolist())
        x1 = np.asarray(out[:n])
        return np.column_stack([x1, np.zeros(n)])
    ub = p.upper
    X = np.empty((n, p.d))
    X[:, : p.k] = rng.uniform(0.0, 1.0, size=(n, p.k)) * ub[: p.k]
    X[:, p.k :] = 0.35 * ub[p.k :]
    return X


def _near_front_designs(p: Problem, rng, n: int) -> np.ndarray:
    X = optimal_designs(p, rng, n)
    if p.name == "DTLZ7":
        X[:, 1] = rng.uniform(0.0, p.proximity_width, size=n)
    else:
        ub = p.upper[p.k :]
        delta = rng.uniform(0.0, p.proximity_width, size=(n, p.l))
        X[:, p.k :] = np.minimum((0.35 + delta) * ub, ub)
    return X


def _uniform_designs(p: Problem, rng, n: int) -> np.ndarray:
    return rng.uniform(p.lower, p.upper, size=(n, p.d))


# ---------------------------------------------------------------------------
# candidate sets


@dataclass
class CandidateSet:
    problem: Problem
    designs: np.ndarray
    objectives: np.ndarray
    labels: np.ndarray  # bool, True for truly Pareto-optimal
    seed: int
    proximity: bool = True
    rf: np.ndarray = field(default=None)

    def __post_init__(self):
        self.designs = np.asarray(self.designs, dtype=np.float64)
        self.objectives = np.asarray(self.objectives, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=bool)
        if self.rf is None:
            self.rf = self.objectives.max(axis=0) - self.objectives.min(axis=0)
        self.rf = np.asarray(self.rf, dtype=np.float64)

    @property
    def size(self):
        return self.designs.shape[0]

    @property
    def truth(self) -> np.ndarray:
        return np.flatnonzero(self.labels)

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": "skmors-candidates",
                "version": FORMAT_VERSION,
                "problem": self.problem.descriptor(),
                "seed": self.seed,
                "proximity": self.proximity,
                "designs": self.designs.tolist(),
                "objectives": self.objectives.tolist(),
                "labels": self.labels.astype(int).tolist(),
                "rf": self.rf.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "CandidateSet":
        obj = json.loads(text)
        if obj.get("format") != "skmors-candidates" or obj.get("version") != FORMAT_VERSION:
            raise InvalidInputError("not a version-1 candidate-set file")
        pd = obj["problem"]
        problem = Problem(pd["name"], d=pd["d"], m=pd["m"], k=pd["k"],
                          proximity_width=pd.get("proximity_width", 0.0))
        return cls(
            problem=problem,
            designs=np.asarray(obj["designs"]),
            objectives=np.asarray(obj["objectives"]),
            labels=np.asarray(obj["labels"], dtype=bool),
            seed=obj["seed"],
            proximity=obj.get("proximity", True),
            rf=np.asarray(obj["rf"]),
        )

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "CandidateSet":
        with open(path) as fh:
            return cls.from_json(fh.read())


def generate_candidates(p: Problem, size: int, n_pareto: int, seed: int, proximity=True,
                        max_draws=None) -> CandidateSet:
    """Candidate set with exactly ``n_pareto`` truly non-dominated designs.

    Pareto-optimal designs come from the optimal parameterization; the rest
    are drawn near the front (``proximity``) or uniformly, and redrawn while
    they fail to be dominated by the front designs.
    """
    if not 1 <= n_pareto <= size:
        raise InvalidInputError("need 1 <= n_pareto <= size")
    rng = np.random.default_rng(seed)
    front = optimal_designs(p, rng, n_pareto)
    front_f = eval_true(p, front)
    if not np.all(pareto_mask(front_f)):
        raise GenerationError("optimal designs are not mutually non-dominated")

    draw = _near_front_designs if proximity else _uniform_designs
    need = size - n_pareto
    budget = max_draws if max_draws is not None else 2000 * max(need, 1)
    kept, kept_f, used = [], [], 0
    while len(kept) < need:
        if used >= budget:
            raise GenerationError(f"only {len(kept)} of {need} dominated designs after {used} draws")
        batch = draw(p, rng, 64)
        used += batch.shape[0]
        Fb = eval_true(p, batch)
        for x, f in zip(batch, Fb):
            dom = np.all(front_f <= f, axis=1) & np.any(front_f < f, axis=1)
            if dom.any() and len(kept) < need:
                kept.append(x)
                kept_f.append(f)
    designs = np.vstack([front] + ([np.asarray(kept)] if kept else []))
    objectives = np.vstack([front_f] + ([np.asarray(kept_f)] if kept_f else []))
    order = rng.permutation(size)
    designs, objectives = designs[order], objectives[order]
    labels = pareto_mask(objectives)
    if labels.sum() != n_pareto:
        raise GenerationError("label count does not match the requested Pareto-set size")
    return CandidateSet(p, designs, objectives, labels, seed, proximity)


# ---------------------------------------------------------------------------
# noise


@dataclass(frozen=True)
class NoiseSpec:
    level: str
    lo: float
    hi: float

    @classmethod
    def of(cls, level: str) -> "NoiseSpec":
        key = level.lower()
        if key not in NOISE_LEVELS:
            raise InvalidInputError(f"unknown noise level {level!r}")
        return cls(key, *NOISE_LEVELS[key])


def noise_sd(cset: CandidateSet, spec: NoiseSpec, f=None) -> np.ndarray:
    """Noise standard deviation, growing linearly from lo*RF_j at the best value to hi*RF_j at the worst.

    ``f`` defaults to the candidate objective matrix; any array of objective
    vectors is accepted.
    """
    F = cset.objectives if f is None else np.asarray(f, dtype=np.float64)
    fmin = cset.objectives.min(axis=0)
    fmax = cset.objectives.max(axis=0)
    span = np.where(fmax > fmin, fmax - fmin, 1.0)
    frac = np.clip((F - fmin) / span, 0.0, 1.0)
    tmin = spec.lo * cset.rf
    tmax = spec.hi * cset.rf
    return tmin + frac * (tmax - tmin)


def sample_observation(f_true, sd, rng, size=None) -> np.ndarray:
    """True value plus independent Gaussian noise with the given sd per objective."""
    f_true = np.asarray(f_true, dtype=np.float64)
    sd = np.asarray(sd, dtype=np.float64)
    shape = f_true.shape if size is None else (size,) + f_true.shape
    return f_true + sd * rng.standard_normal(shape)


class Simulator:
    """Noisy oracle over a candidate set with one random stream per design."""

    def __init__(self, cset: CandidateSet, spec: NoiseSpec, streams):
        self.cset = cset
        self.spec = spec
        self.sd = noise_sd(cset, spec)
        self.streams = streams
        self.calls = 0

    def sample(self, i: int, count: int) -> np.ndarray:
        if count <= 0:
            return np.zeros((0, self.cset.objectives.shape[1]))
        self.calls += int(count)
        return sample_observation(self.cset.objectives[i], self.sd[i], self.streams[i], size=count)
