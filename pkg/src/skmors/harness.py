"""Macroreplicated experiments, per-iteration records, aggregation and paired comparison.

Random streams
--------------
Every stream derives from the root seed through ``SeedSequence`` spawn keys:

* ``(macrorep, 0, design)`` for the observations of one design,
* ``(macrorep, 1)`` for metamodel restarts.

A design's k-th replication is therefore the same draw for every allocator and
for any evaluation order, which also pairs the allocators for comparison.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import kriging
from .allocators import VARIANTS, IterationContext, make_allocator
from .core import SampleStore
from .errors import ConfigurationError, InvalidInputError, InvalidStateError, ModelFitError
from .metrics import classify_errors, f1, precision, recall
from .problems import CandidateSet, NoiseSpec, Simulator, generate_candidates, get_problem

OUTPUT_ENV = "SKMORS_OUTPUT_DIR"
CSV_FIELDS = (
    "macrorep", "iteration", "cum_reps", "f1", "precision", "recall",
    "mce", "mci", "retained", "front_size", "wall_ms",
)
SCENARIOS = {
    # problem: (|S|, |PS_t|, noise, iterations)
    "WFG3": (100, 20, "high", 15),
    "WFG4": (100, 20, "medium", 30),
    "DTLZ7": (100, 50, "low", 30),
}
_OBS, _FIT = 0, 1
RETRY_JITTER = 1e-6


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "skmors-output"))


@dataclass
class ExperimentConfig:
    problem: str = "WFG4"
    noise: str | None = None
    allocator: str = "SKMORS_box"
    budget: int = 500
    iterations: int | None = None
    macroreps: int = 30
    r0: int = 5
    omega: float = 3.0
    seed: int = 0
    candidates: str | None = None  # path to a saved candidate set
    size: int | None = None
    n_pareto: int | None = None
    candidate_seed: int | None = None
    proximity: bool = True
    output: str | None = None
    n_starts: int = 8
    refit_starts: int = 2
    timing: bool = False
    workers: int = 1

    def __post_init__(self):
        key = self.problem.upper()
        if key not in SCENARIOS:
            raise ConfigurationError(f"unknown problem {self.problem!r}")
        self.problem = key
        size, n_pareto, noise, iterations = SCENARIOS[key]
        self.noise = (self.noise or noise).lower()
        self.iterations = iterations if self.iterations is None else self.iterations
        self.size = size if self.size is None else self.size
        self.n_pareto = n_pareto if self.n_pareto is None else self.n_pareto
        self.allocator = self.allocator.replace("-", "_")
        self.validate()

    def validate(self):
        if self.allocator not in VARIANTS:
            raise ConfigurationError(f"unknown allocator {self.allocator!r}")
        NoiseSpec.of(self.noise)
        for name in ("budget", "macroreps", "size", "n_pareto", "n_starts", "refit_starts", "workers"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be positive")
        if self.iterations < 0:
            raise ConfigurationError("iterations must be nonnegative")
        if self.r0 < 3:
            raise ConfigurationError("r0 must be at least 3 so every design has a sample variance")
        if self.n_pareto > self.size:
            raise ConfigurationError("n_pareto cannot exceed size")
        if not self.omega > 0:
            raise ConfigurationError("omega must be positive")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(obj) - known
        if extra:
            raise ConfigurationError(f"unknown config keys {sorted(extra)}")
        return cls(**obj)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class IterationRecord:
    macrorep: int
    iteration: int
    cum_reps: int
    f1: float
    precision: float
    recall: float
    mce: int
    mci: int
    retained: int
    front_size: int
    wall_ms: float = 0.0

    def row(self) -> list:
        return [getattr(self, k) for k in CSV_FIELDS]


@dataclass
class MacrorepResult:
    macrorep: int
    records: list
    calls: int
    failure: dict | None = None


@dataclass
class RunResult:
    config: ExperimentConfig
    records: list
    calls: list  # simulator calls per macroreplication
    failures: list = field(default_factory=list)


def obtain_candidates(cfg: ExperimentConfig) -> CandidateSet:
    if cfg.candidates:
        return CandidateSet.load(cfg.candidates)
    seed = cfg.seed if cfg.candidate_seed is None else cfg.candidate_seed
    return generate_candidates(get_problem(cfg.problem), cfg.size, cfg.n_pareto, seed, cfg.proximity)


def _stream(root, *key):
    return np.random.default_rng(np.random.SeedSequence(root, spawn_key=key))


def _fit_models(designs, store, rng, warm, n_starts):
    try:
        return kriging.fit_all(designs, store, rng=rng, warm_start=warm, n_starts=n_starts)
    except ModelFitError:
        # one retry with a larger jitter floor
        return kriging.fit_all(designs, store, rng=rng, warm_start=warm, n_starts=n_starts,
                               jitter_start=RETRY_JITTER)


def run_macrorep(cfg: ExperimentConfig, cset: CandidateSet, macrorep: int) -> MacrorepResult:
    alloc = make_allocator(cfg.allocator, cfg.omega)
    n, m = cset.objectives.shape
    streams = [_stream(cfg.seed, macrorep, _OBS, i) for i in range(n)]
    fit_rng = _stream(cfg.seed, macrorep, _FIT)
    sim = Simulator(cset, NoiseSpec.of(cfg.noise), streams)
    truth = cset.truth

    store = SampleStore(n, m)
    for i in range(n):
        store.record(i, sim.sample(i, cfg.r0))

    records, warm = [], None
    for t in range(cfg.iterations + 1):
        start = time.perf_counter()
        ctx = IterationContext(store)
        if alloc.needs_models:
            starts = cfg.n_starts if warm is None else cfg.refit_starts
            try:
                models = _fit_models(cset.designs, store, fit_rng, warm, starts)
            except ModelFitError as exc:
                failure = {"macrorep": macrorep, "iteration": t, "error": str(exc)}
                return MacrorepResult(macrorep, records, sim.calls, failure)
            warm = [mdl.theta for mdl in models]
            ctx.preds, ctx.pred_var = kriging.predict_all(models, cset.designs)

        identified = alloc.identify(ctx)
        counts = classify_errors(identified, truth)
        retained = n
        front_size = 0
        if t < cfg.iterations:
            plan, info = alloc.allocate(ctx, cfg.budget)
            if int(plan.sum()) != cfg.budget:
                raise InvalidStateError("allocation plan does not match the budget")
            retained, front_size = info.retained, info.front_size
            for i in np.flatnonzero(plan):
                store.record(i, sim.sample(i, int(plan[i])))
        wall = (time.perf_counter() - start) * 1e3 if cfg.timing else 0.0
        records.append(IterationRecord(
            macrorep=macrorep,
            iteration=t,
            cum_reps=cfg.r0 * n + t * cfg.budget,
            f1=f1(counts),
            precision=precision(counts),
            recall=recall(counts),
            mce=counts.mce,
            mci=counts.mci,
            retained=int(retained),
            front_size=int(front_size),
            wall_ms=round(wall, 3),
        ))
    return MacrorepResult(macrorep, records, sim.calls)


def _run_one(args):
    return run_macrorep(*args)


def run_experiment(cfg: ExperimentConfig, cset: CandidateSet | None = None, writer=None) -> RunResult:
    """Run every macroreplication; results are ordered by macrorep id.

    ``writer`` (optional) receives each finished macroreplication in id order,
    which keeps the output file append-only.
    """
    cset = obtain_candidates(cfg) if cset is None else cset
    jobs = [(cfg, cset, k) for k in range(cfg.macroreps)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = pool.map(_run_one, jobs)
            return _collect(cfg, results, writer)
    return _collect(cfg, map(_run_one, jobs), writer)


def _collect(cfg, results, writer):
    out = RunResult(cfg, [], [])
    for res in results:
        out.records.extend(res.records)
        out.calls.append(res.calls)
        if res.failure is not None:
            out.failures.append(res.failure)
        if writer is not None:
            writer(res)
    return out


# ---------------------------------------------------------------------------
# IO


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else str(v)


def records_to_csv(records, header=True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow([_fmt(v) for v in r.row()])
    return buf.getvalue()


def read_records(path) -> list:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise InvalidInputError(f"{path}: unexpected CSV header")
        for row in reader:
            out.append(IterationRecord(
                macrorep=int(row["macrorep"]),
                iteration=int(row["iteration"]),
                cum_reps=int(row["cum_reps"]),
                f1=float(row["f1"]),
                precision=float(row["precision"]),
                recall=float(row["recall"]),
                mce=int(row["mce"]),
                mci=int(row["mci"]),
                retained=int(row["retained"]),
                front_size=int(row["front_size"]),
                wall_ms=float(row["wall_ms"]),
            ))
    return out


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def run_to_files(cfg: ExperimentConfig, path=None, cset: CandidateSet | None = None) -> RunResult:
    """Run and write records CSV (appended per macroreplication) plus its JSON sidecar."""
    path = Path(path or cfg.output or default_output_dir() / f"{cfg.allocator}.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    cset = obtain_candidates(cfg) if cset is None else cset
    with open(path, "w", newline="") as fh:
        fh.write(records_to_csv([], header=True))
        fh.flush()

        def writer(res):
            fh.write(records_to_csv(res.records, header=False))
            fh.flush()

        result = run_experiment(cfg, cset, writer=writer)
    sidecar = {
        "format": "skmors-run",
        "version": 1,
        "config": cfg.to_dict(),
        "seeds": {
            "root": cfg.seed,
            "scheme": "SeedSequence(root, spawn_key=(macrorep, 0, design)) for observations; "
                      "(macrorep, 1) for metamodel restarts",
        },
        "candidates": {
            "problem": cset.problem.descriptor(),
            "seed": cset.seed,
            "size": cset.size,
            "n_pareto": int(cset.labels.sum()),
            "rf": cset.rf.tolist(),
        },
        "calls": result.calls,
        "failures": result.failures,
    }
    with open(sidecar_path(path), "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return result


# ---------------------------------------------------------------------------
# statistics


@dataclass(frozen=True)
class AggregateRow:
    iteration: int
    n: int
    cum_reps: int
    f1_mean: float
    f1_half: float | None  # None when fewer than 2 macroreplications
    retained_mean: float
    mce_mean: float
    mci_mean: float

    @property
    def ci_defined(self) -> bool:
        return self.f1_half is not None


def t_half_width(values) -> float | None:
    v = np.asarray(values, dtype=np.float64)
    if v.size < 2:
        return None
    return float(stats.t.ppf(0.975, v.size - 1) * v.std(ddof=1) / np.sqrt(v.size))


def aggregate(records) -> list:
    """Per-iteration mean F1 with 95% t-interval half-width, plus mean |S~|, MCE, MCI."""
    by_iter = {}
    for r in records:
        by_iter.setdefault(r.iteration, []).append(r)
    rows = []
    for t in sorted(by_iter):
        rs = sorted(by_iter[t], key=lambda r: r.macrorep)
        f1s = [r.f1 for r in rs]
        rows.append(AggregateRow(
            iteration=t,
            n=len(rs),
            cum_reps=rs[0].cum_reps,
            f1_mean=float(np.mean(f1s)),
            f1_half=t_half_width(f1s),
            retained_mean=float(np.mean([r.retained for r in rs])),
            mce_mean=float(np.mean([r.mce for r in rs])),
            mci_mean=float(np.mean([r.mci for r in rs])),
        ))
    return rows


AGGREGATE_FIELDS = ("variant", "iteration", "n", "cum_reps", "f1_mean", "f1_half",
                    "f1_lo", "f1_hi", "retained_mean", "mce_mean", "mci_mean", "ci_defined")


def aggregate_to_csv(named_rows) -> str:
    """``named_rows`` maps a variant label to its aggregate rows."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AGGREGATE_FIELDS)
    for name, rows in named_rows.items():
        for a in rows:
            half = a.f1_half if a.ci_defined else float("nan")
            w.writerow([name, a.iteration, a.n, a.cum_reps, _fmt(a.f1_mean), _fmt(half),
                        _fmt(a.f1_mean - half), _fmt(a.f1_mean + half),
                        _fmt(a.retained_mean), _fmt(a.mce_mean), _fmt(a.mci_mean), int(a.ci_defined)])
    return buf.getvalue()


@dataclass(frozen=True)
class Comparison:
    iteration: int
    n: int
    mean_a: float
    mean_b: float
    statistic: float
    p_value: float  # for the alternative F1(A) > F1(B)


def _f1_at(records, iteration):
    out = {}
    for r in records:
        if r.iteration == iteration:
            if r.macrorep in out:
                raise InvalidInputError(f"duplicate macrorep {r.macrorep} at iteration {iteration}")
            out[r.macrorep] = r.f1
    return out


def compare(records_a, records_b, iteration: int) -> Comparison:
    """Paired one-sided Wilcoxon signed-rank test of F1(A) > F1(B) at one iteration."""
    a = _f1_at(records_a, iteration)
    b = _f1_at(records_b, iteration)
    if not a or set(a) != set(b):
        raise InvalidInputError("runs are not paired by macroreplication at this iteration")
    keys = sorted(a)
    xa = np.array([a[k] for k in keys])
    xb = np.array([b[k] for k in keys])
    diff = xa - xb
    if np.all(diff == 0):
        stat, p = 0.0, 1.0
    else:
        res = stats.wilcoxon(xa, xb, alternative="greater", zero_method="wilcox")
        stat, p = float(res.statistic), float(res.pvalue)
    return Comparison(iteration, len(keys), float(xa.mean()), float(xb.mean()), stat, p)


def last_iteration(records) -> int:
    if not records:
        raise InvalidInputError("no records")
    return max(r.iteration for r in records)
