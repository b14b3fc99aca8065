"""Command-line entry point: generate, run, report, compare."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .errors import SKMorsError
from .problems import generate_candidates, get_problem

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


def _cmd_generate(args) -> int:
    p = get_problem(args.problem)
    size, n_pareto, _, _ = harness.SCENARIOS[p.name]
    cset = generate_candidates(
        p,
        args.size or size,
        args.n_pareto or n_pareto,
        args.seed,
        proximity=not args.uniform,
    )
    out = Path(args.output or harness.default_output_dir() / f"{p.name}_candidates.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    cset.save(out)
    print(f"wrote {cset.size} candidates ({int(cset.labels.sum())} Pareto-optimal) to {out}")
    return EXIT_OK


_RUN_FLAGS = ("problem", "noise", "allocator", "budget", "iterations", "macroreps", "r0",
              "omega", "seed", "candidates", "size", "n_pareto", "candidate_seed", "output",
              "n_starts", "refit_starts", "workers")


def _config_from_args(args) -> harness.ExperimentConfig:
    base = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
    for name in _RUN_FLAGS:
        val = getattr(args, name)
        if val is not None:
            base[name] = val
    if args.uniform:
        base["proximity"] = False
    if args.timing:
        base["timing"] = True
    return harness.ExperimentConfig.from_dict(base)


def _cmd_run(args) -> int:
    cfg = _config_from_args(args)
    out = Path(cfg.output or harness.default_output_dir() / f"{cfg.allocator}.csv")
    result = harness.run_to_files(cfg, out)
    last = [r for r in result.records if r.iteration == cfg.iterations]
    if last:
        mean = sum(r.f1 for r in last) / len(last)
        print(f"{cfg.allocator}: mean final F1 {mean:.4f} over {len(last)} macroreplications")
    print(f"records: {out}\nsidecar: {harness.sidecar_path(out)}")
    if result.failures:
        print(f"{len(result.failures)} macroreplication(s) aborted; see sidecar", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _label(path: Path) -> str:
    side = harness.sidecar_path(path)
    if side.exists():
        with open(side) as fh:
            return json.load(fh)["config"]["allocator"]
    return path.stem


def _cmd_report(args) -> int:
    named = {}
    for p in map(Path, args.records):
        named[_label(p)] = harness.aggregate(harness.read_records(p))
    text = harness.aggregate_to_csv(named)
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_compare(args) -> int:
    a = harness.read_records(args.a)
    b = harness.read_records(args.b)
    it = harness.last_iteration(a) if args.iteration is None else args.iteration
    res = harness.compare(a, b, it)
    verdict = "A > B" if res.p_value < args.alpha else "no evidence A > B"
    print(
        f"iteration {res.iteration}: n={res.n} mean F1 A={res.mean_a:.4f} B={res.mean_b:.4f} "
        f"W={res.statistic:g} p={res.p_value:.4g} ({verdict} at alpha={args.alpha})"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="skmors", description="Multiobjective ranking and selection experiments.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a candidate set file")
    g.add_argument("--problem", default="WFG4")
    g.add_argument("--size", type=int)
    g.add_argument("--n-pareto", dest="n_pareto", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--uniform", action="store_true", help="dominated designs uniform in the domain")
    g.add_argument("-o", "--output")
    g.set_defaults(func=_cmd_generate)

    r = sub.add_parser("run", help="run macroreplications and write records")
    r.add_argument("--config", help="JSON file with ExperimentConfig fields")
    r.add_argument("--problem")
    r.add_argument("--noise")
    r.add_argument("--allocator")
    for name in ("budget", "iterations", "macroreps", "r0", "seed", "size", "candidate_seed",
                 "n_starts", "refit_starts", "workers"):
        r.add_argument(f"--{name.replace('_', '-')}", dest=name, type=int)
    r.add_argument("--n-pareto", dest="n_pareto", type=int)
    r.add_argument("--omega", type=float)
    r.add_argument("--candidates", help="candidate set file from 'generate'")
    r.add_argument("--uniform", action="store_true")
    r.add_argument("--timing", action="store_true", help="record wall time (makes output non-reproducible)")
    r.add_argument("-o", "--output")
    r.set_defaults(func=_cmd_run)

    rep = sub.add_parser("report", help="per-iteration aggregate CSV with 95%% CIs")
    rep.add_argument("records", nargs="+")
    rep.add_argument("-o", "--output")
    rep.set_defaults(func=_cmd_report)

    c = sub.add_parser("compare", help="paired one-sided Wilcoxon test of F1(A) > F1(B)")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--iteration", type=int)
    c.add_argument("--alpha", type=float, default=0.05)
    c.set_defaults(func=_cmd_compare)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SKMorsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
