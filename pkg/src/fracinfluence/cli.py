"""Command-line interface.

Exit codes: 0 success, 1 failed check, 2 config error, 3 data error,
4 size-guard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
import warnings

import numpy as np

from . import __version__
from .datasets import fetch_dataset
from .diffusion import LiveEdgePool, SeedingSemantics, estimate_F, sigma_hat
from .exceptions import ConfigError, FracInfluenceError
from .experiment import (
    ExperimentConfig,
    allocation_from_dict,
    allocation_to_dict,
    emit_results,
    load_graph,
    run_sweep,
)
from .greedy import GreedyConfig, fractional_nodes, greedy_allocate
from .marketing import ActivationProfile, sample_profile
from .oracle import MAX_SUBMOD_NODES, GridSpec, check_submodularity, exact_F, grid_optimum, sigma_table

log = logging.getLogger("fracinfluence")


def _floats(text):
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_experiment_flags(p, budgets=True):
    p.add_argument("--config", help="JSON experiment config; flags override its values")
    p.add_argument("--dataset", help="facebook, wiki-vote, deezer, a URL, or an edge-list path")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--directed", dest="directed", action="store_true", default=None)
    g.add_argument("--undirected", dest="directed", action="store_false")
    p.add_argument("--weight-model", help="weighted-cascade (default) or uniform:<p>")
    if budgets:
        p.add_argument("--budgets", type=_floats, help="comma-separated budgets, e.g. 0.5,1,1.5")
    p.add_argument("--a-choices", type=_floats)
    p.add_argument("--b-choices", type=_floats)
    p.add_argument("--scheme-seed", type=int)
    p.add_argument("--seed", type=int, dest="master_seed")
    p.add_argument("--pool-size", type=int, dest="pool_R")
    p.add_argument("--eval-sims", type=int)
    p.add_argument("--semantics", choices=[s.value for s in SeedingSemantics])
    p.add_argument("--resample-per-budget", action="store_true", default=None)
    p.add_argument("--cache-dir")


def _config_from_args(args, budgets=None) -> ExperimentConfig:
    base = {}
    if args.config:
        base = ExperimentConfig.from_file(args.config).to_dict()
    overrides = {
        "dataset": args.dataset, "directed": args.directed, "weight_model": args.weight_model,
        "budgets": budgets if budgets is not None else getattr(args, "budgets", None),
        "a_choices": args.a_choices, "b_choices": args.b_choices, "scheme_seed": args.scheme_seed,
        "master_seed": args.master_seed, "pool_R": args.pool_R, "eval_sims": args.eval_sims,
        "semantics": args.semantics, "resample_per_budget": args.resample_per_budget,
        "cache_dir": args.cache_dir,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if "dataset" not in base:
        raise ConfigError("a dataset is required (--dataset or config file)")
    return ExperimentConfig.from_dict(base)


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_fetch(args):
    print(fetch_dataset(args.name, args.cache_dir))
    return 0


def cmd_sweep(args):
    config = _config_from_args(args)
    result = run_sweep(config)
    emit_results(result.records, args.format, args.out, result.metadata)
    return 0


def cmd_run(args):
    config = _config_from_args(args, budgets=[args.budget])
    graph = load_graph(config)
    result = run_sweep(config, graph=graph)
    rec = result.records[0]
    profile = sample_profile(config.scheme, graph.node_count)
    doc = {
        "record": rec.__dict__,
        "allocation": allocation_to_dict(graph, result.allocations[0], profile),
        "selection_order": graph.node_ids[result.traces[0].selected].tolist(),
        "metadata": result.metadata,
    }
    _write(json.dumps(doc, indent=2) + "\n", args.out)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(result.traces[0].to_jsonl())
    return 0


def cmd_evaluate(args):
    config = _config_from_args(args, budgets=[0.0])
    graph = load_graph(config)
    try:
        with open(args.allocation, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read allocation {args.allocation}: {exc}") from None
    alloc = allocation_from_dict(graph, doc.get("allocation", doc))
    profile = sample_profile(config.scheme, graph.node_count)
    from ._rng import derive_seed

    est = estimate_F(graph, profile, alloc, config.semantics, config.eval_sims,
                     derive_seed(config.master_seed, "eval"))
    out = {"influence_mean": est.mean, "influence_stderr": est.stderr, "num_sims": est.num_sims,
           "semantics": config.semantics}
    _write(json.dumps(out, indent=2) + "\n", args.out)
    return 0


def _small_instance(args):
    config = _config_from_args(args, budgets=[args.budget])
    graph = load_graph(config)
    profile = sample_profile(config.scheme, graph.node_count)
    return config, graph, profile


def cmd_oracle(args):
    config, graph, profile = _small_instance(args)
    sem = SeedingSemantics.parse(args.oracle_semantics)
    table = sigma_table(graph)
    alloc, trace = greedy_allocate(graph, profile, GreedyConfig(args.budget, "exact"))
    greedy_val = exact_F(graph, profile, alloc, sem, table=table)
    grid_alloc, grid_val = grid_optimum(graph, profile, args.budget, GridSpec(args.grid_step), sem, table=table)
    report = {
        "instance": {"dataset": config.dataset, "nodes": graph.node_count, "edges": graph.edge_count,
                     "budget": args.budget, "a": profile.a.tolist(), "b": profile.b.tolist(),
                     "semantics": sem.value, "grid_step": args.grid_step},
        "max_submodularity_violation": (check_submodularity(graph, table).max_violation
                                        if graph.node_count <= MAX_SUBMOD_NODES else None),
        "greedy": {"value": greedy_val, "y": alloc.y.tolist(), "order": trace.selected},
        "grid": {"value": grid_val, "y": grid_alloc.y.tolist()},
        "ratio": greedy_val / grid_val if grid_val > 0 else None,
        "bound": 1 - 1 / np.e,
    }
    report["ok"] = bool(greedy_val >= (1 - 1 / np.e) * grid_val - 1e-9)
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return 0 if report["ok"] else 1


def cmd_check(args):
    config, graph, profile = _small_instance(args)
    checks = {}
    if graph.node_count <= MAX_SUBMOD_NODES:
        rep = check_submodularity(graph)
        checks["submodularity"] = {"ok": rep.ok, "max_violation": rep.max_violation,
                                   "pairs": rep.pairs_checked}
    pool = LiveEdgePool(graph, config.pool_R, config.master_seed)
    rng = np.random.default_rng(config.master_seed)
    worst = 0.0
    for _ in range(args.trials):
        S = set(np.flatnonzero(rng.random(graph.node_count) < 0.3).tolist())
        T = S | set(np.flatnonzero(rng.random(graph.node_count) < 0.3).tolist())
        worst = max(worst, sigma_hat(pool, S) - sigma_hat(pool, T))
    checks["pool_monotone"] = {"ok": worst <= 0, "max_violation": worst}
    t0 = time.perf_counter()
    lazy_alloc, lazy_trace = greedy_allocate(graph, profile, GreedyConfig(args.budget, pool, lazy=True))
    naive_alloc, naive_trace = greedy_allocate(graph, profile, GreedyConfig(args.budget, pool, lazy=False))
    checks["lazy_equals_naive"] = {"ok": lazy_trace == naive_trace}
    checks["naive_evaluations"] = {"ok": naive_trace.evaluations <= graph.node_count ** 2,
                                   "count": naive_trace.evaluations}
    checks["at_most_one_fractional"] = {"ok": len(fractional_nodes(lazy_alloc, profile)) <= 1}
    checks["feasible"] = {"ok": bool(lazy_alloc.spent <= lazy_alloc.budget + 1e-9
                                     and np.all(profile.evaluate(lazy_alloc.y) <= 1 + 1e-9))}
    doc = {"dataset": config.dataset, "nodes": graph.node_count, "edges": graph.edge_count,
           "checks": checks, "seconds": time.perf_counter() - t0,
           "ok": all(c["ok"] for c in checks.values())}
    _write(json.dumps(doc, indent=2) + "\n", args.out)
    return 0 if doc["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracinfluence", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch", help="download a dataset into the cache")
    p.add_argument("name")
    p.add_argument("--cache-dir")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("sweep", help="greedy + evaluation over a list of budgets")
    _add_experiment_flags(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("run", help="greedy + evaluation at one budget, JSON output")
    _add_experiment_flags(p, budgets=False)
    p.add_argument("--budget", type=float, required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--trace", help="write the selection trace as JSON lines")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("evaluate", help="Monte-Carlo evaluation of a saved allocation")
    _add_experiment_flags(p, budgets=False)
    p.add_argument("--allocation", required=True, help="JSON from 'run' or {budget, nodes, y}")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_evaluate)

    for name, func, help_ in (("oracle", cmd_oracle, "greedy vs exhaustive grid on a tiny graph"),
                              ("check", cmd_check, "submodularity and invariant checks")):
        p = sub.add_parser(name, help=help_)
        _add_experiment_flags(p, budgets=False)
        p.add_argument("--budget", type=float, default=1.0)
        p.add_argument("--out", default="-")
        if name == "oracle":
            p.add_argument("--grid-step", type=float, default=0.25)
            p.add_argument("--oracle-semantics", choices=[s.value for s in SeedingSemantics],
                           default="global-baseline")
        else:
            p.add_argument("--trials", type=int, default=200)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    warnings.filterwarnings("ignore", message="The TBB threading layer")
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FracInfluenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
