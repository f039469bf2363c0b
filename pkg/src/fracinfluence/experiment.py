"""Budget sweeps: load a network, allocate with greedy at each budget, evaluate."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._rng import derive_seed
from .datasets import REGISTRY, fetch_dataset
from .diffusion import LiveEdgePool, SeedingSemantics, estimate_F
from .exceptions import ConfigError, DataError
from .graph import Graph, assign_uniform, assign_weighted_cascade, read_edge_list
from .greedy import GreedyConfig, fractional_nodes, greedy_allocate
from .marketing import CoefficientScheme, sample_profile

log = logging.getLogger(__name__)

CSV_COLUMNS = ["network", "budget", "scheme", "influence_mean", "influence_stderr",
               "runtime_seconds", "selected_nodes", "fractional_node"]

DEFAULT_BUDGETS = [0.5 * k for k in range(1, 15)]


def parse_weight_model(spec) -> tuple[str, float | None]:
    """``"weighted-cascade"`` or ``"uniform:<p>"``."""
    s = str(spec).lower().replace("_", "-")
    if s in ("weighted-cascade", "wc"):
        return "weighted-cascade", None
    if s.startswith("uniform"):
        _, _, p = s.partition(":")
        try:
            p = float(p)
        except ValueError:
            raise ConfigError(f"uniform weight model needs a probability, e.g. 'uniform:0.1', got {spec!r}") from None
        if not 0 <= p <= 1:
            raise ConfigError(f"uniform edge probability must lie in [0, 1], got {p}")
        return "uniform", p
    raise ConfigError(f"unknown weight model {spec!r}")


@dataclass
class ExperimentConfig:
    dataset: str
    budgets: list = field(default_factory=lambda: list(DEFAULT_BUDGETS))
    directed: bool | None = None
    weight_model: str = "weighted-cascade"
    a_choices: tuple = (1.0,)
    b_choices: tuple = (0.0,)
    scheme_seed: int | None = None
    pool_R: int = 1024
    eval_sims: int = 1000
    semantics: str = "selected-only"
    master_seed: int = 0
    resample_per_budget: bool = False
    cache_dir: str | None = None

    def __post_init__(self):
        try:
            budgets = [float(k) for k in self.budgets]
        except (TypeError, ValueError):
            raise ConfigError(f"budgets must be numbers, got {self.budgets!r}") from None
        if not budgets:
            raise ConfigError("at least one budget is required")
        if any(not (k >= 0 and math.isfinite(k)) for k in budgets):
            raise ConfigError(f"budgets must be finite and >= 0, got {budgets}")
        self.budgets = sorted(budgets)
        parse_weight_model(self.weight_model)
        self.semantics = SeedingSemantics.parse(self.semantics).value
        for name in ("pool_R", "eval_sims"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {v!r}")
        if not isinstance(self.master_seed, int):
            raise ConfigError(f"master_seed must be an integer, got {self.master_seed!r}")
        self.a_choices = tuple(float(x) for x in self.a_choices)
        self.b_choices = tuple(float(x) for x in self.b_choices)
        self.scheme  # validates the choice sets

    @property
    def scheme(self) -> CoefficientScheme:
        seed = self.scheme_seed if self.scheme_seed is not None else derive_seed(self.master_seed, "profile")
        return CoefficientScheme(self.a_choices, self.b_choices, seed)

    @property
    def network_name(self) -> str:
        return Path(self.dataset).stem if self.dataset.lower() not in REGISTRY else self.dataset.lower()

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        d = dict(d)
        scheme = d.pop("scheme", None)
        if scheme is not None:
            d.setdefault("a_choices", scheme.get("a", scheme.get("a_choices", (1.0,))))
            d.setdefault("b_choices", scheme.get("b", scheme.get("b_choices", (0.0,))))
            if "seed" in scheme or "rng_seed" in scheme:
                d.setdefault("scheme_seed", scheme.get("seed", scheme.get("rng_seed")))
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "dataset" not in d:
            raise ConfigError("config needs a 'dataset'")
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> ExperimentConfig:
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["a_choices"] = list(self.a_choices)
        d["b_choices"] = list(self.b_choices)
        return d


@dataclass
class SweepRecord:
    network: str
    budget: float
    scheme: str
    influence_mean: float
    influence_stderr: float
    runtime_seconds: float
    selected_nodes: int
    fractional_node: int | None = None


def load_graph(config: ExperimentConfig) -> Graph:
    """Read the configured network and apply its weight model."""
    key = config.dataset.lower()
    if key in REGISTRY or key.startswith(("http://", "https://")):
        path = fetch_dataset(config.dataset, config.cache_dir)
        directed = REGISTRY[key].directed if key in REGISTRY else True
    else:
        path = Path(config.dataset)
        if not path.exists():
            raise DataError(f"dataset file {path} does not exist")
        directed = True
    if config.directed is not None:
        directed = config.directed
    graph = read_edge_list(path, directed=directed)
    kind, p = parse_weight_model(config.weight_model)
    return assign_weighted_cascade(graph) if kind == "weighted-cascade" else assign_uniform(graph, p)


@dataclass
class SweepResult:
    """Records plus the per-budget allocations behind them."""

    records: list
    allocations: list
    traces: list
    metadata: dict


def run_sweep(config: ExperimentConfig, graph: Graph | None = None, pool: LiveEdgePool | None = None) -> SweepResult:
    """Greedy allocation and fresh Monte-Carlo evaluation at every budget.

    The profile and the pool are shared by all budgets unless
    ``resample_per_budget`` is set, in which case each budget draws its own
    profile. ``runtime_seconds`` covers only the greedy optimization.
    """
    if graph is None:
        graph = load_graph(config)
    scheme = config.scheme
    pool_seed = derive_seed(config.master_seed, "pool")
    eval_seed = derive_seed(config.master_seed, "eval")
    if pool is None:
        pool = LiveEdgePool(graph, config.pool_R, pool_seed)
    semantics = SeedingSemantics.parse(config.semantics)
    base_profile = sample_profile(scheme, graph.node_count)

    records, allocations, traces = [], [], []
    for i, K in enumerate(config.budgets):
        profile = base_profile
        if config.resample_per_budget:
            profile = sample_profile(dataclasses.replace(scheme, rng_seed=derive_seed(scheme.rng_seed, f"budget-{i}")),
                                     graph.node_count)
        t0 = time.perf_counter()
        alloc, trace = greedy_allocate(graph, profile, GreedyConfig(K, pool))
        runtime = time.perf_counter() - t0
        est = estimate_F(graph, profile, alloc, semantics, config.eval_sims, eval_seed)
        frac = fractional_nodes(alloc, profile)
        records.append(SweepRecord(
            network=config.network_name,
            budget=K,
            scheme=scheme.descriptor,
            influence_mean=est.mean,
            influence_stderr=est.stderr,
            runtime_seconds=runtime,
            selected_nodes=len(trace.steps),
            fractional_node=int(graph.node_ids[frac[0]]) if len(frac) else None,
        ))
        allocations.append(alloc)
        traces.append(trace)
        log.info("K=%g influence=%.3f +- %.3f (%.2fs)", K, est.mean, est.stderr, runtime)

    metadata = {
        "software": "fracinfluence",
        "version": __version__,
        "config": config.to_dict(),
        "seeds": {"master": config.master_seed, "profile": scheme.rng_seed,
                  "pool": pool.rng_seed, "eval": eval_seed},
        "coefficient_sampling": "uniform and independent per node over the choice sets",
        "nodes": graph.node_count,
        "edges": graph.edge_count,
    }
    return SweepResult(records, allocations, traces, metadata)


def _csv_text(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        row = dataclasses.asdict(r)
        row["fractional_node"] = "" if r.fractional_node is None else r.fractional_node
        w.writerow([row[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def emit_results(records, fmt: str = "csv", out=None, metadata: dict | None = None) -> str:
    """Write records as CSV or JSON to ``out`` (path, ``"-"`` or ``None`` for
    stdout) and return the text."""
    records = list(records)
    if not records:
        raise ConfigError("no records to emit")
    records.sort(key=lambda r: r.budget)
    if fmt == "csv":
        text = _csv_text(records)
    elif fmt == "json":
        text = json.dumps({"metadata": metadata or {}, "records": [dataclasses.asdict(r) for r in records]},
                          indent=2) + "\n"
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot write {out}: {exc}") from None
    return text


def load_results(path):
    """Inverse of :func:`emit_results`; returns ``(records, metadata)``."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return [SweepRecord(**r) for r in doc["records"]], doc.get("metadata", {})
    rows = csv.DictReader(io.StringIO(text))
    records = []
    for row in rows:
        records.append(SweepRecord(
            network=row["network"], budget=float(row["budget"]), scheme=row["scheme"],
            influence_mean=float(row["influence_mean"]), influence_stderr=float(row["influence_stderr"]),
            runtime_seconds=float(row["runtime_seconds"]), selected_nodes=int(row["selected_nodes"]),
            fractional_node=int(row["fractional_node"]) if row["fractional_node"] else None,
        ))
    return records, {}


def allocation_to_dict(graph: Graph, alloc, profile=None) -> dict:
    """Sparse JSON form keyed by raw node id."""
    support = alloc.support
    d = {"budget": alloc.budget,
         "nodes": graph.node_ids[support].tolist(),
         "y": alloc.y[support].tolist()}
    if profile is not None:
        d["probability"] = profile.evaluate(alloc.y)[support].tolist()
    return d


def allocation_from_dict(graph: Graph, d: dict):
    from .marketing import Allocation

    y = np.zeros(graph.node_count)
    try:
        for raw, val in zip(d["nodes"], d["y"], strict=True):
            y[graph.index_of(int(raw))] = float(val)
    except KeyError as exc:
        raise DataError(f"allocation refers to unknown node {exc}") from None
    except ValueError as exc:
        raise DataError(f"malformed allocation: {exc}") from None
    return Allocation(y, d["budget"])
