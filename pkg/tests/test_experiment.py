import json

import numpy as np
import pytest

from fracinfluence.exceptions import ConfigError, DataError
from fracinfluence.experiment import (
    CSV_COLUMNS,
    ExperimentConfig,
    SweepRecord,
    allocation_from_dict,
    allocation_to_dict,
    emit_results,
    load_graph,
    load_results,
    parse_weight_model,
    run_sweep,
)
from fracinfluence.oracle import exact_F
from fracinfluence.marketing import sample_profile


@pytest.fixture
def path_file(tmp_path):
    p = tmp_path / "path.txt"
    p.write_text("0 1\n1 2\n")
    return p


@pytest.fixture
def random_file(tmp_path):
    rng = np.random.default_rng(0)
    lines = {(int(u), int(v)) for u, v in rng.integers(0, 120, size=(400, 2)) if u != v}
    p = tmp_path / "rand.txt"
    p.write_text("".join(f"{u} {v}\n" for u, v in sorted(lines)))
    return p


def test_path_fixture_sweep(path_file):
    cfg = ExperimentConfig(str(path_file), budgets=[1, 2, 3], pool_R=16, eval_sims=100)
    res = run_sweep(cfg)
    assert [r.influence_mean for r in res.records] == [3.0, 3.0, 3.0]
    g = load_graph(cfg)
    for alloc in res.allocations:
        assert exact_F(g, sample_profile(cfg.scheme, 3), alloc, "selected-only") == pytest.approx(3.0)


def test_zero_budget_gives_zero(random_file):
    cfg = ExperimentConfig(str(random_file), budgets=[0], a_choices=(0.5, 1), b_choices=(0, 0.2),
                           pool_R=16, eval_sims=50)
    rec = run_sweep(cfg).records[0]
    assert rec.influence_mean == 0 and rec.selected_nodes == 0 and rec.fractional_node is None


def test_records_sorted_and_fields(random_file):
    budgets = [0.5 * k for k in range(15, 0, -1)]
    cfg = ExperimentConfig(str(random_file), budgets=budgets, pool_R=32, eval_sims=50, directed=False)
    res = run_sweep(cfg)
    assert [r.budget for r in res.records] == sorted(budgets)
    for r in res.records:
        assert r.influence_mean >= 0 and r.runtime_seconds >= 0
        assert r.selected_nodes <= np.ceil(r.budget / 1.0)
        # half-integer budgets leave exactly one node at probability 0.5
        assert (r.fractional_node is not None) == (r.budget % 1 != 0)
    assert res.metadata["seeds"]["master"] == 0


def test_fractional_node_is_raw_id(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("10 20\n")
    rec = run_sweep(ExperimentConfig(str(p), budgets=[0.5], pool_R=4, eval_sims=10)).records[0]
    assert rec.fractional_node == 10


def test_resample_per_budget_changes_profiles(random_file):
    base = dict(budgets=[1, 2, 3], a_choices=(0.5, 1), b_choices=(0, 0.2), pool_R=16, eval_sims=20)
    shared = run_sweep(ExperimentConfig(str(random_file), **base))
    resampled = run_sweep(ExperimentConfig(str(random_file), resample_per_budget=True, **base))
    assert [r.budget for r in resampled.records] == [1, 2, 3]
    assert any(a != b for a, b in zip(shared.allocations, resampled.allocations))


def test_uniform_weight_model(random_file):
    g = load_graph(ExperimentConfig(str(random_file), weight_model="uniform:0.1"))
    assert np.all(g.probs == 0.1)
    assert parse_weight_model("WC") == ("weighted-cascade", None)
    for bad in ("uniform", "uniform:2", "linear"):
        with pytest.raises(ConfigError):
            parse_weight_model(bad)


@pytest.mark.parametrize("kw", [dict(budgets=[-1]), dict(budgets=[]), dict(eval_sims=0), dict(pool_R=1.5),
                                dict(semantics="sometimes"), dict(a_choices=()), dict(b_choices=(1.0,))])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        ExperimentConfig("x", **kw)


def test_config_file_roundtrip(tmp_path):
    doc = {"dataset": "facebook", "budgets": [1, 0.5], "scheme": {"a": [0.5, 1], "b": [0, 0.2], "seed": 9},
           "semantics": "global-baseline", "master_seed": 3}
    p = tmp_path / "c.json"
    p.write_text(json.dumps(doc))
    cfg = ExperimentConfig.from_file(p)
    assert cfg.budgets == [0.5, 1.0] and cfg.scheme.rng_seed == 9 and cfg.a_choices == (0.5, 1.0)
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"dataset": "x", "bogus": 1})
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(p)


def test_missing_dataset_file(tmp_path):
    with pytest.raises(DataError):
        load_graph(ExperimentConfig(str(tmp_path / "nope.txt")))


def _rec(budget, **kw):
    d = dict(network="n", budget=budget, scheme="a={1};b={0}", influence_mean=1.5, influence_stderr=0.1,
             runtime_seconds=0.25, selected_nodes=1, fractional_node=None)
    d.update(kw)
    return SweepRecord(**d)


def test_csv_single_record(tmp_path):
    out = tmp_path / "r.csv"
    text = emit_results([_rec(1.0)], "csv", out)
    lines = text.splitlines()
    assert len(lines) == 2
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].endswith(",1,")
    assert load_results(out)[0] == [_rec(1.0)]


def test_json_roundtrip(tmp_path):
    recs = [_rec(0.5, fractional_node=7), _rec(1.0)]
    out = tmp_path / "r.json"
    emit_results(recs, "json", out, metadata={"version": "x"})
    back, meta = load_results(out)
    assert back == recs and meta == {"version": "x"}


def test_emit_orders_by_budget(tmp_path):
    recs = [_rec(b) for b in (7.0, 0.5, 3.0)]
    text = emit_results(recs, "csv", tmp_path / "o.csv")
    assert [line.split(",")[1] for line in text.splitlines()[1:]] == ["0.5", "3.0", "7.0"]


def test_emit_errors(tmp_path):
    with pytest.raises(ConfigError):
        emit_results([], "csv", tmp_path / "x")
    with pytest.raises(ConfigError):
        emit_results([_rec(1)], "xml", tmp_path / "x")
    with pytest.raises(DataError):
        emit_results([_rec(1)], "csv", tmp_path / "missing-dir" / "x.csv")


def test_allocation_dict_roundtrip(path_file):
    cfg = ExperimentConfig(str(path_file), budgets=[1.5], pool_R=8, eval_sims=10)
    g = load_graph(cfg)
    alloc = run_sweep(cfg, graph=g).allocations[0]
    d = allocation_to_dict(g, alloc)
    assert allocation_from_dict(g, json.loads(json.dumps(d))) == alloc
    with pytest.raises(DataError):
        allocation_from_dict(g, {"budget": 1, "nodes": [99], "y": [1]})
