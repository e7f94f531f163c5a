import json
import shutil
from fractions import Fraction

import numpy as np
import pytest

from conftest import net
from mcsma import corpus
from mcsma.conflict_graph import NetworkError
from mcsma.state_space import enumerate_states
from mcsma.verify import detailed_balance_error, run_verify, sweep_channels, ultrametric_violation


def test_shipped_corpus_is_consistent():
    names = sorted(corpus.instances())
    assert {"K2", "K3", "C4", "C6", "P3", "petersen", "grid2x3"} <= set(names)
    res = run_verify(corpus.corpus_dir())
    assert res["failed"] == []
    names = {c["name"] for c in res["checks"]}
    assert "C4/C=1/expected.gamma" in names
    assert "C4/C=3/throughput_limits" in names
    assert "K3/C=2/virtual_equivalence" in names


def test_corrupted_expectation_is_named(tmp_path):
    for f in ("C4.json", "K2.json"):
        shutil.copy(corpus.corpus_dir() / f, tmp_path / f)
    doc = json.loads((tmp_path / "C4.json").read_text())
    doc["expected"]["by_channels"]["1"]["gamma"] = 3
    (tmp_path / "C4.json").write_text(json.dumps(doc))
    assert run_verify(tmp_path)["failed"] == ["C4/C=1/expected.gamma"]


def test_empty_corpus(tmp_path):
    with pytest.raises(NetworkError, match="no instances"):
        run_verify(tmp_path)


def test_per_channel_instance(tmp_path):
    doc = {"name": "mixed", "num_nodes": 3, "num_channels": 2,
           "edges": {"per_channel": [[[0, 1]], [[1, 2]]]}, "rates": {"kind": "homogeneous", "nu": 5}}
    (tmp_path / "mixed.json").write_text(json.dumps(doc))
    res = run_verify(tmp_path)
    assert res["failed"] == [] and res["passed"] > 0


def test_hitting_suite_on_small_graphs(tmp_path):
    for f in ("K2.json", "C4.json"):
        shutil.copy(corpus.corpus_dir() / f, tmp_path / f)
    res = run_verify(tmp_path, hitting=True)
    assert res["failed"] == []
    assert any(c["name"] == "C4/C=1/hitting_exponent" for c in res["checks"])


def test_ultrametric_checker_finds_violations():
    good = np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0]])
    assert ultrametric_violation(good) is None
    bad = np.array([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert ultrametric_violation(bad) is not None
    assert ultrametric_violation(np.array([[0, 1], [2, 0]])) is not None
    assert ultrametric_violation(np.array([[0, 0], [0, 0]])) is not None


def test_detailed_balance():
    assert detailed_balance_error(enumerate_states(net("C6", 2)), 50.0) < 1e-13


def test_sweep_channels_on_c4():
    table = sweep_channels(net("C4"), 4)
    assert [r["theta"] for r in table["rows"]] == [2, 2, "4/3", 1]
    assert [r["gamma"] for r in table["rows"]][:2] == [2, 3]
    assert table["errors"] == []


def test_sweep_reports_fairness_drop_as_finding():
    fig, _ = corpus.load_instance(corpus.figures_dir() / "fairness_drop.json")
    table = sweep_channels(fig, 2)
    assert [Fraction(r["jain"]) for r in table["rows"]] == [Fraction(9, 13), Fraction(2, 3)]
    assert table["findings"] == ["fairness drops from C=1 to C=2"]


def test_corpus_graph_helper():
    assert corpus.graph("C4", 2, nu=3.0).num_channels == 2
