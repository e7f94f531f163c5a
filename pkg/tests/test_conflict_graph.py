import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import GRAPHS, naive_alpha, naive_chi, naive_states
from mcsma.conflict_graph import (
    MultiChannelNetwork,
    NetworkError,
    RateModel,
    SizeCapError,
    canonical_edges,
    chromatic_number,
    disjoint_mis_count,
    independence_number,
    independent_sets,
    maximum_independent_sets,
    network_from_dict,
    network_to_dict,
    parse_network,
)


@st.composite
def graphs(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return n, edges


@pytest.mark.parametrize("name,alpha,chi,cstar", [
    ("K2", 1, 2, 2), ("K3", 1, 3, 3), ("P3", 2, 2, 1), ("C4", 2, 2, 2),
    ("C6", 3, 2, 2), ("star3", 3, 2, 1), ("grid2x3", 3, 2, 2),
])
def test_invariants_of_small_graphs(name, alpha, chi, cstar):
    n, edges = GRAPHS[name]
    assert independence_number(edges, n) == alpha
    assert chromatic_number(edges, n) == chi
    assert disjoint_mis_count(edges, n) == cstar


def test_petersen_invariants():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges = outer + spokes + inner
    assert independence_number(edges, 10) == 4
    assert chromatic_number(edges, 10) == 3
    assert len(maximum_independent_sets(edges, 10)) == 5
    assert disjoint_mis_count(edges, 10) == 1


@settings(max_examples=80, deadline=None)
@given(graphs())
def test_alpha_and_chi_match_brute_force(g):
    n, edges = g
    assert independence_number(edges, n) == naive_alpha(n, edges)
    assert chromatic_number(edges, n) == naive_chi(n, edges)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_independent_sets_are_the_feasible_single_channel_states(g):
    n, edges = g
    masks = sorted(independent_sets(edges, n))
    naive = sorted(sum(1 << i for i, v in enumerate(x) if v) for x in naive_states(n, [edges]))
    assert masks == naive
    alpha = independence_number(edges, n)
    mis = maximum_independent_sets(edges, n)
    assert mis and all(bin(m).count("1") == alpha for m in mis)
    assert sorted(mis) == sorted(m for m in masks if bin(m).count("1") == alpha)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=7))
def test_disjoint_mis_count_is_a_valid_packing_bound(g):
    n, edges = g
    k = disjoint_mis_count(edges, n)
    mis = maximum_independent_sets(edges, n)
    assert 1 <= k <= len(mis)
    # k disjoint sets of size alpha fit into n nodes
    assert k * independence_number(edges, n) <= n


def test_node_cap():
    with pytest.raises(SizeCapError):
        independence_number([], 40)
    assert independence_number([], 40, cap=64) == 40


def test_canonical_edges():
    assert canonical_edges([(2, 1), [1, 2], (0, 1)], 3) == ((0, 1), (1, 2))
    for bad in ([(0, 0)], [(0, 5)], [(0, 1, 2)], [(0.5, 1)], [(True, 1)]):
        with pytest.raises(NetworkError):
            canonical_edges(bad, 3)


def test_rate_model_validation():
    with pytest.raises(NetworkError):
        RateModel(nu=0)
    with pytest.raises(NetworkError):
        RateModel(nu=float("inf"))
    with pytest.raises(NetworkError):
        RateModel(kind="heterogeneous_exponents")
    with pytest.raises(NetworkError):
        RateModel(weights=((1.0,),))
    rm = RateModel("heterogeneous_exponents", 10.0, ((1, 0.5),))
    assert rm.activation_rate(0, 2) == pytest.approx(10 ** 0.5)
    assert str(rm.exact_weight(0, 2)) == "1/2"


def test_network_validation():
    with pytest.raises(NetworkError):
        MultiChannelNetwork(2, 2, (((0, 1),),))
    with pytest.raises(NetworkError):
        MultiChannelNetwork(2, 2, (((0, 1),), ()), shared=True)
    with pytest.raises(NetworkError):
        MultiChannelNetwork(2, 1, ((),), RateModel("heterogeneous_exponents", 2.0, ((1.0,),)))


def test_json_round_trip(tmp_path):
    net = MultiChannelNetwork(3, 2, (((0, 1),), ((1, 2), (0, 2))), RateModel(nu=5.0), name="x")
    doc = network_to_dict(net)
    assert network_from_dict(doc) == net
    p = tmp_path / "n.json"
    p.write_text(json.dumps(doc))
    assert parse_network(p) == net


@pytest.mark.parametrize("doc", [
    [],
    {"num_nodes": 2, "num_channels": 1},
    {"num_nodes": 0, "num_channels": 1, "edges": {"shared": []}},
    {"num_nodes": 2, "num_channels": 1, "edges": {"shared": [], "per_channel": [[]]}},
    {"num_nodes": 2, "num_channels": 2, "edges": {"per_channel": [[]]}},
    {"num_nodes": 2, "num_channels": 1, "edges": {"shared": [[0, 2]]}},
    {"num_nodes": 2, "num_channels": 1, "edges": {"shared": []}, "rates": {"nu": "fast"}},
    {"num_nodes": 2, "num_channels": 1, "edges": {"shared": []}, "rates": {"kind": "other", "nu": 1}},
    {"num_nodes": 2, "num_channels": 1, "edges": {"shared": []},
     "rates": {"kind": "heterogeneous_exponents", "nu": 2, "weights": [[1]]}},
])
def test_malformed_documents_rejected(doc):
    with pytest.raises(NetworkError):
        network_from_dict(doc)


def test_parse_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    with pytest.raises(NetworkError):
        parse_network(p)
    with pytest.raises(NetworkError):
        parse_network(tmp_path / "missing.json")
