from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import net, naive_states
from mcsma.conflict_graph import MultiChannelNetwork, NetworkError, RateModel, SizeCapError
from mcsma.state_space import (
    check_feasible,
    dominant_states,
    enumerate_states,
    generator_matrix,
    max_activity,
    state_distance,
    uniformization_rate,
    uniformized_matrix,
)


@st.composite
def networks(draw):
    n = draw(st.integers(1, 5))
    C = draw(st.integers(1, 3))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    sets = tuple(
        tuple(draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else [])
        for _ in range(C)
    )
    return MultiChannelNetwork(n, C, sets, RateModel(nu=3.0))


@settings(max_examples=80, deadline=None)
@given(networks())
def test_enumeration_matches_brute_force(net_):
    space = enumerate_states(net_)
    naive = naive_states(net_.num_nodes, net_.edge_sets)
    assert [space.state(k) for k in range(len(space))] == naive
    A = max(sum(1 for v in x if v) for x in naive)
    assert space.A_C == A == max_activity(space)
    assert dominant_states(space) == [x for x in naive if sum(1 for v in x if v) == A]
    for k, x in enumerate(naive):
        assert space.index(x) == k


@settings(max_examples=60, deadline=None)
@given(networks())
def test_transitions_are_single_node_moves(net_):
    space = enumerate_states(net_)
    Q = generator_matrix(space, 3.0).toarray()
    assert np.allclose(Q.sum(axis=1), 0)
    feasible = set(naive_states(net_.num_nodes, net_.edge_sets))
    for k in range(len(space)):
        x = space.state(k)
        expect = {}
        for i, v in enumerate(x):
            if v:
                y = x[:i] + (0,) + x[i + 1:]
                expect[space.index(y)] = 1.0
            else:
                for c in range(1, net_.num_channels + 1):
                    y = x[:i] + (c,) + x[i + 1:]
                    if y in feasible:
                        expect[space.index(y)] = 3.0
        row = {j: Q[k, j] for j in np.flatnonzero(Q[k]) if j != k}
        assert row == pytest.approx(expect)
        for j, _ in space.transitions_of(k):
            assert state_distance(x, space.state(j)) == 1


def test_known_sizes():
    assert len(enumerate_states(net("K2"))) == 3
    assert len(enumerate_states(net("C4"))) == 7
    assert len(enumerate_states(net("C4", 2))) == 35
    assert len(enumerate_states(net("K2", 2))) == 7


def test_c4_dominants():
    space = enumerate_states(net("C4"))
    assert space.dominant_states() == [(0, 1, 0, 1), (1, 0, 1, 0)]


def test_arrays_are_read_only():
    space = enumerate_states(net("K2"))
    with pytest.raises(ValueError):
        space.states[0, 0] = 1


def test_size_cap_reports_bound():
    with pytest.raises(SizeCapError) as exc:
        enumerate_states(net("C6", 3), cap=100)
    assert exc.value.bound == 4 ** 6
    assert exc.value.cap == 100


def test_index_rejects_infeasible():
    space = enumerate_states(net("K2"))
    with pytest.raises(KeyError):
        space.index((1, 1))
    with pytest.raises(KeyError):
        space.index((2, 0))


def test_check_feasible():
    n = net("K2", 2)
    check_feasible(n, (1, 2))
    for bad in ((1, 1), (3, 0), (0,)):
        with pytest.raises(NetworkError):
            check_feasible(n, bad)


def test_uniformized_chain():
    space = enumerate_states(net("C4"))
    assert uniformization_rate(space, 100.0) == 400.0
    # small nu: deactivations dominate the empty-state exit rate
    assert uniformization_rate(space, 0.1) == 2.0
    P = uniformized_matrix(space, 0.1).toarray()
    assert (P >= -1e-15).all() and np.allclose(P.sum(axis=1), 1.0)


def test_state_distance():
    assert state_distance((0, 1), (0, 1)) == 0
    assert state_distance((0, 1), (0, 0)) == 1
    assert state_distance((1, 1), (2, 0)) == 3


def test_heterogeneous_levels():
    rm = RateModel("heterogeneous_exponents", 10.0, ((1.0,), (0.5,)))
    space = enumerate_states(MultiChannelNetwork(2, 1, ((),), rm))
    assert space.levels == [0, Fraction(1, 2), 1, Fraction(3, 2)]
    assert space.dominant_states() == [(1, 1)]
