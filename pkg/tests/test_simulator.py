import math
import warnings

import numpy as np
import pytest

from conftest import net
from mcsma.analysis import exact_hitting_time, node_throughput, stationary_distribution
from mcsma.conflict_graph import NetworkError
from mcsma.simulator import (
    Distribution,
    SimConfig,
    estimate_hitting,
    insensitivity_check,
    simulate,
    total_variation,
)
from mcsma.state_space import enumerate_states


def pi_dict(space, nu):
    pi = stationary_distribution(space, nu)
    return {space.state(k): float(pi[k]) for k in range(len(space))}


@pytest.mark.parametrize("text,kind", [("exp", "exp"), ("det", "det"), ("unif:0.5,1.5", "unif")])
def test_distribution_parse_and_unit_mean(text, kind):
    d = Distribution.parse(text)
    assert d.kind == kind and Distribution.parse(str(d)) == d
    x = d.unit_samples(np.random.default_rng(1), 200_000)
    assert x.mean() == pytest.approx(1.0, abs=0.01)
    assert (x >= 0).all()


@pytest.mark.parametrize("text", ["gauss", "unif:2,1", "unif:1", "unif:-1,1"])
def test_bad_distributions(text):
    with pytest.raises(ValueError):
        Distribution.parse(text)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(mode="exact", backoff=Distribution("det"))
    with pytest.raises(ValueError):
        SimConfig(mode="fast")
    with pytest.raises(ValueError):
        SimConfig(seed=-1)
    with pytest.raises(ValueError):
        SimConfig(horizon=0)
    assert SimConfig(mode="ctmc-exact").mode == "exact"
    assert SimConfig(mode="event-driven").mode == "event"


@pytest.mark.parametrize("mode", ["exact", "event"])
def test_seeded_runs_are_bit_reproducible(mode):
    n = net("C4", 2, nu=3.0)
    cfg = SimConfig(seed=11, replicas=2, horizon=200.0, mode=mode)
    a, b = simulate(n, cfg), simulate(n, cfg)
    assert a.state_time == b.state_time and a.events == b.events
    c = simulate(n, SimConfig(seed=12, replicas=2, horizon=200.0, mode=mode))
    assert c.state_time != a.state_time


def test_parallel_workers_reproduce_serial_run():
    n = net("C4", nu=3.0)
    serial = simulate(n, SimConfig(seed=4, replicas=3, horizon=100.0))
    par = simulate(n, SimConfig(seed=4, replicas=3, horizon=100.0, workers=2))
    assert serial.state_time == par.state_time


@pytest.mark.parametrize("mode", ["exact", "event"])
def test_occupancy_converges_to_product_form(mode):
    n = net("C4", 2, nu=2.0)
    space = enumerate_states(n)
    stats = simulate(n, SimConfig(seed=5, replicas=4, horizon=5e3, mode=mode), space)
    assert total_variation(stats.state_occupancy, pi_dict(space, 2.0)) < 0.03
    assert stats.node_active_fraction / 2 == pytest.approx(node_throughput(space, 2.0), abs=0.02)
    assert stats.channel_occupancy.sum() == pytest.approx(stats.node_active_fraction.sum())


def test_occupancy_insensitive_to_uniform_timers():
    n = net("P3", nu=2.0)
    res = insensitivity_check(n, 2.0, Distribution.parse("unif:0.2,1.8"), Distribution("det"),
                              SimConfig(seed=2, horizon=2e4))
    assert res.tv < 0.02


def test_short_horizon_rejected_by_insensitivity_check():
    with pytest.raises(ValueError):
        insensitivity_check(net("K2", nu=2.0), 2.0, Distribution("det"), Distribution("det"),
                            SimConfig(horizon=10.0))


@pytest.mark.parametrize("mode", ["exact", "event"])
def test_hitting_estimate_on_k2(mode):
    n = net("K2", nu=10.0)
    est = estimate_hitting(n, (1, 0), [(0, 1)], 10.0, SimConfig(seed=8, replicas=4000, mode=mode))
    assert abs(est.mean - 2.1) <= 4 * est.stderr
    assert len(est.samples) == 4000 and est.censored == []


def test_hitting_estimate_censoring():
    n = net("C4", nu=100.0)
    with pytest.warns(RuntimeWarning):
        est = estimate_hitting(n, (1, 0, 1, 0), [(0, 1, 0, 1)], 100.0,
                               SimConfig(seed=1, replicas=50, max_events=200))
    assert est.censored
    assert len(est.samples) + len(est.censored) == 50


def test_hitting_input_validation():
    n = net("K2", nu=10.0)
    cfg = SimConfig(replicas=2)
    with pytest.raises(ValueError):
        estimate_hitting(n, (1, 0), [(1, 0)], 10.0, cfg)
    with pytest.raises(ValueError):
        estimate_hitting(n, (1, 0), [], 10.0, cfg)
    with pytest.raises(NetworkError):
        estimate_hitting(n, (1, 1), [(0, 1)], 10.0, cfg)


def test_large_nu_warns():
    with pytest.warns(RuntimeWarning):
        simulate(net("K2"), SimConfig(horizon=1.0), nu=1e4)


def test_event_log_and_merge():
    n = net("K2", nu=1.0)
    stats = simulate(n, SimConfig(seed=3, horizon=50.0, record_events=True, replicas=2))
    assert stats.event_log is not None and len(stats.event_log) == stats.events
    assert math.isclose(sum(stats.state_occupancy.values()), 1.0)
    d = stats.to_dict()
    assert d["events"] == stats.events


def test_exact_and_event_modes_agree_on_hitting_time():
    n = net("C4", nu=5.0)
    exact = exact_hitting_time(enumerate_states(n), 5.0, (1, 0, 1, 0), [(0, 1, 0, 1)])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ev = estimate_hitting(n, (1, 0, 1, 0), [(0, 1, 0, 1)], 5.0,
                              SimConfig(seed=21, replicas=3000, mode="event"))
    assert abs(ev.mean - exact) <= 4 * ev.stderr
