"""Stochastic simulation of multi-channel CSMA dynamics.

Two modes:

``exact``
    Jump chain plus exponential holding times drawn from the enumerated
    transition table (needs exponential timers).
``event``
    One back-off timer per (node, channel) while the node is idle and one
    transmission timer while it is active.  When a back-off expires and the
    channel is sensed busy, a fresh back-off is drawn for that channel.
    Timers may be exponential, deterministic or uniform, always normalized to
    the model means ``1/nu_{i,c}`` and ``1/mu``.

Every replica owns a generator seeded from ``SeedSequence(seed,
spawn_key=(replica, stream))`` so runs are reproducible and replicas are
independent regardless of execution order.
"""
from __future__ import annotations

import heapq
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .conflict_graph import MultiChannelNetwork
from .state_space import DEFAULT_STATE_CAP, StateSpace, check_feasible, enumerate_states

__all__ = [
    "Distribution",
    "SimConfig",
    "TrajectoryStats",
    "HittingEstimate",
    "InsensitivityResult",
    "simulate",
    "estimate_hitting",
    "insensitivity_check",
    "total_variation",
]

_BLOCK = 4096
STREAM_TRAJECTORY = 0
STREAM_HITTING = 1
LARGE_NU = 1e4


@dataclass(frozen=True)
class Distribution:
    """Timer law with unit mean; scaled to the required mean when drawn."""

    kind: str = "exp"
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in ("exp", "det", "unif"):
            raise ValueError(f"unknown distribution {self.kind!r}")
        if self.kind == "unif" and not (0 <= self.a < self.b):
            raise ValueError("uniform distribution needs 0 <= a < b")

    @classmethod
    def parse(cls, text: str) -> Distribution:
        """``exp``, ``det`` or ``unif:a,b``."""
        text = text.strip()
        if text in ("exp", "exponential"):
            return cls("exp")
        if text in ("det", "deterministic"):
            return cls("det")
        if text.startswith("unif"):
            try:
                _, args = text.split(":", 1)
                a, b = (float(v) for v in args.split(","))
            except ValueError:
                raise ValueError(f"expected unif:a,b, got {text!r}") from None
            return cls("unif", a, b)
        raise ValueError(f"unknown distribution {text!r}")

    def __str__(self):
        return f"unif:{self.a:g},{self.b:g}" if self.kind == "unif" else self.kind

    def unit_samples(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "exp":
            return rng.standard_exponential(size)
        if self.kind == "det":
            return np.ones(size)
        return rng.uniform(self.a, self.b, size) / (0.5 * (self.a + self.b))


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    replicas: int = 1
    horizon: float = 1e4
    max_events: int = 10_000_000
    backoff: Distribution = field(default_factory=Distribution)
    transmit: Distribution = field(default_factory=Distribution)
    mode: str = "exact"
    record_events: bool = False
    workers: int = 1

    def __post_init__(self):
        mode = {"ctmc-exact": "exact", "event-driven": "event"}.get(self.mode, self.mode)
        object.__setattr__(self, "mode", mode)
        if mode not in ("exact", "event"):
            raise ValueError(f"unknown simulation mode {self.mode!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.replicas < 1:
            raise ValueError("replicas must be positive")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.max_events < 1:
            raise ValueError("max_events must be positive")
        if mode == "exact" and (self.backoff.kind != "exp" or self.transmit.kind != "exp"):
            raise ValueError("exact mode requires exponential back-off and transmission times")

    def rng(self, replica: int, stream: int = STREAM_TRAJECTORY) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(replica, stream)))


@dataclass
class TrajectoryStats:
    """Time-weighted occupancy statistics of one or more trajectories."""

    num_nodes: int
    num_channels: int
    total_time: float = 0.0
    events: int = 0
    # state code -> time spent
    state_time: dict = field(default_factory=dict)
    event_log: list | None = None

    def _codes(self):
        base = self.num_channels + 1
        out = {}
        for code, t in self.state_time.items():
            x = []
            for _ in range(self.num_nodes):
                code, v = divmod(code, base)
                x.append(v)
            out[tuple(reversed(x))] = t
        return out

    @property
    def state_occupancy(self) -> dict[tuple[int, ...], float]:
        """Fraction of time spent in each visited state."""
        return {x: t / self.total_time for x, t in sorted(self._codes().items())}

    @property
    def node_channel_fraction(self) -> np.ndarray:
        """``[i, c-1]``: fraction of time node ``i`` is active on channel ``c``."""
        out = np.zeros((self.num_nodes, self.num_channels))
        for x, t in self._codes().items():
            for i, v in enumerate(x):
                if v:
                    out[i, v - 1] += t
        return out / self.total_time

    @property
    def node_active_fraction(self) -> np.ndarray:
        return self.node_channel_fraction.sum(axis=1)

    @property
    def channel_occupancy(self) -> np.ndarray:
        """Mean number of nodes active on each channel."""
        return self.node_channel_fraction.sum(axis=0)

    def merge(self, other: TrajectoryStats) -> TrajectoryStats:
        st = dict(self.state_time)
        for k, v in other.state_time.items():
            st[k] = st.get(k, 0.0) + v
        log = None
        if self.event_log is not None or other.event_log is not None:
            log = (self.event_log or []) + (other.event_log or [])
        return TrajectoryStats(self.num_nodes, self.num_channels,
                               self.total_time + other.total_time,
                               self.events + other.events, st, log)

    def to_dict(self) -> dict:
        return {
            "total_time": self.total_time,
            "events": self.events,
            "node_active_fraction": self.node_active_fraction.tolist(),
            "node_channel_fraction": self.node_channel_fraction.tolist(),
            "channel_occupancy": self.channel_occupancy.tolist(),
            "state_occupancy": [[list(x), f] for x, f in self.state_occupancy.items()],
        }


class _Buffer:
    """Block-drawn unit-mean samples."""

    __slots__ = ("dist", "rng", "buf", "pos")

    def __init__(self, dist: Distribution, rng: np.random.Generator):
        self.dist, self.rng = dist, rng
        self.buf = dist.unit_samples(rng, _BLOCK).tolist()
        self.pos = 0

    def draw(self) -> float:
        if self.pos == len(self.buf):
            self.buf = self.dist.unit_samples(self.rng, _BLOCK).tolist()
            self.pos = 0
        v = self.buf[self.pos]
        self.pos += 1
        return v


def _encode(x: Sequence[int], C: int) -> int:
    code = 0
    for v in x:
        code = code * (C + 1) + int(v)
    return code


# ---------------------------------------------------------------------------
# exact CTMC mode


class _JumpTable:
    def __init__(self, space: StateSpace, nu: float):
        rates = space.edge_rates(nu)
        self.dst = []
        self.cum = []
        self.total = []
        for k in range(len(space)):
            lo, hi = int(space.indptr[k]), int(space.indptr[k + 1])
            r = rates[lo:hi]
            tot = float(r.sum())
            self.dst.append(space.edge_dst[lo:hi].tolist())
            self.cum.append((np.cumsum(r) / tot).tolist())
            self.total.append(tot)
        self.node = space.edge_node
        self.chan = space.edge_channel
        self.act = space.edge_activate
        self.indptr = space.indptr
        self.codes = space.codes.tolist()


def _choose(cum: list[float], u: float) -> int:
    # short lists: linear scan beats bisect overhead
    for j, c in enumerate(cum):
        if u < c:
            return j
    return len(cum) - 1


def _run_exact(table: _JumpTable, start: int, horizon: float, max_events: int,
               rng: np.random.Generator, targets: set | None, log: list | None):
    exps = rng.standard_exponential(_BLOCK).tolist()
    unif = rng.random(_BLOCK).tolist()
    pos = 0
    occ: dict[int, float] = {}
    t = 0.0
    k = start
    events = 0
    total, cum, dst = table.total, table.cum, table.dst
    while True:
        if pos == _BLOCK:
            exps = rng.standard_exponential(_BLOCK).tolist()
            unif = rng.random(_BLOCK).tolist()
            pos = 0
        dt = exps[pos] / total[k]
        u = unif[pos]
        pos += 1
        if targets is None and t + dt >= horizon:
            occ[k] = occ.get(k, 0.0) + horizon - t
            t = horizon
            break
        if events >= max_events:
            return t, events, occ, False
        occ[k] = occ.get(k, 0.0) + dt
        t += dt
        j = _choose(cum[k], u)
        if log is not None:
            e = int(table.indptr[k]) + j
            log.append((t, int(table.node[e]), int(table.chan[e]),
                        "activate" if table.act[e] else "deactivate"))
        k = dst[k][j]
        events += 1
        if targets is not None and k in targets:
            return t, events, occ, True
    return t, events, occ, True


# ---------------------------------------------------------------------------
# event-driven mode


def _run_event(net: MultiChannelNetwork, nu: float, config: SimConfig, start: Sequence[int],
               rng: np.random.Generator, targets: set | None, log: list | None):
    N, C = net.num_nodes, net.num_channels
    rm = net.rate_model
    back_mean = [[1.0 / rm.activation_rate(i, c, nu) for c in range(1, C + 1)] for i in range(N)]
    nbrs = [[[] for _ in range(N)] for _ in range(C)]
    for c, es in enumerate(net.edge_sets):
        for i, j in es:
            nbrs[c][i].append(j)
            nbrs[c][j].append(i)
    place = [(C + 1) ** (N - 1 - i) for i in range(N)]
    back = _Buffer(config.backoff, rng)
    trans = _Buffer(config.transmit, rng)

    x = [int(v) for v in start]
    code = _encode(x, C)
    epoch = [0] * N
    heap: list = []
    seq = 0
    for i in range(N):
        if x[i]:
            heap.append((trans.draw(), seq, i, 0, 0))
            seq += 1
        else:
            for c in range(C):
                heap.append((back.draw() * back_mean[i][c], seq, i, c + 1, 0))
                seq += 1
    heapq.heapify(heap)

    occ: dict[int, float] = {}
    t = 0.0
    events = 0
    horizon = config.horizon
    max_events = config.max_events
    push, pop = heapq.heappush, heapq.heappop
    while heap:
        when, _, i, c, ep = pop(heap)
        if ep != epoch[i]:
            continue
        if targets is None and when >= horizon:
            occ[code] = occ.get(code, 0.0) + horizon - t
            t = horizon
            break
        if events >= max_events:
            return t, events, occ, False
        occ[code] = occ.get(code, 0.0) + when - t
        t = when
        if c == 0:
            # transmission ends; every channel gets a fresh back-off
            ch = x[i]
            x[i] = 0
            code -= ch * place[i]
            epoch[i] += 1
            ep = epoch[i]
            for cc in range(C):
                push(heap, (t + back.draw() * back_mean[i][cc], seq, i, cc + 1, ep))
                seq += 1
            events += 1
            if log is not None:
                log.append((t, i, ch, "deactivate"))
        else:
            if any(x[j] == c for j in nbrs[c - 1][i]):
                push(heap, (t + back.draw() * back_mean[i][c - 1], seq, i, c, ep))
                seq += 1
                continue
            x[i] = c
            code += c * place[i]
            epoch[i] += 1
            push(heap, (t + trans.draw(), seq, i, 0, epoch[i]))
            seq += 1
            events += 1
            if log is not None:
                log.append((t, i, c, "activate"))
        if targets is not None and code in targets:
            return t, events, occ, True
    return t, events, occ, True


# ---------------------------------------------------------------------------
# public API


def _resolve_nu(net: MultiChannelNetwork, nu: float | None) -> float:
    nu = net.rate_model.nu if nu is None else float(nu)
    if nu <= 0:
        raise ValueError("nu must be positive")
    return nu


def _replica_stats(args):
    net, space, nu, config, start, r = args
    rng = config.rng(r, STREAM_TRAJECTORY)
    log = [] if config.record_events else None
    if config.mode == "exact":
        table = _JumpTable(space, nu)
        t, events, occ, _ = _run_exact(table, space.index(start), config.horizon,
                                        config.max_events, rng, None, log)
        codes = table.codes
        state_time = {codes[k]: v for k, v in occ.items()}
    else:
        t, events, state_time, _ = _run_event(net, nu, config, start, rng, None, log)
    if events == 0:
        raise ValueError("horizon too small: no event occurred")
    return TrajectoryStats(net.num_nodes, net.num_channels, t, events, state_time, log)


def _map(fn, jobs, workers: int):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def simulate(net: MultiChannelNetwork, config: SimConfig, space: StateSpace | None = None,
             nu: float | None = None, start: Sequence[int] | None = None) -> TrajectoryStats:
    """Simulate ``config.replicas`` trajectories up to ``config.horizon`` and pool them."""
    nu = _resolve_nu(net, nu)
    if nu >= LARGE_NU:
        warnings.warn(f"nu = {nu:g}: hitting times with exponent above 2 are impractical to "
                      "simulate; use the exact solver instead", RuntimeWarning, stacklevel=2)
    start = tuple(start) if start is not None else (0,) * net.num_nodes
    check_feasible(net, start)
    if config.mode == "exact" and space is None:
        space = enumerate_states(net)
    jobs = [(net, space, nu, config, start, r) for r in range(config.replicas)]
    parts = _map(_replica_stats, jobs, config.workers)
    out = parts[0]
    for p in parts[1:]:
        out = out.merge(p)
    return out


@dataclass
class HittingEstimate:
    mean: float
    stderr: float
    samples: list[float]
    censored: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "replicas": len(self.samples),
                "censored_replicas": self.censored}


def _replica_hit(args):
    net, space, nu, config, start, target_codes, r = args
    rng = config.rng(r, STREAM_HITTING)
    if config.mode == "exact":
        table = _JumpTable(space, nu)
        tgt = {space.index(x) for x in target_codes}
        t, _, _, done = _run_exact(table, space.index(start), math.inf, config.max_events,
                                   rng, tgt, None)
    else:
        C = net.num_channels
        tgt = {_encode(x, C) for x in target_codes}
        t, _, _, done = _run_event(net, nu, config, start, rng, tgt, None)
    return t, done


def estimate_hitting(net: MultiChannelNetwork, start: Sequence[int], target: Iterable[Sequence[int]],
                     nu: float | None, config: SimConfig,
                     space: StateSpace | None = None) -> HittingEstimate:
    """Monte Carlo estimate of the expected hitting time of ``target`` from ``start``.

    Replicas that exhaust ``config.max_events`` before hitting are listed in
    ``censored`` (with a warning) and excluded from the mean.
    """
    nu = _resolve_nu(net, nu)
    if nu >= LARGE_NU:
        warnings.warn(f"nu = {nu:g}: hitting times with exponent above 2 are impractical to "
                      "simulate; use the exact solver instead", RuntimeWarning, stacklevel=2)
    start = tuple(int(v) for v in start)
    check_feasible(net, start)
    target = [tuple(int(v) for v in x) for x in target]
    if not target:
        raise ValueError("target set is empty")
    for x in target:
        check_feasible(net, x)
    if start in target:
        raise ValueError("start state lies in the target set")
    if config.mode == "exact" and space is None:
        space = enumerate_states(net)

    if config.mode == "exact" and config.workers <= 1:
        # share one jump table across replicas
        table = _JumpTable(space, nu)
        tgt = {space.index(x) for x in target}
        k0 = space.index(start)
        results = []
        for r in range(config.replicas):
            t, _, _, done = _run_exact(table, k0, math.inf, config.max_events,
                                       config.rng(r, STREAM_HITTING), tgt, None)
            results.append((t, done))
    else:
        jobs = [(net, space, nu, config, start, target, r) for r in range(config.replicas)]
        results = _map(_replica_hit, jobs, config.workers)

    samples = [t for t, done in results if done]
    censored = [r for r, (_, done) in enumerate(results) if not done]
    if censored:
        warnings.warn(f"{len(censored)} replicas hit the event cap before reaching the target",
                      RuntimeWarning, stacklevel=2)
    if not samples:
        raise RuntimeError("no replica reached the target within the event cap")
    arr = np.array(samples)
    stderr = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else math.inf
    return HittingEstimate(float(arr.mean()), stderr, samples, censored)


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


@dataclass
class InsensitivityResult:
    tv: float
    empirical: dict
    stationary: dict
    stats: TrajectoryStats

    def to_dict(self) -> dict:
        return {"tv": self.tv, "events": self.stats.events, "total_time": self.stats.total_time,
                "empirical": [[list(x), v] for x, v in sorted(self.empirical.items())],
                "stationary": [[list(x), v] for x, v in sorted(self.stationary.items())]}


def insensitivity_check(net: MultiChannelNetwork, nu: float | None, backoff: Distribution,
                        transmit: Distribution, config: SimConfig,
                        space: StateSpace | None = None, min_events: int = 10_000) -> InsensitivityResult:
    """Total-variation distance between time-weighted occupancy and the product-form law."""
    from .analysis import stationary_distribution

    nu = _resolve_nu(net, nu)
    config = replace(config, mode="event", backoff=backoff, transmit=transmit)
    if space is None:
        space = enumerate_states(net, DEFAULT_STATE_CAP)
    stats = simulate(net, config, nu=nu)
    if stats.events < min_events:
        raise ValueError(f"horizon too short: {stats.events} events, need at least {min_events}")
    pi = stationary_distribution(space, nu)
    stationary = {space.state(k): float(pi[k]) for k in range(len(space))}
    empirical = stats.state_occupancy
    return InsensitivityResult(total_variation(empirical, stationary), empirical, stationary, stats)
