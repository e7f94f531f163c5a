"""Feasible multi-channel activity states and their transition structure.

A state is a length-``N`` vector with entries in ``{0, 1, ..., C}``: ``0`` means
the node is idle, ``c`` means it transmits on channel ``c``.  States are
enumerated in lexicographic order of these vectors (node 0 most significant).

Each state is also encoded as the integer ``sum_i x_i (C+1)**(N-1-i)``; the
codes are strictly increasing along the enumeration, so a state's ordinal is
found by binary search.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .conflict_graph import MultiChannelNetwork, NetworkError, SizeCapError

__all__ = [
    "DEFAULT_STATE_CAP",
    "StateSpace",
    "enumerate_states",
    "activity",
    "max_activity",
    "dominant_states",
    "state_distance",
    "uniformization_rate",
    "generator_matrix",
    "uniformized_matrix",
]

DEFAULT_STATE_CAP = 5_000_000

# int64 headroom for the state codes
_CODE_LIMIT = 2**62


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Enumerated feasible states of a network with their single-step moves.

    Transitions are stored edge-wise (sorted by source, then target):
    ``edge_src[k] -> edge_dst[k]`` moves ``edge_node[k]`` onto or off
    ``edge_channel[k]``; ``edge_activate[k]`` tells which.
    """

    network: MultiChannelNetwork
    states: np.ndarray
    codes: np.ndarray
    activity: np.ndarray
    weighted_activity: tuple[Fraction, ...] | None
    A_C: int | Fraction
    dominant: np.ndarray
    edge_src: np.ndarray
    edge_dst: np.ndarray
    edge_node: np.ndarray
    edge_channel: np.ndarray
    edge_activate: np.ndarray
    indptr: np.ndarray

    def __len__(self) -> int:
        return len(self.states)

    @property
    def num_nodes(self) -> int:
        return self.network.num_nodes

    @property
    def num_channels(self) -> int:
        return self.network.num_channels

    @property
    def heterogeneous(self) -> bool:
        return self.network.rate_model.heterogeneous

    @property
    def levels(self) -> list:
        """Landscape value of every state: ``a(x)``, or the weighted ``ã(x)``."""
        if self.weighted_activity is not None:
            return list(self.weighted_activity)
        return [int(a) for a in self.activity]

    def state(self, k: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.states[k])

    def index(self, x: Sequence[int]) -> int:
        """Ordinal of state ``x``; ``KeyError`` if it is not feasible."""
        x = tuple(int(v) for v in x)
        if len(x) != self.num_nodes or any(v < 0 or v > self.num_channels for v in x):
            raise KeyError(x)
        code = 0
        base = self.num_channels + 1
        for v in x:
            code = code * base + v
        pos = int(np.searchsorted(self.codes, code))
        if pos >= len(self.codes) or self.codes[pos] != code:
            raise KeyError(x)
        return pos

    def ordinals(self, xs: Iterable) -> list[int]:
        """Accept ordinals or state vectors, return ordinals."""
        out = []
        for x in xs:
            if isinstance(x, (int, np.integer)):
                k = int(x)
                if not 0 <= k < len(self):
                    raise IndexError(f"state ordinal {k} out of range")
                out.append(k)
            else:
                out.append(self.index(x))
        return out

    def transitions_of(self, k: int) -> list[tuple[int, tuple[str, int, int]]]:
        """``(target ordinal, (kind, node, channel))`` for every move out of state ``k``."""
        lo, hi = self.indptr[k], self.indptr[k + 1]
        return [
            (int(self.edge_dst[e]),
             ("activate" if self.edge_activate[e] else "deactivate",
              int(self.edge_node[e]), int(self.edge_channel[e])))
            for e in range(lo, hi)
        ]

    def neighbors(self, k: int) -> np.ndarray:
        return self.edge_dst[self.indptr[k]:self.indptr[k + 1]]

    def dominant_states(self) -> list[tuple[int, ...]]:
        return [self.state(k) for k in self.dominant]

    def edge_rates(self, nu: float | None = None) -> np.ndarray:
        """Rate of every stored transition at activation scale ``nu``."""
        rm = self.network.rate_model
        nu = rm.nu if nu is None else nu
        rates = np.ones(len(self.edge_src))
        act = self.edge_activate
        if rm.weights is None:
            rates[act] = nu
        else:
            w = np.asarray(rm.weights, dtype=float)
            rates[act] = np.power(float(nu), w[self.edge_node[act], self.edge_channel[act] - 1])
        return rates

    def adjacency(self) -> sp.csr_matrix:
        n = len(self)
        data = np.ones(len(self.edge_src), dtype=np.int8)
        return sp.csr_matrix((data, (self.edge_src, self.edge_dst)), shape=(n, n))


def _extend(prefix: np.ndarray, node: int, net: MultiChannelNetwork) -> np.ndarray:
    C = net.num_channels
    m = len(prefix)
    values = np.arange(C + 1, dtype=np.int8)
    ext = np.empty((m * (C + 1), node + 1), dtype=np.int8)
    ext[:, :node] = np.repeat(prefix, C + 1, axis=0)
    ext[:, node] = np.tile(values, m)
    ok = np.ones(len(ext), dtype=bool)
    for c in range(1, C + 1):
        nbrs = [i for i, j in net.edge_sets[c - 1] if j == node]
        if not nbrs:
            continue
        on_c = ext[:, node] == c
        clash = (ext[:, nbrs] == c).any(axis=1)
        ok &= ~(on_c & clash)
    return ext[ok]


def enumerate_states(net: MultiChannelNetwork, cap: int | None = DEFAULT_STATE_CAP) -> StateSpace:
    """Enumerate the feasible states of ``net`` with their transitions.

    Refuses (``SizeCapError``) once more than ``cap`` states are found; the
    a-priori bound ``(C+1)**N`` is reported in the error.
    """
    N, C = net.num_nodes, net.num_channels
    cap = DEFAULT_STATE_CAP if cap is None else cap
    bound = (C + 1) ** N
    if bound >= _CODE_LIMIT:
        raise SizeCapError(
            f"(C+1)^N = {bound} exceeds the supported state encoding", bound=bound, cap=cap)

    states = np.zeros((1, 0), dtype=np.int8)
    for node in range(N):
        states = _extend(states, node, net)
        # feasible prefixes never outnumber feasible full states
        if len(states) > cap:
            raise SizeCapError(
                f"state space exceeds the cap of {cap} states (a-priori bound (C+1)^N = {bound})",
                bound=bound, cap=cap)

    weights = (C + 1) ** np.arange(N - 1, -1, -1, dtype=np.int64)
    codes = states.astype(np.int64) @ weights
    act = (states != 0).sum(axis=1).astype(np.int64)

    src, dst, node_of, chan_of = [], [], [], []
    for i in range(N):
        idle = np.flatnonzero(states[:, i] == 0)
        if len(idle) == 0:
            continue
        for c in range(1, C + 1):
            cand = codes[idle] + c * weights[i]
            pos = np.searchsorted(codes, cand)
            pos_c = np.minimum(pos, len(codes) - 1)
            hit = (pos < len(codes)) & (codes[pos_c] == cand)
            src.append(idle[hit])
            dst.append(pos[hit])
            node_of.append(np.full(hit.sum(), i, dtype=np.int64))
            chan_of.append(np.full(hit.sum(), c, dtype=np.int64))
    if src:
        a_src = np.concatenate(src)
        a_dst = np.concatenate(dst)
        a_node = np.concatenate(node_of)
        a_chan = np.concatenate(chan_of)
    else:
        a_src = a_dst = a_node = a_chan = np.zeros(0, dtype=np.int64)
    e_src = np.concatenate([a_src, a_dst])
    e_dst = np.concatenate([a_dst, a_src])
    e_node = np.concatenate([a_node, a_node])
    e_chan = np.concatenate([a_chan, a_chan])
    e_act = np.concatenate([np.ones(len(a_src), bool), np.zeros(len(a_src), bool)])
    order = np.lexsort((e_dst, e_src))
    e_src, e_dst, e_node, e_chan, e_act = (a[order] for a in (e_src, e_dst, e_node, e_chan, e_act))
    indptr = np.searchsorted(e_src, np.arange(len(states) + 1))

    rm = net.rate_model
    if rm.heterogeneous:
        wx = [[rm.exact_weight(i, c) for c in range(1, C + 1)] for i in range(N)]
        wact = tuple(
            sum((wx[i][v - 1] for i, v in enumerate(row) if v), Fraction(0))
            for row in states.tolist()
        )
        top = max(wact)
        dom = np.array([k for k, v in enumerate(wact) if v == top], dtype=np.int64)
        A_C: int | Fraction = top
    else:
        wact = None
        A_C = int(act.max())
        dom = np.flatnonzero(act == A_C)

    for arr in (states, codes, act, dom, e_src, e_dst, e_node, e_chan, e_act, indptr):
        arr.setflags(write=False)
    return StateSpace(net, states, codes, act, wact, A_C, dom,
                      e_src, e_dst, e_node, e_chan, e_act, indptr)


def activity(x: Sequence[int]) -> int:
    """Number of active nodes in ``x``."""
    return sum(1 for v in x if v)


def max_activity(space: StateSpace) -> int:
    """Maximum number of simultaneously active nodes over the state space."""
    return int(space.activity.max())


def dominant_states(space: StateSpace) -> list[tuple[int, ...]]:
    """States maximising the landscape (``a`` or the weighted ``ã``), in enumeration order."""
    return space.dominant_states()


def state_distance(x: Sequence[int], y: Sequence[int]) -> int:
    """Minimum number of single-node moves between ``x`` and ``y``.

    A node switching channel has to deactivate first, so it counts twice.
    """
    if len(x) != len(y):
        raise ValueError("states have different lengths")
    d = 0
    for a, b in zip(x, y):
        if a != b:
            d += 2 if a and b else 1
    return d


def uniformization_rate(space: StateSpace, nu: float | None = None) -> float:
    """Uniformization constant.

    Homogeneous model: ``C*N*nu`` (the exit rate of the empty state), raised to
    the true maximal exit rate when ``nu`` is so small that deactivations
    dominate.  Heterogeneous model: the exact maximal exit rate.
    """
    rm = space.network.rate_model
    nu = rm.nu if nu is None else nu
    exit_rate = np.bincount(space.edge_src, weights=space.edge_rates(nu), minlength=len(space))
    qmax = float(exit_rate.max()) if len(exit_rate) else 0.0
    if not rm.heterogeneous:
        qmax = max(qmax, space.num_channels * space.num_nodes * nu)
    return qmax


def generator_matrix(space: StateSpace, nu: float | None = None) -> sp.csr_matrix:
    """Sparse CTMC generator ``Q`` (rows sum to zero)."""
    n = len(space)
    rates = space.edge_rates(nu)
    off = sp.csr_matrix((rates, (space.edge_src, space.edge_dst)), shape=(n, n))
    exit_rate = np.asarray(off.sum(axis=1)).ravel()
    return (off - sp.diags(exit_rate)).tocsr()


def uniformized_matrix(space: StateSpace, nu: float | None = None) -> sp.csr_matrix:
    """Row-stochastic matrix ``P = I + Q / q_max`` of the uniformized chain."""
    rm = space.network.rate_model
    nu = rm.nu if nu is None else nu
    if nu <= 0:
        raise ValueError("nu must be positive")
    qmax = uniformization_rate(space, nu)
    n = len(space)
    rates = space.edge_rates(nu) / qmax
    off = sp.csr_matrix((rates, (space.edge_src, space.edge_dst)), shape=(n, n))
    stay = 1.0 - np.asarray(off.sum(axis=1)).ravel()
    return (off + sp.diags(stay)).tocsr()


def check_feasible(net: MultiChannelNetwork, x: Sequence[int]) -> None:
    """Raise ``NetworkError`` unless ``x`` is a feasible activity state of ``net``."""
    if len(x) != net.num_nodes:
        raise NetworkError(f"state has length {len(x)}, expected {net.num_nodes}")
    for v in x:
        if not 0 <= v <= net.num_channels:
            raise NetworkError(f"state entry {v} outside 0..{net.num_channels}")
    for c, es in enumerate(net.edge_sets, start=1):
        for i, j in es:
            if x[i] == c and x[j] == c:
                raise NetworkError(f"nodes {i} and {j} both active on channel {c}")
