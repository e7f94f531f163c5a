"""Single-channel representation of a multi-channel network.

Every (node, channel) pair becomes a virtual node.  Virtual nodes of the same
physical node form a clique (a node transmits on one channel at a time), and
two virtual nodes on the same channel are adjacent when the physical nodes
conflict on that channel.  Virtual node ``(i, c)`` has index ``i*C + (c-1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .conflict_graph import MultiChannelNetwork, NetworkError, RateModel
from .state_space import DEFAULT_STATE_CAP, StateSpace, enumerate_states, generator_matrix

__all__ = [
    "VirtualGraph",
    "build_virtual",
    "to_multichannel",
    "from_multichannel",
    "EquivalenceReport",
    "check_equivalence",
]


@dataclass(frozen=True)
class VirtualGraph:
    num_virtual_nodes: int
    edges: tuple[tuple[int, int], ...]
    origin: MultiChannelNetwork = field(repr=False)

    def vertex(self, node: int, channel: int) -> int:
        return node * self.origin.num_channels + channel - 1

    def label(self, v: int) -> tuple[int, int]:
        """``(node, channel)`` of virtual node ``v``."""
        C = self.origin.num_channels
        return v // C, v % C + 1

    def as_network(self) -> MultiChannelNetwork:
        """The virtual graph as a single-channel network with the matching rates."""
        net = self.origin
        rm = net.rate_model
        if rm.heterogeneous:
            weights = tuple((rm.weight(*self.label(v)),) for v in range(self.num_virtual_nodes))
            rates = RateModel("heterogeneous_exponents", rm.nu, weights)
        else:
            rates = RateModel(nu=rm.nu)
        return MultiChannelNetwork(self.num_virtual_nodes, 1, (self.edges,), rates, True,
                                   f"{net.name}*" if net.name else "")

    def to_dict(self) -> dict:
        return {
            "num_virtual_nodes": self.num_virtual_nodes,
            "labels": [list(self.label(v)) for v in range(self.num_virtual_nodes)],
            "edges": [list(e) for e in self.edges],
        }


def build_virtual(net: MultiChannelNetwork) -> VirtualGraph:
    """Conflict graph on node-channel pairs equivalent to ``net``."""
    N, C = net.num_nodes, net.num_channels
    edges = set()
    for i in range(N):
        for c in range(C):
            for c2 in range(c + 1, C):
                edges.add((i * C + c, i * C + c2))
    for c, es in enumerate(net.edge_sets):
        for i, j in es:
            edges.add((i * C + c, j * C + c))
    return VirtualGraph(N * C, tuple(sorted(edges)), net)


def to_multichannel(vg: VirtualGraph, v_state: Sequence[int]) -> tuple[int, ...]:
    """Map a virtual 0/1 state to the multi-channel activity vector."""
    net = vg.origin
    N, C = net.num_nodes, net.num_channels
    v = [int(b) for b in v_state]
    if len(v) != N * C or any(b not in (0, 1) for b in v):
        raise NetworkError(f"virtual state must be a 0/1 vector of length {N * C}")
    for a, b in vg.edges:
        if v[a] and v[b]:
            (i, c), (j, c2) = vg.label(a), vg.label(b)
            raise NetworkError(
                f"virtual nodes ({i},{c}) and ({j},{c2}) are adjacent but both active")
    x = [0] * N
    for k, b in enumerate(v):
        if b:
            x[k // C] = k % C + 1
    return tuple(x)


def from_multichannel(vg: VirtualGraph, x: Sequence[int]) -> tuple[int, ...]:
    """Inverse of :func:`to_multichannel`."""
    from .state_space import check_feasible

    net = vg.origin
    check_feasible(net, x)
    C = net.num_channels
    v = [0] * (net.num_nodes * C)
    for i, c in enumerate(x):
        if c:
            v[i * C + c - 1] = 1
    return tuple(v)


@dataclass
class EquivalenceReport:
    passed: bool
    num_states: int
    num_virtual_states: int
    counterexample: str | None = None

    def to_dict(self) -> dict:
        return {"passed": self.passed, "num_states": self.num_states,
                "num_virtual_states": self.num_virtual_states,
                "counterexample": self.counterexample}


def _pushforward(space: StateSpace, vspace: StateSpace, C: int) -> np.ndarray:
    # ordinal in `space` of the image of every virtual state
    N = space.num_nodes
    vs = vspace.states.reshape(len(vspace), N, C).astype(np.int64)
    x = (vs * np.arange(1, C + 1)).sum(axis=2)
    base = (C + 1) ** np.arange(N - 1, -1, -1, dtype=np.int64)
    codes = x @ base
    pos = np.searchsorted(space.codes, codes)
    pos_c = np.minimum(pos, len(space) - 1)
    if not np.all(space.codes[pos_c] == codes):
        raise NetworkError("virtual state maps outside the multi-channel state space")
    return pos_c


def check_equivalence(net: MultiChannelNetwork, nu: float | None = None,
                      cap: int | None = DEFAULT_STATE_CAP, rtol: float = 1e-12) -> EquivalenceReport:
    """Compare the multi-channel chain with the single-channel chain on the virtual graph.

    Checks that the state spaces have equal size, that the state map is a
    bijection, that generators agree entry by entry under the map, and that
    the stationary laws agree after pushing forward.
    """
    from .analysis import stationary_distribution

    nu = net.rate_model.nu if nu is None else nu
    vg = build_virtual(net)
    space = enumerate_states(net, cap)
    vspace = enumerate_states(vg.as_network(), cap)
    n, nv = len(space), len(vspace)
    rep = EquivalenceReport(True, n, nv)
    if n != nv:
        rep.passed = False
        rep.counterexample = f"|X*| = {nv} but |X_C| = {n}"
        return rep
    image = _pushforward(space, vspace, net.num_channels)
    if len(np.unique(image)) != n:
        rep.passed = False
        rep.counterexample = "state map is not injective"
        return rep
    for k in range(nv):
        x = to_multichannel(vg, vspace.state(k))
        if from_multichannel(vg, x) != vspace.state(k) or space.state(int(image[k])) != x:
            rep.passed = False
            rep.counterexample = f"round trip fails at virtual state {vspace.state(k)}"
            return rep

    Q = generator_matrix(space, nu).tocoo()
    Qv = generator_matrix(vspace, nu)
    inv = np.empty(n, dtype=np.int64)
    inv[image] = np.arange(n)
    Qv_mapped = Qv[inv][:, inv].tocoo()
    diff = (Q.tocsr() - Qv_mapped.tocsr()).tocoo()
    scale = np.abs(Q.data).max() if Q.nnz else 1.0
    bad = np.abs(diff.data) > rtol * scale
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        x, y = space.state(int(diff.row[k])), space.state(int(diff.col[k]))
        rep.passed = False
        rep.counterexample = f"rate mismatch on transition {x} -> {y}"
        return rep

    pi = stationary_distribution(space, nu)
    piv = stationary_distribution(vspace, nu)
    pushed = np.zeros(n)
    np.add.at(pushed, image, piv)
    rel = np.abs(pushed - pi) / pi
    if rel.max() > rtol:
        k = int(np.argmax(rel))
        rep.passed = False
        rep.counterexample = f"stationary mismatch at {space.state(k)}: relative error {rel[k]:.3e}"
    return rep
