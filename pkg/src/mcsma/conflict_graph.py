"""Multi-channel conflict graphs: ingestion, validation and exact graph invariants.

A network is a set of ``N`` nodes sharing ``C`` orthogonal channels.  On each
channel ``c`` the interference is described by an undirected conflict graph
``E_c``; two nodes adjacent in ``E_c`` cannot both be active on channel ``c``.

The classical invariants needed for the throughput results (independence
number, chromatic number and the number of disjoint maximum independent sets)
are computed exactly with bitset branch-and-bound.  Graphs are small, so the
searches refuse to run beyond ``DEFAULT_NODE_CAP`` nodes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

__all__ = [
    "DEFAULT_NODE_CAP",
    "NetworkError",
    "SizeCapError",
    "RateModel",
    "MultiChannelNetwork",
    "canonical_edges",
    "network_from_dict",
    "network_to_dict",
    "parse_network",
    "adjacency_masks",
    "independent_sets",
    "independence_number",
    "maximum_independent_sets",
    "chromatic_number",
    "disjoint_mis_count",
]

DEFAULT_NODE_CAP = 32

Edge = tuple[int, int]


class NetworkError(ValueError):
    """Raised for malformed or inconsistent network descriptions."""


class SizeCapError(RuntimeError):
    """Raised when an exact computation would exceed a configured size cap."""

    def __init__(self, message: str, bound: int | None = None, cap: int | None = None):
        super().__init__(message)
        self.bound = bound
        self.cap = cap


def _exact(value) -> Fraction:
    # decimal string round-trip keeps 0.1 as 1/10 rather than its binary expansion
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(repr(float(value)))


@dataclass(frozen=True)
class RateModel:
    """Activation-rate model with unit deactivation rate.

    ``homogeneous``: every node activates on every channel at rate ``nu``.
    ``heterogeneous_exponents``: node ``i`` activates on channel ``c`` at rate
    ``nu ** weights[i][c-1]``.
    """

    kind: str = "homogeneous"
    nu: float = 1.0
    weights: tuple[tuple[float, ...], ...] | None = None
    mu: float = 1.0

    def __post_init__(self):
        if self.kind not in ("homogeneous", "heterogeneous_exponents"):
            raise NetworkError(f"unknown rate kind {self.kind!r}")
        if not (isinstance(self.nu, (int, float)) and math.isfinite(self.nu) and self.nu > 0):
            raise NetworkError(f"nu must be a positive finite number, got {self.nu!r}")
        if self.mu != 1.0:
            raise NetworkError("deactivation rate mu is normalized to 1")
        if self.kind == "homogeneous":
            if self.weights is not None:
                raise NetworkError("homogeneous rate model takes no weights")
        else:
            if self.weights is None:
                raise NetworkError("heterogeneous_exponents rate model requires weights")
            rows = tuple(tuple(float(w) for w in row) for row in self.weights)
            for row in rows:
                if not all(math.isfinite(w) for w in row):
                    raise NetworkError("exponent weights must be finite")
            object.__setattr__(self, "weights", rows)

    @property
    def heterogeneous(self) -> bool:
        return self.kind == "heterogeneous_exponents"

    def weight(self, node: int, channel: int) -> float:
        """Exponent of the activation rate of ``node`` on ``channel`` (1-based)."""
        if self.weights is None:
            return 1.0
        return self.weights[node][channel - 1]

    def exact_weight(self, node: int, channel: int) -> Fraction:
        return _exact(self.weight(node, channel))

    def activation_rate(self, node: int, channel: int, nu: float | None = None) -> float:
        nu = self.nu if nu is None else nu
        return nu ** self.weight(node, channel)

    def with_nu(self, nu: float) -> RateModel:
        return replace(self, nu=nu)


def canonical_edges(edges: Iterable[Sequence[int]], num_nodes: int) -> tuple[Edge, ...]:
    """Validate an edge list and return it sorted with ``i < j`` and no duplicates."""
    out = set()
    for e in edges:
        if len(e) != 2:
            raise NetworkError(f"edge {list(e)!r} does not have two endpoints")
        i, j = e
        if isinstance(i, bool) or isinstance(j, bool) or not isinstance(i, int) or not isinstance(j, int):
            raise NetworkError(f"edge {list(e)!r} has non-integer endpoints")
        if not (0 <= i < num_nodes and 0 <= j < num_nodes):
            raise NetworkError(f"edge {list(e)!r} out of range for {num_nodes} nodes")
        if i == j:
            raise NetworkError(f"self-loop {list(e)!r} is not allowed")
        out.add((min(i, j), max(i, j)))
    return tuple(sorted(out))


@dataclass(frozen=True)
class MultiChannelNetwork:
    """``N`` nodes, ``C`` channels and one conflict edge set per channel."""

    num_nodes: int
    num_channels: int
    edge_sets: tuple[tuple[Edge, ...], ...]
    rate_model: RateModel = field(default_factory=RateModel)
    shared: bool = False
    name: str = ""

    def __post_init__(self):
        if isinstance(self.num_nodes, bool) or not isinstance(self.num_nodes, int) or self.num_nodes < 1:
            raise NetworkError(f"num_nodes must be a positive integer, got {self.num_nodes!r}")
        if isinstance(self.num_channels, bool) or not isinstance(self.num_channels, int) or self.num_channels < 1:
            raise NetworkError(f"num_channels must be a positive integer, got {self.num_channels!r}")
        if len(self.edge_sets) != self.num_channels:
            raise NetworkError(
                f"declared {self.num_channels} channels but got {len(self.edge_sets)} edge sets"
            )
        sets = tuple(canonical_edges(es, self.num_nodes) for es in self.edge_sets)
        if self.shared and any(s != sets[0] for s in sets):
            raise NetworkError("shared interference requires identical edge sets on every channel")
        object.__setattr__(self, "edge_sets", sets)
        w = self.rate_model.weights
        if w is not None and (len(w) != self.num_nodes or any(len(r) != self.num_channels for r in w)):
            raise NetworkError(
                f"weights must be a {self.num_nodes}x{self.num_channels} matrix"
            )

    @classmethod
    def single_graph(cls, num_nodes: int, edges: Iterable[Sequence[int]], num_channels: int = 1,
                     nu: float = 1.0, name: str = "") -> MultiChannelNetwork:
        """Homogeneous network with the same conflict graph on every channel."""
        es = canonical_edges(edges, num_nodes)
        return cls(num_nodes, num_channels, (es,) * num_channels, RateModel(nu=nu), True, name)

    @property
    def identical_channels(self) -> bool:
        return all(s == self.edge_sets[0] for s in self.edge_sets)

    @property
    def base_edges(self) -> tuple[Edge, ...]:
        """The common conflict graph; only meaningful when all channels agree."""
        if not self.identical_channels:
            raise NetworkError("channels have different conflict graphs")
        return self.edge_sets[0]

    def with_channels(self, num_channels: int) -> MultiChannelNetwork:
        """Same conflict graph, ``num_channels`` channels, homogeneous rates kept."""
        if self.rate_model.heterogeneous:
            raise NetworkError("cannot change the channel count of a heterogeneous network")
        es = self.base_edges
        return replace(self, num_channels=num_channels, edge_sets=(es,) * num_channels, shared=True)

    def with_nu(self, nu: float) -> MultiChannelNetwork:
        return replace(self, rate_model=self.rate_model.with_nu(nu))

    def masks(self, channel: int) -> list[int]:
        """Neighbour bitmasks of every node on ``channel`` (1-based)."""
        return adjacency_masks(self.edge_sets[channel - 1], self.num_nodes)


def network_from_dict(data: dict, name: str = "") -> MultiChannelNetwork:
    """Build a network from the JSON schema used by network files."""
    if not isinstance(data, dict):
        raise NetworkError("network description must be a JSON object")
    for key in ("num_nodes", "num_channels", "edges"):
        if key not in data:
            raise NetworkError(f"missing field {key!r}")
    n, c, edges = data["num_nodes"], data["num_channels"], data["edges"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise NetworkError(f"num_nodes must be a positive integer, got {n!r}")
    if isinstance(c, bool) or not isinstance(c, int) or c < 1:
        raise NetworkError(f"num_channels must be a positive integer, got {c!r}")
    if not isinstance(edges, dict) or len(edges) != 1 or not ({"shared", "per_channel"} & set(edges)):
        raise NetworkError("edges must be an object with exactly one of 'shared' or 'per_channel'")
    shared = "shared" in edges
    if shared:
        if not isinstance(edges["shared"], list):
            raise NetworkError("edges.shared must be a list of [i, j] pairs")
        es = canonical_edges(edges["shared"], n)
        edge_sets = (es,) * c
    else:
        per = edges["per_channel"]
        if not isinstance(per, list):
            raise NetworkError("edges.per_channel must be a list of edge lists")
        if len(per) != c:
            raise NetworkError(f"declared {c} channels but edges.per_channel has {len(per)} lists")
        edge_sets = tuple(canonical_edges(es, n) for es in per)

    rates = data.get("rates", {"kind": "homogeneous", "nu": 1.0})
    if not isinstance(rates, dict):
        raise NetworkError("rates must be an object")
    kind = rates.get("kind", "homogeneous")
    nu = rates.get("nu", 1.0)
    if isinstance(nu, bool) or not isinstance(nu, (int, float)):
        raise NetworkError(f"rates.nu must be a number, got {nu!r}")
    weights = rates.get("weights")
    if weights is not None:
        if not isinstance(weights, list) or not all(isinstance(r, list) for r in weights):
            raise NetworkError("rates.weights must be a list of lists")
        try:
            weights = tuple(tuple(float(w) for w in row) for row in weights)
        except (TypeError, ValueError) as exc:
            raise NetworkError(f"rates.weights entries must be numbers: {exc}") from None
    rm = RateModel(kind=kind, nu=float(nu), weights=weights)
    return MultiChannelNetwork(n, c, edge_sets, rm, shared, name or str(data.get("name", "")))


def network_to_dict(net: MultiChannelNetwork) -> dict:
    if net.identical_channels:
        edges = {"shared": [list(e) for e in net.edge_sets[0]]}
    else:
        edges = {"per_channel": [[list(e) for e in es] for es in net.edge_sets]}
    rates = {"kind": net.rate_model.kind, "nu": net.rate_model.nu}
    if net.rate_model.weights is not None:
        rates["weights"] = [list(r) for r in net.rate_model.weights]
    out = {"num_nodes": net.num_nodes, "num_channels": net.num_channels, "edges": edges, "rates": rates}
    if net.name:
        out["name"] = net.name
    return out


def parse_network(path: str | Path) -> MultiChannelNetwork:
    """Read and validate a network file (JSON, UTF-8)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise NetworkError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkError(f"{path}: invalid JSON ({exc})") from exc
    return network_from_dict(data, name=data.get("name", path.stem) if isinstance(data, dict) else "")


# ---------------------------------------------------------------------------
# exact graph invariants on bitsets


def adjacency_masks(edges: Iterable[Edge], n: int) -> list[int]:
    adj = [0] * n
    for i, j in edges:
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    return adj


def _check_cap(n: int, cap: int | None):
    cap = DEFAULT_NODE_CAP if cap is None else cap
    if n > cap:
        raise SizeCapError(f"graph has {n} nodes, exact search is capped at {cap}", bound=n, cap=cap)


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def independent_sets(edges: Iterable[Edge], n: int) -> list[int]:
    """All independent sets as bitmasks (including the empty set)."""
    adj = adjacency_masks(edges, n)
    out = []

    def rec(v: int, chosen: int, blocked: int):
        if v == n:
            out.append(chosen)
            return
        rec(v + 1, chosen, blocked)
        if not blocked >> v & 1:
            rec(v + 1, chosen | 1 << v, blocked | adj[v])

    rec(0, 0, 0)
    return out


def _mis_size(adj: list[int], cand: int) -> int:
    best = 0

    def rec(cand: int, size: int):
        nonlocal best
        if cand == 0:
            best = max(best, size)
            return
        if size + cand.bit_count() <= best:
            return
        low = cand & -cand
        v = low.bit_length() - 1
        if adj[v] & cand == 0:
            rec(cand ^ low, size + 1)
            return
        rec(cand & ~adj[v] & ~low, size + 1)
        rec(cand ^ low, size)

    rec(cand, 0)
    return best


def independence_number(edges: Iterable[Edge], n: int, cap: int | None = None) -> int:
    """Size of a maximum independent set, by branch-and-bound."""
    _check_cap(n, cap)
    return _mis_size(adjacency_masks(edges, n), (1 << n) - 1)


def maximum_independent_sets(edges: Iterable[Edge], n: int, cap: int | None = None) -> list[int]:
    """Every maximum independent set as a bitmask, in increasing numeric order."""
    _check_cap(n, cap)
    adj = adjacency_masks(edges, n)
    alpha = _mis_size(adj, (1 << n) - 1)
    found = []

    def rec(cand: int, chosen: int):
        size = chosen.bit_count()
        if size + cand.bit_count() < alpha:
            return
        if size == alpha:
            found.append(chosen)
            return
        low = cand & -cand
        v = low.bit_length() - 1
        rec(cand & ~adj[v] & ~low, chosen | low)
        rec(cand ^ low, chosen)

    rec((1 << n) - 1, 0)
    return sorted(found)


def chromatic_number(edges: Iterable[Edge], n: int, cap: int | None = None) -> int:
    """Smallest number of colours in a proper vertex colouring (exact backtracking)."""
    _check_cap(n, cap)
    edges = list(edges)
    if not edges:
        return 1
    adj = adjacency_masks(edges, n)
    # largest-degree-first ordering keeps the search tree shallow
    order = sorted(range(n), key=lambda v: -adj[v].bit_count())

    def colorable(k: int) -> bool:
        colors = [-1] * n

        def rec(pos: int, used: int) -> bool:
            if pos == n:
                return True
            v = order[pos]
            forbidden = {colors[u] for u in _bits(adj[v]) if colors[u] >= 0}
            for col in range(used):
                if col not in forbidden:
                    colors[v] = col
                    if rec(pos + 1, used):
                        return True
            if used < k:
                colors[v] = used
                if rec(pos + 1, used + 1):
                    return True
            colors[v] = -1
            return False

        return rec(0, 0)

    k = 2
    while not colorable(k):
        k += 1
    return k


def disjoint_mis_count(edges: Iterable[Edge], n: int, cap: int | None = None) -> int:
    """Maximum number of pairwise-disjoint maximum independent sets.

    Enumerates all maximum independent sets and solves the set-packing
    problem over them exactly.
    """
    sets = maximum_independent_sets(edges, n, cap)
    alpha = sets[0].bit_count()
    if alpha == 0:
        return 1
    best = 1

    def rec(start: int, used: int, count: int):
        nonlocal best
        best = max(best, count)
        if count + (n - used.bit_count()) // alpha <= best:
            return
        for k in range(start, len(sets)):
            if sets[k] & used == 0:
                rec(k + 1, used | sets[k], count + 1)

    rec(0, 0, 0)
    return best
