"""Property suites run over a corpus of networks.

Each check yields a named pass/fail record so a corrupted expectation in a
corpus file shows up as, e.g., ``C4/C=1/expected.delta_matrix``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import (
    DEFAULT_NU_GRID,
    aggregate_throughput,
    delta_matrix,
    gamma,
    height_matrix,
    hitting_exponent,
    jain_index,
    stationary_distribution,
    starvation_indices,
    _json_num,
)
from .conflict_graph import (
    MultiChannelNetwork,
    NetworkError,
    SizeCapError,
    chromatic_number,
    disjoint_mis_count,
    independence_number,
)
from .state_space import DEFAULT_STATE_CAP, StateSpace, enumerate_states
from .virtual_network import check_equivalence

ULTRAMETRIC_MAX_STATES = 2000
HITTING_MAX_STATES = 5000
HITTING_TOL = 0.15
VERIFY_MAX_STATES = 200_000


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def ultrametric_violation(D: np.ndarray) -> tuple[int, int, int] | None:
    """First triple violating ``D[x,y] <= max(D[x,z], D[z,y])``, or ``None``.

    Exhaustive over all triples; also checks symmetry and that off-diagonal
    entries are positive.
    """
    D = np.asarray(D)
    n = len(D)
    if (D != D.T).any():
        x, y = map(int, np.argwhere(D != D.T)[0])
        return x, y, x
    off = ~np.eye(n, dtype=bool)
    if (D[off] <= 0).any() or (np.diag(D) != 0).any():
        x, y = map(int, np.argwhere(off & (D <= 0))[0]) if (D[off] <= 0).any() else (0, 0)
        return x, y, y
    small = D.astype(np.int16)
    for z in range(n):
        bound = np.maximum(small[:, z, None], small[None, z, :])
        bad = small > bound
        if bad.any():
            x, y = map(int, np.argwhere(bad)[0])
            return x, y, z
    return None


def detailed_balance_error(space: StateSpace, nu: float) -> float:
    pi = stationary_distribution(space, nu)
    rates = space.edge_rates(nu)
    flow = pi[space.edge_src] * rates
    # edges come in (activation, deactivation) pairs; match them by (src, dst)
    rev = {(int(a), int(b)): f for a, b, f in zip(space.edge_src, space.edge_dst, flow)}
    worst = 0.0
    for a, b, f in zip(space.edge_src.tolist(), space.edge_dst.tolist(), flow.tolist()):
        g = rev.get((b, a))
        if g is None:
            return math.inf
        worst = max(worst, abs(f - g) / max(f, g))
    return worst


def _fmt(v) -> str:
    return str(_json_num(v))


def _expect(checks: list, prefix: str, key: str, got, want):
    if isinstance(want, str) and want != "undefined":
        want_v = Fraction(want)
        ok = got is not None and Fraction(got) == want_v
    elif want == "undefined":
        ok = got is None
    else:
        ok = got == want
    checks.append(Check(f"{prefix}/expected.{key}", bool(ok), f"got {_fmt(got)}, expected {want}"))


def space_checks(space: StateSpace, prefix: str, expected: dict, nu: float,
                 hitting: bool = False, nu_grid: Sequence[float] = DEFAULT_NU_GRID) -> list[Check]:
    checks: list[Check] = []
    delta = delta_matrix(space)
    gam = gamma(space, delta)
    _, ups = starvation_indices(space, delta)
    ok = ups is None or gam is None or ups <= gam
    checks.append(Check(f"{prefix}/upsilon_le_gamma", ok, f"upsilon={_fmt(ups)} gamma={_fmt(gam)}"))

    err = detailed_balance_error(space, nu)
    checks.append(Check(f"{prefix}/detailed_balance", err <= 1e-12, f"max relative error {err:.2e}"))

    steps = space.activity[space.edge_src] - space.activity[space.edge_dst]
    checks.append(Check(f"{prefix}/unit_activity_steps", bool(np.all(np.abs(steps) == 1)), ""))

    if len(space) <= ULTRAMETRIC_MAX_STATES and not space.heterogeneous:
        bad = ultrametric_violation(height_matrix(space))
        checks.append(Check(f"{prefix}/ultrametric", bad is None,
                            "" if bad is None else f"violated at triple {bad}"))

    if hitting and len(space) <= HITTING_MAX_STATES and len(space.dominant) >= 2:
        worst = 0.0
        for a, s in enumerate(space.dominant):
            others = [int(t) for t in space.dominant if t != s]
            want = min(delta[a, b] for b in range(len(space.dominant)) if b != a) - 1
            fit = hitting_exponent(space, int(s), others, nu_grid)
            worst = max(worst, abs(fit.slope - float(want)))
        checks.append(Check(f"{prefix}/hitting_exponent", worst <= HITTING_TOL,
                            f"max |slope - (Delta - 1)| = {worst:.3f}"))

    for key, want in sorted(expected.items()):
        if key == "num_states":
            _expect(checks, prefix, key, len(space), want)
        elif key == "A":
            _expect(checks, prefix, key, int(space.A_C), want)
        elif key == "delta_matrix":
            _expect(checks, prefix, key, delta.tolist(), want)
        elif key == "gamma":
            _expect(checks, prefix, key, gam, want)
        elif key == "upsilon":
            _expect(checks, prefix, key, ups, want)
        elif key == "jain":
            _expect(checks, prefix, key, jain_index(space), want)
        elif key == "theta":
            _expect(checks, prefix, key, aggregate_throughput(space), want)
        elif key == "dominant_count":
            _expect(checks, prefix, key, len(space.dominant), want)
    return checks


def channel_spaces(net: MultiChannelNetwork, c_max: int, cap: int | None = DEFAULT_STATE_CAP):
    """``(C, space)`` for ``C = 1..c_max`` on the network's common conflict graph."""
    for C in range(1, c_max + 1):
        yield C, enumerate_states(net.with_channels(C), cap)


def sweep_channels(net: MultiChannelNetwork, c_max: int, cap: int | None = DEFAULT_STATE_CAP) -> dict:
    """Throughput, fairness and starvation for every channel count up to ``c_max``.

    An increase of the aggregate throughput is an internal error; increases
    of the starvation index or drops of fairness are reported as findings.
    """
    if c_max < 1:
        raise ValueError("c_max must be at least 1")
    rows, findings, errors = [], [], []
    prev = None
    for C, space in channel_spaces(net, c_max, cap):
        delta = delta_matrix(space)
        _, ups = starvation_indices(space, delta)
        row = {
            "C": C,
            "num_states": len(space),
            "A": int(space.A_C),
            "theta": _json_num(aggregate_throughput(space)),
            "theta_float": float(aggregate_throughput(space)),
            "jain": _json_num(jain_index(space)),
            "upsilon": _json_num(ups),
            "gamma": _json_num(gamma(space, delta)),
        }
        cur = (aggregate_throughput(space), jain_index(space), ups)
        if prev is not None:
            if cur[0] > prev[0]:
                errors.append(f"aggregate throughput increases from C={C - 1} to C={C}")
            if cur[1] is not None and prev[1] is not None and cur[1] < prev[1]:
                findings.append(f"fairness drops from C={C - 1} to C={C}")
            if cur[2] is not None and prev[2] is not None and cur[2] > prev[2]:
                findings.append(f"starvation index grows from C={C - 1} to C={C}")
        prev = cur
        rows.append(row)
    return {"rows": rows, "findings": findings, "errors": errors}


def instance_checks(name: str, net: MultiChannelNetwork, expected: dict,
                    cap: int | None = DEFAULT_STATE_CAP, hitting: bool = False,
                    nu_grid: Sequence[float] = DEFAULT_NU_GRID,
                    max_states: int = VERIFY_MAX_STATES) -> list[Check]:
    checks: list[Check] = []
    nu = net.rate_model.nu
    by_c = expected.get("by_channels", {})
    if not (net.identical_channels and not net.rate_model.heterogeneous):
        space = enumerate_states(net, cap)
        prefix = f"{name}/C={net.num_channels}"
        checks += space_checks(space, prefix, by_c.get(str(net.num_channels), {}), nu, hitting, nu_grid)
        if net.num_channels <= 2 and not net.rate_model.heterogeneous:
            eq = check_equivalence(net, nu, cap)
            checks.append(Check(f"{prefix}/virtual_equivalence", eq.passed, eq.counterexample or ""))
        return checks

    n, edges = net.num_nodes, net.base_edges
    alpha = independence_number(edges, n)
    chi = chromatic_number(edges, n)
    cstar = disjoint_mis_count(edges, n)
    for key, got in (("alpha", alpha), ("chi", chi), ("c_star", cstar)):
        if key in expected:
            _expect(checks, name, key, got, expected[key])

    prev = None
    for C in range(1, chi + 2):
        prefix = f"{name}/C={C}"
        cnet = net.with_channels(C)
        try:
            space = enumerate_states(cnet, min(cap or max_states, max_states))
        except SizeCapError as exc:
            checks.append(Check(f"{prefix}/skipped", True, str(exc)))
            continue
        theta = aggregate_throughput(space)
        t1 = [theta == Fraction(int(space.A_C), C)]
        if C <= cstar:
            t1.append(theta == alpha)
        if C >= chi:
            t1.append(theta == Fraction(n, C))
        if prev is not None and prev[0] == C - 1:
            t1.append(theta <= prev[1])
        checks.append(Check(f"{prefix}/throughput_limits", all(t1), f"theta={_fmt(theta)}"))
        prev = (C, theta)
        checks += space_checks(space, prefix, by_c.get(str(C), {}), nu, hitting, nu_grid)
        if C <= 2:
            eq = check_equivalence(cnet, nu, cap)
            checks.append(Check(f"{prefix}/virtual_equivalence", eq.passed, eq.counterexample or ""))
    return checks


def run_verify(root: str | Path, cap: int | None = DEFAULT_STATE_CAP, hitting: bool = False,
               nu_grid: Sequence[float] = DEFAULT_NU_GRID) -> dict:
    from .corpus import load_instance

    files = sorted(Path(root).glob("*.json"))
    if not files:
        raise NetworkError("no instances")
    checks: list[Check] = []
    for f in files:
        net, expected = load_instance(f)
        checks += instance_checks(net.name or f.stem, net, expected, cap, hitting, nu_grid)
    failed = [c.name for c in checks if not c.passed]
    return {"checks": [c.to_dict() for c in checks], "passed": len(checks) - len(failed),
            "failed": failed}
