"""Asymptotic and exact analysis of the multi-channel CSMA activity process.

Everything here works on an enumerated :class:`~mcsma.state_space.StateSpace`:

* stationary law, per-node and aggregate throughput, Jain fairness;
* communication heights (min over paths of the max activity deficit),
  starvation indices and the worst dominant-to-dominant height;
* exact expected hitting times on the uniformized chain and their
  ``log_nu`` exponents;
* effective and critical resistances of the associated electrical network;
* the bottleneck-set conductance bound on the mixing time and the spectral
  gap for comparison.

Undefined indices are reported as ``None``.  Per-node starvation indices use
the string markers :data:`PERMANENT_STARVER` and :data:`NEVER_STARVES`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from .state_space import (
    StateSpace,
    generator_matrix,
    uniformization_rate,
)

__all__ = [
    "PERMANENT_STARVER",
    "NEVER_STARVES",
    "UNDEFINED",
    "DEFAULT_NU_GRID",
    "UnsupportedModelError",
    "SolverError",
    "stationary_distribution",
    "node_throughput",
    "aggregate_throughput",
    "asymptotic_node_throughput",
    "jain_index",
    "communication_height",
    "height_matrix",
    "heights_from",
    "delta_matrix",
    "starvation_indices",
    "gamma",
    "hitting_times",
    "exact_hitting_time",
    "ExponentFit",
    "hitting_exponent",
    "resistances",
    "conductance",
    "spectral_gap",
    "MixingReport",
    "mixing_bound",
    "AnalysisReport",
    "analyze",
]

PERMANENT_STARVER = "permanent-starver"
NEVER_STARVES = "never-starves"
UNDEFINED = "undefined"
DEFAULT_NU_GRID = (1e2, 1e3, 1e4)

# residual threshold (normwise backward error) for linear solves
SOLVE_TOL = 1e-10
_DENSE_LIMIT = 3000


class UnsupportedModelError(ValueError):
    """The requested quantity is not defined for this rate model."""


class SolverError(RuntimeError):
    """A linear system was singular or could not be solved accurately."""

    def __init__(self, message: str, condition: float | None = None):
        super().__init__(message)
        self.condition = condition


def _require_homogeneous(space: StateSpace, what: str):
    if space.heterogeneous:
        raise UnsupportedModelError(f"{what} is only defined for homogeneous rates")


def _float_levels(space: StateSpace) -> np.ndarray:
    if space.weighted_activity is None:
        return space.activity.astype(float)
    return np.array([float(v) for v in space.weighted_activity])


# ---------------------------------------------------------------------------
# stationary law and throughput


def stationary_distribution(space: StateSpace, nu: float | None = None) -> np.ndarray:
    """Product-form stationary law ``pi(x) ∝ nu ** level(x)``, computed in log space."""
    nu = space.network.rate_model.nu if nu is None else nu
    if nu <= 0:
        raise ValueError("nu must be positive")
    logw = _float_levels(space) * math.log(nu)
    logw -= logw.max()
    w = np.exp(logw)
    return w / w.sum()


def node_throughput(space: StateSpace, nu: float | None = None) -> np.ndarray:
    """Finite-``nu`` throughput: fraction of time each node is active, divided by ``C``."""
    pi = stationary_distribution(space, nu)
    return (pi @ (space.states != 0)) / space.num_channels


def aggregate_throughput(space: StateSpace) -> Fraction:
    """High-activation aggregate throughput ``A(C)/C`` as an exact rational."""
    _require_homogeneous(space, "aggregate throughput")
    return Fraction(int(space.A_C), space.num_channels)


def _dominant_activity(space: StateSpace) -> np.ndarray:
    return space.states[space.dominant] != 0


def asymptotic_node_throughput(space: StateSpace) -> list[Fraction]:
    """Limit of the per-node throughput: ``|S(i)| / (C |D|)``.

    The stationary law is uniform on the dominant states, so the limit only
    needs the fraction of dominant states in which the node is active.
    """
    _require_homogeneous(space, "asymptotic node throughput")
    counts = _dominant_activity(space).sum(axis=0)
    denom = space.num_channels * len(space.dominant)
    return [Fraction(int(k), denom) for k in counts]


def jain_index(space: StateSpace) -> Fraction | None:
    """Jain's fairness index of the asymptotic throughputs, or ``None`` if all are zero."""
    theta = asymptotic_node_throughput(space)
    sq = sum(t * t for t in theta)
    if sq == 0:
        return None
    return sum(theta) ** 2 / (len(theta) * sq)


# ---------------------------------------------------------------------------
# communication heights


def _landscape(space: StateSpace):
    levels = space.levels
    distinct = sorted(set(levels), reverse=True)
    where = {v: t for t, v in enumerate(distinct)}
    rank = np.array([where[v] for v in levels], dtype=np.int64)
    return distinct, rank


def _superlevel_labels(space: StateSpace, rank: np.ndarray, t: int, adj: sp.csr_matrix) -> np.ndarray:
    # component labels of the states with level >= distinct[t]; -1 elsewhere
    keep = np.flatnonzero(rank <= t)
    sub = adj[keep][:, keep]
    _, lab = connected_components(sub, directed=False)
    labels = np.full(len(space), -1, dtype=np.int64)
    labels[keep] = lab
    return labels


def communication_height(space: StateSpace, A: Iterable, B: Iterable):
    """Smallest achievable worst deficit ``top - level(z)`` along paths from ``A`` to ``B``.

    Found by threshold search: the largest level ``m`` such that some state
    of ``A`` and some state of ``B`` are connected within ``{z : level(z) >= m}``.
    """
    A = space.ordinals(A)
    B = space.ordinals(B)
    if not A or not B:
        raise ValueError("both state sets must be nonempty")
    if set(A) & set(B):
        raise ValueError("state sets must be disjoint")
    distinct, rank = _landscape(space)
    adj = space.adjacency()
    A, B = np.array(A), np.array(B)
    top = distinct[0]
    for t, lev in enumerate(distinct):
        labels = _superlevel_labels(space, rank, t, adj)
        la = labels[A]
        lb = labels[B]
        if np.intersect1d(la[la >= 0], lb[lb >= 0]).size:
            return top - lev
    raise RuntimeError("state space is not connected")


def height_matrix(space: StateSpace, subset: Sequence | None = None) -> np.ndarray:
    """Pairwise communication heights among ``subset`` (default: all states).

    The diagonal is 0 by convention, so the matrix is an ultrametric.
    Integer dtype for homogeneous rates, ``Fraction`` objects otherwise.
    """
    K = np.arange(len(space)) if subset is None else np.array(space.ordinals(subset), dtype=np.int64)
    distinct, rank = _landscape(space)
    adj = space.adjacency()
    top = distinct[0]
    m = len(K)
    level_idx = np.full((m, m), -1, dtype=np.int64)
    for t in range(len(distinct)):
        lab = _superlevel_labels(space, rank, t, adj)[K]
        same = (lab[:, None] == lab[None, :]) & (lab[:, None] >= 0) & (level_idx < 0)
        level_idx[same] = t
        if (level_idx >= 0).all():
            break
    np.fill_diagonal(level_idx, 0)
    if space.weighted_activity is None:
        out = top - np.array(distinct, dtype=np.int64)[level_idx]
    else:
        lut = np.array([top - d for d in distinct], dtype=object)
        out = lut[level_idx]
    np.fill_diagonal(out, 0)
    return out


def heights_from(space: StateSpace, s) -> np.ndarray:
    """Communication height from state ``s`` to every state (0 at ``s`` itself)."""
    (k,) = space.ordinals([s])
    distinct, rank = _landscape(space)
    adj = space.adjacency()
    top = distinct[0]
    level_idx = np.full(len(space), -1, dtype=np.int64)
    for t in range(len(distinct)):
        lab = _superlevel_labels(space, rank, t, adj)
        if lab[k] < 0:
            continue
        hit = (lab == lab[k]) & (level_idx < 0)
        level_idx[hit] = t
    if space.weighted_activity is None:
        out = top - np.array(distinct, dtype=np.int64)[level_idx]
    else:
        out = np.array([top - d for d in distinct], dtype=object)[level_idx]
    out[k] = 0
    return out


def delta_matrix(space: StateSpace) -> np.ndarray:
    """Communication heights between all pairs of dominant states."""
    return height_matrix(space, space.dominant)


def starvation_indices(space: StateSpace, delta: np.ndarray | None = None):
    """Per-node starvation indices and the network index.

    For node ``i`` with dominant set ``S(i)`` strictly between empty and all
    dominants: ``max_{s not in S(i)} min_{s' in S(i)} Δ(s, s')``.  Other nodes
    get a marker; the network index is ``None`` when no node qualifies.
    """
    D = space.dominant
    if delta is None:
        delta = delta_matrix(space)
    act = space.states[D] != 0
    per_node: list = []
    for i in range(space.num_nodes):
        on = np.flatnonzero(act[:, i])
        off = np.flatnonzero(~act[:, i])
        if len(on) == 0:
            per_node.append(PERMANENT_STARVER)
        elif len(off) == 0:
            per_node.append(NEVER_STARVES)
        else:
            v = max(min(delta[s, t] for t in on) for s in off)
            per_node.append(int(v) if isinstance(v, np.integer) else v)
    defined = [v for v in per_node if not isinstance(v, str)]
    return per_node, (max(defined) if defined else None)


def gamma(space: StateSpace, delta: np.ndarray | None = None):
    """Worst communication height between two dominant states; ``None`` with a single dominant."""
    if len(space.dominant) < 2:
        return None
    if delta is None:
        delta = delta_matrix(space)
    v = max(delta.ravel().tolist())
    return int(v) if isinstance(v, (int, np.integer)) else v


# ---------------------------------------------------------------------------
# hitting times


def _condition_estimate(M: sp.spmatrix) -> float:
    if M.shape[0] <= _DENSE_LIMIT:
        return float(np.linalg.cond(M.toarray(), 1))
    try:
        lu = spla.splu(M.tocsc())
        inv = spla.LinearOperator(M.shape, matvec=lu.solve, rmatvec=lambda v: lu.solve(v, trans="T"))
        return float(spla.norm(M, 1) * spla.onenormest(inv))
    except RuntimeError:
        return math.inf


def _solve(M: sp.csc_matrix, b: np.ndarray) -> np.ndarray:
    """Direct sparse solve with iterative refinement and a backward-error check."""
    try:
        lu = spla.splu(M)
    except RuntimeError as exc:
        raise SolverError(f"singular system: {exc}", _condition_estimate(M)) from None
    x = lu.solve(b)
    normM = spla.norm(M, np.inf)
    for _ in range(4):
        r = b - M @ x
        err = np.abs(r).max() / (normM * np.abs(x).max() + np.abs(b).max())
        if err <= SOLVE_TOL:
            break
        x = x + lu.solve(r)
    else:
        if not np.all(np.isfinite(x)) or err > SOLVE_TOL:
            raise SolverError(f"solve residual {err:.2e} above {SOLVE_TOL:g}", _condition_estimate(M))
    if not np.all(np.isfinite(x)):
        raise SolverError("non-finite solution", _condition_estimate(M))
    return x


def hitting_times(space: StateSpace, nu: float | None, target: Iterable) -> np.ndarray:
    """Expected continuous-time hitting time of ``target`` from every state.

    Solves ``(I - P) h = 1`` on the non-target states of the uniformized
    chain and rescales by the uniformization rate.
    """
    nu = space.network.rate_model.nu if nu is None else nu
    tgt = np.array(sorted(set(space.ordinals(target))), dtype=np.int64)
    if len(tgt) == 0:
        raise ValueError("target set is empty")
    n = len(space)
    free = np.setdiff1d(np.arange(n), tgt)
    h = np.zeros(n)
    if len(free) == 0:
        return h
    # I - P = -Q / q_max; forming it from Q avoids cancellation in 1 - P(x, x)
    qmax = uniformization_rate(space, nu)
    Q = generator_matrix(space, nu)
    M = (-Q[free][:, free] / qmax).tocsc()
    steps = _solve(M, np.ones(len(free)))
    h[free] = steps / qmax
    return h


def exact_hitting_time(space: StateSpace, nu: float | None, start, target: Iterable) -> float:
    """Expected time for the activity process started in ``start`` to enter ``target``."""
    (k,) = space.ordinals([start])
    tgt = space.ordinals(target)
    if k in tgt:
        raise ValueError("start state lies in the target set")
    return float(hitting_times(space, nu, tgt)[k])


@dataclass
class ExponentFit:
    """Least-squares fit of ``ln value`` against ``ln nu``."""

    slope: float
    intercept: float
    nu: list[float]
    values: list[float]

    @property
    def log_nu_values(self) -> list[float]:
        return [math.log(v) / math.log(x) for x, v in zip(self.nu, self.values)]

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.nu, self.values, self.log_nu_values))


def fit_exponent(nu_grid: Sequence[float], values: Sequence[float]) -> ExponentFit:
    x = np.log(np.asarray(nu_grid, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    return ExponentFit(float(slope), float(intercept), [float(v) for v in nu_grid],
                       [float(v) for v in values])


def _check_grid(nu_grid: Sequence[float]):
    g = list(nu_grid)
    if len(g) < 3:
        raise ValueError("nu grid needs at least three points")
    if any(v <= 1 for v in g) or any(b <= a for a, b in zip(g, g[1:])):
        raise ValueError("nu grid must be strictly ascending with all points > 1")
    return g


def hitting_exponent(space: StateSpace, start, target: Iterable,
                     nu_grid: Sequence[float] = DEFAULT_NU_GRID) -> ExponentFit:
    """Slope of ``ln E[tau]`` versus ``ln nu`` over ``nu_grid`` (exact solves)."""
    grid = _check_grid(nu_grid)
    tgt = space.ordinals(target)
    vals = [exact_hitting_time(space, nu, start, tgt) for nu in grid]
    return fit_exponent(grid, vals)


# ---------------------------------------------------------------------------
# electrical network


def _conductances(space: StateSpace, nu: float) -> tuple[np.ndarray, np.ndarray]:
    pi = stationary_distribution(space, nu)
    p = space.edge_rates(nu) / uniformization_rate(space, nu)
    return pi, pi[space.edge_src] * p


def resistances(space: StateSpace, nu: float | None, x, A: Iterable) -> tuple[float, float]:
    """Effective resistance ``R(x <-> A)`` and critical resistance ``Psi(x, A)``.

    Edge ``(y, z)`` has resistance ``1 / (pi(y) P(y, z))`` in the uniformized
    chain.  ``R`` comes from the escape probability
    ``P_x(T_A < T_x^+) = 1 / (pi(x) R)``; ``Psi`` is the min over paths of the
    largest edge resistance crossed.
    """
    nu = space.network.rate_model.nu if nu is None else nu
    (k,) = space.ordinals([x])
    tgt = set(space.ordinals(A))
    if not tgt:
        raise ValueError("target set is empty")
    if k in tgt:
        raise ValueError("x lies in the target set")
    n = len(space)
    pi, cond = _conductances(space, nu)
    C = sp.csr_matrix((cond, (space.edge_src, space.edge_dst)), shape=(n, n))

    # g(y) = P_y(T_A < T_x): g(x) = 0, g(A) = 1, harmonic elsewhere
    fixed = np.zeros(n, dtype=bool)
    fixed[k] = True
    tgt_arr = np.array(sorted(tgt))
    fixed[tgt_arr] = True
    free = np.flatnonzero(~fixed)
    g = np.zeros(n)
    g[tgt_arr] = 1.0
    if len(free):
        Cf = C[free]
        deg = np.asarray(Cf.sum(axis=1)).ravel()
        L = (sp.diags(deg) - Cf[:, free]).tocsc()
        rhs = np.asarray(Cf[:, tgt_arr].sum(axis=1)).ravel()
        g[free] = _solve(L, rhs)
    row = C[k]
    current = float(row.data @ g[row.indices])
    if current <= 0:
        raise SolverError("zero escape current")
    effective = 1.0 / current

    # bottleneck path on resistances: add edges in increasing resistance until x meets A
    r = 1.0 / cond
    order = np.argsort(r, kind="stable")
    parent = list(range(n))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    critical = math.inf
    for e in order:
        a, b = find(int(space.edge_src[e])), find(int(space.edge_dst[e]))
        if a != b:
            parent[a] = b
            root = find(k)
            if any(find(t) == root for t in tgt):
                critical = float(r[e])
                break
    return effective, critical


# ---------------------------------------------------------------------------
# mixing


def conductance(space: StateSpace, nu: float | None, S: Iterable) -> tuple[float, float, float]:
    """``(Q(S, S^c), pi(S), Phi(S))`` for the continuous-time chain."""
    nu = space.network.rate_model.nu if nu is None else nu
    inS = np.zeros(len(space), dtype=bool)
    inS[space.ordinals(S)] = True
    pi = stationary_distribution(space, nu)
    rates = space.edge_rates(nu)
    cross = inS[space.edge_src] & ~inS[space.edge_dst]
    flow = float((pi[space.edge_src[cross]] * rates[cross]).sum())
    mass = float(pi[inS].sum())
    return flow, mass, flow / mass


def spectral_gap(space: StateSpace, nu: float | None = None) -> float | None:
    """Smallest nonzero eigenvalue of ``-Q`` (real by reversibility).

    Uses the symmetrized generator ``D^{1/2} Q D^{-1/2}``.  Returns ``None``
    for spaces too large for a dense eigensolve.
    """
    n = len(space)
    if n < 2:
        return None
    if n > _DENSE_LIMIT:
        return None
    nu = space.network.rate_model.nu if nu is None else nu
    pi = stationary_distribution(space, nu)
    Q = generator_matrix(space, nu).toarray()
    d = np.sqrt(pi)
    sym = (d[:, None] * Q) / d[None, :]
    sym = 0.5 * (sym + sym.T)
    ev = np.sort(-scipy.linalg.eigvalsh(sym))
    return float(ev[1])


@dataclass
class MixingReport:
    """Bottleneck-set conductance bound on the mixing time."""

    gamma: object
    pair: tuple[tuple[int, ...], tuple[int, ...]]
    bottleneck: list[tuple[int, ...]]
    swapped: bool
    boundary_levels: list
    boundary_ok: bool
    epsilon: float
    rows: list[dict] = field(default_factory=list)
    conductance_fit: ExponentFit | None = None
    bound_fit: ExponentFit | None = None
    relaxation_fit: ExponentFit | None = None

    @property
    def conductance_exponent(self) -> float:
        return self.conductance_fit.slope

    @property
    def bound_exponent(self) -> float:
        return self.bound_fit.slope

    def to_dict(self) -> dict:
        return {
            "gamma": _json_num(self.gamma),
            "pair": [list(self.pair[0]), list(self.pair[1])],
            "bottleneck_set": [list(x) for x in self.bottleneck],
            "swapped_to_complement": self.swapped,
            "boundary_levels": sorted({_json_num(v) for v in self.boundary_levels}),
            "boundary_ok": self.boundary_ok,
            "epsilon": self.epsilon,
            "rows": self.rows,
            "conductance_exponent": self.conductance_fit.slope,
            "bound_exponent": self.bound_fit.slope,
            "relaxation_exponent": None if self.relaxation_fit is None else self.relaxation_fit.slope,
        }


def mixing_bound(space: StateSpace, nu_grid: Sequence[float] = DEFAULT_NU_GRID,
                 epsilon: float = 0.25) -> MixingReport | None:
    """Conductance lower bound ``(1/2 - eps) / Phi(S)`` on the mixing time.

    ``S`` collects the states reachable from a dominant state ``s`` without
    exceeding height ``Gamma - 1``, where ``(s, s')`` attains the worst
    dominant-to-dominant height.  Returns ``None`` with a single dominant.
    """
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    grid = _check_grid(nu_grid)
    D = space.dominant
    if len(D) < 2:
        return None
    delta = delta_matrix(space)
    G = gamma(space, delta)
    a, b = map(int, np.argwhere(delta == G)[0])
    s, s2 = int(D[a]), int(D[b])
    h = heights_from(space, s)
    inS = np.array([v < G for v in h.tolist()])

    levels = space.levels
    exits = inS[space.edge_src] & ~inS[space.edge_dst]
    boundary = sorted(set(space.edge_src[exits].tolist()))
    blevels = [levels[k] for k in boundary]
    want = space.A_C - G + 1
    boundary_ok = bool(boundary) and all(v == want for v in blevels)

    swapped = False
    if stationary_distribution(space, grid[-1])[inS].sum() > 0.5:
        inS = ~inS
        swapped = True
    S = np.flatnonzero(inS)

    rows = []
    phis, bounds, relax = [], [], []
    for nu in grid:
        flow, mass, phi = conductance(space, nu, S)
        bound = (0.5 - epsilon) / phi
        gap = spectral_gap(space, nu)
        rows.append({"nu": nu, "flow": flow, "pi_S": mass, "conductance": phi,
                     "bound": bound, "spectral_gap": gap,
                     "relaxation_time": None if gap is None else 1.0 / gap})
        phis.append(phi)
        bounds.append(bound)
        if gap is not None:
            relax.append(1.0 / gap)
    return MixingReport(
        gamma=G,
        pair=(space.state(s), space.state(s2)),
        bottleneck=[space.state(k) for k in S],
        swapped=swapped,
        boundary_levels=blevels,
        boundary_ok=boundary_ok,
        epsilon=epsilon,
        rows=rows,
        conductance_fit=fit_exponent(grid, phis),
        bound_fit=fit_exponent(grid, bounds),
        relaxation_fit=fit_exponent(grid, relax) if len(relax) == len(grid) else None,
    )


# ---------------------------------------------------------------------------
# full report


def _json_num(v):
    if v is None:
        return UNDEFINED
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


@dataclass
class AnalysisReport:
    A_C: object
    num_states: int
    dominants: list[tuple[int, ...]]
    theta: Fraction | None
    theta_per_node: list[Fraction] | None
    jain: Fraction | None
    delta_matrix: list[list]
    upsilon_per_node: list
    upsilon: object
    gamma: object
    conductance_exponent: float | None = None
    hitting: list[dict] | None = None

    @property
    def dominant_count(self) -> int:
        return len(self.dominants)

    def to_dict(self) -> dict:
        return {
            "A_C": _json_num(self.A_C),
            "num_states": self.num_states,
            "dominant_count": self.dominant_count,
            "dominants": [list(x) for x in self.dominants],
            "theta": _json_num(self.theta),
            "theta_float": None if self.theta is None else float(self.theta),
            "theta_per_node": (UNDEFINED if self.theta_per_node is None
                               else [_json_num(t) for t in self.theta_per_node]),
            "jain": _json_num(self.jain),
            "jain_float": None if self.jain is None else float(self.jain),
            "delta_matrix": [[_json_num(v) for v in row] for row in self.delta_matrix],
            "upsilon_per_node": [_json_num(v) for v in self.upsilon_per_node],
            "upsilon": _json_num(self.upsilon),
            "gamma": _json_num(self.gamma),
            "conductance_exponent": (UNDEFINED if self.conductance_exponent is None
                                     else self.conductance_exponent),
            "hitting": self.hitting,
        }


def analyze(space: StateSpace, nu_grid: Sequence[float] | None = None,
            mixing: bool = False) -> AnalysisReport:
    """All asymptotic indices of ``space``.

    With ``mixing=True`` the conductance exponent of the bottleneck set is
    fitted over ``nu_grid``.
    """
    delta = delta_matrix(space)
    per_node, ups = starvation_indices(space, delta)
    gam = gamma(space, delta)
    if space.heterogeneous:
        theta = theta_i = jain = None
    else:
        theta = aggregate_throughput(space)
        theta_i = asymptotic_node_throughput(space)
        jain = jain_index(space)
    cexp = None
    if mixing and gam is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            rep = mixing_bound(space, nu_grid or DEFAULT_NU_GRID)
        cexp = rep.conductance_exponent
    return AnalysisReport(
        A_C=space.A_C,
        num_states=len(space),
        dominants=space.dominant_states(),
        theta=theta,
        theta_per_node=theta_i,
        jain=jain,
        delta_matrix=delta.tolist(),
        upsilon_per_node=per_node,
        upsilon=ups,
        gamma=gam,
        conductance_exponent=cexp,
    )
