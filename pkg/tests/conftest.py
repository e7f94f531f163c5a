"""Naive reference implementations used as oracles by the tests.

Everything here is deliberately slow and obvious: itertools enumeration,
Dijkstra-free bottleneck search by fixed-point iteration, value iteration.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from mcsma.conflict_graph import MultiChannelNetwork

GRAPHS = {
    "K2": (2, [(0, 1)]),
    "K3": (3, [(0, 1), (0, 2), (1, 2)]),
    "P3": (3, [(0, 1), (1, 2)]),
    "C4": (4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
    "C6": (6, [(i, (i + 1) % 6) for i in range(6)]),
    "star3": (4, [(0, 1), (0, 2), (0, 3)]),
    "grid2x3": (6, [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)]),
}


def net(name: str, C: int = 1, nu: float = 100.0) -> MultiChannelNetwork:
    n, edges = GRAPHS[name]
    return MultiChannelNetwork.single_graph(n, edges, C, nu=nu, name=name)


def naive_states(n, edge_sets):
    """All feasible vectors, brute force over (C+1)^n."""
    C = len(edge_sets)
    out = []
    for x in itertools.product(range(C + 1), repeat=n):
        if all(not (x[i] == c + 1 and x[j] == c + 1) for c, es in enumerate(edge_sets) for i, j in es):
            out.append(x)
    return out


def naive_alpha(n, edges):
    best = 0
    for r in range(n + 1):
        for s in itertools.combinations(range(n), r):
            ss = set(s)
            if all(not (i in ss and j in ss) for i, j in edges):
                best = r
    return best


def naive_chi(n, edges):
    for k in range(1, n + 1):
        for col in itertools.product(range(k), repeat=n):
            if all(col[i] != col[j] for i, j in edges):
                return k
    return n


def naive_bottleneck_heights(states, A):
    """Delta(x, y) for all pairs by relaxation of the minimax path problem."""
    idx = {x: k for k, x in enumerate(states)}
    n = len(states)
    act = [sum(1 for v in x if v) for x in states]
    nbrs = [[] for _ in range(n)]
    for k, x in enumerate(states):
        for i, v in enumerate(x):
            if v:
                y = list(x)
                y[i] = 0
                j = idx[tuple(y)]
                nbrs[k].append(j)
                nbrs[j].append(k)
    INF = 10**9
    out = np.zeros((n, n), dtype=int)
    for s in range(n):
        best = [INF] * n
        best[s] = A - act[s]
        changed = True
        while changed:
            changed = False
            for u in range(n):
                if best[u] == INF:
                    continue
                for w in nbrs[u]:
                    cand = max(best[u], A - act[w])
                    if cand < best[w]:
                        best[w] = cand
                        changed = True
        out[s] = best
    np.fill_diagonal(out, 0)
    return out


def value_iteration_hitting(Q: np.ndarray, start: int, target: set[int], iters: int = 200000, tol=1e-13):
    """Mean hitting time via the embedded jump chain, iterated to a fixed point."""
    n = len(Q)
    out = -np.diag(Q)
    h = np.zeros(n)
    for _ in range(iters):
        new = np.zeros(n)
        for k in range(n):
            if k in target:
                continue
            new[k] = 1.0 / out[k] + sum(Q[k, j] / out[k] * h[j] for j in range(n) if j != k and Q[k, j] > 0)
        if np.max(np.abs(new - h)) <= tol * max(1.0, np.max(np.abs(new))):
            return new[start]
        h = new
    return h[start]


def fraction_jain(theta):
    s = sum(theta)
    return Fraction(s * s) / (len(theta) * sum(t * t for t in theta))


@pytest.fixture
def c4():
    return net("C4")
