"""Write the shipped corpus with expected values from naive brute force.

The oracle below enumerates subsets / colourings directly and shares no code
with the package, so the frozen numbers are independent checks.
"""
import itertools
import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "mcsma" / "corpus"


def grid(r, c):
    idx = lambda i, j: i * c + j
    e = []
    for i in range(r):
        for j in range(c):
            if j + 1 < c:
                e.append((idx(i, j), idx(i, j + 1)))
            if i + 1 < r:
                e.append((idx(i, j), idx(i + 1, j)))
    return r * c, e


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return 10, outer + spokes + inner


GRAPHS = {
    "K2": (2, [(0, 1)]),
    "K3": (3, list(itertools.combinations(range(3), 2))),
    "K4": (4, list(itertools.combinations(range(4), 2))),
    "P3": (3, [(0, 1), (1, 2)]),
    "P5": (5, [(i, i + 1) for i in range(4)]),
    "C4": (4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
    "C6": (6, [(i, (i + 1) % 6) for i in range(6)]),
    "star3": (4, [(0, 1), (0, 2), (0, 3)]),
    "grid2x3": grid(2, 3),
    "grid2x4": grid(2, 4),
    "petersen": petersen(),
}


def feasible(x, edges):
    return all(not (x[i] and x[i] == x[j]) for i, j in edges)


def brute(n, edges, C):
    states = [x for x in itertools.product(range(C + 1), repeat=n) if feasible(x, edges)]
    act = [sum(1 for v in x if v) for x in states]
    return len(states), max(act)


def invariants(n, edges):
    ind = [s for s in itertools.product((0, 1), repeat=n) if feasible(s, edges)]
    alpha = max(sum(s) for s in ind)
    mis = [s for s in ind if sum(s) == alpha]
    chi = next(k for k in range(1, n + 1)
               if any(feasible(x, edges) for x in itertools.product(range(1, k + 1), repeat=n)))
    best = 0
    for r in range(1, len(mis) + 1):
        for combo in itertools.combinations(mis, r):
            if all(sum(col) <= 1 for col in zip(*combo)):
                best = r
                break
        else:
            break
    return alpha, chi, best


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (n, edges) in GRAPHS.items():
        alpha, chi, cstar = invariants(n, edges)
        by_c = {}
        for C in range(1, chi + 2):
            if (C + 1) ** n > 2_000_000:
                break
            count, A = brute(n, edges, C)
            by_c[str(C)] = {"num_states": count, "A": A}
        doc = {
            "name": name,
            "num_nodes": n,
            "num_channels": 1,
            "edges": {"shared": [list(e) for e in edges]},
            "rates": {"kind": "homogeneous", "nu": 100.0},
            "expected": {"alpha": alpha, "chi": chi, "c_star": cstar, "by_channels": by_c},
        }
        if name == "C4":
            # hand derivation: every path between the two dominant states passes the empty state
            by_c["1"].update({"delta_matrix": [[0, 2], [2, 0]], "gamma": 2, "upsilon": 2, "jain": "1"})
        if name == "K3":
            by_c["1"].update({"gamma": 1, "upsilon": 1, "jain": "1"})
        if name == "P3":
            by_c["1"].update({"upsilon": "undefined", "gamma": "undefined", "jain": "2/3"})
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print(name, alpha, chi, cstar, by_c)


if __name__ == "__main__":
    main()
