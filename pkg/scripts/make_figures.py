"""Write candidate reconstructions of the pictured networks to corpus_figures/.

Topologies were found with search_figures.py (graph atlas) and a random
search over 8-10 node graphs. The expected values are recomputed on every write.
"""
import json
from fractions import Fraction
from pathlib import Path

from mcsma.analysis import delta_matrix, gamma, jain_index, starvation_indices
from mcsma.conflict_graph import MultiChannelNetwork
from mcsma.state_space import enumerate_states

OUT = Path(__file__).resolve().parents[1] / "src" / "mcsma" / "corpus_figures"

CANDIDATES = {
    "fairness_drop": (9, [(0, 1), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8), (1, 5), (1, 6), (1, 7), (1, 8),
                    (2, 3), (2, 5), (2, 7), (3, 4), (3, 5), (3, 6), (3, 8), (4, 6), (4, 8), (5, 6),
                    (6, 7), (7, 8)]),
    "mixing_gap": (7, [(0, 5), (0, 6), (1, 3), (1, 4), (1, 5), (1, 6), (2, 3), (2, 4), (5, 6)]),
    "nested_dominant": (9, [(0, 2), (1, 2), (1, 3), (1, 4), (1, 8), (2, 3), (2, 7), (3, 6), (4, 7),
                      (4, 8), (5, 8)]),
}


def fmt(v):
    if v is None:
        return "undefined"
    return str(v) if isinstance(v, Fraction) else v


def main():
    OUT.mkdir(exist_ok=True)
    for name, (n, edges) in CANDIDATES.items():
        by_c = {}
        for C in (1, 2):
            space = enumerate_states(MultiChannelNetwork.single_graph(n, edges, C))
            d = delta_matrix(space)
            _, ups = starvation_indices(space, d)
            by_c[str(C)] = {
                "num_states": len(space),
                "A": int(space.A_C),
                "dominant_count": len(space.dominant),
                "delta_matrix": d.tolist(),
                "gamma": fmt(gamma(space, d)),
                "upsilon": fmt(ups),
                "jain": fmt(jain_index(space)),
            }
        doc = {
            "name": name,
            "num_nodes": n,
            "num_channels": 1,
            "edges": {"shared": [list(e) for e in edges]},
            "rates": {"kind": "homogeneous", "nu": 100.0},
            "expected": {"by_channels": by_c},
        }
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print(name, json.dumps(by_c))


if __name__ == "__main__":
    main()
