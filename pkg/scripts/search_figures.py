"""Search small conflict graphs for the values quoted for the pictured example networks.

Usage: python scripts/search_figures.py [max_nodes]
Needs networkx (graph atlas, up to 7 nodes).
"""
import sys
from fractions import Fraction

import networkx as nx
import numpy as np

from mcsma.analysis import delta_matrix, jain_index, starvation_indices
from mcsma.conflict_graph import MultiChannelNetwork
from mcsma.state_space import enumerate_states

TABLE_1 = [[0, 2, 2, 2], [2, 0, 1, 1], [2, 1, 0, 1], [2, 1, 1, 0]]
TABLE_2 = [[0, 1, 3, 3], [1, 0, 3, 3], [3, 3, 0, 1], [3, 3, 1, 0]]


def same_up_to_relabel(m, ref):
    from itertools import permutations
    m = np.asarray(m)
    ref = np.asarray(ref)
    if m.shape != ref.shape:
        return False
    n = len(ref)
    return any((m[np.ix_(p, p)] == ref).all() for p in permutations(range(n)))


def spaces(g, cmax=2):
    n = g.number_of_nodes()
    edges = [tuple(sorted(e)) for e in g.edges()]
    return edges, [enumerate_states(MultiChannelNetwork.single_graph(n, edges, c)) for c in range(1, cmax + 1)]


def main(max_nodes=7):
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if n < 2 or n > max_nodes or not nx.is_connected(g):
            continue
        edges, (s1, s2) = spaces(g)
        d1, d2 = len(s1.dominant), len(s2.dominant)
        if d1 == 3 and d2 == 2 and jain_index(s1) == Fraction(9, 13) and jain_index(s2) == Fraction(2, 3):
            print("fairness_drop", n, edges)
        if d1 == 4 and d2 == 4:
            if same_up_to_relabel(delta_matrix(s1), TABLE_1) and same_up_to_relabel(delta_matrix(s2), TABLE_2):
                print("mixing_gap", n, edges, starvation_indices(s2))
        if d1 == 1 and d2 == 2:
            s = s1.states[s1.dominant[0]] != 0
            if any(not np.all((s2.states[k] != 0) >= s) for k in s2.dominant):
                print("nested_dominant", n, edges)


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 7)
