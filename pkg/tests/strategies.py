"""Shared random-graph generators for the test suite."""

from hypothesis import strategies as st

from interference_dags import Dag


def random_dag(rng, n_nodes, p=0.4):
    """Erdos-Renyi DAG on ``V0..V{n-1}`` oriented along a random permutation."""
    names = [f"V{k}" for k in range(n_nodes)]
    order = rng.permutation(n_nodes)
    edges = [
        (names[order[i]], names[order[j]])
        for i in range(n_nodes)
        for j in range(i + 1, n_nodes)
        if rng.random() < p
    ]
    return Dag(names, edges)


@st.composite
def dags(draw, max_nodes=7):
    n = draw(st.integers(1, max_nodes))
    names = [f"V{k}" for k in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    perm = draw(st.permutations(range(n)))
    edges = [(names[perm[i]], names[perm[j]]) for (i, j), keep in zip(pairs, mask) if keep]
    return Dag(names, edges)
