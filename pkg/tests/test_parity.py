import random

import pytest
from hypothesis import given, settings, strategies as st

from toastflow.errors import DomainError, InfeasibleInputError
from toastflow.graph import Graph, canonical
from toastflow.parity import (
    ParityTree,
    cycle_decompose,
    cycle_edges,
    find_cycle_through,
    odd_parity_subgraph,
)

from conftest import cycle_graph, path_graph, random_blob
from parity_oracle import even_subsets, odd_vertices, solvable_sets


def test_empty_p_gives_empty_subgraph():
    g = Graph.torus(4, 4)
    assert odd_parity_subgraph(g, g.vertices, set()) == frozenset()


def test_path_endpoints():
    g = path_graph(3)
    assert odd_parity_subgraph(g, {0, 1, 2}, {0, 2}) == {(0, 1), (1, 2)}


def test_odd_p_is_infeasible():
    with pytest.raises(InfeasibleInputError):
        odd_parity_subgraph(path_graph(3), {0, 1, 2}, {0})


def test_disconnected_s_is_infeasible():
    with pytest.raises(InfeasibleInputError):
        odd_parity_subgraph(path_graph(4), {0, 1, 3}, {0, 3})


def test_p_outside_s():
    with pytest.raises(DomainError):
        odd_parity_subgraph(path_graph(4), {0, 1}, {0, 3})


def _random_connected(rng, n, extra):
    edges = {canonical(i, rng.randrange(i)) for i in range(1, n)}
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in edges]
    rng.shuffle(pairs)
    edges.update(pairs[:extra])
    return Graph(range(n), sorted(edges))


@pytest.mark.parametrize("seed", range(12))
def test_random_eight_vertex_graphs(seed):
    rng = random.Random(seed)
    g = _random_connected(rng, 8, rng.randint(0, 3))
    solvable = solvable_sets(g.vertices, g.edges)
    for P in even_subsets(g.vertices):
        H = odd_parity_subgraph(g, g.vertices, P)
        assert H <= g.edge_set
        assert odd_vertices(H) == P
        assert P in solvable


def test_parity_tree_reuse_inside_subset():
    g = Graph.torus(6, 6)
    rng = random.Random(1)
    S = random_blob(g, 20, rng)
    tree = ParityTree(g, S)
    for _ in range(20):
        P = rng.sample(sorted(S), 2 * rng.randint(0, 5))
        H = tree.subgraph(P)
        assert all(u in S and v in S for u, v in H)
        assert odd_vertices(H) == frozenset(P)


# -- cycle decomposition ------------------------------------------------------------

def _check_decomposition(g, E, cycles):
    used = []
    for c in cycles:
        assert c[0] == c[-1]
        inner = c[:-1]
        assert len(set(inner)) == len(inner) >= 3
        used.extend(canonical(a, b) for a, b in cycle_edges(c))
    assert len(used) == len(set(used))
    assert set(used) == {canonical(*e) for e in E}


def test_decompose_examples():
    assert cycle_decompose(cycle_graph(4), []) == []
    (c,) = cycle_decompose(cycle_graph(4), cycle_graph(4).edges)
    assert len(c) == 5
    bowtie = Graph(range(5), [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    cycles = cycle_decompose(bowtie, bowtie.edges)
    assert len(cycles) == 2 and all(len(c) == 4 for c in cycles)
    _check_decomposition(bowtie, bowtie.edges, cycles)


def test_decompose_odd_degree_names_vertex():
    with pytest.raises(InfeasibleInputError, match="vertex 0"):
        cycle_decompose(path_graph(3), [(0, 1)])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 8))
def test_decompose_random_even_sets(seed, k):
    rng = random.Random(seed)
    g = Graph.torus(7, 6)
    E = set()
    for _ in range(k):
        x0, y0 = rng.randrange(7), rng.randrange(6)
        a, b = rng.randint(1, 5), rng.randint(1, 4)
        pts = [(x0 + i, y0) for i in range(a)] + [(x0 + a, y0 + j) for j in range(b)]
        pts += [(x0 + a - i, y0 + b) for i in range(a)] + [(x0, y0 + b - j) for j in range(b)]
        loop = [g.vertex_at(x, y) for x, y in pts]
        E ^= {canonical(p, q) for p, q in zip(loop, loop[1:] + loop[:1])}
    _check_decomposition(g, E, cycle_decompose(g, E))


# -- cycle through an edge -------------------------------------------------------------

def test_cycle_through_triangle():
    g = cycle_graph(3)
    c = find_cycle_through(g, (0, 1), g.edge_set)
    assert c[:2] == (0, 1) and c[-1] == 0 and len(c) == 4


def test_bridge_has_no_cycle():
    g = Graph(range(4), [(0, 1), (1, 2), (0, 2), (2, 3)])
    assert find_cycle_through(g, (2, 3), g.edge_set) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_cycle_through_random_subsets(seed):
    rng = random.Random(seed)
    g = Graph.torus(8, 8)
    allowed = {e for e in g.edges if rng.random() < 0.6}
    e = rng.choice(sorted(allowed))
    c = find_cycle_through(g, e, allowed)
    # oracle: e lies on a cycle iff its endpoints stay connected without it
    rest = Graph(g.vertices, allowed - {e})
    assert (c is not None) == any(e[0] in comp and e[1] in comp for comp in rest.components())
    if c is not None:
        assert c[:2] == e and c[0] == c[-1]
        assert len(set(c[:-1])) == len(c) - 1
        assert all(canonical(a, b) in allowed for a, b in cycle_edges(c))
