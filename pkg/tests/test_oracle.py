import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from toastflow import io
from toastflow.errors import DomainError, RefusalError
from toastflow.graph import Flow, FlowProblem, Graph, verify_f_flow
from toastflow.oracle import (
    enumerate_integral_flows,
    feasible_integral_flow,
    lex_least_integral_flow,
    random_instance,
    tree_routing,
)
from toastflow.rounding import round_flow

from conftest import cycle_graph, path_graph

EDGE = Graph([0, 1], [(0, 1)])


def lex_key(flow):
    return tuple(flow[e] for e in flow.graph.edges)


def test_single_edge():
    flow = feasible_integral_flow(FlowProblem(EDGE, {0: 1, 1: -1}, {(0, 1): 1}))
    assert flow[0, 1] == 1
    assert feasible_integral_flow(FlowProblem(EDGE, {0: 2, 1: -2}, {(0, 1): 1})) is None
    assert lex_least_integral_flow(FlowProblem(EDGE, {0: 1, 1: -1}, {(0, 1): 1}))[0, 1] == 1


def test_square_lex_least():
    # edges (0,1), (0,3), (1,2), (2,3): the circulation 0 -> 3 -> 2 -> 1 -> 0
    # puts -1 on the first edge, which beats the zero flow in integer order
    g = cycle_graph(4)
    problem = FlowProblem(g, {}, {e: 1 for e in g.edges})
    assert lex_key(lex_least_integral_flow(problem)) == (-1, 1, -1, -1)
    assert lex_least_integral_flow(problem) == enumerate_integral_flows(problem, 1)[0]


def test_enumeration_examples():
    tri = cycle_graph(3)
    assert len(enumerate_integral_flows(FlowProblem(tri, {}), 1)) == 3
    assert len(enumerate_integral_flows(FlowProblem(EDGE, {0: 1, 1: -1}), 1)) == 1
    assert len(enumerate_integral_flows(FlowProblem(EDGE, {0: 1, 1: -1}), 5)) == 1
    flows = enumerate_integral_flows(FlowProblem(path_graph(3), {0: 1, 2: -1}), 1)
    assert [lex_key(f) for f in flows] == [(1, 1)]


def test_enumeration_is_sorted_and_complete():
    g = Graph(range(4), [(0, 1), (1, 2), (0, 2), (2, 3), (0, 3)])
    problem = FlowProblem(g, {0: 1, 3: -1})
    flows = enumerate_integral_flows(problem, 2)
    keys = [lex_key(f) for f in flows]
    assert keys == sorted(keys)
    brute = []
    for vals in itertools.product(range(-2, 3), repeat=len(g.edges)):
        f = Flow(g, dict(zip(g.edges, vals)))
        if verify_f_flow(f, problem).ok:
            brute.append(vals)
    assert keys == brute


def test_enumeration_guard():
    g = Graph.torus(3, 3)  # 18 edges
    with pytest.raises(RefusalError):
        enumerate_integral_flows(FlowProblem(g, {}), 1)


def test_oracles_need_capacity():
    with pytest.raises(DomainError):
        feasible_integral_flow(FlowProblem(EDGE, {}))


def _random_graph(rng, n, m):
    edges = {(min(i, j), max(i, j)) for i in range(1, n) for j in [rng.randrange(i)]}
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in edges]
    rng.shuffle(pairs)
    edges |= set(pairs[: max(0, m - len(edges))])
    return Graph(range(n), sorted(edges))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 2))
def test_random_six_edge_graphs(seed, cap):
    rng = random.Random(seed)
    g = _random_graph(rng, rng.randint(3, 6), 6)
    demand = {v: rng.randint(-2, 2) for v in g.vertices}
    demand[0] -= sum(demand.values())
    problem = FlowProblem(g, demand, {e: cap for e in g.edges})
    flows = enumerate_integral_flows(problem, cap)
    feasible = feasible_integral_flow(problem)
    assert (feasible is None) == (not flows)
    lex = lex_least_integral_flow(problem)
    if flows:
        assert verify_f_flow(feasible, problem).ok
        assert lex == flows[0]
    else:
        assert lex is None


def test_tree_routing_is_an_f_flow():
    rng = random.Random(0)
    g = Graph.torus(7, 5)
    from toastflow.oracle import random_demand

    demand = random_demand(g, rng)
    problem = FlowProblem(g, demand)
    assert verify_f_flow(tree_routing(g, demand), problem).ok


def test_bundle_without_circuits():
    b = random_instance(16, 16, base=8, factor=2, seed=5)
    assert b.phi == b.witness and b.check() == []
    psi, _ = round_flow(b.problem, b.toast, b.phi)
    assert psi.sup_distance(b.phi) < 3


def test_bundle_invariants():
    b = random_instance(16, 16, base=8, factor=2, circuit_count=20, denominators=(3, 5, 7), seed=13)
    assert b.check() == []
    assert len(b.circuits) == 20


def test_bundle_determinism():
    a = random_instance(16, 16, base=8, factor=2, circuit_count=20, seed=21)
    b = random_instance(16, 16, base=8, factor=2, circuit_count=20, seed=21)
    for conv in (io.flow_to_json,):
        assert io.dumps(conv(a.phi)) == io.dumps(conv(b.phi))
    assert io.dumps(io.toast_to_json(a.toast)) == io.dumps(io.toast_to_json(b.toast))
    assert a.problem.demand == b.problem.demand
    c = random_instance(16, 16, base=8, factor=2, circuit_count=20, seed=22)
    assert c.phi != a.phi
