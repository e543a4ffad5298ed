"""Brute-force and max-flow ground truth, plus seeded test instances."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DomainError, RefusalError
from .graph import Edge, Flow, FlowProblem, Graph, verify_f_flow
from .parity import cycle_edges
from .toast import Toast, generate_torus_toast

MAX_ENUMERATION_EDGES = 12


class _MaxFlow:
    """Edmonds-Karp on an adjacency-list residual network."""

    def __init__(self, n: int):
        self.head: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_arc(self, u: int, v: int, c: int) -> int:
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)
        return len(self.to) - 2

    def run(self, s: int, t: int) -> int:
        total = 0
        to, cap, head = self.to, self.cap, self.head
        while True:
            via = [-1] * len(head)
            via[s] = -2
            queue = deque([s])
            while queue and via[t] == -1:
                x = queue.popleft()
                for a in head[x]:
                    y = to[a]
                    if cap[a] > 0 and via[y] == -1:
                        via[y] = a
                        queue.append(y)
            if via[t] == -1:
                return total
            push = None
            y = t
            while y != s:
                a = via[y]
                push = cap[a] if push is None else min(push, cap[a])
                y = to[a ^ 1]
            y = t
            while y != s:
                a = via[y]
                cap[a] -= push
                cap[a ^ 1] += push
                y = to[a ^ 1]
            total += push


def _feasible(graph: Graph, demand, lower: dict, upper: dict) -> Optional[dict]:
    """Integral f-flow with ``lower[e] <= value(e) <= upper[e]`` or ``None``.

    Shifting by the lower bounds turns each edge into a plain arc ``u -> v``
    of capacity ``upper - lower`` and moves the bound into vertex balances,
    which a super source/sink max-flow then has to saturate.
    """
    index = {v: i for i, v in enumerate(graph.vertices)}
    n = len(index)
    s, t = n, n + 1
    balance = [0] * n
    for v in graph.vertices:
        balance[index[v]] = demand.get(v, 0)
    if sum(balance):
        return None
    net = _MaxFlow(n + 2)
    arcs = {}
    for e in graph.edges:
        lo, hi = lower[e], upper[e]
        if lo > hi:
            return None
        u, v = index[e[0]], index[e[1]]
        balance[u] -= lo
        balance[v] += lo
        arcs[e] = net.add_arc(u, v, hi - lo)
    need = 0
    for i, b in enumerate(balance):
        if b > 0:
            net.add_arc(s, i, b)
            need += b
        elif b < 0:
            net.add_arc(i, t, -b)
    if net.run(s, t) != need:
        return None
    return {e: lower[e] + net.cap[a ^ 1] for e, a in arcs.items()}


def _require_capacity(problem: FlowProblem):
    if problem.capacity is None:
        raise DomainError("this oracle needs capacities")


def feasible_integral_flow(problem: FlowProblem) -> Optional[Flow]:
    _require_capacity(problem)
    cap = problem.capacity
    values = _feasible(problem.graph, problem.demand, {e: -c for e, c in cap.items()}, dict(cap))
    return None if values is None else Flow(problem.graph, values)


def lex_least_integral_flow(problem: FlowProblem) -> Optional[Flow]:
    """Lexicographically least integral f-flow bounded by the capacities.

    Edges are fixed in canonical order, each to the smallest value that still
    leaves a feasible completion.
    """
    _require_capacity(problem)
    cap = problem.capacity
    lower = {e: -c for e, c in cap.items()}
    upper = dict(cap)
    if _feasible(problem.graph, problem.demand, lower, upper) is None:
        return None
    for e in problem.graph.edges:
        for value in range(-cap[e], cap[e] + 1):
            lower[e] = upper[e] = value
            if _feasible(problem.graph, problem.demand, lower, upper) is not None:
                break
        else:  # pragma: no cover - feasibility was established above
            raise AssertionError("lost feasibility while fixing edges")
    return Flow(problem.graph, lower)


def enumerate_integral_flows(problem: FlowProblem, bound: int) -> list[Flow]:
    """All integral f-flows with ``|value| <= bound``, in lexicographic order."""
    g = problem.graph
    edges = g.edges
    if len(edges) > MAX_ENUMERATION_EDGES:
        raise RefusalError(f"{len(edges)} edges exceeds the enumeration guard of {MAX_ENUMERATION_EDGES}")
    if bound < 0:
        raise DomainError("bound must be non-negative")
    for v in g.vertices:
        if g.degree(v) == 0 and problem.f(v):
            return []
    remaining = {v: g.degree(v) for v in g.vertices}
    # vertices whose last incident edge is edges[i]
    closing: list[list[int]] = [[] for _ in edges]
    left = dict(remaining)
    for i, (u, v) in enumerate(edges):
        for x in (u, v):
            left[x] -= 1
            if left[x] == 0:
                closing[i].append(x)
    out: list[Flow] = []
    partial = {v: 0 for v in g.vertices}
    chosen = [0] * len(edges)

    def feasible_after(i):
        for x in (edges[i][0], edges[i][1]):
            gap = problem.f(x) - partial[x]
            if abs(gap) > remaining[x] * bound:
                return False
        return all(partial[x] == problem.f(x) for x in closing[i])

    def walk(i):
        if i == len(edges):
            out.append(Flow(g, dict(zip(edges, chosen))))
            return
        u, v = edges[i]
        remaining[u] -= 1
        remaining[v] -= 1
        for value in range(-bound, bound + 1):
            partial[u] += value
            partial[v] -= value
            chosen[i] = value
            if feasible_after(i):
                walk(i + 1)
            partial[u] -= value
            partial[v] += value
        remaining[u] += 1
        remaining[v] += 1

    walk(0)
    return out


@dataclass(frozen=True)
class InstanceBundle:
    problem: FlowProblem
    toast: Toast
    phi: Flow
    witness: Flow
    seed: int
    circuits: tuple = ()  # ((closed cycle), value) pairs with phi = witness + sum

    def check(self) -> list[str]:
        """Return the list of broken bundle invariants (empty when sound)."""
        problems = []
        if not verify_f_flow(self.phi, self.problem).ok:
            problems.append("phi is not an f-flow")
        if not verify_f_flow(self.witness, self.problem).ok:
            problems.append("witness is not an f-flow")
        if any(q.denominator != 1 for _, q in self.witness.items()):
            problems.append("witness is not integral")
        values = dict(self.witness.values)
        for cycle, q in self.circuits:
            for a, b in cycle_edges(cycle):
                if a < b:
                    values[(a, b)] += q
                else:
                    values[(b, a)] -= q
        if values != dict(self.phi.values):
            problems.append("phi differs from witness + circuits")
        return problems


def random_demand(graph: Graph, rng: random.Random, bound: int = 2) -> dict[int, int]:
    demand = {}
    for comp in graph.components():
        verts = sorted(comp)
        f = {v: rng.randint(-bound, bound) for v in verts}
        total = sum(f.values())
        while total:
            v = rng.choice(verts)
            step = -1 if total > 0 else 1
            if abs(f[v] + step) <= bound:
                f[v] += step
                total += step
        demand.update(f)
    return demand


def tree_routing(graph: Graph, demand) -> Flow:
    """Integral f-flow supported on a BFS spanning forest (subtree sums)."""
    values: dict[Edge, int] = {}
    for comp in graph.components():
        root = min(comp)
        parent = {root: None}
        order = [root]
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in graph.neighbors(x):
                if y not in parent:
                    parent[y] = x
                    order.append(y)
                    queue.append(y)
        subtotal = {v: demand.get(v, 0) for v in comp}
        for x in reversed(order):
            p = parent[x]
            if p is None:
                continue
            # subtree of x sends its whole surplus to p
            if x < p:
                values[(x, p)] = subtotal[x]
            else:
                values[(p, x)] = -subtotal[x]
            subtotal[p] += subtotal[x]
    return Flow(graph, values)


def random_rectangle_cycle(graph: Graph, rng: random.Random, max_side: int = 4) -> tuple:
    """Closed boundary walk of a random axis-parallel rectangle on a torus."""
    _, w, h = graph.shape
    a = rng.randint(1, min(max_side, w - 1))
    b = rng.randint(1, min(max_side, h - 1))
    x0, y0 = rng.randrange(w), rng.randrange(h)
    pts = [(x0 + i, y0) for i in range(a)]
    pts += [(x0 + a, y0 + j) for j in range(b)]
    pts += [(x0 + a - i, y0 + b) for i in range(a)]
    pts += [(x0, y0 + b - j) for j in range(b)]
    cycle = [graph.vertex_at(x, y) for x, y in pts]
    if rng.random() < 0.5:
        cycle.reverse()
    return tuple(cycle) + (cycle[0],)


def random_instance(
    w: int,
    h: int,
    *,
    base: int,
    factor: int,
    margin: int = 3,
    circuit_count: int = 0,
    denominators: Sequence[int] = (3, 5, 7),
    seed: int = 0,
) -> InstanceBundle:
    toast = generate_torus_toast(w, h, base, factor, margin, seed)
    graph = toast.graph
    rng = random.Random(f"instance:{seed}")
    demand = random_demand(graph, rng)
    problem = FlowProblem(graph, demand, bound=2)
    witness = tree_routing(graph, demand)
    values = dict(witness.values)
    circuits = []
    for _ in range(circuit_count):
        cycle = random_rectangle_cycle(graph, rng)
        q = rng.choice(list(denominators))
        p = rng.choice([i for i in range(-q, q + 1) if i])
        value = Fraction(p, q)
        for a, b in cycle_edges(cycle):
            if a < b:
                values[(a, b)] += value
            else:
                values[(b, a)] -= value
        circuits.append((cycle, value))
    return InstanceBundle(problem, toast, Flow(graph, values), witness, seed, tuple(circuits))
