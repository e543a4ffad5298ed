"""Finite simple graphs, exact flows and the grid predicates used by toasts.

Vertices are integers.  Every edge is stored once, in its canonical
orientation ``(u, v)`` with ``u < v``; a flow stores the value on that
orientation and the reverse direction is read off by negation.

Torus and grid graphs index vertex ``(x, y)`` as ``y * width + x``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

from .errors import DomainError, UnsupportedInstanceError
from .rationals import as_rational

Edge = tuple[int, int]


def canonical(u: int, v: int) -> Edge:
    if u == v:
        raise DomainError(f"self-loop at {u}")
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable finite simple undirected graph.

    ``shape`` is ``("torus", w, h)``, ``("grid", w, h)`` or ``None``; only
    shaped graphs support the hole/annulus predicates.
    """

    __slots__ = ("_vertices", "_vertex_set", "_edges", "_edge_set", "_adj", "shape")

    def __init__(self, vertices: Iterable[int], edges: Iterable[tuple[int, int]], shape=None):
        verts = sorted(set(vertices))
        for v in verts:
            if isinstance(v, bool) or not isinstance(v, int):
                raise DomainError(f"vertex ids must be integers, got {v!r}")
        vertex_set = frozenset(verts)
        adj: dict[int, list[int]] = {v: [] for v in verts}
        edge_set = set()
        for raw in edges:
            u, v = raw
            e = canonical(u, v)
            if e[0] not in vertex_set or e[1] not in vertex_set:
                raise DomainError(f"edge {raw} uses an undeclared vertex")
            if e in edge_set:
                raise DomainError(f"multi-edge {e}")
            edge_set.add(e)
            adj[u].append(v)
            adj[v].append(u)
        self._vertices = tuple(verts)
        self._vertex_set = vertex_set
        self._edges = tuple(sorted(edge_set))
        self._edge_set = frozenset(edge_set)
        self._adj = {v: tuple(sorted(ns)) for v, ns in adj.items()}
        self.shape = shape

    @classmethod
    def torus(cls, w: int, h: int) -> "Graph":
        if w < 3 or h < 3:
            raise DomainError(f"torus needs w, h >= 3, got {w}x{h}")
        edges = []
        for y in range(h):
            for x in range(w):
                v = y * w + x
                edges.append((v, y * w + (x + 1) % w))
                edges.append((v, ((y + 1) % h) * w + x))
        return cls(range(w * h), edges, shape=("torus", w, h))

    @classmethod
    def grid(cls, w: int, h: int) -> "Graph":
        if w < 1 or h < 1:
            raise DomainError(f"grid needs w, h >= 1, got {w}x{h}")
        edges = []
        for y in range(h):
            for x in range(w):
                v = y * w + x
                if x + 1 < w:
                    edges.append((v, v + 1))
                if y + 1 < h:
                    edges.append((v, v + w))
        return cls(range(w * h), edges, shape=("grid", w, h))

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def edge_set(self) -> frozenset:
        return self._edge_set

    @property
    def vertex_set(self) -> frozenset:
        return self._vertex_set

    def neighbors(self, v: int) -> tuple[int, ...]:
        try:
            return self._adj[v]
        except KeyError:
            raise DomainError(f"unknown vertex {v}") from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_vertex(self, v) -> bool:
        return v in self._vertex_set

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and canonical(u, v) in self._edge_set

    def induced_edges(self, S) -> list[Edge]:
        S = S if isinstance(S, (set, frozenset)) else set(S)
        return [(u, v) for u in sorted(S) for v in self._adj[u] if u < v and v in S]

    def coords(self, v: int) -> tuple[int, int]:
        if self.shape is None:
            raise UnsupportedInstanceError("graph has no grid embedding")
        w = self.shape[1]
        return v % w, v // w

    def vertex_at(self, x: int, y: int) -> int:
        if self.shape is None:
            raise UnsupportedInstanceError("graph has no grid embedding")
        kind, w, h = self.shape
        if kind == "torus":
            x, y = x % w, y % h
        elif not (0 <= x < w and 0 <= y < h):
            raise DomainError(f"({x}, {y}) lies outside the grid")
        return y * w + x

    def components(self, S=None) -> list[frozenset]:
        """Connected components of the subgraph induced on ``S`` (default: all)."""
        S = self._vertex_set if S is None else frozenset(S)
        seen: set[int] = set()
        out = []
        for start in sorted(S):
            if start in seen:
                continue
            comp = {start}
            queue = deque([start])
            while queue:
                x = queue.popleft()
                for y in self._adj[x]:
                    if y in S and y not in comp:
                        comp.add(y)
                        queue.append(y)
            seen |= comp
            out.append(frozenset(comp))
        return out

    def is_connected(self, S=None) -> bool:
        S = self._vertex_set if S is None else S
        return len(self.components(S)) == 1

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._vertices == other._vertices
            and self._edges == other._edges
            and self.shape == other.shape
        )

    def __hash__(self):
        return hash((self._vertices, self._edges, self.shape))

    def __repr__(self):
        if self.shape:
            return f"Graph.{self.shape[0]}({self.shape[1]}, {self.shape[2]})"
        return f"Graph(|V|={len(self._vertices)}, |E|={len(self._edges)})"


class Flow:
    """Antisymmetric edge function with exact rational values.

    ``flow[u, v]`` returns the value in direction ``u -> v``; edges absent
    from ``values`` at construction are zero.
    """

    __slots__ = ("graph", "_values")

    def __init__(self, graph: Graph, values: Optional[Mapping[Edge, object]] = None):
        vals = {e: Fraction(0) for e in graph.edges}
        for key, value in (values or {}).items():
            u, v = key
            e = canonical(u, v)
            if e not in graph.edge_set:
                raise DomainError(f"flow value on non-edge {key}")
            q = as_rational(value)
            vals[e] = q if (u, v) == e else -q
        self.graph = graph
        self._values = vals

    @classmethod
    def zero(cls, graph: Graph) -> "Flow":
        return cls(graph)

    @property
    def values(self) -> Mapping[Edge, Fraction]:
        return MappingProxyType(self._values)

    def __getitem__(self, edge) -> Fraction:
        u, v = edge
        if u < v:
            return self._values[(u, v)]
        return -self._values[(v, u)]

    def items(self):
        return self._values.items()

    def sup_distance(self, other: "Flow") -> Fraction:
        if other.graph != self.graph:
            raise DomainError("flows live on different graphs")
        return max((abs(self._values[e] - other._values[e]) for e in self._values), default=Fraction(0))

    def max_abs(self) -> Fraction:
        return max((abs(q) for q in self._values.values()), default=Fraction(0))

    def __add__(self, other: "Flow") -> "Flow":
        if other.graph != self.graph:
            raise DomainError("flows live on different graphs")
        return Flow(self.graph, {e: q + other._values[e] for e, q in self._values.items()})

    def __eq__(self, other):
        if not isinstance(other, Flow):
            return NotImplemented
        return self.graph == other.graph and self._values == other._values

    def __repr__(self):
        nz = sum(1 for q in self._values.values() if q)
        return f"Flow({self.graph!r}, nonzero={nz})"


@dataclass(frozen=True)
class FlowProblem:
    """A graph, an integral demand ``f`` and optional integral capacities ``c``."""

    graph: Graph
    demand: Mapping[int, int] = field(default_factory=dict)
    capacity: Optional[Mapping[Edge, int]] = None
    bound: Optional[int] = None

    def __post_init__(self):
        demand = {}
        for v, d in self.demand.items():
            if not self.graph.has_vertex(v):
                raise DomainError(f"demand on unknown vertex {v}")
            if isinstance(d, bool) or not isinstance(d, int):
                raise DomainError(f"demand at {v} must be an integer, got {d!r}")
            if self.bound is not None and abs(d) > self.bound:
                raise DomainError(f"|demand({v})| = {abs(d)} exceeds bound {self.bound}")
            if d:
                demand[v] = d
        object.__setattr__(self, "demand", MappingProxyType(demand))
        for comp in self.graph.components():
            total = sum(demand.get(v, 0) for v in comp)
            if total:
                raise DomainError(f"demand sums to {total} on the component of {min(comp)}")
        if self.capacity is not None:
            cap = {}
            for key, c in self.capacity.items():
                e = canonical(*key)
                if e not in self.graph.edge_set:
                    raise DomainError(f"capacity on non-edge {key}")
                if isinstance(c, bool) or not isinstance(c, int) or c < 0:
                    raise DomainError(f"capacity of {e} must be a non-negative integer")
                cap[e] = c
            missing = [e for e in self.graph.edges if e not in cap]
            if missing:
                raise DomainError(f"capacity missing for edge {missing[0]}")
            object.__setattr__(self, "capacity", MappingProxyType(cap))

    def f(self, v: int) -> int:
        return self.demand.get(v, 0)

    def with_uniform_capacity(self, c: int) -> "FlowProblem":
        return FlowProblem(self.graph, dict(self.demand), {e: c for e in self.graph.edges}, self.bound)


def divergence(flow: Flow, x: int) -> Fraction:
    """Net outflow ``sum_y flow(x, y)`` at ``x``."""
    g = flow.graph
    if not g.has_vertex(x):
        raise DomainError(f"unknown vertex {x}")
    vals = flow._values
    total = Fraction(0)
    for y in g.neighbors(x):
        total += vals[(x, y)] if x < y else -vals[(y, x)]
    return total


def divergences(flow: Flow) -> dict[int, Fraction]:
    out = {v: Fraction(0) for v in flow.graph.vertices}
    for (u, v), q in flow._values.items():
        out[u] += q
        out[v] -= q
    return out


@dataclass
class FlowReport:
    vertex_violations: list = field(default_factory=list)  # (v, divergence, demand)
    edge_violations: list = field(default_factory=list)  # (edge, value, capacity)

    @property
    def ok(self) -> bool:
        return not self.vertex_violations and not self.edge_violations

    def __str__(self):
        if self.ok:
            return "ok"
        lines = [f"vertex {v}: divergence {d} != demand {f}" for v, d, f in self.vertex_violations]
        lines += [f"edge {e}: |{q}| > capacity {c}" for e, q, c in self.edge_violations]
        return "\n".join(lines)


def verify_f_flow(flow: Flow, problem: FlowProblem) -> FlowReport:
    if flow.graph != problem.graph:
        raise DomainError("flow and problem are on different graphs")
    report = FlowReport()
    for v, d in divergences(flow).items():
        if d != problem.f(v):
            report.vertex_violations.append((v, d, problem.f(v)))
    if problem.capacity is not None:
        for e, q in flow.items():
            if abs(q) > problem.capacity[e]:
                report.edge_violations.append((e, q, problem.capacity[e]))
    return report


def _check_subset(graph: Graph, S) -> frozenset:
    S = frozenset(S)
    unknown = [v for v in S if not graph.has_vertex(v)]
    if unknown:
        raise DomainError(f"unknown vertices {sorted(unknown)[:5]}")
    return S


def neighborhood(graph: Graph, S, k: int = 1) -> frozenset:
    """All vertices at distance 1..k from ``S`` (``S`` itself excluded)."""
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    S = _check_subset(graph, S)
    dist = {v: 0 for v in S}
    frontier = list(S)
    for d in range(1, k + 1):
        nxt = []
        for x in frontier:
            for y in graph.neighbors(x):
                if y not in dist:
                    dist[y] = d
                    nxt.append(y)
        frontier = nxt
    return frozenset(v for v, d in dist.items() if d > 0)


def boundary(graph: Graph, F) -> frozenset:
    F = _check_subset(graph, F)
    return frozenset(x for x in F if any(y not in F for y in graph.neighbors(x)))


def is_folner(graph: Graph, F, epsilon) -> bool:
    F = _check_subset(graph, F)
    if not F:
        raise DomainError("Folner test needs a non-empty set")
    return len(boundary(graph, F)) < as_rational(epsilon) * len(F)


def _require_grid(graph: Graph):
    if graph.shape is None or graph.shape[0] not in ("torus", "grid"):
        raise UnsupportedInstanceError("hole-freeness is only defined on torus/grid graphs")


def is_hole_free(graph: Graph, H) -> bool:
    """True iff the complement of ``H`` is connected (nothing is enclosed)."""
    _require_grid(graph)
    H = _check_subset(graph, H)
    if not H or len(H) == len(graph.vertices):
        raise DomainError("H must be a non-empty proper subset")
    return len(graph.components(graph.vertex_set - H)) == 1


def annulus_connected(graph: Graph, H) -> bool:
    """Is the width-2 shell ``neighborhood(H, 2)`` connected?"""
    _require_grid(graph)
    H = _check_subset(graph, H)
    if not H or len(H) == len(graph.vertices):
        raise DomainError("H must be a non-empty proper subset")
    if not graph.is_connected(H):
        raise DomainError("H must be connected")
    if not is_hole_free(graph, H):
        raise DomainError("H must be hole-free")
    return graph.is_connected(neighborhood(graph, H, 2))
