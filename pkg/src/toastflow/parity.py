"""Parity subgraphs, cycle decompositions and cycle search through an edge."""

from __future__ import annotations

from collections import deque
from typing import Container, Iterable, Optional

from .errors import DomainError, InfeasibleInputError
from .graph import Edge, Graph, canonical

OrientedCycle = tuple  # closed vertex sequence (v0, v1, ..., v0)


def cycle_edges(cycle: OrientedCycle) -> list[tuple[int, int]]:
    """Directed edges of a closed vertex sequence, in traversal order."""
    return list(zip(cycle, cycle[1:]))


class ParityTree:
    """Lexicographic BFS tree of the subgraph induced on ``S``.

    Each call to :meth:`subgraph` follows the inductive construction: take
    the points of ``P`` in sorted pairs, join each pair by its tree path and
    accumulate the symmetric difference of the paths.
    """

    def __init__(self, graph: Graph, S: Iterable[int]):
        S = frozenset(S)
        self.graph = graph
        self.vertices = S
        self.parent: dict[int, Optional[int]] = {}
        self.depth: dict[int, int] = {}
        if not S:
            return
        root = min(S)
        self.parent[root] = None
        self.depth[root] = 0
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in graph.neighbors(x):
                if y in S and y not in self.parent:
                    self.parent[y] = x
                    self.depth[y] = self.depth[x] + 1
                    queue.append(y)
        if len(self.parent) != len(S):
            raise InfeasibleInputError("induced subgraph on S is not connected")

    def path_edges(self, s: int, t: int) -> list[Edge]:
        out = []
        depth, parent = self.depth, self.parent
        while depth[s] > depth[t]:
            out.append(canonical(s, parent[s]))
            s = parent[s]
        while depth[t] > depth[s]:
            out.append(canonical(t, parent[t]))
            t = parent[t]
        while s != t:
            out.append(canonical(s, parent[s]))
            out.append(canonical(t, parent[t]))
            s, t = parent[s], parent[t]
        return out

    def subgraph(self, P: Iterable[int]) -> frozenset:
        P = sorted(set(P))
        stray = [p for p in P if p not in self.vertices]
        if stray:
            raise DomainError(f"P is not contained in S: {stray[:5]}")
        if len(P) % 2:
            raise InfeasibleInputError(f"|P| = {len(P)} is odd")
        H: set[Edge] = set()
        for s, t in zip(P[0::2], P[1::2]):
            H.symmetric_difference_update(self.path_edges(s, t))
        return frozenset(H)


def odd_parity_subgraph(graph: Graph, S: Iterable[int], P: Iterable[int]) -> frozenset:
    """Edges inside ``S`` whose odd-degree vertices are exactly ``P``."""
    S = frozenset(S)
    P = frozenset(P)
    if not P <= S:
        raise DomainError("P must be a subset of S")
    if len(P) % 2:
        raise InfeasibleInputError(f"|P| = {len(P)} is odd")
    if not P:
        return frozenset()
    return ParityTree(graph, S).subgraph(P)


def cycle_decompose(graph: Graph, E: Iterable[Edge]) -> list[OrientedCycle]:
    """Split an even-degree edge set into edge-disjoint simple cycles.

    The walk always leaves a vertex along its smallest unused edge and cuts a
    cycle off as soon as it revisits a vertex on the current path.
    """
    E = {canonical(*e) for e in E}
    adj: dict[int, set[int]] = {}
    for u, v in E:
        if not graph.has_edge(u, v):
            raise DomainError(f"{(u, v)} is not an edge of the graph")
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    for v in sorted(adj):
        if len(adj[v]) % 2:
            raise InfeasibleInputError(f"vertex {v} has odd degree {len(adj[v])}")

    cycles: list[OrientedCycle] = []
    for start in sorted(adj):
        if not adj[start]:
            continue
        path = [start]
        pos = {start: 0}
        cur = start
        while True:
            if not adj[cur]:
                break  # only reachable with path == [start]
            nxt = min(adj[cur])
            adj[cur].discard(nxt)
            adj[nxt].discard(cur)
            if nxt in pos:
                i = pos[nxt]
                cycles.append(tuple(path[i:]) + (nxt,))
                for v in path[i + 1:]:
                    del pos[v]
                del path[i + 1:]
            else:
                pos[nxt] = len(path)
                path.append(nxt)
            cur = nxt
    return cycles


def find_cycle_through(graph: Graph, e: Edge, allowed: Container[Edge]) -> Optional[OrientedCycle]:
    """Shortest simple cycle through ``e`` using only ``allowed`` edges.

    The cycle is returned closed and oriented so that it traverses ``e`` in
    its canonical direction ``u -> v``; ``None`` if ``e`` is a bridge of the
    allowed subgraph.
    """
    u, v = canonical(*e)
    if (u, v) not in allowed:
        raise DomainError(f"edge {(u, v)} is not in the allowed set")
    prev = {v: None}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for y in graph.neighbors(x):
            if y in prev:
                continue
            if (x, y) == (v, u) or (x < y and (x, y) not in allowed) or (x > y and (y, x) not in allowed):
                continue
            prev[y] = x
            if y == u:
                path = [u]
                while path[-1] != v:
                    path.append(prev[path[-1]])
                # path runs u <- ... <- v; reverse to walk v -> ... -> u
                return (u,) + tuple(reversed(path))
            queue.append(y)
    return None
