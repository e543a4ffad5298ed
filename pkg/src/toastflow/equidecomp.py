"""Equidecompositions of subsets of a discrete torus under translations.

Route a bijection ``A -> B`` into a ``(chi_A - chi_B)``-flow, round it, then
read a new bijection off the rounded flow by moving points between the tiles
of a Folner tiling and matching inside each tile.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DomainError, EquidecompositionInfeasible, ParameterError
from .graph import Flow, FlowProblem, Graph, is_folner, verify_f_flow
from .rationals import as_rational


@dataclass(frozen=True)
class TorusAction:
    """Translations of ``Z_w x Z_h`` acting on the vertices of ``torus(w, h)``."""

    width: int
    height: int

    generators = ((1, 0), (-1, 0), (0, 1), (0, -1))

    @cached_property
    def graph(self) -> Graph:
        return Graph.torus(self.width, self.height)

    def normalize(self, gamma) -> tuple[int, int]:
        """Representative with coordinates in ``(-w/2, w/2]`` and ``(-h/2, h/2]``."""
        a, b = gamma[0] % self.width, gamma[1] % self.height
        if a > self.width // 2:
            a -= self.width
        if b > self.height // 2:
            b -= self.height
        return a, b

    def act(self, gamma, x: int) -> int:
        w, h = self.width, self.height
        return ((x // w + gamma[1]) % h) * w + (x % w + gamma[0]) % w

    def displacement(self, x: int, y: int) -> tuple[int, int]:
        w = self.width
        return self.normalize((y % w - x % w, y // w - x // w))

    def word_length(self, gamma) -> int:
        a, b = self.normalize(gamma)
        return abs(a) + abs(b)

    def path(self, x: int, gamma) -> list[int]:
        """Shortest generator path from ``x`` to ``gamma x``: horizontal first."""
        a, b = self.normalize(gamma)
        out = [x]
        for _ in range(abs(a)):
            out.append(self.act((1 if a > 0 else -1, 0), out[-1]))
        for _ in range(abs(b)):
            out.append(self.act((0, 1 if b > 0 else -1), out[-1]))
        return out


@dataclass(frozen=True)
class Tiling:
    tiles: tuple  # tuple of frozensets partitioning the vertices
    epsilon: Fraction
    side: Optional[int] = None

    @cached_property
    def tile_of(self) -> dict[int, int]:
        return {v: i for i, t in enumerate(self.tiles) for v in t}


@dataclass(frozen=True)
class Piece:
    gamma: tuple
    vertices: frozenset


@dataclass(frozen=True)
class Equidecomposition:
    pieces: tuple

    def mapping(self, action: TorusAction) -> dict[int, int]:
        return {x: action.act(p.gamma, x) for p in self.pieces for x in p.vertices}

    def __len__(self):
        return len(self.pieces)


@dataclass
class Report:
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __str__(self):
        return "ok" if self.ok else "\n".join(map(str, self.problems))


def block_tiling(action: TorusAction, side: int, epsilon) -> Tiling:
    w, h = action.width, action.height
    if w % side or h % side:
        raise ParameterError(f"side {side} does not divide {w}x{h}")
    tiles = []
    for by in range(0, h, side):
        for bx in range(0, w, side):
            tiles.append(frozenset((by + dy) * w + bx + dx for dy in range(side) for dx in range(side)))
    return Tiling(tuple(tiles), as_rational(epsilon), side)


def folner_tiling(action: TorusAction, epsilon) -> Tiling:
    """Partition into ``s x s`` squares with the least ``s`` that is Folner."""
    eps = as_rational(epsilon)
    w, h = action.width, action.height
    g = action.graph
    for s in range(1, min(w, h) + 1):
        if w % s or h % s:
            continue
        square = [dy * w + dx for dy in range(s) for dx in range(s)]
        if is_folner(g, square, eps):
            return block_tiling(action, s, eps)
    raise ParameterError(f"no square side dividing {w}x{h} is {eps}-Folner; use larger dimensions")


def check_uniform(action: TorusAction, A: Iterable[int], tiling: Tiling, epsilon) -> Report:
    """``|A n T| >= epsilon |T|`` on every tile of the tiling."""
    eps = as_rational(epsilon)
    A = frozenset(A)
    report = Report()
    for i, tile in enumerate(tiling.tiles):
        count = len(A & tile)
        if count < eps * len(tile):
            report.problems.append((i, count, eps * len(tile)))
    return report


def verify_equidecomposition(action: TorusAction, A, B, pieces: Equidecomposition) -> Report:
    A, B = frozenset(A), frozenset(B)
    report = Report()
    seen_src: set[int] = set()
    seen_img: set[int] = set()
    n = action.width * action.height
    for i, p in enumerate(pieces.pieces):
        for x in sorted(p.vertices):
            if not 0 <= x < n:
                report.problems.append(f"piece {i}: vertex {x} is not on the torus")
                continue
            y = action.act(p.gamma, x)
            if x in seen_src:
                report.problems.append(f"piece {i}: duplicated source vertex {x}")
            if y in seen_img:
                report.problems.append(f"piece {i}: duplicated image vertex {y}")
            seen_src.add(x)
            seen_img.add(y)
    if seen_src != A:
        missing, extra = sorted(A - seen_src), sorted(seen_src - A)
        report.problems.append(f"sources differ from A: missing {missing[:5]}, extra {extra[:5]}")
    if seen_img != B:
        missing, extra = sorted(B - seen_img), sorted(seen_img - B)
        report.problems.append(f"images differ from B: missing {missing[:5]}, extra {extra[:5]}")
    return report


def pieces_from_pairs(action: TorusAction, pairs: Iterable[tuple[int, int]]) -> Equidecomposition:
    """Group matched pairs ``x -> y`` by translation vector."""
    groups: dict[tuple, set] = {}
    for x, y in pairs:
        groups.setdefault(action.displacement(x, y), set()).add(x)
    return Equidecomposition(tuple(Piece(gamma, frozenset(vs)) for gamma, vs in sorted(groups.items())))


def _check_pieces(action: TorusAction, pieces: Equidecomposition):
    src, img = set(), set()
    for p in pieces.pieces:
        for x in p.vertices:
            y = action.act(p.gamma, x)
            if x in src or y in img:
                raise DomainError("pieces overlap or their images overlap")
            src.add(x)
            img.add(y)
    return frozenset(src), frozenset(img)


def flow_from_bijection(action: TorusAction, pieces: Equidecomposition):
    """Route one unit from each ``x`` to ``gamma x``; returns ``(flow, bound)``.

    ``bound`` is ``len(pieces) * max word length``, an a-priori bound on the
    absolute flow value on any edge.
    """
    _check_pieces(action, pieces)
    g = action.graph
    values: dict = {e: 0 for e in g.edges}
    for p in pieces.pieces:
        for x in p.vertices:
            route = action.path(x, p.gamma)
            for a, b in zip(route, route[1:]):
                if a < b:
                    values[(a, b)] += 1
                else:
                    values[(b, a)] -= 1
    longest = max((action.word_length(p.gamma) for p in pieces.pieces), default=0)
    return Flow(g, values), len(pieces.pieces) * longest


def demand_problem(action: TorusAction, A, B) -> FlowProblem:
    A, B = frozenset(A), frozenset(B)
    demand = {v: (v in A) - (v in B) for v in A | B}
    return FlowProblem(action.graph, demand)


def tile_transfers(action: TorusAction, tiling: Tiling, psi: Flow) -> dict[tuple[int, int], int]:
    """Aggregate flow between adjacent tiles: ``(T, S) -> sum psi(x, y)``, ``x in T, y in S``."""
    tile_of = tiling.tile_of
    agg: dict[tuple[int, int], Fraction] = {}
    for (u, v), q in psi.items():
        tu, tv = tile_of[u], tile_of[v]
        if tu == tv or not q:
            continue
        agg[(tu, tv)] = agg.get((tu, tv), 0) + q
        agg[(tv, tu)] = agg.get((tv, tu), 0) - q
    return agg


def equidecompose(action: TorusAction, A, B, tiling: Tiling, psi: Flow) -> Equidecomposition:
    """Read a bijection ``A -> B`` off an integral ``(chi_A - chi_B)``-flow.

    For each pair of adjacent tiles with positive aggregate flow ``k`` from
    ``T`` to ``S``, the ``k`` least unused A-points of ``T`` are matched with
    the ``k`` least unused B-points of ``S``.  The leftover counts then agree
    in every tile, and the rest is matched in sorted order inside the tile.
    """
    A, B = frozenset(A), frozenset(B)
    if psi.graph != action.graph:
        raise DomainError("flow is not on the action's Schreier graph")
    if any(q.denominator != 1 for _, q in psi.items()):
        raise DomainError("equidecompose needs an integral flow")
    report = verify_f_flow(psi, demand_problem(action, A, B))
    if not report.ok:
        raise DomainError(f"psi is not a (chi_A - chi_B)-flow:\n{report}")

    agg = tile_transfers(action, tiling, psi)
    load = [0] * len(tiling.tiles)
    for (t, _), q in agg.items():
        load[t] += abs(q)
    a_left = [sorted(A & tile) for tile in tiling.tiles]
    b_left = [sorted(B & tile) for tile in tiling.tiles]
    for t in range(len(tiling.tiles)):
        if len(a_left[t]) < load[t] or len(b_left[t]) < load[t]:
            raise EquidecompositionInfeasible(
                f"tile {t}: |A n T| = {len(a_left[t])}, |B n T| = {len(b_left[t])} "
                f"but the boundary flow is {load[t]}",
                tile=t,
            )

    pairs = []
    a_pos = [0] * len(tiling.tiles)
    b_pos = [0] * len(tiling.tiles)
    for (t, s), q in sorted(agg.items()):
        if q <= 0:
            continue
        k = int(q)
        for i in range(k):
            pairs.append((a_left[t][a_pos[t] + i], b_left[s][b_pos[s] + i]))
        a_pos[t] += k
        b_pos[s] += k
    for t in range(len(tiling.tiles)):
        rest_a, rest_b = a_left[t][a_pos[t]:], b_left[t][b_pos[t]:]
        if len(rest_a) != len(rest_b):  # pragma: no cover - guaranteed by the flow
            raise EquidecompositionInfeasible(f"tile {t} is unbalanced after transfers", tile=t)
        pairs.extend(zip(rest_a, rest_b))
    return pieces_from_pairs(action, pairs)


def transport_bijection(action: TorusAction, A, B, seed: Optional[int] = None) -> Equidecomposition:
    """Matching ``A -> B`` minimizing total torus word length.

    With a seed, costs get a small random tie-break so different seeds give
    different near-optimal matchings.
    """
    A, B = sorted(A), sorted(B)
    if len(A) != len(B):
        raise DomainError(f"|A| = {len(A)} != |B| = {len(B)}")
    if not A:
        return Equidecomposition(())
    w, h = action.width, action.height
    ax, ay = np.array([a % w for a in A]), np.array([a // w for a in A])
    bx, by = np.array([b % w for b in B]), np.array([b // w for b in B])
    dx = np.abs(ax[:, None] - bx[None, :])
    dy = np.abs(ay[:, None] - by[None, :])
    cost = np.minimum(dx, w - dx) + np.minimum(dy, h - dy)
    cost = cost.astype(float)
    if seed is not None:
        rng = np.random.default_rng(seed)
        cost += 0.5 * rng.random(cost.shape)
    rows, cols = linear_sum_assignment(cost)
    return pieces_from_pairs(action, ((A[r], B[c]) for r, c in zip(rows, cols)))


def fractional_transport_flow(action: TorusAction, A, B, copies: int = 3, seed: int = 0) -> Flow:
    """Average of the routed flows of ``copies`` seeded transport bijections."""
    total = None
    for i in range(copies):
        flow, _ = flow_from_bijection(action, transport_bijection(action, A, B, seed=seed * 1000 + i))
        total = flow if total is None else total + flow
    return Flow(action.graph, {e: q / copies for e, q in total.items()})


def random_uniform_pair(action: TorusAction, density: Fraction, seed: int):
    """Seeded random ``A, B`` of equal size, each of density about ``density``."""
    rng = random.Random(f"pair:{seed}")
    n = action.width * action.height
    verts = list(range(n))
    A = {v for v in verts if rng.random() < density}
    B = {v for v in verts if rng.random() < density}
    while len(A) > len(B):
        B.add(rng.choice(sorted(set(verts) - B)))
    while len(B) > len(A):
        A.add(rng.choice(sorted(set(verts) - A)))
    return frozenset(A), frozenset(B)
