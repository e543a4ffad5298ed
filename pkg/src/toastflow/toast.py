"""Connected toasts: nested families of finite connected tiles.

A toast is stored as an explicit forest (each tile names its parent).  The
validator checks the set-theoretic conditions directly and also that the
declared forest agrees with set containment, so downstream code can walk
parents and children without recomputing containment.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import DomainError, FormatError, ParameterError
from .graph import Graph, is_hole_free, neighborhood


@dataclass(frozen=True)
class Tile:
    id: int
    parent: Optional[int]
    vertices: frozenset


class Toast:
    """A forest of tiles over ``graph``.

    Construction checks only the record format (ids, parents, vertices);
    use :func:`validate_toast` for the toast properties.
    """

    def __init__(self, graph: Graph, tiles: Iterable[Tile]):
        tiles = list(tiles)
        by_id: dict[int, Tile] = {}
        for t in tiles:
            if isinstance(t.id, bool) or not isinstance(t.id, int):
                raise FormatError(f"tile id must be an integer, got {t.id!r}")
            if t.id in by_id:
                raise FormatError(f"duplicate tile id {t.id}")
            if not t.vertices:
                raise FormatError(f"tile {t.id} is empty")
            unknown = [v for v in t.vertices if not graph.has_vertex(v)]
            if unknown:
                raise FormatError(f"tile {t.id} has unknown vertices {sorted(unknown)[:5]}")
            by_id[t.id] = Tile(t.id, t.parent, frozenset(t.vertices))
        children: dict[int, list[int]] = {i: [] for i in by_id}
        for t in by_id.values():
            if t.parent is None:
                continue
            if t.parent not in by_id:
                raise FormatError(f"tile {t.id} has dangling parent {t.parent}")
            children[t.parent].append(t.id)
        # reject parent cycles
        for t in by_id.values():
            seen = set()
            cur = t
            while cur.parent is not None:
                if cur.id in seen:
                    raise FormatError(f"parent cycle through tile {t.id}")
                seen.add(cur.id)
                cur = by_id[cur.parent]
        self.graph = graph
        self._tiles = dict(sorted(by_id.items()))
        self._children = {i: tuple(sorted(c)) for i, c in children.items()}

    @property
    def tiles(self) -> tuple[Tile, ...]:
        return tuple(self._tiles.values())

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(self._tiles)

    def tile(self, tile_id: int) -> Tile:
        try:
            return self._tiles[tile_id]
        except KeyError:
            raise DomainError(f"unknown tile id {tile_id}") from None

    def children(self, tile_id: int) -> tuple[int, ...]:
        self.tile(tile_id)
        return self._children[tile_id]

    def roots(self) -> tuple[int, ...]:
        return tuple(i for i, t in self._tiles.items() if t.parent is None)

    def ancestors(self, tile_id: int) -> list[int]:
        out = []
        cur = self.tile(tile_id).parent
        while cur is not None:
            out.append(cur)
            cur = self._tiles[cur].parent
        return out

    def descendants(self, tile_id: int) -> list[int]:
        out = []
        stack = list(self.children(tile_id))
        while stack:
            t = stack.pop()
            out.append(t)
            stack.extend(self._children[t])
        return sorted(out)

    def __len__(self):
        return len(self._tiles)

    def __eq__(self, other):
        if not isinstance(other, Toast):
            return NotImplemented
        return self.graph == other.graph and self._tiles == other._tiles


@dataclass(frozen=True)
class Violation:
    property: int
    tiles: tuple
    detail: str

    def __str__(self):
        ids = ", ".join(map(str, self.tiles)) if self.tiles else "-"
        return f"property {self.property}: tiles [{ids}]: {self.detail}"


@dataclass
class ToastReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def properties(self) -> set:
        return {v.property for v in self.violations}

    def __str__(self):
        return "ok" if self.ok else "\n".join(map(str, self.violations))


def _vertex_index(toast: Toast) -> dict[int, list[int]]:
    index: dict[int, list[int]] = {}
    for t in toast.tiles:
        for v in t.vertices:
            index.setdefault(v, []).append(t.id)
    return index


def free_region(toast: Toast, tile_id: int) -> frozenset:
    """Vertices of the tile not covered by any of its descendants."""
    t = toast.tile(tile_id)
    covered = set()
    for c in toast.children(tile_id):
        covered |= toast.tile(c).vertices
    for d in toast.descendants(tile_id):
        covered |= toast.tile(d).vertices
    return t.vertices - covered


def validate_toast(graph: Graph, toast: Toast) -> ToastReport:
    """Check properties 1-3 and the declared forest against the sets."""
    if toast.graph != graph:
        raise DomainError("toast was built for a different graph")
    report = ToastReport()
    add = report.violations.append
    index = _vertex_index(toast)

    closed = {t.id: t.vertices | neighborhood(graph, t.vertices, 1) for t in toast.tiles}
    seen_sets: dict[frozenset, int] = {}
    for t in toast.tiles:
        if t.vertices in seen_sets:
            add(Violation(2, (seen_sets[t.vertices], t.id), "duplicate tiles"))
        else:
            seen_sets[t.vertices] = t.id

    for t in toast.tiles:
        if not graph.is_connected(t.vertices):
            add(Violation(3, (t.id,), "tile does not induce a connected subgraph"))
        if t.parent is not None and not closed[t.id] <= toast.tile(t.parent).vertices:
            add(Violation(2, (t.id, t.parent), "tile plus its neighborhood is not inside its parent"))

    reported = set()
    for t in toast.tiles:
        related = set(toast.ancestors(t.id)) | set(toast.descendants(t.id))
        touching = set()
        for v in closed[t.id]:
            touching.update(index.get(v, ()))
        for other in sorted(touching - related - {t.id}):
            pair = (min(t.id, other), max(t.id, other))
            if pair in reported or toast.tile(other).vertices == t.vertices:
                continue
            reported.add(pair)
            add(Violation(2, pair, "incomparable tiles meet or are adjacent"))

    uncovered = []
    for u, v in graph.edges:
        if not set(index.get(u, ())) & set(index.get(v, ())):
            uncovered.append((u, v))
    if uncovered:
        add(Violation(1, (), f"{len(uncovered)} edges lie in no tile, e.g. {uncovered[:3]}"))

    for t in toast.tiles:
        region = free_region(toast, t.id)
        if not region or not graph.is_connected(region):
            add(Violation(3, (t.id,), "free region is empty or disconnected"))
    return report


@dataclass(frozen=True)
class ToastLevels:
    levels: tuple  # levels[0] is M_1 (the minimal tiles)

    def level_of(self, tile_id: int) -> int:
        for k, level in enumerate(self.levels, start=1):
            if tile_id in level:
                return k
        raise DomainError(f"unknown tile id {tile_id}")

    def __len__(self):
        return len(self.levels)


def stratify(toast: Toast, *, check: bool = True) -> ToastLevels:
    """Split tiles into M_1 (minimal), M_2 (minimal among the rest), ..."""
    if check:
        report = validate_toast(toast.graph, toast)
        if not report.ok:
            raise DomainError(f"invalid toast:\n{report}")
    level: dict[int, int] = {}

    def height(i):
        if i not in level:
            # iterative post-order keeps deep forests off the recursion limit
            stack = [i]
            while stack:
                top = stack[-1]
                pending = [c for c in toast.children(top) if c not in level]
                if pending:
                    stack.extend(pending)
                else:
                    stack.pop()
                    level[top] = 1 + max((level[c] for c in toast.children(top)), default=0)
        return level[i]

    for i in toast.ids:
        height(i)
    depth = max(level.values(), default=0)
    return ToastLevels(tuple(tuple(sorted(i for i, k in level.items() if k == d)) for d in range(1, depth + 1)))


def is_k_toast(graph: Graph, toast: Toast, k: int) -> bool:
    """Pairwise nesting with k-neighborhoods, judged on the vertex sets alone."""
    if k < 1:
        raise DomainError(f"k must be positive, got {k}")
    index = _vertex_index(toast)
    closed = {t.id: t.vertices | neighborhood(graph, t.vertices, k) for t in toast.tiles}
    for t in toast.tiles:
        touching = set()
        for v in closed[t.id]:
            touching.update(index.get(v, ()))
        touching.discard(t.id)
        for other in touching:
            L = toast.tile(other).vertices
            if closed[t.id] <= L or closed[other] <= t.vertices:
                continue
            return False
    return True


def ktoast_implies_connected(graph: Graph, toast: Toast) -> bool:
    """Property 3 on a hole-free 3-toast (expected to always hold)."""
    if not is_k_toast(graph, toast, 3):
        raise DomainError("toast is not a 3-toast")
    whole = {frozenset(c) for c in graph.components()}
    for t in toast.tiles:
        if t.vertices in whole:
            continue
        if not graph.is_connected(t.vertices) or not is_hole_free(graph, t.vertices):
            raise DomainError(f"tile {t.id} is not a connected hole-free set")
    return 3 not in validate_toast(graph, toast).properties()


def _split(rng: random.Random, total: int, parts: int) -> list[int]:
    """Random composition of ``total`` into ``parts`` non-negative integers."""
    cuts = sorted(rng.randint(0, total) for _ in range(parts - 1))
    bounds = [0, *cuts, total]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def _depth(w: int, base: int, factor: int) -> int:
    if factor == 1:
        if w != base:
            raise ParameterError(f"factor 1 needs w == base, got w={w}, base={base}")
        return 1
    d, size = 0, base
    while size < w:
        size *= factor
        d += 1
    if size != w or d < 1:
        raise ParameterError(f"w={w} is not base*factor^d with d >= 1 (base={base}, factor={factor})")
    return d


def _layout_1d(n: int, base: int, factor: int, depth: int, margin: int, rng: random.Random):
    """Nested intervals on the cycle Z_n, top level first.

    Returns one list per level; entries are ``(start, length, parent_index)``.
    Same-level gaps are at least ``margin`` and every child keeps ``margin``
    cells of clearance inside its parent.
    """
    top_cell = base * factor ** (depth - 1)
    top_len = top_cell - margin
    offset = rng.randint(0, margin)
    levels = [[((c * top_cell + offset) % n, top_len, None) for c in range(n // top_cell)]]
    length = top_len
    for _ in range(depth - 1):
        inner = length - 2 * margin - (factor - 1) * margin
        child_len = inner // factor
        if child_len < 1:
            raise ParameterError("tiles do not fit: increase base or decrease margin/depth")
        slack = inner - factor * child_len
        row = []
        for p, (start, _, _) in enumerate(levels[-1]):
            gaps = _split(rng, slack, factor + 1)
            pos = start + margin + gaps[0]
            for c in range(factor):
                row.append((pos % n, child_len, p))
                pos += child_len + margin + gaps[c + 1]
        levels.append(row)
        length = child_len
    return levels


def generate_torus_toast(w: int, h: int, base: int, factor: int, margin: int = 3, seed: int = 0) -> Toast:
    """Seeded hierarchical toast of solid squares on ``torus(w, h)``.

    Level-j tiles are squares, one per cell of side ``base * factor**(j-1)``;
    the root is the whole torus.  Output is a ``margin``-toast.
    """
    if w != h:
        raise ParameterError("generator needs a square torus")
    if margin < 3:
        raise ParameterError("margin must be at least 3")
    if base < margin + 3:
        raise ParameterError("base must be at least margin + 3")
    if factor < 1:
        raise ParameterError("factor must be positive")
    depth = _depth(w, base, factor)
    rng = random.Random(seed)
    xs = _layout_1d(w, base, factor, depth, margin, rng)
    ys = _layout_1d(h, base, factor, depth, margin, rng)

    graph = Graph.torus(w, h)
    tiles = [Tile(0, None, frozenset(graph.vertices))]
    next_id = 1
    prev_ids: dict[tuple[int, int], int] = {}
    for lvl in range(depth):
        ids = {}
        for iy, (y0, ylen, py) in enumerate(ys[lvl]):
            for ix, (x0, xlen, px) in enumerate(xs[lvl]):
                parent = 0 if lvl == 0 else prev_ids[(px, py)]
                verts = frozenset(
                    ((y0 + dy) % h) * w + (x0 + dx) % w for dy in range(ylen) for dx in range(xlen)
                )
                tiles.append(Tile(next_id, parent, verts))
                ids[(ix, iy)] = next_id
                next_id += 1
        prev_ids = ids
    return Toast(graph, tiles)


def single_root_toast(graph: Graph) -> Toast:
    """One tile per connected component containing an edge."""
    tiles = []
    for comp in graph.components():
        if len(comp) > 1:
            tiles.append(Tile(len(tiles), None, comp))
    return Toast(graph, tiles)
