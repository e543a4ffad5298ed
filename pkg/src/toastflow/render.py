"""Static SVG and DOT output for pieces, toasts and flows."""

from __future__ import annotations

import colorsys
from typing import Optional

from .equidecomp import Equidecomposition, TorusAction
from .graph import Flow, Graph
from .toast import Toast, stratify

CELL = 12


def _color(i: int) -> str:
    # golden-ratio hue walk keeps neighbouring indices distinguishable
    r, g, b = colorsys.hsv_to_rgb((i * 0.6180339887) % 1.0, 0.55, 0.95)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def _svg(width: int, height: int, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width * CELL}" '
        f'height="{height * CELL}" viewBox="0 0 {width * CELL} {height * CELL}">'
    )
    return "\n".join([head, f'<rect width="100%" height="100%" fill="#ffffff"/>', *body, "</svg>"]) + "\n"


def _cell(x, y, fill, title: Optional[str] = None) -> str:
    rect = f'<rect x="{x * CELL}" y="{y * CELL}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#dddddd"'
    if title is None:
        return rect + "/>"
    return rect + f"><title>{title}</title></rect>"


def pieces_svg(action: TorusAction, pieces: Equidecomposition) -> str:
    """Colour each source vertex by its piece; images get a small dot."""
    w = action.width
    body = []
    for i, p in enumerate(pieces.pieces):
        color = _color(i)
        for x in sorted(p.vertices):
            body.append(_cell(x % w, x // w, color, f"piece {i} gamma={tuple(p.gamma)}"))
    for i, p in enumerate(pieces.pieces):
        for x in sorted(p.vertices):
            y = action.act(p.gamma, x)
            cx, cy = (y % w + 0.5) * CELL, (y // w + 0.5) * CELL
            body.append(f'<circle cx="{cx}" cy="{cy}" r="{CELL / 5}" fill="{_color(i)}" stroke="#333333"/>')
    return _svg(action.width, action.height, body)


def toast_svg(graph: Graph, toast: Toast) -> str:
    """Free regions coloured by level (darker = deeper in the hierarchy)."""
    if graph.shape is None:
        raise ValueError("SVG rendering needs a torus or grid graph")
    _, w, h = graph.shape
    levels = stratify(toast, check=False)
    owner: dict[int, int] = {}
    for k, level in enumerate(levels.levels, start=1):
        for tid in level:
            for v in toast.tile(tid).vertices:
                owner.setdefault(v, k)
    depth = max(len(levels), 1)
    body = []
    for v in graph.vertices:
        k = owner.get(v)
        if k is None:
            fill = "#ffffff"
        else:
            shade = int(235 - 170 * (depth - k) / max(depth - 1, 1))
            fill = f"#{shade:02x}{shade:02x}ff"
        x, y = graph.coords(v)
        body.append(_cell(x, y, fill))
    return _svg(w, h, body)


def graph_dot(graph: Graph, toast: Optional[Toast] = None, flow: Optional[Flow] = None) -> str:
    lines = ["graph G {", "  node [shape=circle, fontsize=8];"]
    if toast is not None:
        def emit(tid, indent):
            t = toast.tile(tid)
            lines.append(f"{indent}subgraph cluster_{tid} {{")
            lines.append(f'{indent}  label="tile {tid}";')
            inner = set()
            for c in toast.children(tid):
                inner |= toast.tile(c).vertices
            for v in sorted(t.vertices - inner):
                lines.append(f"{indent}  {v};")
            for c in toast.children(tid):
                emit(c, indent + "  ")
            lines.append(f"{indent}}}")

        for r in toast.roots():
            emit(r, "  ")
    else:
        for v in graph.vertices:
            lines.append(f"  {v};")
    for u, v in graph.edges:
        if flow is not None and flow[u, v]:
            lines.append(f'  {u} -- {v} [label="{flow[u, v]}"];')
        else:
            lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
