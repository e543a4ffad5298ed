"""JSON file formats.

Rationals are written as reduced ``"p/q"`` strings (integers without
``/q``), edges as ``"u-v"`` keys with ``u < v``.
"""

from __future__ import annotations

import json
import os
import re
import tempfile

from .equidecomp import Equidecomposition, Piece
from .errors import DomainError, FormatError
from .graph import Flow, FlowProblem, Graph
from .rationals import parse_rational
from .toast import Tile, Toast


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from None


def dumps(data) -> str:
    return json.dumps(data, separators=(",", ":")) + "\n"


def write_atomic(path, text: str):
    """Write via a temp file in the target directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, data):
    write_atomic(path, dumps(data))


def _int(value, what):
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{what}: expected an integer, got {value!r}")
    return value


_EDGE_KEY = re.compile(r"^(-?[0-9]+)-(-?[0-9]+)$")


def _edge_key(key: str):
    m = _EDGE_KEY.match(key)
    if not m:
        raise FormatError(f"malformed edge key {key!r}")
    u, v = int(m.group(1)), int(m.group(2))
    if not u < v:
        raise FormatError(f"edge key {key!r} is not in canonical order u < v")
    return u, v


def graph_to_json(graph: Graph) -> dict:
    if graph.shape and graph.shape[0] == "torus":
        return {"torus": [graph.shape[1], graph.shape[2]]}
    return {"vertices": list(graph.vertices), "edges": [list(e) for e in graph.edges]}


def graph_from_json(data) -> Graph:
    if not isinstance(data, dict):
        raise FormatError("graph file must hold a JSON object")
    try:
        if "torus" in data:
            w, h = data["torus"]
            return Graph.torus(_int(w, "torus width"), _int(h, "torus height"))
        verts = [_int(v, "vertex") for v in data["vertices"]]
        edges = []
        for e in data["edges"]:
            if not isinstance(e, list) or len(e) != 2:
                raise FormatError(f"malformed edge {e!r}")
            edges.append((_int(e[0], "edge endpoint"), _int(e[1], "edge endpoint")))
        return Graph(verts, edges)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed graph: {exc}") from None


def flow_to_json(flow: Flow) -> dict:
    return {"flow": {f"{u}-{v}": str(q) for (u, v), q in flow.items()}}


def flow_from_json(graph: Graph, data) -> Flow:
    if not isinstance(data, dict) or not isinstance(data.get("flow"), dict):
        raise FormatError('flow file must look like {"flow": {"u-v": "p/q", ...}}')
    values = {}
    for key, text in data["flow"].items():
        e = _edge_key(key)
        if e not in graph.edge_set:
            raise FormatError(f"flow key {key!r} is not an edge of the graph")
        values[e] = parse_rational(text)
    missing = [e for e in graph.edges if e not in values]
    if missing:
        raise FormatError(f"flow file has no value for edge {missing[0][0]}-{missing[0][1]}")
    return Flow(graph, values)


def demand_to_json(demand) -> dict:
    return {"demand": {str(v): d for v, d in sorted(demand.items()) if d}}


def demand_from_json(data) -> dict:
    if not isinstance(data, dict) or not isinstance(data.get("demand"), dict):
        raise FormatError('demand file must look like {"demand": {"v": int, ...}}')
    out = {}
    for key, d in data["demand"].items():
        try:
            v = int(key)
        except ValueError:
            raise FormatError(f"malformed vertex key {key!r}") from None
        out[v] = _int(d, f"demand of {key}")
    return out


def capacity_to_json(capacity) -> dict:
    return {"capacity": {f"{u}-{v}": c for (u, v), c in sorted(capacity.items())}}


def capacity_from_json(graph: Graph, data) -> dict:
    """``{"capacity": {"u-v": c}, "default": c}``; ``default`` fills missing edges."""
    if not isinstance(data, dict) or not isinstance(data.get("capacity", {}), dict):
        raise FormatError('capacity file must look like {"capacity": {"u-v": int}, "default": int}')
    out = {}
    for key, c in data.get("capacity", {}).items():
        out[_edge_key(key)] = _int(c, f"capacity of {key}")
    if "default" in data:
        default = _int(data["default"], "default capacity")
        for e in graph.edges:
            out.setdefault(e, default)
    return out


def problem_from_files(graph: Graph, demand_data, capacity_data=None) -> FlowProblem:
    demand = demand_from_json(demand_data)
    capacity = capacity_from_json(graph, capacity_data) if capacity_data is not None else None
    try:
        return FlowProblem(graph, demand, capacity)
    except DomainError as exc:
        raise FormatError(str(exc)) from None


def toast_to_json(toast: Toast) -> dict:
    return {
        "tiles": [
            {"id": t.id, "parent": t.parent, "vertices": sorted(t.vertices)} for t in toast.tiles
        ]
    }


def toast_from_json(graph: Graph, data) -> Toast:
    if not isinstance(data, dict) or not isinstance(data.get("tiles"), list):
        raise FormatError('toast file must look like {"tiles": [...]}')
    tiles = []
    for i, rec in enumerate(data["tiles"]):
        try:
            parent = rec["parent"]
            tiles.append(Tile(
                _int(rec["id"], f"tile #{i} id"),
                None if parent is None else _int(parent, f"tile #{i} parent"),
                frozenset(_int(v, f"tile #{i} vertex") for v in rec["vertices"]),
            ))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"tile record #{i} is malformed: {exc}") from None
    return Toast(graph, tiles)


def vertex_set_to_json(vertices) -> dict:
    return {"vertices": sorted(vertices)}


def vertex_set_from_json(data) -> frozenset:
    if not isinstance(data, dict) or not isinstance(data.get("vertices"), list):
        raise FormatError('vertex-set file must look like {"vertices": [...]}')
    return frozenset(_int(v, "vertex") for v in data["vertices"])


def pieces_to_json(eq: Equidecomposition) -> dict:
    return {"pieces": [{"gamma": list(p.gamma), "vertices": sorted(p.vertices)} for p in eq.pieces]}


def pieces_from_json(data) -> Equidecomposition:
    if not isinstance(data, dict) or not isinstance(data.get("pieces"), list):
        raise FormatError('pieces file must look like {"pieces": [...]}')
    pieces = []
    for i, rec in enumerate(data["pieces"]):
        try:
            a, b = rec["gamma"]
            pieces.append(Piece(
                (_int(a, "gamma"), _int(b, "gamma")),
                frozenset(_int(v, "vertex") for v in rec["vertices"]),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"piece #{i} is malformed: {exc}") from None
    return Equidecomposition(tuple(pieces))


def trace_to_json(trace) -> list:
    return trace.to_json()


def trace_steps_from_json(data) -> list:
    from .rounding import StepRecord

    if not isinstance(data, list):
        raise FormatError("trace file must hold a list of step records")
    steps = []
    for i, rec in enumerate(data):
        try:
            steps.append(StepRecord(
                rec["stage"], rec["level"], rec["tile"], rec["step"],
                tuple(rec["cycle"]), parse_rational(rec["delta"]), rec["root_pass"],
            ))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"trace record #{i} is malformed: {exc}") from None
    return steps

