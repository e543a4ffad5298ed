"""Rounding rational f-flows to integral f-flows along a connected toast.

Stage 1 (:func:`dyadic_round`) makes every value dyadic by adding small
circuits, stage 2 (:func:`integral_round`) clears one binary digit at a time
by adding ``2**-l`` along cycles of a parity-corrected graph.  Both stages
sweep the toast bottom-up: processing a tile fixes the edges induced in its
children, and a final root pass per component fixes what is left.

Stage 1 moves each edge by less than 1 in total and stage 2 by less than 2,
so :func:`round_flow` returns an integral flow within distance 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DomainError, RoundingFailure
from .graph import Edge, Flow, FlowProblem, divergence, verify_f_flow
from .parity import ParityTree, cycle_decompose, cycle_edges, find_cycle_through
from .rationals import denominator_exponent, is_dyadic
from .toast import Toast, free_region, stratify, validate_toast


@dataclass(frozen=True)
class StepRecord:
    stage: int
    level: int
    tile: int
    step: int
    cycle: tuple
    delta: Fraction
    root_pass: bool = False

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "level": self.level,
            "tile": self.tile,
            "step": self.step,
            "root_pass": self.root_pass,
            "delta": str(self.delta),
            "cycle": list(self.cycle),
        }


@dataclass
class RoundingTrace:
    """Step log plus per-edge perturbation bookkeeping.

    ``stage1_perturbation[e]`` sums ``|delta|`` over stage-1 steps touching
    ``e``; ``stage2_perturbation[e]`` maps a phase label (``"tile:<id>"`` or
    ``"root:<id>"``) to the ``|2**-l|`` sum contributed in that phase.
    """

    steps: list = field(default_factory=list)
    stage1_perturbation: dict = field(default_factory=dict)
    stage2_perturbation: dict = field(default_factory=dict)
    dyadic: Optional[Flow] = None

    def stage1_max(self) -> Fraction:
        return max(self.stage1_perturbation.values(), default=Fraction(0))

    def stage2_totals(self) -> dict:
        return {e: sum(parts.values(), Fraction(0)) for e, parts in self.stage2_perturbation.items()}

    def stage2_max(self) -> Fraction:
        return max(self.stage2_totals().values(), default=Fraction(0))

    def to_json(self) -> list:
        return [s.to_json() for s in self.steps]


def _add_cycle(values: dict, cycle, delta: Fraction) -> list[Edge]:
    touched = []
    for a, b in cycle_edges(cycle):
        if a < b:
            values[(a, b)] += delta
            touched.append((a, b))
        else:
            values[(b, a)] -= delta
            touched.append((b, a))
    return touched


def _check_cycle_divergence(problem: FlowProblem, values: dict, cycle, tile_id):
    flow = Flow.__new__(Flow)
    flow.graph = problem.graph
    flow._values = values
    for x in set(cycle):
        if divergence(flow, x) != problem.f(x):
            raise RoundingFailure(f"divergence broken at {x}", tile=tile_id, flow=dict(values))


def _check_inputs(problem: FlowProblem, toast: Toast, phi: Flow):
    if phi.graph != problem.graph or toast.graph != problem.graph:
        raise DomainError("problem, toast and flow must share one graph")
    report = verify_f_flow(phi, problem)
    if not report.ok:
        raise DomainError(f"input is not an f-flow for the problem:\n{report}")
    toast_report = validate_toast(problem.graph, toast)
    if not toast_report.ok:
        raise DomainError(f"invalid toast:\n{toast_report}")


def dyadic_correction(value: Fraction, n: int) -> Fraction:
    """Smallest-magnitude ``delta`` making ``value + delta`` a multiple of
    ``2**-m``, with ``m`` minimal subject to ``|delta| < 2**-n``."""
    bound = Fraction(1, 1 << n)

    def delta_at(m):
        scale = 1 << m
        return Fraction(round(value * scale), scale) - value

    # distance to the 2^-m lattice shrinks as m grows, and m = n - 1 always works
    lo, hi = 0, max(n - 1, 0)
    while lo < hi:
        mid = (lo + hi) // 2
        if abs(delta_at(mid)) < bound:
            hi = mid
        else:
            lo = mid + 1
    delta = delta_at(lo)
    assert abs(delta) < bound
    return delta


class _Context:
    def __init__(self, problem: FlowProblem, toast: Toast, phi: Flow, verify_steps: bool):
        self.problem = problem
        self.graph = problem.graph
        self.toast = toast
        self.levels = stratify(toast, check=False)
        self.values = dict(phi.values)
        self.verify_steps = verify_steps
        self.trace = RoundingTrace()

    def tile_parts(self, tile_id):
        """(child-induced edges in child-id order, free region, edges of K touching F)."""
        g = self.graph
        K = self.toast.tile(tile_id).vertices
        child_edges = []
        for c in self.toast.children(tile_id):
            child_edges.extend(g.induced_edges(self.toast.tile(c).vertices))
        F = free_region(self.toast, tile_id)
        free_edges = [(u, v) for (u, v) in g.induced_edges(K) if u in F or v in F]
        return child_edges, F, free_edges

    def flow(self) -> Flow:
        return Flow(self.graph, self.values)


def _stage1(ctx: _Context) -> int:
    values, trace, g = ctx.values, ctx.trace, ctx.graph
    pert = trace.stage1_perturbation
    n = 1

    def step(tile_id, level, e, allowed, child_set, root_pass):
        nonlocal n
        cycle = find_cycle_through(g, e, allowed)
        if cycle is None:
            raise RoundingFailure(
                f"no admissible cycle through {e} in tile {tile_id}",
                tile=tile_id, edge=e, flow=dict(values),
            )
        delta = dyadic_correction(values[e], n)
        for edge in _add_cycle(values, cycle, delta):
            pert[edge] = pert.get(edge, Fraction(0)) + abs(delta)
            if (root_pass or edge in child_set) and is_dyadic(values[edge]):
                allowed.discard(edge)
        if ctx.verify_steps:
            _check_cycle_divergence(ctx.problem, values, cycle, tile_id)
        trace.steps.append(StepRecord(1, level, tile_id, n, cycle, delta, root_pass))
        n += 1

    for level, tiles in enumerate(ctx.levels.levels, start=1):
        for tile_id in tiles:
            if not ctx.toast.children(tile_id):
                continue
            child_edges, _, free_edges = ctx.tile_parts(tile_id)
            child_set = set(child_edges)
            allowed = {e for e in child_edges if not is_dyadic(values[e])} | set(free_edges)
            # dyadic child edges are never touched again, so one ordered sweep suffices
            for e in child_edges:
                if not is_dyadic(values[e]):
                    step(tile_id, level, e, allowed, child_set, False)
    for root in ctx.toast.roots():
        level = ctx.levels.level_of(root)
        edges = g.induced_edges(ctx.toast.tile(root).vertices)
        allowed = {e for e in edges if not is_dyadic(values[e])}
        for e in edges:
            if not is_dyadic(values[e]):
                step(root, level, e, allowed, None, True)
    return n - 1


def _exponent_buckets(values, edges) -> dict[int, set]:
    buckets: dict[int, set] = {}
    for e in edges:
        l = denominator_exponent(values[e])
        if l:
            buckets.setdefault(l, set()).add(e)
    return buckets


def _stage2_phase(ctx: _Context, tile_id, level, label, targets, F, tree, root_pass, counter):
    """Clear binary digits on ``targets`` from the top exponent down.

    Each iteration adds ``2**-l`` along cycles covering every target with
    exponent exactly ``l``; parity at free-region vertices is repaired with
    a parity subgraph of the free region.
    """
    values, trace, g = ctx.values, ctx.trace, ctx.graph
    buckets = _exponent_buckets(values, targets)
    last = None
    while buckets:
        l = max(buckets)
        if last is not None and l >= last:
            raise RoundingFailure(
                f"denominator exponent did not drop below {last} in tile {tile_id}",
                tile=tile_id, flow=dict(values),
            )
        last = l
        top = buckets.pop(l)
        union = set(top)
        if not root_pass:
            odd = set()
            for a, b in top:
                for x in (a, b):
                    if x in F:
                        odd ^= {x}
            union |= tree.subgraph(odd)
        deg: dict[int, int] = {}
        for a, b in union:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        bad = sorted(x for x, d in deg.items() if d % 2)
        if bad:
            raise RoundingFailure(
                f"union graph has odd degree at {bad[:5]} (tile {tile_id}, l={l})",
                tile=tile_id, flow=dict(values),
            )
        delta = Fraction(1, 1 << l)
        for cycle in cycle_decompose(g, union):
            for edge in _add_cycle(values, cycle, delta):
                parts = trace.stage2_perturbation.setdefault(edge, {})
                parts[label] = parts.get(label, Fraction(0)) + delta
                if edge in top:
                    nl = denominator_exponent(values[edge])
                    if nl:
                        buckets.setdefault(nl, set()).add(edge)
            if ctx.verify_steps:
                _check_cycle_divergence(ctx.problem, values, cycle, tile_id)
            trace.steps.append(StepRecord(2, level, tile_id, counter, cycle, delta, root_pass))
            counter += 1
    return counter


def _stage2(ctx: _Context):
    values, g = ctx.values, ctx.graph
    counter = 1
    for level, tiles in enumerate(ctx.levels.levels, start=1):
        for tile_id in tiles:
            children = ctx.toast.children(tile_id)
            if not children:
                continue
            child_vertices = set()
            for c in children:
                child_vertices |= ctx.toast.tile(c).vertices
            K = ctx.toast.tile(tile_id).vertices
            targets = [e for e in g.induced_edges(K) if e[0] in child_vertices or e[1] in child_vertices]
            F = free_region(ctx.toast, tile_id)
            tree = ParityTree(g, F)
            counter = _stage2_phase(ctx, tile_id, level, f"tile:{tile_id}", targets, F, tree, False, counter)
            leftover = [e for e in targets if values[e].denominator != 1]
            if leftover:
                raise RoundingFailure(f"tile {tile_id} left non-integral edges {leftover[:3]}", tile=tile_id)
    for root in ctx.toast.roots():
        level = ctx.levels.level_of(root)
        edges = g.induced_edges(ctx.toast.tile(root).vertices)
        counter = _stage2_phase(ctx, root, level, f"root:{root}", edges, None, None, True, counter)


def dyadic_round(problem: FlowProblem, toast: Toast, phi: Flow, *, verify_steps: bool = False):
    """Return ``(psi, trace)`` with ``psi`` dyadic, same divergence, ``|psi - phi| < 1``."""
    _check_inputs(problem, toast, phi)
    ctx = _Context(problem, toast, phi, verify_steps)
    _stage1(ctx)
    psi = ctx.flow()
    bad = [e for e, q in psi.items() if not is_dyadic(q)]
    if bad:
        raise RoundingFailure(f"stage 1 left non-dyadic edges {bad[:3]}", flow=dict(ctx.values))
    ctx.trace.dyadic = psi
    return psi, ctx.trace


def integral_round(problem: FlowProblem, toast: Toast, phi: Flow, *, verify_steps: bool = False):
    """Return ``(psi, trace)`` with ``psi`` integral, same divergence, ``|psi - phi| < 2``."""
    _check_inputs(problem, toast, phi)
    bad = [e for e, q in phi.items() if not is_dyadic(q)]
    if bad:
        raise DomainError(f"integral_round needs a dyadic flow; {bad[0]} has value {phi[bad[0]]}")
    ctx = _Context(problem, toast, phi, verify_steps)
    _stage2(ctx)
    return ctx.flow(), ctx.trace


def round_flow(problem: FlowProblem, toast: Toast, phi: Flow, *, verify_steps: bool = False):
    """Integral f-flow within sup-distance 3 of ``phi`` (both stages chained)."""
    _check_inputs(problem, toast, phi)
    ctx = _Context(problem, toast, phi, verify_steps)
    _stage1(ctx)
    ctx.trace.dyadic = ctx.flow()
    if any(not is_dyadic(q) for q in ctx.values.values()):
        raise RoundingFailure("stage 1 left non-dyadic edges", flow=dict(ctx.values))
    _stage2(ctx)
    psi = ctx.flow()
    if any(q.denominator != 1 for q in ctx.values.values()):
        raise RoundingFailure("stage 2 left non-integral edges", flow=dict(ctx.values))
    if problem.capacity is not None:
        over = [e for e, q in psi.items() if abs(q) > problem.capacity[e] + 2]
        if over:
            raise RoundingFailure(f"capacity slack exceeded on {over[:3]}", edge=over[0], flow=dict(ctx.values))
    return psi, ctx.trace


def replay(phi: Flow, steps) -> Flow:
    """Re-apply logged steps to ``phi`` (for external verification of a trace)."""
    values = dict(phi.values)
    for s in steps:
        _add_cycle(values, tuple(s.cycle), Fraction(s.delta))
    return Flow(phi.graph, values)


def parity_counts(flow: Flow) -> dict[int, dict[int, int]]:
    """Per vertex: exponent ``l >= 1`` -> number of incident edges whose value
    has denominator exactly ``2**l``."""
    out: dict[int, dict[int, int]] = {v: {} for v in flow.graph.vertices}
    for (u, v), q in flow.items():
        l = denominator_exponent(q)
        if l:
            for x in (u, v):
                out[x][l] = out[x].get(l, 0) + 1
    return out
