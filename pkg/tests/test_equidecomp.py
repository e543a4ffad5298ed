import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from toastflow.errors import DomainError, EquidecompositionInfeasible
from toastflow.graph import Flow, is_folner, verify_f_flow
from toastflow.equidecomp import (
    Equidecomposition,
    Piece,
    TorusAction,
    block_tiling,
    check_uniform,
    demand_problem,
    equidecompose,
    flow_from_bijection,
    folner_tiling,
    fractional_transport_flow,
    pieces_from_pairs,
    random_uniform_pair,
    transport_bijection,
    verify_equidecomposition,
)
from toastflow.rounding import round_flow
from toastflow.toast import generate_torus_toast

T16 = TorusAction(16, 16)


def checkerboard(action):
    w = action.width
    return frozenset(v for v in range(w * action.height) if (v % w + v // w) % 2 == 0)


def everything(action):
    return frozenset(range(action.width * action.height))


# -- actions ---------------------------------------------------------------------

@given(st.integers(-40, 40), st.integers(-40, 40), st.integers(0, 255))
def test_path_reaches_image(a, b, x):
    path = T16.path(x, (a, b))
    assert path[-1] == T16.act((a, b), x)
    assert len(path) - 1 == T16.word_length((a, b)) <= 16
    assert T16.displacement(x, path[-1]) == T16.normalize((a, b))


# -- uniformity and tilings ---------------------------------------------------------

def test_check_uniform_examples():
    tiling = block_tiling(T16, 4, Fraction(1, 4))
    assert check_uniform(T16, everything(T16), tiling, 1).ok
    empty = check_uniform(T16, set(), tiling, Fraction(1, 10))
    assert len(empty.problems) == len(tiling.tiles) == 16
    assert check_uniform(T16, checkerboard(T16), tiling, Fraction(1, 4)).ok


def test_folner_tiling_sixteen_half():
    tiling = folner_tiling(T16, Fraction(1, 2))
    assert tiling.side == 8 and len(tiling.tiles) == 4


def test_folner_tiling_returns_least_side():
    assert folner_tiling(TorusAction(32, 32), 1).side == 4
    assert folner_tiling(T16, 2).side == 1
    for s in (4, 8):
        assert is_folner(T16.graph, block_tiling(T16, s, 1).tiles[0], 1)
    assert not is_folner(T16.graph, block_tiling(T16, 2, 1).tiles[0], 1)


def test_tilings_partition():
    tiling = folner_tiling(TorusAction(24, 12), Fraction(1, 2))
    assert sum(map(len, tiling.tiles)) == 24 * 12
    assert len(tiling.tile_of) == 24 * 12


# -- bijection flows -----------------------------------------------------------------

def test_identity_piece_has_zero_flow():
    A = checkerboard(T16)
    flow, _ = flow_from_bijection(T16, Equidecomposition((Piece((0, 0), A),)))
    assert flow == Flow.zero(T16.graph)


def test_checkerboard_shift():
    A = checkerboard(T16)
    B = everything(T16) - A
    pieces = Equidecomposition((Piece((1, 0), A),))
    flow, k = flow_from_bijection(T16, pieces)
    assert verify_f_flow(flow, demand_problem(T16, A, B)).ok
    assert all(abs(q) <= k for _, q in flow.items())
    assert verify_equidecomposition(T16, A, B, pieces).ok


def column_class_pieces(action, A, rng):
    """Four pieces by x mod 4, each shifted vertically: images stay disjoint."""
    w = action.width
    return Equidecomposition(tuple(
        Piece((0, rng.randint(-6, 6)), frozenset(v for v in A if v % w % 4 == i)) for i in range(4)
    ))


@pytest.mark.parametrize("seed", range(5))
def test_random_piecewise_translation(seed):
    rng = random.Random(seed)
    A = frozenset(v for v in range(256) if rng.random() < 0.4)
    pieces = column_class_pieces(T16, A, rng)
    B = frozenset(pieces.mapping(T16).values())
    assert verify_equidecomposition(T16, A, B, pieces).ok
    flow, k = flow_from_bijection(T16, pieces)
    assert verify_f_flow(flow, demand_problem(T16, A, B)).ok
    assert flow.max_abs() <= k


def test_overlapping_pieces_are_refused():
    with pytest.raises(DomainError):
        flow_from_bijection(T16, Equidecomposition((Piece((0, 0), {1, 2}), Piece((1, 0), {2}))))


# -- verification ---------------------------------------------------------------------

def test_verify_examples():
    A = frozenset({3, 4, 5})
    assert verify_equidecomposition(T16, A, A, Equidecomposition((Piece((0, 0), A),))).ok
    bad = Equidecomposition((Piece((0, 0), frozenset({3, 4})), Piece((1, 0), frozenset({4, 5}))))
    report = verify_equidecomposition(T16, A, A, bad)
    assert any("duplicated source vertex 4" in p for p in report.problems)


def test_pieces_from_pairs_groups_by_translation():
    pairs = [(0, 1), (5, 6), (7, 23)]
    pieces = pieces_from_pairs(T16, pairs)
    assert [p.gamma for p in pieces.pieces] == [(0, 1), (1, 0)]
    assert pieces.mapping(T16) == dict(pairs)


# -- equidecompose -----------------------------------------------------------------------

def test_equal_sets_zero_flow():
    A = frozenset(random.Random(1).sample(range(256), 90))
    tiling = block_tiling(T16, 4, Fraction(1, 4))
    pieces = equidecompose(T16, A, A, tiling, Flow.zero(T16.graph))
    assert verify_equidecomposition(T16, A, A, pieces).ok
    m = pieces.mapping(T16)
    assert all(tiling.tile_of[x] == tiling.tile_of[y] for x, y in m.items())


def test_checkerboard_to_complement():
    A = checkerboard(T16)
    B = everything(T16) - A
    psi, _ = flow_from_bijection(T16, Equidecomposition((Piece((1, 0), A),)))
    tiling = block_tiling(T16, 4, Fraction(1, 4))
    pieces = equidecompose(T16, A, B, tiling, psi)
    assert verify_equidecomposition(T16, A, B, pieces).ok


def test_overloaded_tile_is_reported():
    A, B = frozenset({0}), frozenset({8 + 8 * 16})
    psi, _ = flow_from_bijection(T16, Equidecomposition((Piece((8, 8), A),)))
    tiling = block_tiling(T16, 4, Fraction(1, 4))
    with pytest.raises(EquidecompositionInfeasible) as info:
        equidecompose(T16, A, B, tiling, psi)
    assert info.value.tile is not None


def test_equidecompose_rejects_fractional_flow():
    A, B = frozenset({0}), frozenset({1})
    psi = Flow(T16.graph, {(0, 1): Fraction(1, 2)})
    with pytest.raises(DomainError):
        equidecompose(T16, A, B, block_tiling(T16, 4, 1), psi)


def test_transport_bijection_is_valid():
    A, B = random_uniform_pair(T16, Fraction(1, 2), 3)
    assert len(A) == len(B)
    assert verify_equidecomposition(T16, A, B, transport_bijection(T16, A, B, seed=1)).ok


@pytest.mark.parametrize("seed", range(3))
def test_full_pipeline_on_32(seed):
    action = TorusAction(32, 32)
    A, B = random_uniform_pair(action, Fraction(1, 2), seed)
    tiling = block_tiling(action, 8, Fraction(1, 4))
    assert check_uniform(action, A, tiling, Fraction(1, 4)).ok
    phi = fractional_transport_flow(action, A, B, seed=seed)
    assert any(q.denominator != 1 for _, q in phi.items())
    toast = generate_torus_toast(32, 32, 8, 2, 3, seed)
    psi, _ = round_flow(demand_problem(action, A, B), toast, phi)
    pieces = equidecompose(action, A, B, tiling, psi)
    assert verify_equidecomposition(action, A, B, pieces).ok
    assert 0 < len(pieces) < len(A)
