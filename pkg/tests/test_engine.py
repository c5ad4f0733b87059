import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbdgame.engine import (
    Player,
    Position,
    apply_move,
    dominator_won,
    initial_position,
    legal_moves,
    minimize,
    residual,
    staller_won,
)
from mbdgame.errors import DecidedPosition, IllegalMove
from mbdgame.graph import bits, complete_bipartite, generate, mask_of, path, star


def test_initial_position():
    pos = initial_position(path(1), Player.DOMINATOR)
    assert (pos.dominator_set, pos.staller_set, pos.to_move) == (0, 0, Player.DOMINATOR)
    assert initial_position(path(3), Player.STALLER).to_move is Player.STALLER


def test_to_move_alternates():
    g = path(4)
    pos = initial_position(g)
    seen = []
    for v in range(3):
        seen.append(pos.to_move)
        pos = apply_move(g, pos, v)
    assert seen == [Player.DOMINATOR, Player.STALLER, Player.DOMINATOR]


def test_legal_moves_examples():
    g = path(3)
    pos = initial_position(g)
    assert legal_moves(g, pos) == 0b111
    pos = apply_move(g, apply_move(g, pos, 0), 2)
    # D={0}, S={2}: neither player has won yet
    assert legal_moves(g, pos) == 0b010
    g = generate("p3 x p4")
    assert legal_moves(g, initial_position(g)).bit_count() == 12


def test_legal_moves_on_decided_position():
    g = star(3)
    pos = apply_move(g, initial_position(g), 0)
    with pytest.raises(DecidedPosition):
        legal_moves(g, pos)


def test_apply_move_examples():
    g = star(4)
    pos = apply_move(g, initial_position(g), 0)
    assert pos.dominator_set == 1 and pos.staller_set == 0
    a = apply_move(g, apply_move(g, initial_position(g), 1), 2)
    b = apply_move(g, apply_move(g, Position(0, 0b100, Player.DOMINATOR), 1), 3)
    assert a.dominator_set == b.dominator_set == 0b10
    assert a.claimed.bit_count() == 2
    with pytest.raises(IllegalMove):
        apply_move(g, a, 1)
    with pytest.raises(IllegalMove):
        apply_move(g, a, 7)


def test_overlapping_position_rejected():
    with pytest.raises(IllegalMove):
        Position(1, 1, Player.DOMINATOR)


def test_dominator_won_examples():
    assert dominator_won(star(4), Position(1, 0, Player.STALLER))
    assert not dominator_won(path(3), Position(0, 0, Player.DOMINATOR))
    k = complete_bipartite(3, 4)
    assert dominator_won(k, Position(mask_of([0, 3]), 0, Player.STALLER))


def test_staller_won_examples():
    g = star(3)
    assert staller_won(g, Position(0, 0b11, Player.DOMINATOR))
    assert not staller_won(g, Position(0, 0, Player.DOMINATOR))
    # vertex 0 of K_{1,3} is adjacent to all; Staller owning everything else never wins
    assert not staller_won(g, Position(0, g.full & ~1, Player.DOMINATOR))


def test_residual_examples():
    g = star(3)
    assert residual(g, Position(1, 0, Player.STALLER)).live_sets == ()
    assert residual(path(1), initial_position(path(1))).live_sets == (1,)
    r = residual(star(2), initial_position(star(2)))
    assert r.live_sets == (0b011, 0b101)


def test_minimize_is_canonical():
    assert minimize([0b111, 0b011, 0b011, 0b100]) == (0b100, 0b011)
    assert minimize([0b100, 0b011]) == minimize([0b011, 0b100, 0b111])


@st.composite
def play(draw):
    n = draw(st.integers(1, 8))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    from mbdgame.graph import Graph

    g = Graph.from_edges(n, edges)
    order = draw(st.permutations(range(n)))
    stop = draw(st.integers(0, n))
    first = draw(st.sampled_from(list(Player)))
    return g, order[:stop], first


@given(play())
@settings(max_examples=300, deadline=None)
def test_residual_invariants_along_random_play(case):
    g, moves, first = case
    pos = initial_position(g, first)
    for v in moves:
        d_won, s_won = dominator_won(g, pos), staller_won(g, pos)
        assert not (d_won and s_won)
        if d_won or s_won:
            break
        pos = apply_move(g, pos, v)
    d, s = pos.dominator_set, pos.staller_set
    assert abs(d.bit_count() - s.bit_count()) <= 1
    res = residual(g, pos)
    sets = res.live_sets
    assert all(not x & (d | s) for x in sets)
    for a in sets:
        for b in sets:
            assert a == b or a & b != a
    assert res.dominator_won == dominator_won(g, pos)
    raw = residual(g, pos, prune=False).live_sets
    assert (0 in raw) == staller_won(g, pos)
    if res.dominator_won is False and not staller_won(g, pos):
        assert 0 not in sets
    if pos.claimed == g.full:
        assert dominator_won(g, pos) != staller_won(g, pos)


def test_full_board_has_exactly_one_winner():
    g = generate("p2 x p3")
    for smask in range(1 << g.order):
        if abs(smask.bit_count() * 2 - g.order) > 1:
            continue
        pos = Position(g.full & ~smask, smask, Player.DOMINATOR)
        assert dominator_won(g, pos) != staller_won(g, pos), list(bits(smask))
