import json
import math
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbdgame.engine import Outcome, Player
from mbdgame.errors import IncompleteCertificate, NotAWinner, ResourceLimit
from mbdgame.graph import Graph, cartesian_product, generate, path, star
from mbdgame.solver import (
    INF,
    Budget,
    GameValueReport,
    StrategyCertificate,
    brute_force_report,
    brute_force_values,
    extract_certificate,
    first_move_symmetry_classes,
    solve,
    solve_outcome,
    staller_value_bounded,
    verify_certificate,
)


def values(report):
    return (report.outcome, report.gmb, report.gmb_prime, report.gsmb, report.gsmb_prime)


def test_solve_p3xp3():
    r = solve(generate("p3 x p3"))
    assert (r.outcome, r.gmb, r.gmb_prime) == (Outcome.D, 4, 4)
    assert r.gsmb == r.gsmb_prime == INF


def test_solve_k1():
    r = solve(path(1))
    assert values(r) == (Outcome.N, 1, INF, INF, 1)


def test_solve_star_product_3_3():
    r = solve(generate("k1,3 x k1,3"))
    assert (r.outcome, r.gsmb, r.gsmb_prime) == (Outcome.S, 5, 4)


def test_solve_p3xp4():
    r = solve(generate("p3 x p4"))
    assert (r.gmb, r.gmb_prime) == (5, 6)


@pytest.mark.parametrize("spec, expected", [
    ("k1,2", Outcome.N), ("k1,5", Outcome.N), ("k2,2", Outcome.D), ("k3,4", Outcome.D),
    ("k1,2 x k1,3", Outcome.N), ("p2", Outcome.D), ("p3", Outcome.N),
])
def test_solve_outcome_examples(spec, expected):
    assert solve_outcome(generate(spec)) is expected
    assert solve(generate(spec)).outcome is expected


def test_staller_value_bounded_examples():
    assert staller_value_bounded(generate("k1,4 x k1,4"), Player.DOMINATOR, 4) == 4
    assert staller_value_bounded(generate("k1,3 x k1,3"), Player.DOMINATOR, 4) is None
    assert staller_value_bounded(star(3), Player.STALLER, 2) == 2


def test_symmetry_classes():
    g = generate("p3 x p3")
    reps = first_move_symmetry_classes(g)
    assert len(reps) == 3
    kinds = {g.degree(v) for v in reps}
    assert kinds == {2, 3, 4}
    assert len(first_move_symmetry_classes(star(5))) == 2
    assert first_move_symmetry_classes(g, fallback=True) == list(range(9))
    # a tiny automorphism cap forces the trivial partition
    assert len(first_move_symmetry_classes(g, max_automorphisms=2)) == 9


def test_report_trichotomy_enforced():
    with pytest.raises(ValueError):
        GameValueReport(Outcome.D, 3, INF, INF, INF)
    with pytest.raises(ValueError):
        GameValueReport(Outcome.N, 2, 3, INF, 2)


def test_report_json_round_trip():
    r = solve(generate("k1,3"))
    d = json.loads(json.dumps(r.to_dict()))
    back = GameValueReport.from_dict(d)
    assert values(back) == values(r)
    assert back.nodes_explored == r.nodes_explored
    assert d["gmb_prime"] is None


def test_inf_saturates():
    assert INF + 3 == INF and min(INF, 4) == 4 and max(INF, 4) == INF
    assert math.isinf(INF)


def test_node_budget_reports_partial():
    with pytest.raises(ResourceLimit) as info:
        solve(generate("p3 x p4"), Budget(max_nodes=100))
    assert isinstance(info.value.partial, dict)


def test_table_budget_still_exact():
    # evicting half of the table repeatedly must not change any value
    g = generate("p3 x p4")
    r = solve(g, Budget(max_table_entries=500))
    assert (r.gmb, r.gmb_prime) == (5, 6)


def test_thread_determinism():
    for spec in ("p3 x p3", "k1,3 x k1,3", "p2 x p5", "k1,2 x k1,3"):
        g = generate(spec)
        assert values(solve(g, threads=1)) == values(solve(g, threads=4))


def test_symmetry_reduction_sound_small():
    for spec in ("p3 x p3", "k1,3 x k1,3", "k2,3", "p3 x k1,3"):
        g = generate(spec)
        assert values(solve(g)) == values(solve(g, symmetry=False))


# --- brute force comparisons --------------------------------------------------

@st.composite
def small_graphs(draw, max_order=7):
    n = draw(st.integers(1, max_order))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, edges)


@given(small_graphs())
@settings(max_examples=150, deadline=None)
def test_solver_matches_raw_minimax(g):
    assert values(solve(g)) == values(brute_force_report(g))


@given(small_graphs(6))
@settings(max_examples=100, deadline=None)
def test_no_skip_consistency(g):
    gmb, _ = brute_force_values(g, Player.DOMINATOR)
    gmbp, _ = brute_force_values(g, Player.STALLER)
    # Staller passing on her first D-game move never hurts Dominator
    assert brute_force_values(g, Player.DOMINATOR, staller_passes_first=True)[0] <= gmb
    # Dominator passing first turns the D-game into the S-game and vice versa
    assert brute_force_values(g, Player.DOMINATOR, dominator_passes_first=True) == \
        brute_force_values(g, Player.STALLER)
    assert brute_force_values(g, Player.STALLER, staller_passes_first=True) == \
        brute_force_values(g, Player.DOMINATOR)
    # skipping is never an advantage for Dominator
    assert brute_force_values(g, Player.STALLER, dominator_passes_first=True)[0] >= gmbp
    assert gmb <= gmbp


# --- certificates -------------------------------------------------------------

def test_certificate_p3xp3():
    g = generate("p3 x p3")
    cert = extract_certificate(g, "gmb")
    assert cert.claimed_value == 4
    assert verify_certificate(g, cert)


def test_certificate_star_root_move_is_center():
    g = star(4)
    cert = extract_certificate(g, "gmb")
    assert cert.claimed_value == 1
    assert cert.move_table[(0, 0, "D")] == 0


@pytest.mark.parametrize("spec, invariant", [
    ("p3 x p3", "gmb_prime"), ("k1,3 x k1,3", "gsmb"), ("k1,3 x k1,3", "gsmb_prime"),
    ("p3", "gmb"), ("p3", "gsmb_prime"), ("k2,3", "gmb_prime"),
])
def test_certificates_verify(spec, invariant):
    g = generate(spec)
    cert = extract_certificate(g, invariant)
    assert verify_certificate(g, cert)
    again = StrategyCertificate.from_json(json.loads(json.dumps(cert.to_json())))
    assert again == cert


def test_certificate_for_loser_rejected():
    with pytest.raises(NotAWinner):
        extract_certificate(generate("p3 x p3"), "gsmb")


def test_tampered_certificates():
    g = generate("p3 x p3")
    cert = extract_certificate(g, "gmb")
    short = StrategyCertificate(cert.root_player, cert.first, cert.claimed_value - 1,
                                dict(cert.move_table))
    assert verify_certificate(g, short) is False
    table = dict(cert.move_table)
    del table[(0, 0, "D")]
    with pytest.raises(IncompleteCertificate):
        verify_certificate(g, StrategyCertificate(cert.root_player, cert.first,
                                                  cert.claimed_value, table))


# --- star products with a 3-leaf factor --------------------------------------

def staller_wins_within(g: Graph, k: int, staller_first: bool) -> bool:
    """Plain memoized search on raw claim sets, sharing no code with the solver."""
    nbhd = g.closed_nbhd
    n, full = g.order, g.full

    @lru_cache(maxsize=None)
    def win(d, s, sturn, left):
        free = full & ~(d | s)
        if sturn:
            for v in range(n):
                if free >> v & 1 and any(m & (s | 1 << v) == m for m in nbhd):
                    return True
            if left == 1:
                return False
            return any(free >> v & 1 and win(d, s | 1 << v, False, left - 1)
                       for v in range(n))
        for v in range(n):
            if free >> v & 1:
                d2 = d | 1 << v
                dom = 0
                for u in range(n):
                    if d2 >> u & 1:
                        dom |= nbhd[u]
                if dom == full or not win(d2, s, True, left):
                    return False
        return True

    return win(0, 0, staller_first, k)


def test_k14_x_k13_staller_needs_six_moves():
    g = cartesian_product(star(4), star(3))
    assert solve(g).gsmb == 6
    assert not staller_wins_within(g, 5, False)
    assert staller_wins_within(g, 6, False)
