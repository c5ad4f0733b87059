"""Closed forms, the exact domination number and the registry of published values."""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Optional, Union

from .engine import Outcome, Player
from .errors import OutOfDomain, ResourceLimit
from .graph import Graph, bits, generate
from .solver import INF, Budget, Solver

# --- domination number --------------------------------------------------------


def domination_number(g: Graph, max_nodes: Optional[int] = 5_000_000) -> int:
    """Exact gamma(G) by branch and bound.

    Branches on the vertex that dominates the undominated vertex with the
    fewest remaining candidates; a vertex rejected for one branch stays
    excluded in its siblings.
    """
    closed = g.closed_nbhd
    full = g.full
    max_cover = max(nb.bit_count() for nb in closed)
    best = [g.order]
    nodes = [0]

    def rec(dominated: int, excluded: int, size: int):
        if dominated == full:
            if size < best[0]:
                best[0] = size
            return
        nodes[0] += 1
        if max_nodes is not None and nodes[0] > max_nodes:
            raise ResourceLimit(f"domination search exceeded {max_nodes} nodes",
                                {"gamma_upper": best[0]})
        left = full & ~dominated
        if size + -(-left.bit_count() // max_cover) >= best[0]:
            return
        options, fewest = 0, 1 << 30
        for u in bits(left):
            opts = closed[u] & ~excluded
            c = opts.bit_count()
            if c < fewest:
                options, fewest = opts, c
                if c <= 1:
                    break
        if not options:
            return
        ordered = sorted(bits(options), key=lambda w: -(closed[w] & left).bit_count())
        for w in ordered:
            rec(dominated | closed[w], excluded, size + 1)
            excluded |= 1 << w

    rec(0, 0, 0)
    return best[0]


# --- closed forms -------------------------------------------------------------


def grid_gamma_formula(n: int) -> int:
    if n < 1:
        raise OutOfDomain("n must be >= 1")
    return (3 * n + 4) // 4


def sigma(n: int) -> int:
    if n < 2:
        raise OutOfDomain("n must be >= 2")
    return {0: 0, 1: -1, 2: 1}[n % 3]


def grid_gmb_interval(n: int) -> tuple[int, int]:
    """Interval containing gmb(P3 x Pn)."""
    if n < 2:
        raise OutOfDomain("n must be >= 2")
    num = 4 * n + sigma(n)
    assert num % 3 == 0, "4n + sigma(n) must be divisible by 3"
    return grid_gamma_formula(n), num // 3


def trivial_bounds(g: Graph) -> tuple[tuple[int, int], tuple[int, int]]:
    """Intervals for gmb and gmb_prime, valid whenever the value is finite."""
    n = g.order
    return (1, max(1, math.ceil(n / 2))), (1, max(1, n // 2))


def bipartite_outcome_formula(m: int, n: int) -> Outcome:
    m, n = sorted((m, n))
    if m < 1:
        raise OutOfDomain("both sides must be nonempty")
    if m == 1 and n > 1:
        return Outcome.N
    return Outcome.D


def star_product_outcome_formula(m: int, n: int) -> Outcome:
    m, n = sorted((m, n))
    if m < 2:
        raise OutOfDomain("both stars need at least two leaves")
    if m == n == 2:
        return Outcome.D
    if m == 2:
        return Outcome.N
    return Outcome.S


def star_product_values_formula(m: int, n: int) -> tuple[int, int]:
    """(gsmb, gsmb_prime) of K_{1,m} x K_{1,n} as published."""
    n, m = sorted((m, n))
    if n < 3:
        raise OutOfDomain("both stars need at least three leaves")
    return (5 if n == 3 else 4), 4


def p3_star_values_formula(n: int) -> tuple[int, int]:
    """(gmb, gsmb_prime) of P3 x K_{1,n}."""
    if n < 3:
        raise OutOfDomain("n must be >= 3")
    return n + 2, n + 2


# --- registry -----------------------------------------------------------------

EXACT = "exact-desk-scale"
BOUNDED = "bounded-depth"
OUT_OF_SCOPE = "out-of-scope"

Expected = Union[str, int, tuple]


@dataclass(frozen=True)
class PaperClaim:
    id: str
    graph_spec: str
    quantity: str  # outcome, gmb, gmb_prime, gsmb, gsmb_prime, gamma, bound-interval
    expected: Expected
    feasibility: str
    citation: str
    tags: tuple[str, ...] = ()
    target: str = "gmb"  # measured invariant for bound-interval claims
    depth_cap: Optional[int] = None


def _c(id, spec, quantity, expected, citation, tags, feasibility=EXACT, **kw):
    return PaperClaim(id, "gen: " + spec, quantity, expected, feasibility, citation,
                      tuple(tags), **kw)


def paper_registry() -> list[PaperClaim]:
    claims: list[PaperClaim] = []
    add = claims.append
    s2, s3, s4 = "section2", "section3", "section4"

    for n in range(1, 7):
        add(_c(f"thm9.p2pn.gmbp.n{n}", f"p2 x p{n}", "gmb_prime", n,
               "Theorem 9 (P2 x Pn), 'gmb'(P_2 x P_n) = n'", [s2, "thm9"]))
    add(_c("thm9.p2pn.gmb.n13", "p2 x p13", "gmb", 11,
           "Theorem 9 (P2 x Pn), 'gmb(P_2 x P_n) = n-2' for n >= 13", [s2, "thm9"],
           OUT_OF_SCOPE))
    add(_c("thm.cart.p2xk1,3", "p2 x k1,3", "outcome", "D",
           "Theorem (Cartesian D-propagation), o(P2)=D", [s2, "thm.cart"]))
    add(_c("thm3.union.p3p3+p3p3", "p3 x p3 + p3 x p3", "bound-interval", (8, 8),
           "Theorem 3 with Proposition 10 values", [s2, "thm3"]))

    for m, n in [(2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (2, 7), (2, 8), (3, 3), (3, 4),
                 (3, 5), (4, 4)]:
        add(_c(f"thm.pmpn.p{m}p{n}.outcome", f"p{m} x p{n}", "outcome", "D",
               "Theorem (grids), 'o(P_m x P_n) = D'", [s3, "thm.pmpn"]))
    add(_c("thm.pathcover.k2,2xp3.outcome", "k2,2 x p3", "outcome", "D",
           "Theorem (nontrivial path covers)", [s3, "thm.pathcover"]))
    add(_c("thm.pathcover.k2,4xp2.outcome", "k2,4 x p2", "outcome", "D",
           "Theorem (nontrivial path covers)", [s3, "thm.pathcover"]))
    add(_c("prop10.gmb", "p3 x p3", "gmb", 4, "Proposition 10, 'gmb'(P_3 x P_3) = 4'",
           [s3, "prop10"]))
    add(_c("prop10.gmbp", "p3 x p3", "gmb_prime", 4, "Proposition 10", [s3, "prop10"]))
    add(_c("prop11.gmb", "p3 x p4", "gmb", 5, "Proposition 11, 'gmb(P_3 x P_4) = 5'",
           [s3, "prop11"]))
    add(_c("prop11.gmbp", "p3 x p4", "gmb_prime", 6, "Proposition 11", [s3, "prop11"]))
    add(_c("thm12.p3p2.gmb", "p3 x p2", "gmb", 3, "Theorem 12 proof, gmb(P3 x P2) = 3",
           [s3, "thm12"]))
    add(_c("thm12.p3p2.gmbp", "p3 x p2", "gmb_prime", 3, "Theorem 12 proof", [s3, "thm12"]))
    for n in (3, 4, 5):
        add(_c(f"thm12.p3pn.n{n}", f"p3 x p{n}", "bound-interval", grid_gmb_interval(n),
               "Theorem 12, floor((3n+4)/4) <= gmb(P3 x Pn) <= (4n+sigma(n))/3",
               [s3, "thm12"]))
    for n in range(1, 9):
        add(_c(f"eq3.gamma.p3p{n}", f"p3 x p{n}", "gamma", grid_gamma_formula(n),
               "Eq. (3), 'gamma(P_3 x P_n) = floor((3n+4)/4)'", [s3, "eq3"]))

    for m in range(1, 5):
        for n in range(m, 5):
            add(_c(f"prop13.k{m},{n}.outcome", f"k{m},{n}", "outcome",
                   bipartite_outcome_formula(m, n).value,
                   "Proposition 13, o(K_{m,n})", [s4, "prop13"]))
    add(_c("cor.kmn.k2,2xk2,2.outcome", "k2,2 x k2,2", "outcome", "D",
           "Corollary (products of K_{m,n}, m,n >= 2)", [s4, "cor.kmn"]))
    for m, n in [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4)]:
        add(_c(f"thm14.k1,{m}xk1,{n}.outcome", f"k1,{m} x k1,{n}", "outcome",
               star_product_outcome_formula(m, n).value,
               "Theorem 14, o(K_{1,m} x K_{1,n})", [s4, "thm14"]))
    add(_c("thm14.k1,4xk1,4.outcome", "k1,4 x k1,4", "outcome", "S",
           "Theorem 14, n >= m >= 3 gives S", [s4, "thm14"], BOUNDED, depth_cap=4))
    for n in (3, 4):
        gmb, gsp = p3_star_values_formula(n)
        add(_c(f"thm.p3star.p3xk1,{n}.gmb", f"p3 x k1,{n}", "gmb", gmb,
               "Theorem (P3 x K_{1,n}), 'gmb(P_3 x K_{1,n}) = n+2'", [s4, "thm.p3star"]))
        add(_c(f"thm.p3star.p3xk1,{n}.gsmbp", f"p3 x k1,{n}", "gsmb_prime", gsp,
               "Theorem (P3 x K_{1,n}), 'gsmb'(P_3 x K_{1,n}) = n+2'", [s4, "thm.p3star"]))
    for m, n, feas in [(3, 3, EXACT), (4, 3, EXACT), (4, 4, BOUNDED)]:
        gs, gsp = star_product_values_formula(m, n)
        cap = 4 if feas == BOUNDED else None
        add(_c(f"thm15.k1,{m}xk1,{n}.gsmb", f"k1,{m} x k1,{n}", "gsmb", gs,
               "Theorem 15, gsmb(K_{1,m} x K_{1,n})", [s4, "thm15"], feas, depth_cap=cap))
        add(_c(f"thm15.k1,{m}xk1,{n}.gsmbp", f"k1,{m} x k1,{n}", "gsmb_prime", gsp,
               "Theorem 15, gsmb'(K_{1,m} x K_{1,n}) = 4", [s4, "thm15"], feas,
               depth_cap=cap))
    return claims


@dataclass
class ClaimResult:
    id: str
    expected: Expected
    computed: object
    status: str  # pass, fail, skipped
    nodes: int = 0
    ms: float = 0.0
    note: str = ""

    def to_json(self) -> dict:
        return {"id": self.id, "expected": _jsonable(self.expected),
                "computed": _jsonable(self.computed), "status": self.status,
                "nodes": self.nodes, "ms": round(self.ms, 3)}

    def line(self) -> str:
        extra = f" ({self.note})" if self.note else ""
        return (f"{self.status.upper():7s} {self.id}: expected {_fmt(self.expected)}, "
                f"computed {_fmt(self.computed)}{extra}")


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and math.isinf(v):
        return None
    return v


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return str(v)


def matches(claim: PaperClaim, flt: Optional[str]) -> bool:
    if not flt:
        return True
    return flt in claim.tags or claim.id.startswith(flt)


def _evaluate(claim: PaperClaim, solver: Solver, g: Graph):
    q = claim.quantity
    if q == "gamma":
        return domination_number(g)
    if claim.feasibility == BOUNDED:
        cap = claim.depth_cap
        if q == "outcome":
            d = solver.staller_bounded(Player.DOMINATOR, cap)
            s = solver.staller_bounded(Player.STALLER, cap)
            if d is not None and s is not None:
                return "S"
            raise ResourceLimit(f"Staller win not proven within depth cap {cap}")
        first = Player.STALLER if q.endswith("_prime") else Player.DOMINATOR
        found = solver.staller_bounded(first, cap)
        return found if found is not None else f">{cap}"
    if q == "outcome":
        return solver.solve_outcome().value
    if q == "bound-interval":
        return solver.value(claim.target)
    return solver.value(q)


def verify_claims(flt: Optional[str] = None, budget: Optional[Budget] = None,
                  threads: int = 1) -> list[ClaimResult]:
    """Run every matching claim; budget exhaustion is reported as skipped."""
    results = []
    solvers: dict[str, Solver] = {}
    for claim in paper_registry():
        if not matches(claim, flt):
            continue
        if claim.feasibility == OUT_OF_SCOPE:
            results.append(ClaimResult(claim.id, claim.expected, None, "skipped",
                                       note="out of scope at desk scale"))
            continue
        g = generate(claim.graph_spec[len("gen:"):])
        solver = solvers.get(claim.graph_spec)
        if solver is None:
            solver = solvers[claim.graph_spec] = Solver(g, budget or Budget(), threads)
        before = solver.nodes
        start = time.perf_counter()
        try:
            computed = _evaluate(claim, solver, g)
        except ResourceLimit as exc:
            results.append(ClaimResult(claim.id, claim.expected, None, "skipped",
                                       solver.nodes - before,
                                       (time.perf_counter() - start) * 1000, str(exc)))
            continue
        if isinstance(computed, float) and math.isinf(computed):
            computed = INF
        if claim.quantity == "bound-interval":
            lo, hi = claim.expected
            ok = isinstance(computed, (int, float)) and lo <= computed <= hi
        else:
            ok = computed == claim.expected
        results.append(ClaimResult(claim.id, claim.expected, computed,
                                   "pass" if ok else "fail", solver.nodes - before,
                                   (time.perf_counter() - start) * 1000))
    return results


def claims_json(results: list[ClaimResult]) -> str:
    return json.dumps([r.to_json() for r in results], indent=2)
