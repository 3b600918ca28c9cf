"""Bicriteria set packing: two-phase driver, flow phase for small sets,
LP-rounding phase for big sets, and the almost-disjointness decider.

Set size threshold C, coverage threshold D, and the kept-fraction eps all
derive from a single delta.  Subproblems (S', U') only allow sets fully
contained in U'.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._rat import Rat, ZERO, rat
from ._rng import mix64, philox, unit_rat
from .engines import flow_network, lp_problem, lp_solve, max_flow
from .errors import BadParams, InvariantError, NoPlantedWitness
from .instances import SetPackingInstance, canonical_json_bytes


@dataclass(frozen=True)
class SpParams:
    """delta in (0,1) and its derived constants D = ceil(40/delta),
    C = ceil(400/delta^2), eps = delta^2/800 (exact rational)."""

    delta: object
    D: int
    C: int
    eps: object

    @classmethod
    def from_delta(cls, delta) -> "SpParams":
        d = rat(delta)
        if not (0 < d < 1):
            raise BadParams(f"delta = {d} must lie in (0, 1)")
        D = int(math.ceil(40 / d))
        C = int(math.ceil(400 / (d * d)))
        eps = d * d / 800
        params = cls(d, D, C, eps)
        assert params.eps * params.C < 1, "eps < 1/C must hold by construction"
        return params


@dataclass(frozen=True)
class PackingSolution:
    """Chosen sets with the elements they keep; kept lists are pairwise
    disjoint by construction and checked here."""

    picks: tuple  # of (set_index, kept elements tuple)

    def __post_init__(self):
        seen = set()
        for idx, kept in self.picks:
            k = set(kept)
            if seen & k:
                raise InvariantError(f"set {idx}: kept elements collide with another pick")
            seen |= k

    @property
    def count(self) -> int:
        return len(self.picks)

    def kept_elements(self) -> frozenset:
        return frozenset(e for _i, kept in self.picks for e in kept)

    def to_bytes(self) -> bytes:
        doc = {
            "kind": "packing",
            "picks": [
                {"set_index": idx, "kept": list(kept)} for idx, kept in self.picks
            ],
        }
        return canonical_json_bytes(doc)


def packing_solution(picks) -> PackingSolution:
    return PackingSolution(
        tuple(sorted((int(i), tuple(sorted(int(e) for e in kept))) for i, kept in picks))
    )


def validate_packing(inst: SetPackingInstance, sol: PackingSolution):
    for idx, kept in sol.picks:
        if not set(kept) <= set(inst.sets[idx]):
            raise InvariantError(f"pick {idx}: kept elements are not a subset of the set")


def sp_small_phase(sets, universe):
    """One private element for as many sets as possible, via unit max flow.

    sets: (original_index, elements) pairs, every set of size <= C and
    fully contained in `universe`.  Returns (PackingSolution, used elements).
    Maximality is certified by the flow's min cut.
    """
    sets = list(sets)
    elements = sorted(universe)
    elem_node = {e: 1 + len(sets) + k for k, e in enumerate(elements)}
    source = 0
    sink = 1 + len(sets) + len(elements)
    arcs = [(source, 1 + s, 1) for s in range(len(sets))]
    mid_arcs = []
    for s, (_idx, members) in enumerate(sets):
        for e in sorted(members):
            mid_arcs.append((s, e))
            arcs.append((1 + s, elem_node[e], 1))
    mid_base = len(sets)
    arcs += [(elem_node[e], sink, 1) for e in elements]
    result = max_flow(flow_network(2 + len(sets) + len(elements), arcs, source, sink))
    picks = []
    used = set()
    got = {}
    for k, (s, e) in enumerate(mid_arcs):
        if result.flow[mid_base + k] == 1:
            got[s] = e
    for s, (idx, _members) in enumerate(sets):
        if result.flow[s] == 1:
            e = got[s]
            picks.append((idx, (e,)))
            used.add(e)
    assert len(picks) == result.value
    return packing_solution(picks), frozenset(used)


def _solve_packing_lp(sets, universe):
    """Eq-style packing LP: max sum x_S, sum_{S ni u} x_S <= 1, x in [0,1]."""
    elems = sorted(set().union(*[set(m) for _i, m in sets]) & set(universe)) if sets else []
    n = len(sets)
    rows = []
    one = Rat(1)
    for e in elems:
        rows.append(
            (
                tuple(one if e in members else ZERO for _i, members in sets),
                "<=",
                one,
            )
        )
    problem = lp_problem([one] * n, rows, [(ZERO, one)] * n)
    solution = lp_solve(problem)
    assert solution.status == "optimal", "the packing LP is always feasible (x = 0)"
    return solution.values


def sp_large_phase(sets, universe, params: SpParams, seed: int, lp_mode: str = "solve",
                   planted=None) -> PackingSolution:
    """LP rounding for big sets.

    Sample each set with probability x_S; discard elements covered >= D
    times (the set T); drop sampled sets with >= a tenth of their elements
    in T; allocate every remaining element uniformly at random among the
    surviving sets containing it (unallocated if none); keep the sets that
    collect at least eps * |S \\ T| elements, with the elements they
    collected.

    lp_mode="solve" obtains x from the packing LP; "planted" sets x_S = 1
    exactly on the planted indices (a feasible LP point of value m).
    """
    sets = list(sets)
    universe = frozenset(universe)
    for idx, members in sets:
        if not frozenset(members) <= universe:
            raise BadParams(f"set {idx} is not contained in the available universe")
    if lp_mode == "solve":
        x = list(_solve_packing_lp(sets, universe))
    elif lp_mode == "planted":
        if planted is None:
            raise NoPlantedWitness("lp_mode='planted' needs a planted witness")
        planted = set(planted)
        x = [Rat(1) if idx in planted else ZERO for idx, _m in sets]
    else:
        raise BadParams(f"unknown lp_mode {lp_mode!r}")

    # Sample the candidate family A: one exact-uniform draw per set, in order.
    sample_gen = philox(mix64(seed, 0xA55E7))
    in_a = []
    for k in range(len(sets)):
        u = unit_rat(sample_gen)
        in_a.append(u < x[k])

    coverage = {}
    for k, (idx, members) in enumerate(sets):
        if in_a[k]:
            for e in members:
                coverage[e] = coverage.get(e, 0) + 1
    popular = frozenset(e for e, c in coverage.items() if c >= params.D)

    in_b = []
    keep_target = {}
    for k, (idx, members) in enumerate(sets):
        if not in_a[k]:
            in_b.append(False)
            continue
        hit = sum(1 for e in members if e in popular)
        in_b.append(10 * hit < len(members))
        if in_b[-1]:
            keep_target[k] = len(members) - hit  # |S \ T|
    owners = {}
    for k, (idx, members) in enumerate(sets):
        if in_b[k]:
            for e in members:
                if e not in popular:
                    owners.setdefault(e, []).append(k)

    alloc_gen = philox(mix64(seed, 0xB0C4))
    free_elems = sorted(e for e in universe if e not in popular)
    draws = alloc_gen.random(len(free_elems)) if free_elems else []
    collected = {k: [] for k in keep_target}
    for pos, e in enumerate(free_elems):
        cands = owners.get(e)
        if not cands:
            continue  # no surviving set contains it; leave unallocated
        pick = cands[int(draws[pos] * len(cands))]
        collected[pick].append(e)

    picks = []
    for k, (idx, members) in enumerate(sets):
        if not in_b[k]:
            continue
        got = collected[k]
        if Rat(len(got)) >= params.eps * keep_target[k]:
            picks.append((idx, tuple(sorted(got))))
    return packing_solution(picks)


def sp_combined(inst: SetPackingInstance, params: SpParams, seed: int,
                lp_mode: str = "solve") -> PackingSolution:
    """Two-phase driver: flow phase on the size-<=C sets over U, then the
    rounding phase on the size->C sets over what the flow phase left."""
    if lp_mode == "planted" and inst.planted is None:
        raise NoPlantedWitness("instance has no planted witness")
    universe = frozenset(range(inst.universe_size))
    small = [(k, inst.sets[k]) for k in range(inst.num_sets) if len(inst.sets[k]) <= params.C]
    big = [(k, inst.sets[k]) for k in range(inst.num_sets) if len(inst.sets[k]) > params.C]
    sol_small, used = sp_small_phase(small, universe)
    rest = universe - used
    avail_big = [(k, members) for k, members in big if not (set(members) & used)]
    planted = None if inst.planted is None else [k for k in inst.planted]
    sol_big = sp_large_phase(avail_big, rest, params, seed, lp_mode, planted)
    return packing_solution(tuple(sol_small.picks) + tuple(sol_big.picks))


@dataclass(frozen=True)
class AlmostDisjointResult:
    feasible: bool
    demands: tuple  # per-set required kept size ceil((1-eps)|S_i|)
    witness: Optional[tuple]  # per-set kept tuples when feasible
    cut: Optional[frozenset]  # infeasibility certificate (source side)
    cut_capacity: Optional[int]


def check_almost_disjoint(sets, eps) -> AlmostDisjointResult:
    """Do disjoint A_i subseteq S_i with |A_i| >= ceil((1-eps)|S_i|) exist?

    Decided by max flow with per-set demands: source->set_i arcs carry the
    demand (the lower-bounded [demand, |S_i|] arc reduces to this, since
    surplus beyond the demand can always be dropped), set->element and
    element->sink arcs are unit.  Feasible iff the flow saturates every
    demand; the min cut certifies infeasibility.
    """
    e = rat(eps)
    if not (0 <= e <= 1):
        raise BadParams(f"eps = {e} must lie in [0, 1]")
    sets = [tuple(sorted(set(s))) for s in sets]
    demands = tuple(int(math.ceil((1 - e) * len(s))) for s in sets)
    elements = sorted(set().union(*[set(s) for s in sets])) if sets else []
    elem_node = {el: 1 + len(sets) + k for k, el in enumerate(elements)}
    source = 0
    sink = 1 + len(sets) + len(elements)
    arcs = [(source, 1 + s, demands[s]) for s in range(len(sets))]
    mid = []
    for s, members in enumerate(sets):
        for el in members:
            mid.append((s, el))
            arcs.append((1 + s, elem_node[el], 1))
    mid_base = len(sets)
    arcs += [(elem_node[el], sink, 1) for el in elements]
    result = max_flow(flow_network(2 + len(sets) + len(elements), arcs, source, sink))
    if result.value == sum(demands):
        witness = [[] for _ in sets]
        for k, (s, el) in enumerate(mid):
            if result.flow[mid_base + k] == 1:
                witness[s].append(el)
        return AlmostDisjointResult(
            True, demands, tuple(tuple(sorted(w)) for w in witness), None, None
        )
    return AlmostDisjointResult(
        False, demands, None, result.min_cut, cut_capacity_of(arcs, result.min_cut)
    )


def cut_capacity_of(arcs, cut) -> int:
    return sum(c for u, v, c in arcs if u in cut and v not in cut)
