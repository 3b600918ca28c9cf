"""Exponential-time reference solvers.

These certify every algorithmic guarantee on tiny instances, so they are
kept as plain enumerations with hard size guards (TooLarge) instead of
timeouts or clever exact solvers.
"""

from dataclasses import dataclass
from typing import Optional

from ._rat import Rat, ZERO
from .errors import TooLarge
from .instances import MakespanInstance, SantaClausInstance, SetPackingInstance

ENUM_GUARD = 10_000_000


@dataclass(frozen=True)
class MakespanBrute:
    opt_makespan: Optional[object]  # None when no full schedule exists
    max_jobs_within_T: int


def brute_makespan_opt(inst: MakespanInstance, edge_filter: str = "all") -> MakespanBrute:
    """Exact optimum over all assignments, with rejection allowed for the
    max-jobs-within-target count.

    edge_filter="small_only" restricts usable pairs to p <= T/2 (the small
    edge class for the instance's target_T).
    """
    if edge_filter not in ("all", "small_only"):
        raise ValueError(f"unknown edge_filter {edge_filter!r}")
    m, n, T = inst.machines, inst.jobs, inst.target_T
    if (m + 1) ** n > ENUM_GUARD:
        raise TooLarge(f"(m+1)^n = {(m + 1) ** n} exceeds {ENUM_GUARD}")
    usable = []
    for j in range(n):
        opts = []
        for i in range(m):
            p = inst.proc[i][j]
            if p is None:
                continue
            if edge_filter == "small_only" and 2 * p > T:
                continue
            opts.append((i, p))
        usable.append(opts)

    # Pass 1: best makespan over full schedules (every job placed).
    best_full = [None]

    def full(j, loads, cur_max):
        if best_full[0] is not None and cur_max >= best_full[0]:
            return  # cannot improve: makespan only grows
        if j == n:
            best_full[0] = cur_max
            return
        for i, p in usable[j]:
            old = loads[i]
            loads[i] = old + p
            full(j + 1, loads, loads[i] if loads[i] > cur_max else cur_max)
            loads[i] = old

    if all(usable):
        full(0, [ZERO] * m, ZERO)

    # Pass 2: most jobs placeable while keeping every load <= T.
    best_count = [0]

    def partial(j, loads, count):
        if count + (n - j) <= best_count[0]:
            return  # even placing everything left cannot beat the best
        if j == n:
            best_count[0] = count
            return
        for i, p in usable[j]:
            new = loads[i] + p
            if new <= T:
                old = loads[i]
                loads[i] = new
                partial(j + 1, loads, count + 1)
                loads[i] = old
        partial(j + 1, loads, count)  # reject job j

    partial(0, [ZERO] * m, 0)
    return MakespanBrute(best_full[0], best_count[0])


def brute_setpacking_opt(inst: SetPackingInstance, restrict_universe=None) -> int:
    """Maximum number of pairwise-disjoint sets fully contained in the
    allowed universe."""
    n = inst.num_sets
    if 2 ** n > ENUM_GUARD:
        raise TooLarge(f"2^n = {2 ** n} exceeds {ENUM_GUARD}")
    if restrict_universe is None:
        allowed_mask = (1 << inst.universe_size) - 1
    else:
        allowed_mask = 0
        for e in restrict_universe:
            allowed_mask |= 1 << e
    masks = []
    for s in inst.sets:
        mask = 0
        for e in s:
            mask |= 1 << e
        if mask & ~allowed_mask == 0:
            masks.append(mask)
    best = [0]

    def go(k, used, count):
        if count + (len(masks) - k) <= best[0]:
            return
        if k == len(masks):
            best[0] = count
            return
        if masks[k] & used == 0:
            go(k + 1, used | masks[k], count + 1)
        go(k + 1, used, count)

    go(0, 0, 0)
    return best[0]


@dataclass(frozen=True)
class SantaClausBrute:
    opt_min_value: object
    max_agents_at_theta: Optional[int]


def brute_santaclaus_opt(inst: SantaClausInstance, theta=None) -> SantaClausBrute:
    """Exact max-min value over all item->agent assignments (items may stay
    unassigned); optionally also the most agents reaching value >= theta."""
    n, k = inst.agents, inst.items
    if (n + 1) ** k > ENUM_GUARD:
        raise TooLarge(f"(agents+1)^items = {(n + 1) ** k} exceeds {ENUM_GUARD}")
    best_min = [None]
    best_count = [0 if theta is not None else None]

    def go(j, totals):
        if j == k:
            mn = min(totals)
            if best_min[0] is None or mn > best_min[0]:
                best_min[0] = mn
            if theta is not None:
                cnt = sum(1 for t in totals if t >= theta)
                if cnt > best_count[0]:
                    best_count[0] = cnt
            return
        go(j + 1, totals)  # leave item j unassigned
        for i in range(n):
            v = inst.value[i][j]
            totals[i] += v
            go(j + 1, totals)
            totals[i] -= v

    go(0, [ZERO] * n)
    return SantaClausBrute(best_min[0], best_count[0])


def brute_almost_disjoint_max(sets, eps) -> int:
    """Largest eps-almost-disjoint subfamily, by depth-first search over
    feasible families (feasibility is downward closed, so pruning infeasible
    extensions loses nothing).

    Two shortcuts keep the search honest but fast: a family whose members
    are pairwise disjoint is trivially feasible (keep everything), and a
    family with sum(demands) > |union| or a pair with demand_a + demand_b >
    |S_a u S_b| is infeasible by counting.  Everything in between goes to
    the exact flow check.
    """
    import math

    from ._rat import rat
    from .setpacking import check_almost_disjoint

    sets = [frozenset(s) for s in sets]
    if len(sets) > 30:
        raise TooLarge(f"{len(sets)} sets exceeds the family-search guard")
    e = rat(eps)
    demand = [int(math.ceil((1 - e) * len(s))) for s in sets]
    best = [0]

    def feasible(family, nxt):
        s_new, r_new = sets[nxt], demand[nxt]
        for k in family:
            if demand[k] + r_new > len(sets[k] | s_new):
                return False  # two sets cannot both keep their quota
        members = [sets[k] for k in family] + [s_new]
        if all(a.isdisjoint(b) for i, a in enumerate(members) for b in members[i + 1:]):
            return True  # keep every element of every set
        union = frozenset().union(*members)
        if sum(demand[k] for k in family) + r_new > len(union):
            return False  # not enough elements to go around
        return check_almost_disjoint(members, e).feasible

    def go(k, family):
        if len(family) > best[0]:
            best[0] = len(family)
        for nxt in range(k, len(sets)):
            if feasible(family, nxt):
                go(nxt + 1, family + [nxt])

    go(0, [])
    return best[0]
