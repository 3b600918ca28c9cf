"""Bicriteria makespan pipeline.

Stages: edge partition at T/2, maximum matching over large edges, the
configuration LP (explicit column enumeration + exact LP feasibility),
per-machine randomized rounding, the greedy list-scheduler truncated to
T/2, and the combiner that returns the better of the matching schedule
(S1) and greedy-then-rounding schedule (S2).
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from ._rat import Rat, ZERO
from ._rng import mix64, philox, unit_rat
from .engines import EQ, LpSolution, lp_problem, lp_solve, max_bipartite_matching
from .errors import ConfigExplosion, InfeasibleClp, InvalidAssignment, InvariantError
from .instances import MakespanInstance, Schedule, schedule

DEFAULT_COLUMN_CAP = 2_000_000


@dataclass(frozen=True)
class EdgePartition:
    """Usable (machine, job) pairs split at the T/2 threshold.

    large: T/2 < p <= T;  small: 0 <= p <= T/2.  Pairs with p > T or an
    unschedulable sentinel appear in neither.
    """

    large: frozenset
    small: frozenset


def partition_edges(inst: MakespanInstance) -> EdgePartition:
    T = inst.target_T
    large, small = [], []
    for i in range(inst.machines):
        row = inst.proc[i]
        for j in range(inst.jobs):
            p = row[j]
            if p is None or p > T:
                continue
            if 2 * p > T:
                large.append((i, j))
            else:
                small.append((i, j))
    return EdgePartition(frozenset(large), frozenset(small))


def alg1_match_large(inst: MakespanInstance) -> Schedule:
    """Maximum matching on the large-edge graph; each matched machine runs
    exactly one job with p <= T."""
    edges = sorted(partition_edges(inst).large)
    pairs = max_bipartite_matching(inst.machines, inst.jobs, edges)
    return schedule(pairs)


def _eligible_jobs(inst, job_subset):
    """Per machine, the jobs (from job_subset) with finite p <= T."""
    T = inst.target_T
    out = []
    for i in range(inst.machines):
        row = inst.proc[i]
        out.append([j for j in job_subset if row[j] is not None and row[j] <= T])
    return out


def _machine_columns(row, elig, T, budget_check):
    """All subsets of elig with total processing time <= T, in lexicographic
    order of the sorted job tuple (the canonical column order)."""
    cols = []
    prefix = []

    def rec(start, room):
        cols.append(tuple(prefix))
        budget_check(len(cols))
        for k in range(start, len(elig)):
            j = elig[k]
            p = row[j]
            if p <= room:
                prefix.append(j)
                rec(k + 1, room - p)
                prefix.pop()

    rec(0, T)
    return cols


def build_configuration_lp(
    inst: MakespanInstance, column_cap: int = DEFAULT_COLUMN_CAP, jobs=None
):
    """The configuration LP over explicitly enumerated columns.

    One variable per (machine, configuration) with configurations the job
    subsets fitting in T; per-machine weights sum to 1 and each covered job
    is picked exactly once.  jobs=None covers every job; otherwise only the
    given jobs are enumerated and covered.  Raises ConfigExplosion when the
    column count would exceed column_cap.
    """
    cover = sorted(inst.job_ids) if jobs is None else sorted(jobs)
    elig = _eligible_jobs(inst, cover)
    total = [0]

    def budget_check(_local):
        total[0] += 1
        if total[0] > column_cap:
            raise ConfigExplosion(f"more than {column_cap} configurations")

    columns = []
    machine_span = []
    for i in range(inst.machines):
        cols = _machine_columns(inst.proc[i], elig[i], inst.target_T, budget_check)
        machine_span.append((len(columns), len(columns) + len(cols)))
        columns.extend((i, c) for c in cols)

    ncols = len(columns)
    job_row = {j: k for k, j in enumerate(cover)}
    n_rows = inst.machines + len(cover)
    rows = [[ZERO] * ncols for _ in range(n_rows)]
    one = Rat(1)
    for col, (i, cfg) in enumerate(columns):
        rows[i][col] = one
        for j in cfg:
            rows[inst.machines + job_row[j]][col] = one
    constraints = [(tuple(r), EQ, one) for r in rows]
    problem = lp_problem([ZERO] * ncols, constraints, [(ZERO, None)] * ncols)
    return problem, tuple(columns)


@dataclass(frozen=True)
class ClpSolution:
    """Feasible configuration-LP point: per machine, (configuration, weight)
    pairs with positive weight, in canonical column order."""

    per_machine: tuple
    covered_jobs: tuple


def validate_clp(inst: MakespanInstance, clp: ClpSolution):
    """Exact-arithmetic check of the three constraint families."""
    T = inst.target_T
    cover = set(clp.covered_jobs)
    job_weight = {j: ZERO for j in cover}
    if len(clp.per_machine) != inst.machines:
        raise InvariantError("per_machine length != machine count")
    for i, entries in enumerate(clp.per_machine):
        total_w = ZERO
        for cfg, w in entries:
            if not (0 < w <= 1):
                raise InvariantError(f"machine {i}: weight {w} outside (0, 1]")
            load = ZERO
            for j in cfg:
                if j not in cover:
                    raise InvariantError(f"machine {i}: job {j} outside the covered set")
                p = inst.proc[i][j]
                if p is None:
                    raise InvariantError(f"machine {i}: unschedulable job {j} in a configuration")
                load += p
                job_weight[j] += w
            if load > T:
                raise InvariantError(f"machine {i}: configuration load {load} exceeds T")
            total_w += w
        if total_w != 1:
            raise InvariantError(f"machine {i}: weights sum to {total_w}, not 1")
    for j, w in job_weight.items():
        if w != 1:
            raise InvariantError(f"job {j}: covering weight {w}, not 1")


def _solve_clp_uncached(inst, column_cap, jobs):
    problem, columns = build_configuration_lp(inst, column_cap, jobs)
    solution = lp_solve(problem)
    if solution.status != LpSolution.OPTIMAL:
        raise InfeasibleClp(
            "configuration LP infeasible: some job cannot be scheduled within T"
        )
    per_machine = [[] for _ in range(inst.machines)]
    for k, (i, cfg) in enumerate(columns):
        w = solution.values[k]
        if w > 0:
            per_machine[i].append((cfg, w))
    cover = tuple(sorted(inst.job_ids)) if jobs is None else tuple(sorted(jobs))
    clp = ClpSolution(tuple(tuple(e) for e in per_machine), cover)
    validate_clp(inst, clp)
    return clp


@lru_cache(maxsize=256)
def _solve_clp_cached(inst, column_cap, jobs):
    return _solve_clp_uncached(inst, column_cap, jobs)


def solve_clp(
    inst: MakespanInstance, column_cap: int = DEFAULT_COLUMN_CAP, jobs=None
) -> ClpSolution:
    """Feasible point of the configuration LP (exact rationals).

    Pure and memoized: instances are immutable, so repeated solves (e.g.
    across rounding seeds) hit the cache.
    """
    key = None if jobs is None else tuple(sorted(jobs))
    return _solve_clp_cached(inst, column_cap, key)


def alg2_round(clp: ClpSolution, inst: MakespanInstance, seed: int) -> Schedule:
    """Randomized rounding: machine i samples one configuration by inverse
    CDF over its canonical column order; a job goes to the first machine
    (in id order) that sampled it.  Realized load never exceeds T."""
    taken = {}
    for i, entries in enumerate(clp.per_machine):
        if not entries:
            continue
        u = unit_rat(philox(mix64(seed, i)))
        acc = ZERO
        chosen = entries[-1][0]
        for cfg, w in entries:
            acc += w
            if u < acc:
                chosen = cfg
                break
        for j in chosen:
            if j not in taken:
                taken[j] = i
    return schedule((i, j) for j, i in taken.items())


@dataclass(frozen=True)
class GreedyTrace:
    """What the greedy pass did: per-machine append-order lists, loads after
    the list-building loop, and the kept (post-truncation) prefixes."""

    lists: tuple
    fill: tuple
    kept: tuple


def alg3_greedy(inst: MakespanInstance):
    """Greedy list scheduling on small edges, then truncation to T/2.

    The loop repeatedly takes the smallest available processing time (ties:
    machine id, then job id) while the machine stays within T; each machine
    then keeps the longest prefix of its list, sorted by ascending time,
    that fits in T/2.  Returns (Schedule, GreedyTrace).
    """
    T = inst.target_T
    m = inst.machines
    small = partition_edges(inst).small
    p_of = {}
    for i, j in small:
        p_of[(i, j)] = inst.proc[i][j]
    loads = [ZERO] * m
    lists = [[] for _ in range(m)]
    remaining = set(inst.job_ids)
    small_by_job = {}
    for i, j in sorted(small):
        small_by_job.setdefault(j, []).append(i)
    while remaining:
        best = None
        for j in remaining:
            for i in small_by_job.get(j, ()):
                p = p_of[(i, j)]
                if loads[i] + p <= T:
                    cand = (p, i, j)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            break
        p, i, j = best
        lists[i].append(j)
        loads[i] += p
        remaining.discard(j)

    half = T / 2
    kept = []
    pairs = []
    for i in range(m):
        ordered = sorted(lists[i], key=lambda j: (p_of[(i, j)], j))
        d = ZERO
        prefix = []
        for j in ordered:
            p = p_of[(i, j)]
            if d + p <= half:
                d += p
                prefix.append(j)
            else:
                break
        kept.append(tuple(prefix))
        pairs.extend((i, j) for j in prefix)
    trace = GreedyTrace(
        tuple(tuple(l) for l in lists), tuple(loads), tuple(kept)
    )
    return schedule(pairs), trace


def evaluate_schedule(inst: MakespanInstance, sched: Schedule):
    """(number of scheduled jobs, makespan) for a schedule on this instance."""
    loads = [ZERO] * inst.machines
    for i, j in sched.assignments:
        if not (0 <= i < inst.machines and 0 <= j < inst.jobs):
            raise InvalidAssignment(f"pair ({i},{j}) out of range")
        p = inst.proc[i][j]
        if p is None:
            raise InvalidAssignment(f"pair ({i},{j}) is unschedulable")
        loads[i] += p
    return sched.job_count, max(loads) if loads else ZERO


def theoretical_floor(n: int, m_star: int) -> float:
    """Expected-count floor max(m*, (n-m*)/6 + (1-1/e)(n - (n-m*)/6))."""
    greedy = (n - m_star) / 6
    return max(float(m_star), greedy + (1 - 1 / math.e) * (n - greedy))


# e = 2.718281828459045235360287...; these rational brackets are enough to
# compare (6e-5)/(6e+1) against decimal thresholds exactly.
E_LO = Rat(2718281828459045235, 10 ** 18)
E_HI = Rat(2718281828459045236, 10 ** 18)


def worst_case_ratio_bounds():
    """Exact rational bounds on (6e-5)/(6e+1), the combined algorithm's
    worst-case scheduled fraction (increasing in e, so brackets transfer)."""
    lo = (6 * E_LO - 5) / (6 * E_LO + 1)
    hi = (6 * E_HI - 5) / (6 * E_HI + 1)
    return lo, hi


@dataclass(frozen=True)
class CombinedReport:
    n: int
    m_star: int
    s1_count: int
    alg3_count: int
    rounded_count: int
    chosen: str  # "S1" | "S2"
    floor: float
    makespan: object

    def to_json(self) -> dict:
        from ._rat import rat_json

        return {
            "n": self.n,
            "m_star": self.m_star,
            "s1_count": self.s1_count,
            "alg3_count": self.alg3_count,
            "rounded_count": self.rounded_count,
            "chosen": self.chosen,
            "floor": self.floor,
            "makespan": rat_json(self.makespan),
        }


@lru_cache(maxsize=256)
def _alg1_cached(inst):
    return alg1_match_large(inst)


@lru_cache(maxsize=256)
def _alg3_cached(inst):
    return alg3_greedy(inst)


def combined_schedule(
    inst: MakespanInstance, seed: int, column_cap: int = DEFAULT_COLUMN_CAP
):
    """The better of (S1) the large-edge matching and (S2) greedy-then-
    rounding, with the rounding's LP re-solved over the jobs the greedy pass
    left unscheduled.  Ties go to S1 (smaller makespan).

    Returns (Schedule, CombinedReport).  S2's two loads add, which is why
    its makespan is bounded by T/2 + T.
    """
    s1 = _alg1_cached(inst)
    s2a, _trace = _alg3_cached(inst)
    remaining = tuple(sorted(set(inst.job_ids) - s2a.jobs()))
    if remaining:
        clp = solve_clp(inst, column_cap, jobs=remaining)
        s2b = alg2_round(clp, inst, seed)
    else:
        s2b = schedule([])
    s2 = schedule(tuple(s2a.assignments) + tuple(s2b.assignments))
    chosen, name = (s2, "S2") if s2.job_count > s1.job_count else (s1, "S1")
    count, mspan = evaluate_schedule(inst, chosen)
    report = CombinedReport(
        n=inst.jobs,
        m_star=s1.job_count,
        s1_count=s1.job_count,
        alg3_count=s2a.job_count,
        rounded_count=s2b.job_count,
        chosen=name,
        floor=theoretical_floor(inst.jobs, s1.job_count),
        makespan=mspan,
    )
    return chosen, report
