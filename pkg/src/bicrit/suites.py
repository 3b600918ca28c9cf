"""Exhaustive and randomized invariant suites.

These drive both `bicrit verify` and the acceptance tests: each suite
enumerates an instance family, checks the stated inequalities through the
brute-force oracles, and fails fast with a counterexample dump.
"""

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from ._rat import Rat, ZERO
from ._rng import mix64, philox
from .errors import BadParams
from .instances import (
    MakespanInstance,
    SetPackingInstance,
    emit_instance,
    gen_cnf_regular,
    gen_planted_makespan,
    gen_planted_setpacking,
    cnf_formula,
    setpacking_instance,
    with_target,
)
from .makespan import alg1_match_large, alg3_greedy, evaluate_schedule
from .oracles import (
    brute_almost_disjoint_max,
    brute_makespan_opt,
    brute_santaclaus_opt,
    brute_setpacking_opt,
)
from .reductions import (
    hypercube_gadget,
    reduce_cnf_to_setpacking,
    reduce_setpacking_to_santaclaus,
    validate_gadget,
    verify_reduction_soundness,
)


@dataclass
class SuiteResult:
    name: str
    checked: int
    violations: list  # (description, counterexample bytes or None)

    @property
    def passed(self) -> bool:
        return not self.violations


DEFAULT_VALUES = (1, 2, 3, 4, None)


def iter_makespan_family(
    max_jobs: int = 4, values=DEFAULT_VALUES, machines: int = 2, dedup: bool = False
) -> Iterator[MakespanInstance]:
    """Every 2-machine instance with n <= max_jobs jobs, entries from
    `values` (None = unschedulable), every job schedulable somewhere, and
    target_T set to the brute-force optimum.

    dedup=True keeps one representative per multiset of job columns (the
    checked inequalities are invariant under job relabeling).
    """
    columns = [
        c for c in itertools.product(values, repeat=machines) if any(v is not None for v in c)
    ]
    for n in range(1, max_jobs + 1):
        combos = (
            itertools.combinations_with_replacement(columns, n)
            if dedup
            else itertools.product(columns, repeat=n)
        )
        for combo in combos:
            proc = tuple(
                tuple(None if combo[j][i] is None else Rat(combo[j][i]) for j in range(n))
                for i in range(machines)
            )
            inst = MakespanInstance(machines, n, proc, Rat(1))
            opt = brute_makespan_opt(inst).opt_makespan
            assert opt is not None and opt > 0
            yield with_target(inst, opt)


def check_makespan_lemmas(inst: MakespanInstance) -> list:
    """All deterministic makespan-side guarantees on one instance whose
    target_T is its optimum.  Returns violation descriptions (empty = ok)."""
    out = []
    n, T = inst.jobs, inst.target_T
    m_star = alg1_match_large(inst).job_count
    small = brute_makespan_opt(inst, edge_filter="small_only")
    sched, trace = alg3_greedy(inst)
    listed = sum(len(l) for l in trace.lists)
    kept = sched.job_count
    count, mspan = evaluate_schedule(inst, sched)

    if small.max_jobs_within_T < n - m_star:
        out.append(
            f"lemma22: only {small.max_jobs_within_T} jobs schedulable on small edges"
            f" < n - m* = {n - m_star}"
        )
    if 2 * listed < small.max_jobs_within_T:
        out.append(
            f"prop25: greedy listed {listed} < half of OPT_small = {small.max_jobs_within_T}"
        )
    if 3 * kept < listed:
        out.append(f"lemma26: kept {kept} < a third of listed {listed}")
    if 6 * kept < n - m_star:
        out.append(f"lemma24: kept {kept} < (n - m*)/6 with n - m* = {n - m_star}")
    if 2 * mspan > T:
        out.append(f"lemma24: greedy makespan {mspan} exceeds T/2")
    return out


def run_makespan_family_suite(
    name: str,
    max_jobs: int = 4,
    values=DEFAULT_VALUES,
    dedup: bool = False,
    fail_fast: bool = True,
) -> SuiteResult:
    """lemma22 / prop25 / lemma26 / lemma24 over the exhaustive family."""
    result = SuiteResult(name, 0, [])
    for inst in iter_makespan_family(max_jobs, values, dedup=dedup):
        result.checked += 1
        for violation in check_makespan_lemmas(inst):
            result.violations.append((violation, emit_instance(inst)))
            if fail_fast:
                return result
    return result


# ---------------------------------------------------------------------------
# Lemma: removing U' from the universe costs at most |U'| packed sets.
# ---------------------------------------------------------------------------


def _check_universe_removal(inst: SetPackingInstance) -> list:
    out = []
    full = brute_setpacking_opt(inst)
    universe = list(range(inst.universe_size))
    for r in range(inst.universe_size + 1):
        for removed in itertools.combinations(universe, r):
            rest = [e for e in universe if e not in set(removed)]
            opt = brute_setpacking_opt(inst, restrict_universe=rest)
            if len(removed) + opt < full:
                out.append(
                    f"removing {removed} drops the optimum from {full} to {opt}"
                )
    return out


def iter_setpacking_exhaustive(universe_size: int, max_sets: int):
    """All collections of <= max_sets distinct nonempty subsets of the
    universe (unordered; empty sets never change any packing optimum)."""
    masks = list(range(1, 1 << universe_size))
    for k in range(1, max_sets + 1):
        for combo in itertools.combinations(masks, k):
            sets = tuple(
                tuple(e for e in range(universe_size) if mask >> e & 1) for mask in combo
            )
            yield SetPackingInstance(universe_size, sets, None)


EXHAUSTIVE_LEMMA42_SLICES = ((2, 2), (3, 3), (4, 4), (5, 4), (6, 3))
FULL_LEMMA42_SLICES = ((2, 2), (3, 3), (4, 4), (5, 5), (6, 5))


def run_lemma42_suite(
    exhaustive=EXHAUSTIVE_LEMMA42_SLICES,
    sample_universe: int = 6,
    sample_max_sets: int = 5,
    samples: int = 1500,
    seed: int = 0,
    fail_fast: bool = True,
) -> SuiteResult:
    """Exhaustive on small (universe, max_sets) slices, then seeded random
    collections at the larger scale; all U' subsets are checked each time."""
    result = SuiteResult("lemma42", 0, [])

    def handle(inst):
        result.checked += 1
        for violation in _check_universe_removal(inst):
            result.violations.append((violation, emit_instance(inst)))
            if fail_fast:
                return True
        return False

    for universe_size, max_sets in exhaustive:
        for inst in iter_setpacking_exhaustive(universe_size, max_sets):
            if handle(inst):
                return result
    gen = philox(mix64(seed, 0x42AA))
    for _ in range(samples):
        k = int(gen.integers(1, sample_max_sets + 1))
        sets = []
        for _s in range(k):
            size = int(gen.integers(1, sample_universe + 1))
            members = gen.choice(sample_universe, size=size, replace=False)
            sets.append(tuple(sorted(int(e) for e in members)))
        inst = setpacking_instance(sample_universe, sets)
        if handle(inst):
            return result
    return result


def run_gadget_suite(max_points: int = 10_000) -> SuiteResult:
    """Partition/size/intersection identities for every (sigma, d) with
    d^sigma <= max_points."""
    result = SuiteResult("gadget", 0, [])
    sigma = 2
    while 2 ** sigma <= max_points:
        d = 2
        while d ** sigma <= max_points:
            result.checked += 1
            try:
                validate_gadget(hypercube_gadget(0, sigma, d, 0), max_points)
            except AssertionError as exc:
                result.violations.append((f"sigma={sigma} d={d}: {exc}", None))
                return result
            d += 1
        sigma += 1
    return result


def random_tiny_formula(gen, max_clauses: int = 4):
    """Random small CNF with equal-length clauses for soundness sweeps."""
    q = 3
    num_clauses = int(gen.integers(1, max_clauses + 1))
    num_vars = int(gen.integers(q, 6))
    clauses = []
    for _ in range(num_clauses):
        variables = gen.choice(num_vars, size=q, replace=False)
        clause = tuple(
            int(v) + 1 if int(gen.integers(0, 2)) else -(int(v) + 1) for v in variables
        )
        clauses.append(clause)
    return cnf_formula(num_vars, clauses)


def run_soundness_suite(
    formulas: int = 20, seed: int = 0, eps_values=(ZERO, Rat(1, 31)), fail_fast: bool = True
) -> SuiteResult:
    """Completeness (eps=0 family size == max satisfiable clauses) and the
    soundness inequality for eps below the gadget threshold, on random tiny
    formulas."""
    result = SuiteResult("soundness", 0, [])
    gen = philox(mix64(seed, 0x50))
    for _ in range(formulas):
        phi = random_tiny_formula(gen)
        result.checked += 1
        for eps in eps_values:
            report = verify_reduction_soundness(phi, eps)
            if eps == 0 and report.max_almost_disjoint != report.max_satisfiable_clauses:
                result.violations.append(
                    (
                        f"eps=0: packed {report.max_almost_disjoint} != "
                        f"satisfiable {report.max_satisfiable_clauses}",
                        emit_instance(phi),
                    )
                )
            elif report.applicable and not report.holds:
                result.violations.append(
                    (f"eps={eps}: soundness inequality fails", emit_instance(phi))
                )
            if fail_fast and result.violations:
                return result
    return result


def run_oracle_eq_suite(samples: int = 40, seed: int = 0, fail_fast: bool = True) -> SuiteResult:
    """Planted generators against the brute-force oracles at desk scale."""
    result = SuiteResult("oracle-eq", 0, [])
    gen = philox(mix64(seed, 0x0E))
    for trial in range(samples):
        m = int(gen.integers(1, 4))
        n = int(gen.integers(1, 7))
        density = float(gen.integers(1, 11)) / 10.0
        inst = gen_planted_makespan(m, n, density, seed=int(gen.integers(0, 2 ** 32)))
        result.checked += 1
        opt = brute_makespan_opt(inst).opt_makespan
        if opt != inst.target_T:
            result.violations.append(
                (f"planted makespan optimum {opt} != target {inst.target_T}", emit_instance(inst))
            )
            if fail_fast:
                return result
        sp = gen_planted_setpacking(
            m=int(gen.integers(1, 4)),
            extra=int(gen.integers(0, 4)),
            min_size=1,
            max_size=int(gen.integers(1, 4)),
            seed=int(gen.integers(0, 2 ** 32)),
        )
        result.checked += 1
        opt_sp = brute_setpacking_opt(sp)
        if opt_sp < len(sp.planted):
            result.violations.append(
                (f"planted packing optimum {opt_sp} < planted {len(sp.planted)}", emit_instance(sp))
            )
            if fail_fast:
                return result
        out = reduce_setpacking_to_santaclaus(sp, T=1)
        sc, meta = out
        if sc.agents <= 3 and sc.items <= 6:
            result.checked += 1
            opt_sc = brute_santaclaus_opt(sc).opt_min_value
            if opt_sc != sc.target_T:
                result.violations.append(
                    (f"reduced santa claus optimum {opt_sc} != T", emit_instance(sc))
                )
                if fail_fast:
                    return result
    return result
