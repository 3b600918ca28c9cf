"""Constructive hardness reductions.

CNF -> Set Packing goes through one hypercube partition-system gadget per
variable: the gadget's matchings encode truth values, and a set is built
per (clause, satisfying assignment) as the union of the corresponding
matching edges.  Set Packing -> Santa Claus turns sets into agents,
elements into items worth T/|S_i| to interested agents, and pads with
dummy items worth T to everyone.
"""

import itertools
from dataclasses import dataclass
from typing import Optional

from ._rat import Rat, ZERO, rat
from .errors import (
    BadParams,
    MissingWitness,
    NonIntegralDummyCount,
    TooLarge,
)
from .instances import (
    Allocation,
    CnfFormula,
    SantaClausInstance,
    SetPackingInstance,
    allocation,
    setpacking_instance,
)

SOUNDNESS_SET_LIMIT = 30


@dataclass(frozen=True)
class HypercubeGadget:
    """Feige-style partition system on the block [d]^alphabet.

    Matching i (one per alphabet symbol) consists of the d edges
    e_{i,j} = {points whose i-th coordinate is j}; each matching partitions
    the block, |e_{i,j}| = d^(sigma-1), and edges from different matchings
    meet in exactly d^(sigma-2) points (a 1/d fraction).
    """

    variable: int
    alphabet_size: int
    degree: int
    offset: int

    def __post_init__(self):
        if self.alphabet_size < 2:
            raise BadParams("alphabet_size must be >= 2")
        if self.degree < 2:
            raise BadParams("degree must be >= 2 (d < 2 degenerates the intersections)")

    @property
    def block_size(self) -> int:
        return self.degree ** self.alphabet_size

    def block_ids(self) -> range:
        return range(self.offset, self.offset + self.block_size)

    def edge(self, i: int, j: int) -> frozenset:
        """Global element ids of e_{i,j}: points with coordinate i equal j."""
        if not (0 <= i < self.alphabet_size) or not (0 <= j < self.degree):
            raise BadParams(f"edge ({i},{j}) outside gadget dimensions")
        d, sigma = self.degree, self.alphabet_size
        ids = []
        for rest in itertools.product(range(d), repeat=sigma - 1):
            coords = rest[:i] + (j,) + rest[i:]
            rank = 0
            for c in coords:
                rank = rank * d + c
            ids.append(self.offset + rank)
        return frozenset(ids)


def hypercube_gadget(variable: int, alphabet_size: int, d: int, id_offset: int) -> HypercubeGadget:
    return HypercubeGadget(variable, alphabet_size, d, id_offset)


def validate_gadget(g: HypercubeGadget, enum_guard: int = 10_000):
    """Check the partition-system identities by direct enumeration."""
    if g.block_size > enum_guard:
        raise TooLarge(f"block of {g.block_size} points exceeds the enumeration guard")
    d, sigma = g.degree, g.alphabet_size
    block = set(g.block_ids())
    for i in range(sigma):
        edges = [g.edge(i, j) for j in range(d)]
        for e in edges:
            if len(e) != d ** (sigma - 1):
                raise AssertionError(f"edge size {len(e)} != d^(sigma-1)")
        union = set().union(*edges)
        if union != block or sum(len(e) for e in edges) != g.block_size:
            raise AssertionError(f"matching {i} does not partition the block")
    for i1 in range(sigma):
        for i2 in range(i1 + 1, sigma):
            for j1 in range(d):
                for j2 in range(d):
                    inter = g.edge(i1, j1) & g.edge(i2, j2)
                    if len(inter) != d ** (sigma - 2):
                        raise AssertionError(
                            f"cross intersection {len(inter)} != d^(sigma-2)"
                        )


@dataclass(frozen=True)
class ReductionParams:
    """Parameters of a CNF -> Set Packing reduction instance."""

    q: int
    alphabet_size: int
    d: int
    eta: int  # satisfying assignments per clause (2^q - 1 for distinct-variable CNF)
    gamma: object  # 1/d: cross-matching intersection fraction
    eps_bound: object  # gamma / (2q): almost-disjointness soundness threshold

    @classmethod
    def for_cnf(cls, q: int, alphabet_size: int, d: int) -> "ReductionParams":
        gamma = Rat(1, d)
        return cls(q, alphabet_size, d, 2 ** q - 1, gamma, gamma / (2 * q))


@dataclass(frozen=True)
class CnfReductionMeta:
    params: ReductionParams
    set_info: tuple  # per set: (clause index, assignment tuple of bools)
    gadget_offset: tuple  # per variable (1-based index - 1): first element id
    occurrence: tuple  # per clause: per literal, this variable's occurrence index


# Truth values map to matching indices: True -> matching 0, False -> matching 1.
_MATCHING_OF = {True: 0, False: 1}


def reduce_cnf_to_setpacking(
    phi: CnfFormula, alphabet_size: int = 2, witness: Optional[tuple] = None
):
    """One set per (clause, satisfying assignment); each set is the union of
    q gadget edges and has size q * d^(alphabet_size-1).

    d is the maximum variable occurrence count (raised to 2 if below).
    witness, when given, must be a satisfying assignment (tuple of bools,
    one per variable) of an exactly-d-regular formula; the matching sets
    then become the planted partition.
    """
    if alphabet_size < 2:
        raise BadParams("alphabet_size must be >= 2")
    if not phi.clauses:
        raise BadParams("formula has no clauses")
    q = len(phi.clauses[0])
    if any(len(c) != q for c in phi.clauses):
        raise BadParams("all clauses must have the same length")
    occ = phi.occurrences()
    d = max(2, max(occ.values()))
    params = ReductionParams.for_cnf(q, alphabet_size, d)

    block = d ** alphabet_size
    gadgets = [
        hypercube_gadget(v, alphabet_size, d, (v - 1) * block)
        for v in range(1, phi.num_vars + 1)
    ]
    universe = phi.num_vars * block

    seen = {v: 0 for v in occ}
    occurrence = []
    for clause in phi.clauses:
        occ_row = []
        for lit in clause:
            occ_row.append(seen[abs(lit)])
            seen[abs(lit)] += 1
        occurrence.append(tuple(occ_row))

    sets = []
    set_info = []
    for c, clause in enumerate(phi.clauses):
        variables = [abs(l) for l in clause]
        for values in itertools.product((True, False), repeat=q):
            satisfied = any(
                (lit > 0) == val for lit, val in zip(clause, values)
            )
            if not satisfied:
                continue
            members = set()
            for k, (v, val) in enumerate(zip(variables, values)):
                members |= gadgets[v - 1].edge(_MATCHING_OF[val], occurrence[c][k])
            sets.append(tuple(sorted(members)))
            set_info.append((c, values))

    planted = None
    if witness is not None:
        witness = tuple(bool(b) for b in witness)
        if len(witness) != phi.num_vars:
            raise BadParams("witness length != num_vars")
        if any(count != d for count in occ.values()):
            raise BadParams(
                "planted witness needs an exactly-d-regular formula "
                "(otherwise the matching sets cannot partition the universe)"
            )
        planted = []
        for c, clause in enumerate(phi.clauses):
            values = tuple(witness[abs(l) - 1] for l in clause)
            if not any((lit > 0) == val for lit, val in zip(clause, values)):
                raise BadParams(f"witness does not satisfy clause {c}")
            planted.append(set_info.index((c, values)))

    inst = setpacking_instance(universe, sets, planted)
    meta = CnfReductionMeta(
        params,
        tuple(set_info),
        tuple(g.offset for g in gadgets),
        tuple(occurrence),
    )
    return inst, meta


@dataclass(frozen=True)
class ScReductionMeta:
    agent_of_set: tuple  # identity map set index -> agent id
    item_kind: tuple  # per item: ("element", element id) or ("dummy", ordinal)
    witness: Allocation  # completeness witness: every agent gets exactly T


def reduce_setpacking_to_santaclaus(inst: SetPackingInstance, T=1, alpha=None):
    """Sets become agents; elements become items worth T/|S_i| to the sets
    containing them; (1-alpha)*n dummy items are worth T to everyone.

    alpha defaults to m/n from the planted witness, making the dummy count
    n - m.  The planted witness plus one dummy per leftover agent gives
    every agent exactly T.
    """
    if inst.planted is None:
        raise MissingWitness("the reduction needs a planted partition witness")
    T = rat(T)
    if T <= 0:
        raise BadParams("T must be positive")
    n = inst.num_sets
    m = len(inst.planted)
    a = Rat(m, n) if alpha is None else rat(alpha)
    dummy_rat = (1 - a) * n
    if dummy_rat.denominator != 1 or dummy_rat < 0:
        raise NonIntegralDummyCount(f"(1-alpha)*n = {dummy_rat} is not a whole item count")
    dummies = int(dummy_rat)
    items = inst.universe_size + dummies

    value = []
    for i in range(n):
        members = set(inst.sets[i])
        share = T / len(members) if members else ZERO
        row = [share if j in members else ZERO for j in range(inst.universe_size)]
        row += [T] * dummies
        value.append(tuple(row))
    sc = SantaClausInstance(n, items, tuple(value), T)

    owner = {}
    for idx in inst.planted:
        for e in inst.sets[idx]:
            owner[e] = idx
    leftovers = [i for i in range(n) if i not in set(inst.planted)]
    for k, agent in enumerate(leftovers[:dummies]):
        owner[inst.universe_size + k] = agent
    witness = allocation(owner)

    totals = {i: ZERO for i in range(n)}
    for item, agent in witness.owner:
        totals[agent] += sc.value[agent][item]
    covered = set(inst.planted) | set(leftovers[:dummies])
    for agent in covered:
        assert totals[agent] == T, f"witness gives agent {agent} {totals[agent]}, not T"

    meta = ScReductionMeta(
        tuple(range(n)),
        tuple(
            [("element", e) for e in range(inst.universe_size)]
            + [("dummy", k) for k in range(dummies)]
        ),
        witness,
    )
    return sc, meta


@dataclass(frozen=True)
class SoundnessReport:
    eps: object
    eps_bound: object
    applicable: bool  # eps < gamma/(2q)
    max_almost_disjoint: int
    max_satisfiable_clauses: int
    holds: Optional[bool]  # max_almost_disjoint <= max_satisfiable, when applicable


def verify_reduction_soundness(phi: CnfFormula, eps) -> SoundnessReport:
    """Exhaustively compare the largest eps-almost-disjoint family in the
    reduction output against the best satisfiable clause count."""
    from .oracles import brute_almost_disjoint_max

    eps = rat(eps)
    inst, meta = reduce_cnf_to_setpacking(phi)
    if inst.num_sets > SOUNDNESS_SET_LIMIT:
        raise TooLarge(
            f"{inst.num_sets} sets exceed the soundness search limit {SOUNDNESS_SET_LIMIT}"
        )
    if phi.num_vars > 20:
        raise TooLarge("too many variables for assignment enumeration")
    max_ad = brute_almost_disjoint_max(inst.sets, eps)
    best_sat = 0
    for values in itertools.product((True, False), repeat=phi.num_vars):
        sat = sum(
            1
            for clause in phi.clauses
            if any((lit > 0) == values[abs(lit) - 1] for lit in clause)
        )
        best_sat = max(best_sat, sat)
    applicable = eps < meta.params.eps_bound
    holds = (max_ad <= best_sat) if applicable else None
    return SoundnessReport(eps, meta.params.eps_bound, applicable, max_ad, best_sat, holds)
