"""Problem instances: data model, canonical serialization, and generators.

All numeric fields are exact rationals.  An unschedulable (machine, job)
pair is the sentinel None, encoded as the string "inf" on disk; it is
never a large stand-in number.  Serialization is canonical (sorted keys,
sorted collections) so structurally equal instances emit byte-identical
documents.
"""

import json
from dataclasses import dataclass, replace
from typing import Optional

from ._rat import Rat, ZERO, rat, rat_json
from ._rng import mix64, philox
from .errors import BadParams, InvariantError, ParseError

UNSCHEDULABLE = None  # sentinel value in processing-time tables

KINDS = ("makespan", "setpacking", "santaclaus", "cnf")


def _coerce_rat(value, where: str):
    try:
        return rat(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvariantError(f"{where}: not a rational: {value!r} ({exc})") from None


@dataclass(frozen=True)
class MakespanInstance:
    """Unrelated-machines makespan instance with a target makespan.

    proc[i][j] is the exact rational processing time of job j on machine i,
    or None when the pair is unschedulable.  Machine and job ids are the
    dense ranges [0, machines) and [0, jobs).
    """

    machines: int
    jobs: int
    proc: tuple
    target_T: object

    def __post_init__(self):
        if self.machines < 1 or self.jobs < 0:
            raise InvariantError("need at least one machine and a non-negative job count")
        if len(self.proc) != self.machines:
            raise InvariantError(f"proc has {len(self.proc)} rows for {self.machines} machines")
        for i, row in enumerate(self.proc):
            if len(row) != self.jobs:
                raise InvariantError(f"proc row {i} has {len(row)} entries for {self.jobs} jobs")
            for j, p in enumerate(row):
                if p is not None and p < 0:
                    raise InvariantError(f"proc[{i}][{j}] = {p} is negative")
        if self.target_T <= 0:
            raise InvariantError(f"target_T = {self.target_T} must be positive")

    @property
    def machine_ids(self) -> range:
        return range(self.machines)

    @property
    def job_ids(self) -> range:
        return range(self.jobs)


def makespan_instance(proc_rows, target_T) -> MakespanInstance:
    """Build a MakespanInstance from nested lists; entries may be ints,
    'p/q' strings, rationals, or None/'inf' for unschedulable pairs."""
    rows = []
    for i, row in enumerate(proc_rows):
        out = []
        for j, p in enumerate(row):
            if p is None or (isinstance(p, str) and p.strip() == "inf"):
                out.append(None)
            else:
                out.append(_coerce_rat(p, f"proc[{i}][{j}]"))
        rows.append(tuple(out))
    jobs = len(rows[0]) if rows else 0
    return MakespanInstance(len(rows), jobs, tuple(rows), _coerce_rat(target_T, "target_T"))


@dataclass(frozen=True)
class Schedule:
    """A set of (machine, job) assignments; each job appears at most once."""

    assignments: tuple

    def __post_init__(self):
        jobs = [j for _i, j in self.assignments]
        if len(jobs) != len(set(jobs)):
            raise InvariantError("a job appears on more than one machine")
        if list(self.assignments) != sorted(self.assignments):
            raise InvariantError("assignments must be sorted (machine, job) pairs")

    @property
    def job_count(self) -> int:
        return len(self.assignments)

    def jobs(self) -> frozenset:
        return frozenset(j for _i, j in self.assignments)


def schedule(pairs) -> Schedule:
    return Schedule(tuple(sorted((int(i), int(j)) for i, j in set(map(tuple, pairs)))))


@dataclass(frozen=True)
class SetPackingInstance:
    """Collection of sets over a dense universe [0, universe_size).

    planted, when present, lists set indices forming a partition of the
    universe (the hidden optimum the generators guarantee).
    """

    universe_size: int
    sets: tuple  # of sorted element-id tuples
    planted: Optional[tuple]

    def __post_init__(self):
        if self.universe_size < 0:
            raise InvariantError("universe_size must be non-negative")
        for k, s in enumerate(self.sets):
            if list(s) != sorted(set(s)):
                raise InvariantError(f"set {k} is not a sorted duplicate-free tuple")
            for e in s:
                if not (0 <= e < self.universe_size):
                    raise InvariantError(f"set {k}: element {e} outside universe")
        if self.planted is not None:
            seen = set()
            for idx in self.planted:
                if not (0 <= idx < len(self.sets)):
                    raise InvariantError(f"planted index {idx} out of range")
                s = set(self.sets[idx])
                if seen & s:
                    raise InvariantError("planted sets are not pairwise disjoint")
                seen |= s
            if seen != set(range(self.universe_size)):
                raise InvariantError("planted sets do not cover the universe")

    @property
    def num_sets(self) -> int:
        return len(self.sets)


def setpacking_instance(universe_size, sets, planted=None) -> SetPackingInstance:
    canon = tuple(tuple(sorted(set(int(e) for e in s))) for s in sets)
    p = None if planted is None else tuple(sorted(int(i) for i in planted))
    return SetPackingInstance(int(universe_size), canon, p)


@dataclass(frozen=True)
class SantaClausInstance:
    """Max-min allocation instance: value[i][j] >= 0 for agent i, item j."""

    agents: int
    items: int
    value: tuple
    target_T: object

    def __post_init__(self):
        if self.agents < 1 or self.items < 0:
            raise InvariantError("need at least one agent and a non-negative item count")
        if len(self.value) != self.agents:
            raise InvariantError("value table row count != agents")
        for i, row in enumerate(self.value):
            if len(row) != self.items:
                raise InvariantError(f"value row {i} has {len(row)} entries for {self.items} items")
            for j, v in enumerate(row):
                if v < 0:
                    raise InvariantError(f"value[{i}][{j}] = {v} is negative")
        if self.target_T <= 0:
            raise InvariantError("target_T must be positive")


def santaclaus_instance(value_rows, target_T) -> SantaClausInstance:
    rows = tuple(
        tuple(_coerce_rat(v, f"value[{i}][{j}]") for j, v in enumerate(row))
        for i, row in enumerate(value_rows)
    )
    items = len(rows[0]) if rows else 0
    return SantaClausInstance(len(rows), items, rows, _coerce_rat(target_T, "target_T"))


@dataclass(frozen=True)
class Allocation:
    """Partial item -> agent map, stored as sorted (item, agent) pairs."""

    owner: tuple

    def __post_init__(self):
        items = [it for it, _a in self.owner]
        if len(items) != len(set(items)):
            raise InvariantError("an item is allocated twice")
        if list(self.owner) != sorted(self.owner):
            raise InvariantError("owner pairs must be sorted by item")

    def as_dict(self) -> dict:
        return dict(self.owner)


def allocation(pairs) -> Allocation:
    return Allocation(tuple(sorted((int(it), int(a)) for it, a in dict(pairs).items())))


@dataclass(frozen=True)
class CnfFormula:
    """CNF with clauses as tuples of signed 1-based literals."""

    num_vars: int
    clauses: tuple

    def __post_init__(self):
        if self.num_vars < 0:
            raise InvariantError("num_vars must be non-negative")
        for c, clause in enumerate(self.clauses):
            seen = set()
            for lit in clause:
                v = abs(lit)
                if lit == 0 or v > self.num_vars:
                    raise InvariantError(f"clause {c}: literal {lit} out of range")
                if v in seen:
                    raise InvariantError(f"clause {c}: variable {v} appears twice")
                seen.add(v)

    def occurrences(self) -> dict:
        counts = {v: 0 for v in range(1, self.num_vars + 1)}
        for clause in self.clauses:
            for lit in clause:
                counts[abs(lit)] += 1
        return counts


def cnf_formula(num_vars, clauses) -> CnfFormula:
    canon = tuple(tuple(sorted((int(l) for l in cl), key=abs)) for cl in clauses)
    return CnfFormula(int(num_vars), canon)


# ---------------------------------------------------------------------------
# Canonical serialization
# ---------------------------------------------------------------------------


def canonical_json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _proc_json(p):
    return "inf" if p is None else rat_json(p)


def emit_instance(inst) -> bytes:
    """Canonical document for any instance type; parse(emit(x)) == x."""
    if isinstance(inst, MakespanInstance):
        doc = {
            "kind": "makespan",
            "machines": inst.machines,
            "jobs": inst.jobs,
            "target_T": rat_json(inst.target_T),
            "proc": [[_proc_json(p) for p in row] for row in inst.proc],
        }
    elif isinstance(inst, SetPackingInstance):
        doc = {
            "kind": "setpacking",
            "universe_size": inst.universe_size,
            "sets": [list(s) for s in inst.sets],
            "planted": None if inst.planted is None else list(inst.planted),
        }
    elif isinstance(inst, SantaClausInstance):
        doc = {
            "kind": "santaclaus",
            "agents": inst.agents,
            "items": inst.items,
            "target_T": rat_json(inst.target_T),
            "value": [[rat_json(v) for v in row] for row in inst.value],
        }
    elif isinstance(inst, CnfFormula):
        doc = {
            "kind": "cnf",
            "num_vars": inst.num_vars,
            "clauses": [list(c) for c in inst.clauses],
        }
    else:
        raise InvariantError(f"cannot emit object of type {type(inst).__name__}")
    return canonical_json_bytes(doc)


def _field(doc, name, where):
    if name not in doc:
        raise ParseError(f"{where}: missing field {name!r}")
    return doc[name]


def _parse_proc_entry(v, where):
    if v == "inf":
        return None
    if isinstance(v, bool) or isinstance(v, float):
        raise ParseError(f"{where}: processing times must be ints or 'p/q' strings, got {v!r}")
    try:
        return rat(v)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: bad rational {v!r}") from None


def _parse_rat_field(v, where):
    if isinstance(v, bool) or isinstance(v, float):
        raise ParseError(f"{where}: expected int or 'p/q' string, got {v!r}")
    try:
        return rat(v)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: bad rational {v!r}") from None


def parse_instance(data, kind: Optional[str] = None):
    """Parse a canonical instance document (bytes or str).

    kind, when given, must match the document's kind field.  Raises
    ParseError for malformed documents and InvariantError when the parsed
    data violates a type invariant (e.g. a planted non-partition).
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    doc_kind = _field(doc, "kind", "document")
    if doc_kind not in KINDS:
        raise ParseError(f"unknown kind {doc_kind!r}")
    if kind is not None and kind != doc_kind:
        raise ParseError(f"expected kind {kind!r}, document says {doc_kind!r}")

    if doc_kind == "makespan":
        proc = _field(doc, "proc", "makespan")
        machines = _field(doc, "machines", "makespan")
        jobs = _field(doc, "jobs", "makespan")
        if not isinstance(proc, list) or len(proc) != machines:
            raise ParseError("proc must be a list with one row per machine")
        rows = []
        for i, row in enumerate(proc):
            if not isinstance(row, list) or len(row) != jobs:
                raise ParseError(f"proc[{i}] must list one entry per job")
            rows.append(tuple(_parse_proc_entry(v, f"proc[{i}][{j}]") for j, v in enumerate(row)))
        return MakespanInstance(
            machines, jobs, tuple(rows), _parse_rat_field(_field(doc, "target_T", "makespan"), "target_T")
        )
    if doc_kind == "setpacking":
        sets = _field(doc, "sets", "setpacking")
        if not isinstance(sets, list):
            raise ParseError("sets must be a list")
        for k, s in enumerate(sets):
            if not isinstance(s, list) or not all(isinstance(e, int) for e in s):
                raise ParseError(f"sets[{k}] must be a list of integers")
        return SetPackingInstance(
            _field(doc, "universe_size", "setpacking"),
            tuple(tuple(s) for s in sets),
            None if doc.get("planted") is None else tuple(doc["planted"]),
        )
    if doc_kind == "santaclaus":
        value = _field(doc, "value", "santaclaus")
        agents = _field(doc, "agents", "santaclaus")
        items = _field(doc, "items", "santaclaus")
        if not isinstance(value, list) or len(value) != agents:
            raise ParseError("value must be a list with one row per agent")
        rows = []
        for i, row in enumerate(value):
            if not isinstance(row, list) or len(row) != items:
                raise ParseError(f"value[{i}] must list one entry per item")
            rows.append(tuple(_parse_rat_field(v, f"value[{i}][{j}]") for j, v in enumerate(row)))
        return SantaClausInstance(
            agents, items, tuple(rows), _parse_rat_field(_field(doc, "target_T", "santaclaus"), "target_T")
        )
    clauses = _field(doc, "clauses", "cnf")
    if not isinstance(clauses, list):
        raise ParseError("clauses must be a list")
    for c, cl in enumerate(clauses):
        if not isinstance(cl, list) or not all(isinstance(l, int) for l in cl):
            raise ParseError(f"clauses[{c}] must be a list of signed integers")
    return CnfFormula(_field(doc, "num_vars", "cnf"), tuple(tuple(cl) for cl in clauses))


def parse_dimacs(text) -> CnfFormula:
    """Read DIMACS CNF text into a CnfFormula."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    num_vars = None
    num_clauses = None
    clauses = []
    pending = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: bad problem line {line!r}")
            num_vars, num_clauses = int(parts[2]), int(parts[3])
            continue
        if num_vars is None:
            raise ParseError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if pending:
        raise ParseError("last clause is not terminated by 0")
    if num_vars is None:
        raise ParseError("missing 'p cnf' header")
    if num_clauses is not None and len(clauses) != num_clauses:
        raise ParseError(f"header promises {num_clauses} clauses, found {len(clauses)}")
    return cnf_formula(num_vars, clauses)


def emit_dimacs(phi: CnfFormula) -> bytes:
    lines = [f"p cnf {phi.num_vars} {len(phi.clauses)}"]
    for clause in phi.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def gen_planted_makespan(m: int, n: int, density: float, seed: int) -> MakespanInstance:
    """Random makespan instance whose optimal full-schedule makespan is
    exactly target_T.

    A hidden schedule is planted: machine 0 is filled to exactly T and its
    jobs receive no other finite entries, so every full schedule loads
    machine 0 to at least T; remaining machines get loads <= T.  Decoy
    entries appear with probability `density` and are drawn from
    [planted value, T], which keeps T optimal.  The planted schedule is
    discarded, not stored.
    """
    if m < 1 or n < 1:
        raise BadParams("need m >= 1 and n >= 1")
    if not (0 < density <= 1):
        raise BadParams("density must be in (0, 1]")
    gen = philox(mix64(seed, 0x6D616B65))
    owner = [int(x) for x in gen.integers(0, m, size=n)]
    owner[0] = 0  # machine 0 is the exactly-T machine and must own a job

    raw = [int(x) for x in gen.integers(1, 9, size=n)]
    T = Rat(sum(w for j, w in enumerate(raw) if owner[j] == 0))
    p_planted = [ZERO] * n
    for j in range(n):
        if owner[j] == 0:
            p_planted[j] = Rat(raw[j])
    for i in range(1, m):
        jobs_i = [j for j in range(n) if owner[j] == i]
        if not jobs_i:
            continue
        big = len(jobs_i) >= 1 and int(gen.integers(0, 4)) == 0
        budget = T
        if big:
            frac = Rat(int(gen.integers(51, 76)), 100)  # (T/2, 3T/4]
            p_planted[jobs_i[0]] = frac * T
            budget = T - frac * T
            jobs_i = jobs_i[1:]
        if jobs_i:
            weights = [int(x) for x in gen.integers(1, 9, size=len(jobs_i))]
            theta = Rat(int(gen.integers(60, 101)), 100)
            scale = budget * theta / sum(weights)
            for j, w in zip(jobs_i, weights):
                p_planted[j] = w * scale

    proc = [[None] * n for _ in range(m)]
    for j in range(n):
        proc[owner[j]][j] = p_planted[j]
    for j in range(n):
        if owner[j] == 0:
            continue  # machine-0 jobs are pinned: no decoys anywhere
        for i in range(m):
            if i == owner[j]:
                continue
            if float(gen.random()) < density:
                t = Rat(int(gen.integers(0, 101)), 100)
                proc[i][j] = p_planted[j] + (T - p_planted[j]) * t
    return MakespanInstance(m, n, tuple(tuple(row) for row in proc), T)


def gen_planted_setpacking(
    m: int, extra: int, min_size: int, max_size: int, seed: int
) -> SetPackingInstance:
    """Set-packing instance whose first m sets partition the universe;
    `extra` decoy sets are random element samples."""
    if m < 1:
        raise BadParams("need m >= 1 planted sets")
    if extra < 0:
        raise BadParams("extra must be non-negative")
    if not (1 <= min_size <= max_size):
        raise BadParams("need 1 <= min_size <= max_size")
    gen = philox(mix64(seed, 0x73657470))
    sizes = [int(x) for x in gen.integers(min_size, max_size + 1, size=m)]
    universe = sum(sizes)
    perm = [int(x) for x in gen.permutation(universe)]
    sets = []
    at = 0
    for s in sizes:
        sets.append(tuple(sorted(perm[at : at + s])))
        at += s
    for _ in range(extra):
        t = min(int(gen.integers(min_size, max_size + 1)), universe)
        sample = gen.choice(universe, size=t, replace=False)
        sets.append(tuple(sorted(int(e) for e in sample)))
    return SetPackingInstance(universe, tuple(sets), tuple(range(m)))


def gen_cnf_regular(num_vars: int, q: int, d: int, seed: int) -> CnfFormula:
    """Exactly-(q, d)-regular CNF: every clause has length q, every variable
    occurs exactly d times, polarities uniform at random."""
    if num_vars < 1 or q < 1 or d < 1:
        raise BadParams("num_vars, q, d must be positive")
    if (num_vars * d) % q != 0:
        raise BadParams(f"num_vars*d = {num_vars * d} is not divisible by q = {q}")
    if q > num_vars:
        raise BadParams("clause length exceeds variable count; duplicates unavoidable")
    gen = philox(mix64(seed, 0x636E66))
    pool = [v for v in range(1, num_vars + 1) for _ in range(d)]
    pool = [pool[int(i)] for i in gen.permutation(len(pool))]
    num_clauses = num_vars * d // q

    def clause_of(idx):
        return pool[idx * q : (idx + 1) * q]

    # Repair duplicate variables within clauses by swapping pool positions.
    for _attempt in range(10_000):
        bad = next(
            (c for c in range(num_clauses) if len(set(clause_of(c))) < q), None
        )
        if bad is None:
            break
        dup_pos = None
        seen = set()
        for k in range(bad * q, (bad + 1) * q):
            if pool[k] in seen:
                dup_pos = k
                break
            seen.add(pool[k])
        other = int(gen.integers(0, len(pool)))
        o_clause = other // q
        if o_clause == bad:
            continue
        if pool[other] in clause_of(bad):
            continue
        if pool[dup_pos] in (c for i, c in enumerate(clause_of(o_clause)) if i != other % q):
            continue
        pool[dup_pos], pool[other] = pool[other], pool[dup_pos]
    else:
        raise BadParams("could not build duplicate-free clauses for these parameters")

    signs = [1 if int(b) else -1 for b in gen.integers(0, 2, size=num_vars * d)]
    clauses = [
        tuple(signs[idx * q + k] * clause_of(idx)[k] for k in range(q))
        for idx in range(num_clauses)
    ]
    return cnf_formula(num_vars, clauses)


def with_target(inst: MakespanInstance, target_T) -> MakespanInstance:
    """Same instance with a different target makespan."""
    return replace(inst, target_T=rat(target_T))
