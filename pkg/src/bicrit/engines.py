"""Generic optimization kernels: exact rational LP, max flow, matching.

The LP solver is a two-phase revised simplex over exact rationals with
Bland's pivoting rule, so every answer is bit-exact and reproducible and
termination is guaranteed.  Max flow is shortest-augmenting-path with
integer capacities; every call returns a min-cut certificate and checks
it against the flow value before returning.
"""

from collections import deque
from dataclasses import dataclass
from typing import Optional

from ._rat import Rat, ZERO, rat
from .errors import DimensionError, IterationLimit

LE, EQ, GE = "<=", "=", ">="

DEFAULT_ITER_CAP = 200_000


@dataclass(frozen=True)
class LpProblem:
    """max objective . x  subject to linear constraints and variable bounds.

    constraints: tuple of (coeffs, relation, rhs) with relation in {<=, =, >=}.
    bounds: per-variable (lo, hi); None means unbounded on that side.
    """

    objective: tuple
    constraints: tuple
    bounds: tuple

    def __post_init__(self):
        n = len(self.objective)
        if len(self.bounds) != n:
            raise DimensionError(f"{len(self.bounds)} bounds for {n} variables")
        for k, (coeffs, rel, _rhs) in enumerate(self.constraints):
            if len(coeffs) != n:
                raise DimensionError(
                    f"constraint {k}: {len(coeffs)} coefficients for {n} variables"
                )
            if rel not in (LE, EQ, GE):
                raise DimensionError(f"constraint {k}: unknown relation {rel!r}")
        for j, (lo, hi) in enumerate(self.bounds):
            if lo is not None and hi is not None and lo > hi:
                raise DimensionError(f"variable {j}: lower bound {lo} exceeds upper bound {hi}")

    @property
    def num_vars(self) -> int:
        return len(self.objective)


def lp_problem(objective, constraints, bounds) -> LpProblem:
    """Build an LpProblem, coercing every number to an exact rational."""
    obj = tuple(rat(c) for c in objective)
    cons = tuple(
        (tuple(rat(a) for a in coeffs), rel, rat(rhs)) for coeffs, rel, rhs in constraints
    )
    bnds = tuple(
        (None if lo is None else rat(lo), None if hi is None else rat(hi)) for lo, hi in bounds
    )
    return LpProblem(obj, cons, bnds)


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    values: Optional[tuple]
    objective_value: Optional[object]

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _check_exact_feasibility(problem: LpProblem, values):
    for j, (lo, hi) in enumerate(problem.bounds):
        if lo is not None and values[j] < lo:
            raise AssertionError(f"solver bug: x[{j}]={values[j]} below bound {lo}")
        if hi is not None and values[j] > hi:
            raise AssertionError(f"solver bug: x[{j}]={values[j]} above bound {hi}")
    for k, (coeffs, rel, rhs) in enumerate(problem.constraints):
        lhs = sum((c * values[j] for j, c in enumerate(coeffs) if c), ZERO)
        ok = lhs <= rhs if rel == LE else lhs >= rhs if rel == GE else lhs == rhs
        if not ok:
            raise AssertionError(f"solver bug: constraint {k} violated: {lhs} {rel} {rhs}")


class _Standardized:
    """Equality standard form  A u = b (b >= 0), u >= 0, plus the map back to x.

    Shifted/bounded variables become non-negative u's; two-sided bounds add
    a residual <= row; free variables split into a difference of two u's.
    Columns are kept sparse as (row, coeff) lists.
    """

    def __init__(self, problem: LpProblem):
        self.problem = problem
        n = problem.num_vars
        self.shift = [ZERO] * n
        self.sign = [1] * n
        self.pos = [0] * n
        self.neg: list = [None] * n
        num_structural = 0
        extra_rows = []  # (variable, residual) for two-sided bounds
        for j, (lo, hi) in enumerate(problem.bounds):
            self.pos[j] = num_structural
            num_structural += 1
            if lo is not None:
                self.shift[j] = lo
                if hi is not None:
                    extra_rows.append((j, hi - lo))
            elif hi is not None:
                self.shift[j] = hi
                self.sign[j] = -1
            else:
                self.neg[j] = num_structural
                num_structural += 1
        self.num_structural = num_structural

        rows = []
        for coeffs, rel, rhs in problem.constraints:
            shifted = rhs - sum((c * self.shift[j] for j, c in enumerate(coeffs) if c), ZERO)
            row = {}
            for j, c in enumerate(coeffs):
                if not c:
                    continue
                p = self.pos[j]
                row[p] = row.get(p, ZERO) + c * self.sign[j]
                if self.neg[j] is not None:
                    q = self.neg[j]
                    row[q] = row.get(q, ZERO) - c
            rows.append((row, rel, shifted))
        one = Rat(1)
        for j, residual in extra_rows:
            rows.append(({self.pos[j]: one}, LE, residual))

        self.num_rows = len(rows)
        self.b = []
        self.cols = [[] for _ in range(num_structural)]
        self.slack_of_row = [None] * self.num_rows
        for i, (row, rel, rhs) in enumerate(rows):
            if rhs < 0:
                rhs = -rhs
                rel = {LE: GE, GE: LE, EQ: EQ}[rel]
                row = {c: -v for c, v in row.items()}
            self.b.append(rhs)
            for cidx, coeff in sorted(row.items()):
                if coeff:
                    self.cols[cidx].append((i, coeff))
            if rel == LE:
                self.slack_of_row[i] = len(self.cols)
                self.cols.append([(i, one)])
            elif rel == GE:
                self.cols.append([(i, -one)])

    def reconstruct(self, u_values):
        x = []
        for j in range(self.problem.num_vars):
            v = self.shift[j] + self.sign[j] * u_values[self.pos[j]]
            if self.neg[j] is not None:
                v -= u_values[self.neg[j]]
            x.append(v)
        return tuple(x)

    def phase2_costs(self):
        """min-form cost vector for the real columns: -(objective) pushed through
        the variable transform."""
        costs = [ZERO] * len(self.cols)
        for j, c in enumerate(self.problem.objective):
            if not c:
                continue
            costs[self.pos[j]] -= c * self.sign[j]
            if self.neg[j] is not None:
                costs[self.neg[j]] += c
        return costs


def _solve_unconstrained(problem: LpProblem) -> LpSolution:
    values = []
    for j, c in enumerate(problem.objective):
        lo, hi = problem.bounds[j]
        if c > 0:
            if hi is None:
                return LpSolution(LpSolution.UNBOUNDED, None, None)
            values.append(hi)
        elif c < 0:
            if lo is None:
                return LpSolution(LpSolution.UNBOUNDED, None, None)
            values.append(lo)
        else:
            values.append(lo if lo is not None else (hi if hi is not None else ZERO))
    obj = sum((problem.objective[j] * values[j] for j in range(problem.num_vars)), ZERO)
    return LpSolution(LpSolution.OPTIMAL, tuple(values), obj)


def lp_solve(problem: LpProblem, max_iters: int = DEFAULT_ITER_CAP) -> LpSolution:
    """Solve max c.x with exact rational arithmetic.

    Two-phase revised simplex, Bland's rule (lowest entering index; ratio
    ties to the lowest basic variable index).  Returns a vertex-optimal
    feasible point when status is optimal.  Raises IterationLimit when the
    pivot budget is exhausted.
    """
    std = _Standardized(problem)
    m = std.num_rows
    if m == 0:
        return _solve_unconstrained(problem)

    cols = list(std.cols)
    n_real = len(cols)
    basis = [0] * m
    one = Rat(1)
    for i in range(m):
        if std.slack_of_row[i] is not None:
            basis[i] = std.slack_of_row[i]
        else:
            basis[i] = len(cols)
            cols.append([(i, one)])
    n_total = len(cols)

    binv = [[one if i == k else ZERO for k in range(m)] for i in range(m)]
    xb = list(std.b)
    iters = 0

    def direction_of(j):
        d = [ZERO] * m
        for r, v in cols[j]:
            for i in range(m):
                if binv[i][r]:
                    d[i] += binv[i][r] * v
        return d

    def pivot(r, j, d):
        piv = d[r]
        inv_piv = one / piv
        row_r = binv[r]
        for k in range(m):
            if row_r[k]:
                row_r[k] *= inv_piv
        xb[r] *= inv_piv
        for i in range(m):
            if i == r:
                continue
            f = d[i]
            if f:
                row_i = binv[i]
                for k in range(m):
                    if row_r[k]:
                        row_i[k] -= f * row_r[k]
                xb[i] -= f * xb[r]
        basis[r] = j

    def run_phase(costs):
        # costs has length n_total; entering restricted to real columns
        # (artificials never re-enter once out).
        nonlocal iters
        basic_set = set(basis)
        while True:
            if iters >= max_iters:
                raise IterationLimit(f"simplex exceeded {max_iters} pivots")
            iters += 1
            y = [ZERO] * m
            for i in range(m):
                cb = costs[basis[i]]
                if cb:
                    row = binv[i]
                    for k in range(m):
                        if row[k]:
                            y[k] += cb * row[k]
            entering = -1
            for j in range(n_real):
                if j in basic_set:
                    continue
                rc = costs[j]
                for r, v in cols[j]:
                    if y[r]:
                        rc -= y[r] * v
                if rc < 0:
                    entering = j
                    break
            if entering < 0:
                return True
            d = direction_of(entering)
            leave = -1
            best_ratio = None
            for i in range(m):
                di = d[i]
                if di > 0:
                    ratio = xb[i] / di
                elif di != 0 and basis[i] >= n_real and xb[i] == 0:
                    # A basic artificial pinned at zero must not drift; kick it
                    # out with a degenerate pivot whenever the direction moves it.
                    ratio = ZERO
                else:
                    continue
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
            if leave < 0:
                return False
            basic_set.discard(basis[leave])
            basic_set.add(entering)
            pivot(leave, entering, d)

    phase1_costs = [ZERO] * n_real + [one] * (n_total - n_real)
    bounded = run_phase(phase1_costs)
    assert bounded, "phase 1 is bounded below by zero"
    art_sum = sum((xb[i] for i in range(m) if basis[i] >= n_real), ZERO)
    if art_sum > 0:
        return LpSolution(LpSolution.INFEASIBLE, None, None)

    phase2_costs = std.phase2_costs() + [ZERO] * (n_total - n_real)
    bounded = run_phase(phase2_costs)
    if not bounded:
        return LpSolution(LpSolution.UNBOUNDED, None, None)

    u = [ZERO] * n_real
    for i in range(m):
        if basis[i] < n_real:
            u[basis[i]] = xb[i]
    values = std.reconstruct(u)
    obj = sum((problem.objective[j] * values[j] for j in range(problem.num_vars)), ZERO)
    _check_exact_feasibility(problem, values)
    return LpSolution(LpSolution.OPTIMAL, values, obj)


# ---------------------------------------------------------------------------
# Max flow
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlowNetwork:
    """Directed graph with integer arc capacities and distinct source/sink."""

    num_nodes: int
    arcs: tuple  # of (tail, head, capacity)
    source: int
    sink: int

    def __post_init__(self):
        if not (0 <= self.source < self.num_nodes) or not (0 <= self.sink < self.num_nodes):
            raise DimensionError("source/sink out of range")
        if self.source == self.sink:
            raise DimensionError("source equals sink")
        for k, (u, v, c) in enumerate(self.arcs):
            if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
                raise DimensionError(f"arc {k}: endpoint out of range")
            if not isinstance(c, int) or isinstance(c, bool) or c < 0:
                raise DimensionError(f"arc {k}: capacity must be a non-negative integer")


def flow_network(num_nodes, arcs, source, sink) -> FlowNetwork:
    return FlowNetwork(int(num_nodes), tuple((u, v, c) for u, v, c in arcs), source, sink)


@dataclass(frozen=True)
class FlowResult:
    value: int
    flow: tuple  # per-arc flow, same order as net.arcs
    min_cut: frozenset  # source side of a certifying cut


def cut_capacity(net: FlowNetwork, cut) -> int:
    return sum(c for u, v, c in net.arcs if u in cut and v not in cut)


def max_flow(net: FlowNetwork) -> FlowResult:
    """Edmonds-Karp max flow with a min-cut certificate.

    Flow conservation and the value == cut-capacity identity hold on every
    return (the latter is checked here, per call).
    """
    flow = [0] * len(net.arcs)
    adj = [[] for _ in range(net.num_nodes)]
    for k, (u, v, _c) in enumerate(net.arcs):
        adj[u].append((v, k, True))   # forward residual: capacity - flow
        adj[v].append((u, k, False))  # backward residual: flow
    value = 0
    while True:
        parent = [None] * net.num_nodes
        parent[net.source] = (net.source, -1, True)
        queue = deque([net.source])
        while queue:
            u = queue.popleft()
            if u == net.sink:
                break
            for v, k, fwd in adj[u]:
                residual = net.arcs[k][2] - flow[k] if fwd else flow[k]
                if residual > 0 and parent[v] is None:
                    parent[v] = (u, k, fwd)
                    queue.append(v)
        if parent[net.sink] is None:
            break
        bottleneck = None
        v = net.sink
        while v != net.source:
            u, k, fwd = parent[v]
            residual = net.arcs[k][2] - flow[k] if fwd else flow[k]
            bottleneck = residual if bottleneck is None else min(bottleneck, residual)
            v = u
        v = net.sink
        while v != net.source:
            u, k, fwd = parent[v]
            flow[k] += bottleneck if fwd else -bottleneck
            v = u
        value += bottleneck
    reachable = [False] * net.num_nodes
    reachable[net.source] = True
    queue = deque([net.source])
    while queue:
        u = queue.popleft()
        for v, k, fwd in adj[u]:
            residual = net.arcs[k][2] - flow[k] if fwd else flow[k]
            if residual > 0 and not reachable[v]:
                reachable[v] = True
                queue.append(v)
    cut = frozenset(i for i in range(net.num_nodes) if reachable[i])
    if cut_capacity(net, cut) != value:
        raise AssertionError("max-flow bug: cut capacity does not certify flow value")
    return FlowResult(value, tuple(flow), cut)


def max_bipartite_matching(num_left: int, num_right: int, edges) -> tuple:
    """Maximum matching via unit-capacity max flow.

    Returns vertex-disjoint (left, right) pairs, sorted; deterministic for
    a given edge set.
    """
    edges = sorted(set((int(l), int(r)) for l, r in edges))
    for l, r in edges:
        if not (0 <= l < num_left and 0 <= r < num_right):
            raise DimensionError(f"edge ({l},{r}) out of range")
    source = 0
    sink = 1 + num_left + num_right
    arcs = [(source, 1 + l, 1) for l in range(num_left)]
    edge_base = len(arcs)
    arcs += [(1 + l, 1 + num_left + r, 1) for l, r in edges]
    arcs += [(1 + num_left + r, sink, 1) for r in range(num_right)]
    result = max_flow(flow_network(2 + num_left + num_right, arcs, source, sink))
    return tuple(edges[k] for k in range(len(edges)) if result.flow[edge_base + k] == 1)
