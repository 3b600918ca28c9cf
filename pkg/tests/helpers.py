"""Independent reference implementations used only by tests.

These deliberately avoid the package's own kernels: the LP oracle
enumerates candidate vertices by solving constraint subsets with Gaussian
elimination, and the almost-disjointness oracle enumerates element
assignments directly.
"""

import itertools

from bicrit._rat import Rat, ZERO


def gauss_solve(rows, rhs):
    """Solve a square rational system exactly; None when singular."""
    n = len(rows)
    a = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def brute_lp_vertex_opt(problem):
    """Best objective over all basic (vertex) solutions of an LP whose
    variables all have finite bounds.  Returns (best objective, best point)
    or (None, None) when no feasible vertex exists (infeasible, since a
    bounded nonempty polytope has vertices)."""
    n = problem.num_vars
    rows = []
    for coeffs, rel, rhs in problem.constraints:
        rows.append((tuple(coeffs), rel, rhs))
    for j, (lo, hi) in enumerate(problem.bounds):
        assert lo is not None and hi is not None, "oracle needs box bounds"
        unit = tuple(Rat(1) if k == j else ZERO for k in range(n))
        rows.append((unit, ">=", lo))
        rows.append((unit, "<=", hi))

    def feasible(x):
        for coeffs, rel, rhs in rows:
            lhs = sum((c * x[j] for j, c in enumerate(coeffs) if c), ZERO)
            if rel == "<=" and lhs > rhs:
                return False
            if rel == ">=" and lhs < rhs:
                return False
            if rel == "=" and lhs != rhs:
                return False
        return True

    best = None
    best_x = None
    for combo in itertools.combinations(range(len(rows)), n):
        mat = [rows[k][0] for k in combo]
        rhs = [rows[k][2] for k in combo]
        x = gauss_solve(mat, rhs)
        if x is None or not feasible(x):
            continue
        obj = sum((problem.objective[j] * x[j] for j in range(n)), ZERO)
        if best is None or obj > best:
            best, best_x = obj, tuple(x)
    return best, best_x


def brute_almost_disjoint_feasible(sets, demands):
    """Assign each element to at most one containing set, exhaustively;
    feasible iff some assignment gives every set its demand."""
    sets = [frozenset(s) for s in sets]
    elements = sorted(set().union(*sets)) if sets else []
    choices = []
    for e in elements:
        owners = [k for k, s in enumerate(sets) if e in s]
        choices.append([None] + owners)
    for combo in itertools.product(*choices):
        counts = [0] * len(sets)
        for pick in combo:
            if pick is not None:
                counts[pick] += 1
        if all(c >= d for c, d in zip(counts, demands)):
            return True
    return False


def brute_private_element_max(sets, universe):
    """Most sets that can each receive one private element (exhaustive)."""
    sets = [frozenset(s) & frozenset(universe) for s in sets]
    best = 0
    for r in range(len(sets), 0, -1):
        if r <= best:
            break
        for combo in itertools.combinations(range(len(sets)), r):
            for picks in itertools.product(*[sorted(sets[k]) for k in combo]):
                if len(set(picks)) == r:
                    best = max(best, r)
                    break
            if best == r:
                break
    return best
