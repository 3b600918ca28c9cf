"""Command-line surface: generate, solve, bench, verify, reduce.

Exit codes: 0 = all verdicts pass, 1 = a verdict failed, 2 = usage or
input error.  Every command is deterministic given its full flag set.
"""

import argparse
import hashlib
import json
import math
import statistics
import sys
from dataclasses import dataclass

from ._rat import Rat, rat, rat_json
from .engines import cut_capacity  # noqa: F401  (re-exported for report tooling)
from .errors import BadParams, BicritError, MismatchError, TooLarge
from .instances import (
    CnfFormula,
    MakespanInstance,
    SetPackingInstance,
    canonical_json_bytes,
    emit_dimacs,
    emit_instance,
    gen_cnf_regular,
    gen_planted_makespan,
    gen_planted_setpacking,
    parse_dimacs,
    parse_instance,
)
from .makespan import (
    alg1_match_large,
    alg2_round,
    alg3_greedy,
    combined_schedule,
    evaluate_schedule,
    solve_clp,
    theoretical_floor,
    DEFAULT_COLUMN_CAP,
)
from .reductions import reduce_cnf_to_setpacking, reduce_setpacking_to_santaclaus
from .setpacking import SpParams, sp_combined, sp_large_phase, sp_small_phase, validate_packing
from . import suites

MAKESPAN_ALGS = ("alg1", "alg2", "alg3", "combined")
SETPACKING_ALGS = ("sp_small", "sp_large", "sp_all")


@dataclass(frozen=True)
class ExperimentReport:
    """Aggregate of a seed-range benchmark; verdict is recomputed from the
    raw per-seed metrics (mean >= floor - 3 * SE)."""

    instance_digest: str
    algorithm: str
    seed_start: int
    trials: int
    per_seed: tuple
    mean: float
    std: float
    se: float
    floor: float
    verdict: bool

    @classmethod
    def from_runs(cls, digest, algorithm, seed_start, per_seed, floor):
        values = [float(v) for v in per_seed]
        mean = statistics.fmean(values)
        std = statistics.stdev(values) if len(values) > 1 else 0.0
        se = std / math.sqrt(len(values))
        return cls(
            digest, algorithm, seed_start, len(values), tuple(values),
            mean, std, se, float(floor), mean >= float(floor) - 3 * se,
        )

    def to_json(self) -> dict:
        return {
            "instance_digest": self.instance_digest,
            "algorithm": self.algorithm,
            "seed_start": self.seed_start,
            "trials": self.trials,
            "per_seed": list(self.per_seed),
            "mean": self.mean,
            "std": self.std,
            "se": self.se,
            "floor": self.floor,
            "verdict": self.verdict,
        }


def instance_digest(inst) -> str:
    return hashlib.sha256(emit_instance(inst)).hexdigest()


def _read_instance(path, kind=None):
    data = open(path, "rb").read()
    if path.endswith(".cnf") or data.lstrip().startswith(b"p cnf") or data.lstrip().startswith(b"c"):
        phi = parse_dimacs(data)
        if kind not in (None, "cnf"):
            raise MismatchError(f"expected a {kind} instance, got DIMACS CNF")
        return phi
    return parse_instance(data, kind)


def _write(path, data: bytes):
    if path is None or path == "-":
        sys.stdout.write(data.decode("utf-8"))
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def cmd_gen(args) -> int:
    if args.kind == "makespan":
        inst = gen_planted_makespan(args.m, args.n, args.density, args.seed)
        _write(args.out, emit_instance(inst))
    elif args.kind == "setpacking":
        inst = gen_planted_setpacking(
            args.m, args.extra, args.min_size, args.max_size, args.seed
        )
        _write(args.out, emit_instance(inst))
    elif args.kind == "cnf":
        phi = gen_cnf_regular(args.vars, args.q, args.d, args.seed)
        data = emit_dimacs(phi) if args.format == "dimacs" else emit_instance(phi)
        _write(args.out, data)
    else:
        raise BadParams(f"cannot generate kind {args.kind!r}")
    return 0


def _sp_params(args) -> SpParams:
    return SpParams.from_delta(rat(args.delta))


def _solve_makespan(inst, args):
    n = inst.jobs
    if args.algorithm == "alg1":
        sched = alg1_match_large(inst)
        count, mspan = evaluate_schedule(inst, sched)
        report = {"algorithm": "alg1", "m_star": count, "count": count,
                  "makespan": rat_json(mspan), "verdict": bool(mspan <= inst.target_T)}
    elif args.algorithm == "alg2":
        clp = solve_clp(inst, args.column_cap)
        sched = alg2_round(clp, inst, args.seed)
        count, mspan = evaluate_schedule(inst, sched)
        report = {"algorithm": "alg2", "count": count, "fraction": count / n,
                  "makespan": rat_json(mspan), "verdict": bool(mspan <= inst.target_T)}
    elif args.algorithm == "alg3":
        sched, trace = alg3_greedy(inst)
        m_star = alg1_match_large(inst).job_count
        count, mspan = evaluate_schedule(inst, sched)
        ok = 6 * count >= n - m_star and 2 * mspan <= inst.target_T
        report = {"algorithm": "alg3", "count": count, "m_star": m_star,
                  "floor": math.ceil((n - m_star) / 6),
                  "listed": sum(len(l) for l in trace.lists),
                  "makespan": rat_json(mspan), "verdict": bool(ok)}
    else:
        sched, rep = combined_schedule(inst, args.seed, args.column_cap)
        ok = 2 * rep.makespan <= 3 * inst.target_T
        report = dict(rep.to_json(), algorithm="combined", count=sched.job_count,
                      verdict=bool(ok))
    sol_doc = {"kind": "schedule", "assignments": [list(p) for p in sched.assignments]}
    return report, canonical_json_bytes(sol_doc)


def _solve_setpacking(inst, args):
    params = _sp_params(args)
    if args.algorithm == "sp_small":
        small = [(k, inst.sets[k]) for k in range(inst.num_sets)
                 if len(inst.sets[k]) <= params.C]
        sol, _used = sp_small_phase(small, range(inst.universe_size))
    elif args.algorithm == "sp_large":
        big = [(k, inst.sets[k]) for k in range(inst.num_sets)
               if len(inst.sets[k]) > params.C]
        sol = sp_large_phase(big, range(inst.universe_size), params, args.seed,
                             args.lp_mode, inst.planted)
    else:
        sol = sp_combined(inst, params, args.seed, args.lp_mode)
    validate_packing(inst, sol)
    report = {
        "algorithm": args.algorithm,
        "count": sol.count,
        "delta": rat_json(params.delta),
        "D": params.D, "C": params.C, "eps": rat_json(params.eps),
        "verdict": True,  # disjointness and containment were just validated
    }
    if inst.planted is not None:
        report["planted"] = len(inst.planted)
    return report, sol.to_bytes()


def cmd_solve(args) -> int:
    inst = _read_instance(args.instance)
    if isinstance(inst, MakespanInstance):
        if args.algorithm not in MAKESPAN_ALGS:
            raise MismatchError(f"{args.algorithm} does not apply to makespan instances")
        report, sol_bytes = _solve_makespan(inst, args)
    elif isinstance(inst, SetPackingInstance):
        if args.algorithm not in SETPACKING_ALGS:
            raise MismatchError(f"{args.algorithm} does not apply to set-packing instances")
        report, sol_bytes = _solve_setpacking(inst, args)
    else:
        raise MismatchError(f"no solver for kind {type(inst).__name__}")
    report["instance_digest"] = instance_digest(inst)
    if args.out:
        _write(args.out, sol_bytes)
    print(json.dumps(report, sort_keys=True, indent=2))
    return 0 if report["verdict"] else 1


def _bench_metric(inst, args, seed):
    if args.algorithm == "alg2":
        clp = solve_clp(inst, args.column_cap)
        sched = alg2_round(clp, inst, seed)
        count, mspan = evaluate_schedule(inst, sched)
        if mspan > inst.target_T:
            raise AssertionError("rounding exceeded T")
        return count / inst.jobs
    if args.algorithm == "combined":
        sched, rep = combined_schedule(inst, seed, args.column_cap)
        if 2 * rep.makespan > 3 * inst.target_T:
            raise AssertionError("combined schedule exceeded 3T/2")
        return sched.job_count
    if args.algorithm in SETPACKING_ALGS:
        sol = sp_combined(inst, _sp_params(args), seed, args.lp_mode)
        return sol.count
    raise MismatchError(f"bench does not support {args.algorithm}")


def _bench_floor(inst, args):
    if args.algorithm == "alg2":
        return 1 - 1 / math.e
    if args.algorithm == "combined":
        m_star = alg1_match_large(inst).job_count
        return theoretical_floor(inst.jobs, m_star)
    params = _sp_params(args)
    if inst.planted is None:
        return 0.0
    return float(1 - float(params.delta)) * len(inst.planted)


def cmd_bench(args) -> int:
    if args.trials < 30:
        raise BadParams("need at least 30 trials for a standard-error verdict")
    kind = "makespan" if args.algorithm in MAKESPAN_ALGS else "setpacking"
    inst = _read_instance(args.instance, kind)
    per_seed = [
        _bench_metric(inst, args, seed) for seed in range(args.seed, args.seed + args.trials)
    ]
    report = ExperimentReport.from_runs(
        instance_digest(inst), args.algorithm, args.seed, per_seed, _bench_floor(inst, args)
    )
    payload = canonical_json_bytes(report.to_json())
    if args.out:
        _write(args.out, payload)
    print(json.dumps(report.to_json(), sort_keys=True, indent=2))
    return 0 if report.verdict else 1


def cmd_verify(args) -> int:
    scale_full = args.scale == "full"
    if args.suite == "lemma22" or args.suite == "prop25":
        max_jobs = args.max_jobs if args.max_jobs else (4 if scale_full else 3)
        result = suites.run_makespan_family_suite(args.suite, max_jobs=max_jobs)
    elif args.suite == "lemma42":
        slices = suites.FULL_LEMMA42_SLICES if scale_full else suites.EXHAUSTIVE_LEMMA42_SLICES
        result = suites.run_lemma42_suite(
            exhaustive=slices, samples=args.samples, seed=args.seed
        )
    elif args.suite == "gadget":
        if args.sigma and args.d:
            from .reductions import hypercube_gadget, validate_gadget

            validate_gadget(hypercube_gadget(0, args.sigma, args.d, 0))
            result = suites.SuiteResult("gadget", 1, [])
        else:
            result = suites.run_gadget_suite()
    elif args.suite == "soundness":
        result = suites.run_soundness_suite(formulas=args.formulas, seed=args.seed)
    elif args.suite == "oracle-eq":
        result = suites.run_oracle_eq_suite(samples=args.samples, seed=args.seed)
    else:
        raise BadParams(f"unknown suite {args.suite!r}")
    if result.passed:
        print(f"suite {result.name}: PASS ({result.checked} cases)")
        return 0
    desc, dump = result.violations[0]
    print(f"suite {result.name}: FAIL after {result.checked} cases: {desc}")
    if dump:
        sys.stdout.write(dump.decode("utf-8"))
    return 1


def cmd_reduce(args) -> int:
    if getattr(args, "from") == "cnf2sp":
        phi = _read_instance(args.infile, "cnf")
        if not isinstance(phi, CnfFormula):
            raise MismatchError("cnf2sp needs a CNF input")
        witness = None
        if args.witness:
            witness = tuple(tok.strip() in ("1", "true", "True") for tok in args.witness.split(","))
        inst, meta = reduce_cnf_to_setpacking(phi, witness=witness)
        _write(args.out, emit_instance(inst))
        meta_doc = {
            "kind": "cnf2sp-meta",
            "q": meta.params.q,
            "alphabet_size": meta.params.alphabet_size,
            "d": meta.params.d,
            "eta": meta.params.eta,
            "gamma": rat_json(meta.params.gamma),
            "eps_bound": rat_json(meta.params.eps_bound),
            "set_info": [[c, list(int(v) for v in vals)] for c, vals in meta.set_info],
            "gadget_offset": list(meta.gadget_offset),
        }
    else:
        inst = _read_instance(args.infile, "setpacking")
        sc, meta = reduce_setpacking_to_santaclaus(inst, T=rat(args.T))
        _write(args.out, emit_instance(sc))
        meta_doc = {
            "kind": "sp2sc-meta",
            "agents": sc.agents,
            "items": sc.items,
            "item_kind": [[k, v] for k, v in meta.item_kind],
            "witness": [list(p) for p in meta.witness.owner],
        }
    if args.out and args.out != "-":
        _write(args.out + ".meta.json", canonical_json_bytes(meta_doc))
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="bicrit", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a planted instance or regular CNF")
    g.add_argument("--kind", required=True, choices=("makespan", "setpacking", "cnf"))
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--density", type=float, default=0.3)
    g.add_argument("--extra", type=int, default=0)
    g.add_argument("--min-size", type=int, default=2, dest="min_size")
    g.add_argument("--max-size", type=int, default=4, dest="max_size")
    g.add_argument("--vars", type=int, default=5)
    g.add_argument("--q", type=int, default=3)
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=("json", "dimacs"), default="dimacs")
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run one algorithm on an instance file")
    s.add_argument("--algorithm", required=True, choices=MAKESPAN_ALGS + SETPACKING_ALGS)
    s.add_argument("--instance", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--column-cap", type=int, default=DEFAULT_COLUMN_CAP, dest="column_cap")
    s.add_argument("--delta", default="1/2")
    s.add_argument("--lp-mode", choices=("solve", "planted"), default="solve", dest="lp_mode")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run an algorithm across a seed range with statistics")
    b.add_argument("--algorithm", required=True, choices=("alg2", "combined") + SETPACKING_ALGS)
    b.add_argument("--instance", required=True)
    b.add_argument("--trials", type=int, default=500)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--column-cap", type=int, default=DEFAULT_COLUMN_CAP, dest="column_cap")
    b.add_argument("--delta", default="1/2")
    b.add_argument("--lp-mode", choices=("solve", "planted"), default="solve", dest="lp_mode")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="run an exhaustive invariant suite")
    v.add_argument("--suite", required=True,
                   choices=("lemma22", "prop25", "lemma42", "gadget", "soundness", "oracle-eq"))
    v.add_argument("--scale", choices=("default", "full"), default="default")
    v.add_argument("--max-jobs", type=int, default=0, dest="max_jobs")
    v.add_argument("--samples", type=int, default=1500)
    v.add_argument("--formulas", type=int, default=20)
    v.add_argument("--sigma", type=int, default=0)
    v.add_argument("--d", type=int, default=0)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reduce", help="run a hardness reduction on an instance file")
    r.add_argument("--from", required=True, choices=("cnf2sp", "sp2sc"))
    r.add_argument("--in", required=True, dest="infile")
    r.add_argument("--out", default="-")
    r.add_argument("--T", default="1")
    r.add_argument("--witness", default=None,
                   help="comma-separated 0/1 per variable: plant the partition witness")
    r.set_defaults(func=cmd_reduce)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BicritError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
