"""bicrit: bicriteria scheduling, set packing, and max-min allocation.

Exact-rational solvers for the three problems, planted-instance and
hardness-gadget generators, and brute-force oracles that certify every
guarantee at desk scale.
"""

from ._rat import Rat, rat
from .engines import (
    FlowNetwork,
    LpProblem,
    LpSolution,
    flow_network,
    lp_problem,
    lp_solve,
    max_bipartite_matching,
    max_flow,
)
from .instances import (
    Allocation,
    CnfFormula,
    MakespanInstance,
    SantaClausInstance,
    Schedule,
    SetPackingInstance,
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
    build_configuration_lp,
    combined_schedule,
    evaluate_schedule,
    partition_edges,
    solve_clp,
)
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
    verify_reduction_soundness,
)
from .setpacking import (
    SpParams,
    check_almost_disjoint,
    sp_combined,
    sp_large_phase,
    sp_small_phase,
)

__version__ = "0.1.0"
