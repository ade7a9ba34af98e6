"""bixl: bilinear polynomial system solving over prime fields.

Determined and over-determined bilinear systems are attacked inside the
F[y]-module they generate: y-XL linearizes products with y-monomial
multipliers, y-MXL re-injects degree falls, and y-HXL trades guessed
variables against witness-degree consistency checks.  The analysis module
carries the matching degree formulas and cost estimates; the harness module
reproduces the reference experiment tables.
"""

from .field import FieldCtx, inv, pow_mod, rand_elem
from .polyring import (
    BilinearPoly,
    BilinearSequence,
    ColumnMonomial,
    Params,
    XLinPoly,
    YMonomial,
    YPoly,
    YPolyVector,
    cmp_monomials,
    dehomogenize,
    evaluate,
    homogenize,
    jacobian_x,
    partial_evaluate,
    plant_solution,
    random_sequence,
    verify_syzygy,
)
from .macaulay import YMacaulayMatrix, build_y_macaulay, column_monomials, degree_part, dump_sms
from .linalg import (
    ConsistencyVerdict,
    EchelonResult,
    rank,
    row_echelon,
    solve_left,
    wiedemann_consistent,
)
from .solvers import (
    BudgetExceededError,
    HybridConfig,
    SolveReport,
    brute_force,
    extract_solution,
    witness_consistency_test,
    y_hxl,
    y_mxl,
    y_xl,
)
from .analysis import (
    CostEstimate,
    DegreeProfile,
    cramer_syzygy,
    degree_profile,
    dreg_formula,
    empirical_dreg,
    empirical_first_fall,
    estimate,
    hxl_degree,
    is_y_semiregular,
    optimal_hybrid,
    semiregularity_trial,
    tff_formula,
    twit_bound,
)

__version__ = "0.1.0"
