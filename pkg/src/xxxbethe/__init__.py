"""Commuting transfer matrices for gl_N spin chains, their Bethe-ansatz
spectra, and the discrete Wronski map between quasi-exponential spaces and
symmetrized polynomial coefficients.

Exact rational arithmetic throughout, with an optional float mode on the
numeric paths.  See the README for the command-line entry points.
"""

from .scalars import EPS_EQ, scalar_eq, scalar_from_json, scalar_to_json
from .ratfun import (
    DiffOp,
    InvSeries,
    Poly,
    QuasiExp,
    RatFun,
    discrete_wronskian,
    elementary_symmetric,
    lagrange_interpolate,
    tau_transition,
    tau_transition_inverse,
)
from .tensorspace import (
    dim_singular,
    dim_weight,
    full_basis,
    gl_action,
    permutation_op,
    singular_basis,
    weight_basis,
)
from .yangian import (
    EvaluationData,
    OperatorRatFun,
    apply_qdet,
    apply_transfer,
    c_coefficients,
    qdet,
    quantum_minor,
    scalar_bn,
    t_entry,
    transfer_matrix,
    transfer_series,
)
from .bethe import (
    BetheProblem,
    BetheRoots,
    BetheSolutionSet,
    bae_residual,
    bethe_vector,
    eigenvalue_ck,
    fundamental_operator,
    kernel_quasiexp,
    kernel_wronskian_check,
    solve_bae,
    solve_n1,
    weight_function,
)
from .wronski import (
    PolySpacePoint,
    QuasiExpSpacePoint,
    WronskiImage,
    chi_polynomial,
    eigenvalue_table,
    extract_coeffs,
    fiber_from_bethe,
    recover_coordinates,
    space_diffop,
    space_point_from_json,
    space_point_to_json,
    table_mismatch,
    wronski_map,
    wronskian_polypart,
)
from .symspace import (
    GradedCharacter,
    TruncatedVPoly,
    evaluate_at_b,
    gl_vpoly,
    graded_character,
    invariant_basis,
    l_entry_action,
    mul_symmetric,
    singular_start_degree,
    sn_act,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
