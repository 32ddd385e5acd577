"""Correction terms of large surgeries on model knot Floer complexes.

Builds reduced CFK^infinity models (staircases, a doubled-trefoil model,
tensor products), computes d of large surgeries exactly, and checks the
resulting d-bar values against metabolizers of (Z/p^2)^n.
"""

from .complex import (
    BasisElement,
    BifilteredComplex,
    DifferentialEntry,
    ValidationReport,
    from_json,
    tensor,
    tensor_power,
    to_json,
    transpose,
    unknot,
    validate,
)
from .errors import (
    BudgetExceededError,
    FloerdError,
    InvalidComplexError,
    KnotExprError,
    PreconditionError,
    SizeGuardError,
    WindowTooSmallError,
)
from .expr import knot_complex
from .knots import (
    AlexanderPoly,
    StaircaseData,
    check_double_constraints,
    check_torus_constraints,
    doubled_trefoil_model,
    gaps_and_deltas,
    lp_complex,
    staircase_complex,
    torus_alexander,
    torus_staircase,
)
from .linkalg import (
    LinkingForm,
    Metabolizer,
    enumerate_metabolizers,
    psi,
    relation_span_is_full,
    rho_permutation,
    special_vector,
    verify_appendix_theorem,
)
from .obstruct import ObstructionReport, emit, obstruct, obstruct_complex
from .quotient import TruncatedQuotientComplex, truncated_homology, truncated_quotient, tower_bottom
from .surgery import SurgeryProblem, compute_d, d_invariant, dbar_table, theorem_bounds

__version__ = "0.1.0"
