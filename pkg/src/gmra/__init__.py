"""Exact tooling for generalized multiresolution analyses on the circle.

Validate multiplicity functions, verify matrix filters, run the isometry
identity suite, lay out canonical space ledgers, and decide purity and
filter equivalence with certified witnesses or obstructions.
"""

from .builder import (
    CanonicalGMRA,
    CascadeResult,
    LedgerVector,
    SpaceSlot,
    apply_T,
    apply_T_inverse,
    apply_translation,
    build,
    cascade_diagnostic,
    dilate_slots,
    ledger_norm,
    negative_supports,
    tensor,
)
from .equivalence import (
    EquivalenceVerdict,
    Obstruction,
    PurityVerdict,
    coboundary_solve,
    constant_ratio_obstruction,
    decide,
    invariant_check,
    is_eigenfilter,
    purity_test,
)
from .errors import (
    CompletionFailed,
    ConsistencyViolated,
    ContextMismatch,
    DepthExceeded,
    FilterInvalid,
    GmraError,
    NotApplicable,
    NotPureIsometry,
    NotUnitary,
    ProblemFileError,
    UnknownName,
    UnsupportedRepresentation,
)
from .filters import (
    FilterMatrix,
    GridFilterMatrix,
    VerificationReport,
    complement_numeric,
    conjugate_filter,
    identity_multiplier,
    verify_complementary,
    verify_filter,
)
from .multiplicity import (
    MultiplicityFunction,
    check_consistency,
    compute_mtilde,
    folded_sum,
    sigma_sets,
    sigma_tilde_sets,
    strict_set,
)
from .ruelle import (
    SectionVector,
    apply_S,
    apply_S_adjoint,
    canonical_vectors,
    cuntz_check,
    random_section,
)
from .torus import TorusEndomorphism, TorusSet, mod1
from .trigpoly import TrigPoly, fold, inner, norm, unit_phase

__version__ = "0.1.0"
