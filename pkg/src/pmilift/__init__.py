"""Lifted LMI representations of polynomial and rational matrix-inequality sets.

Layers, bottom up: exact sparse polynomial/matrix algebra (`polyalg`);
moment/localizer liftings for polynomial matrices (`momlift`) and
denominator-indexed liftings for rational ones (`ratlift`); an embedded
interior-point SDP solver with membership oracles (`sdpcore`); concavity and
q-module certificate searches with exact verification (`certify`);
sampling/support/boundary cross-checking of a lifting against the set it
claims to represent (`harness`); and a command-line front end (`cli`).
"""

from .certify import (
    Certificate,
    matrix_identity_residual,
    matrix_sos_check,
    pointwise_sos_concavity,
    qmod_certificate_search,
    sigma_to_poly,
    uniform_sos_concavity,
    verify_identity,
)
from .harness import (
    Disagreement,
    MembershipReport,
    SetProblem,
    SupportRecord,
    boundary_trace,
    compare_membership,
    member_direct,
    member_margin,
    support_compare,
    trace_to_csv,
)
from .momlift import (
    LiftedLMI,
    LinearPencil,
    canonical_lifting,
    moment_lift,
    putinar_lift,
)
from .polyalg import MatPoly, Poly, lex_lead, lex_reduce
from .ratlift import IndexEscape, RationalMatFn, qmod_index_sets, qmod_lift
from .sdpcore import (
    ConicProgram,
    FeasibilityOracle,
    FeasibilityResult,
    Solution,
    SolverOptions,
    Status,
    feasibility,
    kkt_residuals,
    optimize_linear,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "ConicProgram",
    "Disagreement",
    "FeasibilityOracle",
    "FeasibilityResult",
    "IndexEscape",
    "LiftedLMI",
    "LinearPencil",
    "MatPoly",
    "MembershipReport",
    "Poly",
    "RationalMatFn",
    "SetProblem",
    "Solution",
    "SolverOptions",
    "Status",
    "SupportRecord",
    "boundary_trace",
    "canonical_lifting",
    "compare_membership",
    "feasibility",
    "kkt_residuals",
    "lex_lead",
    "lex_reduce",
    "matrix_identity_residual",
    "matrix_sos_check",
    "member_direct",
    "member_margin",
    "moment_lift",
    "optimize_linear",
    "pointwise_sos_concavity",
    "putinar_lift",
    "qmod_certificate_search",
    "qmod_index_sets",
    "qmod_lift",
    "sigma_to_poly",
    "solve",
    "support_compare",
    "trace_to_csv",
    "uniform_sos_concavity",
    "verify_identity",
]
