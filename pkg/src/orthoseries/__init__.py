"""Numerical series identities for hyperconvex representations of free
groups: boundary-length sums against orthogeodesic cross-ratio series,
their analytic continuation and monodromy, and the limit-set dimension
gate that controls convergence."""

from .errors import (
    BranchPointError,
    ConfigError,
    DegenerateSpectrum,
    DomainViolation,
    ExtrapolationUnstable,
    NonHyperbolicData,
    OrthoseriesError,
    PathLeavesDomain,
    RefinementBudgetExceeded,
    TransversalityFailure,
)
from .words import (
    BoundaryConfig,
    ConeType,
    LetterOrder,
    Word,
    boundary_preset,
    cone_type,
    enumerate_reduced,
    in_cone,
    is_redlex,
    redlex_reps,
    shortlex_less,
)
from .matrices import (
    EigenSystem,
    ProjHyperplane,
    ProjLine,
    eigensystem,
    grassmann_distance,
    pair,
    singular_ratio,
)
from .reps import (
    FlagData,
    Representation,
    complex_length,
    compose_iota,
    fixed_flags,
    iota3,
    schottky_gamma,
    schottky_gamma_prime,
)
from .crossratio import TermKey, complex_period, fgw_cross_ratio, identity_term
from .identity import (
    GapTable,
    IdentityReport,
    TermEngine,
    gap_table,
    lhs,
    rhs_partial,
    tail_estimate,
    verify,
)
from .dimension import (
    ExponentEstimate,
    LevelSums,
    box_counting_dimension,
    critical_exponent,
    in_S_less1,
    level_sums,
)
from .continuation import (
    BranchTrack,
    CirclePath,
    MonodromyTable,
    PathSpec,
    PolylinePath,
    TrackedQuantity,
    continued_identity,
    loop_monodromy,
    track,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryConfig", "ConeType", "LetterOrder", "Word",
    "boundary_preset", "cone_type", "enumerate_reduced", "in_cone",
    "is_redlex", "redlex_reps", "shortlex_less",
    "EigenSystem", "ProjHyperplane", "ProjLine", "eigensystem",
    "grassmann_distance", "pair", "singular_ratio",
    "FlagData", "Representation", "complex_length", "compose_iota",
    "fixed_flags", "iota3", "schottky_gamma", "schottky_gamma_prime",
    "TermKey", "complex_period", "fgw_cross_ratio", "identity_term",
    "GapTable", "IdentityReport", "TermEngine", "gap_table", "lhs",
    "rhs_partial", "tail_estimate", "verify",
    "ExponentEstimate", "LevelSums", "box_counting_dimension",
    "critical_exponent", "in_S_less1", "level_sums",
    "BranchTrack", "CirclePath", "MonodromyTable", "PathSpec",
    "PolylinePath", "TrackedQuantity", "continued_identity",
    "loop_monodromy", "track",
    "OrthoseriesError", "ConfigError", "DegenerateSpectrum",
    "TransversalityFailure", "BranchPointError", "ExtrapolationUnstable",
    "NonHyperbolicData", "PathLeavesDomain", "RefinementBudgetExceeded",
    "DomainViolation",
]
