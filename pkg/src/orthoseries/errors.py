"""Exception types shared across the package.

Numeric failure modes are distinguished so callers (and the CLI exit-code
logic) can tell configuration mistakes apart from genuine departures from
the domain where the series identities are defined.
"""


class OrthoseriesError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(OrthoseriesError):
    """Malformed or inconsistent session/path configuration."""


class DegenerateSpectrum(OrthoseriesError):
    """Required eigenvalue modulus gaps are absent (non-loxodromic element
    or numerical breakdown of the eigensolver)."""


class TransversalityFailure(OrthoseriesError):
    """A cross-ratio denominator pairing is numerically zero; the flag data
    is not transverse enough for the term to have a meaningful branch."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class BranchPointError(OrthoseriesError):
    """Schottky parameter sits on a branch point (L^2 = 4)."""


class ExtrapolationUnstable(OrthoseriesError):
    """Per-level decay ratio >= 1: the tail of the series does not contract,
    so no finite geometric tail estimate exists."""


class NonHyperbolicData(OrthoseriesError):
    """Level-sum growth rate is not decreasing in the exponent; singular
    value ratios carry no contraction information."""


class PathLeavesDomain(OrthoseriesError):
    """A representation path lost its spectral gaps or transversality."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class RefinementBudgetExceeded(OrthoseriesError):
    """Adaptive bisection hit its sample budget before the per-step phase
    condition could be satisfied."""


class DomainViolation(OrthoseriesError):
    """A sampled representation failed the dimension-below-one gate."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t
