"""The four-point cross ratio on flags and the quantities built from it.

For two hyperplanes (as annihilating covectors) and two lines the cross
ratio is the pairing ratio

    [phi, phi', om, om'] = phi(om) phi'(om') / (phi(om') phi'(om)),

independent of all four lift scalings.  An identity term is the principal
log of this value with the hyperplanes taken at a boundary fixed point and
the lines at a translated fixed point pair; a complex period replaces the
translated pair by (x, gamma x) and recovers the complex length.

Logs are evaluated through log1p of

    [phi, phi', om, om'] - 1 = <phi ^ phi', om ^ om'> / (phi(om') phi'(om))

(Cauchy-Binet), which keeps full relative precision even when the value is
within rounding of 1, as happens for deep terms of the series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TransversalityFailure
from .matrices import (
    ProjHyperplane,
    ProjLine,
    log1p_complex,
    pair,
    wedge_coords,
)
from .reps import Representation, fixed_flags
from .words import BoundaryConfig, Word

__all__ = ["TermKey", "fgw_cross_ratio", "identity_term", "complex_period"]

PAIRING_TOL = 1e-12


@dataclass(frozen=True, order=True)
class TermKey:
    """Summation index of the identity: boundary pair (j, q) and the
    double-coset representative word."""

    j: int
    q: int
    word: Word

    def __str__(self):
        return f"({self.j + 1},{self.q + 1},{self.word})"


def _checked_denominators(phi, phip, omega, omegap, tol, key=None):
    d1 = pair(phi, omegap)
    d2 = pair(phip, omega)
    if min(abs(d1), abs(d2)) < tol:
        raise TransversalityFailure(
            f"cross-ratio denominator pairing below {tol:.1e}", key=key
        )
    return d1, d2


def fgw_cross_ratio(
    phi: ProjHyperplane,
    phip: ProjHyperplane,
    omega: ProjLine,
    omegap: ProjLine,
    tol: float = PAIRING_TOL,
) -> complex:
    """The cross ratio of two hyperplanes and two lines.

    Equals 1 iff phi = phi' or om = om'; satisfies the cocycle relation in
    the line arguments and inverts when they swap.
    """
    d1, d2 = _checked_denominators(phi, phip, omega, omegap, tol)
    return complex(pair(phi, omega) * pair(phip, omegap) / (d1 * d2))


def log_fgw_cross_ratio(phi, phip, omega, omegap, tol=PAIRING_TOL, key=None) -> complex:
    """Principal log of the cross ratio, accurate near 1 (wedge form)."""
    d1, d2 = _checked_denominators(phi, phip, omega, omegap, tol, key)
    num = np.dot(wedge_coords(phi.vec, phip.vec), wedge_coords(omega.vec, omegap.vec))
    return complex(log1p_complex(num / (d1 * d2)))


def identity_term(
    rep: Representation,
    bc: BoundaryConfig,
    key: TermKey,
    tol: float = PAIRING_TOL,
) -> complex:
    """One summand of the series: the principal-branch log cross ratio of
    the alpha_j flag hyperplanes against the rho(w)-translated alpha_q
    fixed lines.

    Real hyperconvex input makes every term real and positive.
    """
    flags_j = fixed_flags(rep, bc.words[key.j])
    flags_q = fixed_flags(rep, bc.words[key.q])
    m = rep.evaluate(key.word)
    omega = ProjLine(m @ flags_q.plus_line.vec)
    omegap = ProjLine(m @ flags_q.minus_line.vec)
    return log_fgw_cross_ratio(
        flags_j.plus_hyperplane, flags_j.minus_hyperplane, omega, omegap,
        tol=tol, key=key,
    )


def complex_period(
    rep: Representation,
    gamma: Word,
    x: ProjLine,
    tol: float = PAIRING_TOL,
) -> complex:
    """Principal log of the cross ratio of gamma's flags against (x, gamma x).

    Agrees with the complex length of gamma mod 2 pi i for any admissible
    line x.  Lines fixed by gamma are rejected; accuracy degrades as x
    approaches a fixed line (the comparison loses one digit per lost digit
    of the smallest flag pairing).
    """
    flags = fixed_flags(rep, gamma)
    if x.proportional_to(flags.plus_line) or x.proportional_to(flags.minus_line):
        raise TransversalityFailure("reference line coincides with a fixed line of gamma")
    gx = ProjLine(rep.evaluate(gamma) @ x.vec)
    return log_fgw_cross_ratio(
        flags.plus_hyperplane, flags.minus_hyperplane, x, gx, tol=tol
    )
