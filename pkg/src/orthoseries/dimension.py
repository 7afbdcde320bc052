"""Poincare-series level sums, critical exponent, and the dimension gate.

The series eta(s) sums (sigma_2/sigma_1)(rho(w))**s over every reduced
word w.  Its critical exponent equals the Hausdorff dimension of the limit
set, and absolute convergence of the identity series holds exactly on the
locus where that dimension is below one, so the estimate doubles as the
membership gate for the deformation domain.

The estimator fits the exponential growth rate g(s) of the level sums over
the top half of the enumerated lengths and root-finds g(s) = 1.  Level
sums are smooth in s, so this is far better behaved at desk scale than
probing partial-sum divergence directly.

An independent box-counting estimate over the attracting fixed lines of
long words cross-checks the estimator for real 2x2 input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonHyperbolicData
from .matrices import batched_sigma_ratios, batched_wedge_matrices
from .reps import Representation
from .wordarrays import WordLevels

__all__ = [
    "LevelSums",
    "ExponentEstimate",
    "sigma_levels",
    "level_sums",
    "critical_exponent",
    "in_S_less1",
    "box_counting_dimension",
]


@dataclass
class LevelSums:
    """L_m = sum over reduced words of length m of sigma-ratio**s."""

    s: float
    sums: list[float]

    @property
    def max_len(self) -> int:
        return len(self.sums)


@dataclass
class ExponentEstimate:
    """Critical exponent estimate with a stability halfwidth."""

    h: float
    confidence_halfwidth: float
    max_len: int
    method: str
    growth_rates: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "h": self.h,
            "halfwidth": self.confidence_halfwidth,
            "N": self.max_len,
            "method": self.method,
            "levels": self.growth_rates.get("level_sums_at_h", []),
        }


def sigma_levels(rep: Representation, max_len: int) -> list[np.ndarray]:
    """Singular value ratios of rho(w) for every reduced word, per level.

    One batched matrix multiply per word; matrices of a level are dropped
    as soon as the next level is built.
    """
    levels = WordLevels.shared(rep.rank, max_len)
    dtype = float if rep.is_real else complex
    gens = np.stack([m.real if dtype is float else m for m in rep.images]).astype(dtype)
    wgens = batched_wedge_matrices(gens)
    out = []
    mats = np.eye(rep.n, dtype=dtype)[None, :, :]
    wmats = np.eye(wgens.shape[-1], dtype=dtype)[None, :, :]
    for m in range(max_len + 1):
        if m > 0:
            par = levels.parents[m]
            last = levels.letters[m][:, -1]
            mats = np.matmul(mats[par], gens[last])
            wmats = np.matmul(wmats[par], wgens[last])
        out.append(batched_sigma_ratios(mats, wedges=wmats))
    return out[1:]


def level_sums(rep: Representation, s: float, max_len: int,
               ratios: list[np.ndarray] | None = None) -> LevelSums:
    """Exact per-length sums L_1..L_N of sigma-ratio**s over all words."""
    if s < 0:
        raise ValueError("exponent s must be >= 0")
    if max_len < 1:
        raise ValueError("need at least one level")
    ratios = sigma_levels(rep, max_len) if ratios is None else ratios
    sums = [float(math.fsum((r ** s).tolist())) for r in ratios[:max_len]]
    return LevelSums(s=s, sums=sums)


def _growth_rate(sums: list[float], max_len: int) -> float:
    """exp(slope) of log L_m against m over the top half of the levels."""
    lo = max(1, (max_len + 1) // 2)
    ms = np.arange(lo, max_len + 1, dtype=float)
    vals = np.array(sums[lo - 1: max_len])
    if np.any(vals <= 0):
        raise NonHyperbolicData("level sums vanished; no growth rate")
    slope = np.polyfit(ms, np.log(vals), 1)[0]
    return float(np.exp(slope))


def _slope_root(ratios, max_len, s_hi=8.0, iters=80):
    def g(s):
        sums = [float(math.fsum((r ** s).tolist())) for r in ratios[:max_len]]
        return _growth_rate(sums, max_len)

    probe = np.linspace(0.0, 2.0, 9)
    gvals = [g(s) for s in probe]
    diffs = np.diff(gvals)
    if np.any(diffs >= -1e-12):
        raise NonHyperbolicData(
            "growth rate is not strictly decreasing in s; singular value "
            "ratios carry no contraction"
        )
    lo, hi = 0.0, 2.0
    while g(hi) > 1.0:
        lo, hi = hi, hi * 2.0
        if hi > s_hi:
            if g(0.0) - g(s_hi) < 1e-3 * g(0.0):
                # decreasing only at rounding level: degenerate ratios
                raise NonHyperbolicData(
                    "growth rate is flat in s up to rounding; singular "
                    "value ratios carry no contraction"
                )
            return float(hi), True  # exponent beyond probe range
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if g(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), False


def critical_exponent(
    rep: Representation,
    max_len: int,
    tol: float = 1e-6,
    ratios: list[np.ndarray] | None = None,
) -> ExponentEstimate:
    """Root of the fitted level-sum growth rate.

    The halfwidth combines the change of the estimate when two levels are
    dropped with the regression scatter of the final fit, both mapped
    through the root sensitivity.
    """
    if max_len < 4:
        raise ValueError("critical exponent estimation needs max_len >= 4")
    ratios = sigma_levels(rep, max_len) if ratios is None else ratios
    h, out_of_range = _slope_root(ratios, max_len)
    h_short, _ = _slope_root(ratios, max_len - 2)

    sums_at_h = [float(math.fsum((r ** h).tolist())) for r in ratios[:max_len]]
    lo = max(1, (max_len + 1) // 2)
    ms = np.arange(lo, max_len + 1, dtype=float)
    logs = np.log(np.array(sums_at_h[lo - 1:]))
    coef, residuals, *_ = np.polyfit(ms, logs, 1, full=True)
    rmse = math.sqrt(float(residuals[0]) / len(ms)) if len(residuals) else 0.0
    # sensitivity of the root: dg/ds at h via a centered difference
    eps = 1e-3
    g_plus = _growth_rate(
        [float(math.fsum((r ** (h + eps)).tolist())) for r in ratios[:max_len]], max_len
    )
    g_minus = _growth_rate(
        [float(math.fsum((r ** (h - eps)).tolist())) for r in ratios[:max_len]], max_len
    )
    dgds = abs(g_plus - g_minus) / (2 * eps)
    fit_term = rmse / dgds if dgds > 0 else math.inf
    halfwidth = abs(h - h_short) + fit_term + tol
    method = "level-growth root" + (" (beyond probe range)" if out_of_range else "")
    return ExponentEstimate(
        h=float(h),
        confidence_halfwidth=float(halfwidth),
        max_len=max_len,
        method=method,
        growth_rates={"level_sums_at_h": sums_at_h, "h_at_shorter": float(h_short)},
    )


def in_S_less1(
    rep: Representation,
    max_len: int,
    margin: float = 0.0,
    ratios: list[np.ndarray] | None = None,
) -> tuple[bool, ExponentEstimate]:
    """Dimension gate: True iff h + halfwidth < 1 - margin.

    Non-decaying input (no contraction at all) yields False with an
    infinite-exponent sentinel instead of raising.
    """
    try:
        est = critical_exponent(rep, max_len, ratios=ratios)
    except NonHyperbolicData:
        est = ExponentEstimate(
            h=math.inf,
            confidence_halfwidth=math.inf,
            max_len=max_len,
            method="non-decaying singular ratios (flagged)",
        )
        return False, est
    ok = est.h + est.confidence_halfwidth < 1.0 - margin
    return bool(ok), est


def box_counting_dimension(
    rep: Representation,
    word_len: int = 12,
    eps_exponents=range(8, 16),
) -> float:
    """Box-counting slope of the limit set sampled by attracting fixed
    lines of all words of one length, on the real projective line.

    Independent of the Poincare-series pipeline: fixed points come from
    the closed-form 2x2 eigenvector formula and the count is a plain
    occupied-cell count in the angle coordinate.  Cell sizes must stay
    well above the sampling resolution of the chosen word length; for the
    acceptance families the default range 2^-8 .. 2^-15 is two orders of
    magnitude above it.
    """
    if rep.n != 2 or not rep.is_real:
        raise ValueError("box counting oracle is restricted to real 2x2 input")
    levels = WordLevels.shared(rep.rank, word_len)
    gens = np.stack([m.real for m in rep.images])
    mats = np.eye(2)[None, :, :]
    for m in range(1, word_len + 1):
        mats = np.matmul(mats[levels.parents[m]], gens[levels.letters[m][:, -1]])
    det = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    tr = mats[:, 0, 0] + mats[:, 1, 1]
    disc = np.sqrt(np.maximum(tr * tr - 4.0 * det, 0.0))
    lam = np.where(np.abs(tr + disc) >= np.abs(tr - disc), (tr + disc) / 2, (tr - disc) / 2)
    # attracting eigenvector from the better conditioned matrix row
    use_top = np.abs(mats[:, 0, 1]) >= np.abs(mats[:, 1, 0])
    v1 = np.where(use_top, mats[:, 0, 1], lam - mats[:, 1, 1])
    v2 = np.where(use_top, lam - mats[:, 0, 0], mats[:, 1, 0])
    theta = np.mod(np.arctan2(v2, v1), np.pi) / np.pi  # RP^1 angle in [0, 1)

    logs_n, logs_inv_eps = [], []
    for k in eps_exponents:
        eps = 2.0 ** (-float(k))
        count = np.unique(np.floor(theta / eps).astype(np.int64)).size
        logs_n.append(math.log(count))
        logs_inv_eps.append(float(k) * math.log(2.0))
    slope = np.polyfit(np.array(logs_inv_eps), np.array(logs_n), 1)[0]
    return float(slope)
