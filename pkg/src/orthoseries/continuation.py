"""Analytic continuation of lengths and terms along representation paths.

A tracked quantity is the multiplicative object under a log: the top-to-
bottom eigenvalue ratio for a boundary length, or the cross-ratio value
for an identity term.  Continuation stitches principal logs of successive
sample ratios, bisecting any step whose phase change reaches pi/2, so the
unwrapped value is unambiguous once refinement settles.  Around a closed
loop the accumulated imaginary part is an integer multiple of 2 pi: the
monodromy of that quantity, which depends only on the homotopy class of
the loop.

Eigenvalues along a path are paired by modulus ordering while the needed
gaps stay open; if a gap closes to within 1e-3 the pairing switches to
nearest-neighbor continuity from the previous sample, and below 1e-6 the
path is declared to have left the admissible domain.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .crossratio import TermKey
from .dimension import in_S_less1
from .errors import (
    ConfigError,
    DegenerateSpectrum,
    DomainViolation,
    PathLeavesDomain,
    RefinementBudgetExceeded,
)
from .identity import (
    IdentityReport,
    TermEngine,
    _fsum_complex,
    residual_mod_2pi,
    tail_estimate,
)
from .matrices import wedge_coords
from .reps import (
    FlagData,
    Representation,
    compose_iota,
    rep_eigensystem,
    schottky_gamma,
    schottky_gamma_prime,
    schottky_x_root,
)
from .words import BoundaryConfig, LetterOrder, Word, redlex_reps

__all__ = [
    "CirclePath",
    "PolylinePath",
    "PathSpec",
    "TrackedQuantity",
    "BranchTrack",
    "MonodromyTable",
    "track",
    "loop_monodromy",
    "continued_identity",
]

PHASE_BOUND = math.pi / 2
DEFAULT_BUDGET = 2 ** 14
GAP_GUARD = 1e-3
GAP_FAIL = 1e-6
CLOSURE_TOL = 1e-10
WINDING_TOL = 1e-6


@dataclass(frozen=True)
class CirclePath:
    """L(t) = center + radius * exp(2 pi i turns t)."""

    center: complex = 0j
    radius: float = 5.0
    turns: int = 1

    def at(self, t: float) -> complex:
        return self.center + self.radius * cmath.exp(2j * math.pi * self.turns * t)


@dataclass(frozen=True)
class PolylinePath:
    """Piecewise-linear parameter path through the given points."""

    points: tuple[complex, ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise ConfigError("polyline needs at least two points")

    def at(self, t: float) -> complex:
        segs = len(self.points) - 1
        pos = min(max(t, 0.0), 1.0) * segs
        i = min(int(pos), segs - 1)
        frac = pos - i
        return self.points[i] * (1 - frac) + self.points[i + 1] * frac


class PathSpec:
    """A parameterized family t in [0,1] -> representation.

    Built from a named Schottky family and a parameter path; the root x of
    x^2 + Lx + 1 = 0 is chosen by |x| < 1 at t = 0 and then tracked by
    continuity on an internal fine grid, which keeps the construction
    deterministic and refinement independent.
    """

    def __init__(
        self,
        family: str,
        lpath,
        compose_iota_flag: bool = False,
        samples: int = 33,
        refine_budget: int = DEFAULT_BUDGET,
        label: str = "",
        x_grid: int = 4096,
    ):
        if family not in ("schottky", "schottky_prime"):
            raise ConfigError(f"unknown path family {family!r}")
        if samples < 2:
            raise ConfigError("need at least two base samples")
        self.family = family
        self.lpath = lpath
        self.compose_iota_flag = bool(compose_iota_flag)
        self.samples = int(samples)
        self.refine_budget = int(refine_budget)
        self.label = label or f"{family}{'+iota' if compose_iota_flag else ''}"
        self._xs = self._track_x_branch(x_grid)
        self._rep_cache: dict[float, Representation] = {}
        self._flag_cache: dict[tuple[float, tuple[int, ...]], FlagData] = {}

    def _track_x_branch(self, grid: int) -> np.ndarray:
        ts = np.linspace(0.0, 1.0, grid + 1)
        xs = np.empty(grid + 1, dtype=complex)
        xs[0] = schottky_x_root(self.lpath.at(0.0))
        for i in range(1, grid + 1):
            xs[i] = schottky_x_root(self.lpath.at(float(ts[i])), prev=xs[i - 1])
        return xs

    def x_at(self, t: float) -> complex:
        grid = len(self._xs) - 1
        idx = min(int(t * grid), grid)
        return schottky_x_root(self.lpath.at(t), prev=self._xs[idx])

    def representation_at(self, t: float) -> Representation:
        got = self._rep_cache.get(t)
        if got is None:
            L = self.lpath.at(t)
            build = schottky_gamma if self.family == "schottky" else schottky_gamma_prime
            rep = build(L, x=self.x_at(t))
            if self.compose_iota_flag:
                rep = compose_iota(rep)
            got = self._rep_cache.setdefault(t, rep)
        return got

    def is_closed(self, tol: float = CLOSURE_TOL) -> bool:
        r0 = self.representation_at(0.0)
        r1 = self.representation_at(1.0)
        return all(
            np.abs(a - b).max() <= tol for a, b in zip(r0.images, r1.images)
        )

    def flags_at(self, t: float, word: Word, prev_eigs=None) -> tuple[FlagData, np.ndarray]:
        """Flag data of rho_t(word) with the path eigen-pairing guard.

        Cached per (t, word); the guard pairing is resolved once at the
        first request, which is deterministic because tracks walk t in
        order.
        """
        key = (t, word.letters)
        got = self._flag_cache.get(key)
        if got is None:
            rep = self.representation_at(t)
            eig = _guarded_eigensystem(rep, word, prev_eigs, t)
            got = self._flag_cache.setdefault(key, (FlagData(eig), eig.eigenvalues))
        return got

    @staticmethod
    def from_config(cfg: dict) -> "PathSpec":
        lcfg = cfg.get("L_path")
        if not isinstance(lcfg, dict):
            raise ConfigError("path config needs an 'L_path' table")
        kind = lcfg.get("kind")
        if kind == "circle":
            c = lcfg.get("center", [0.0, 0.0])
            lp = CirclePath(
                center=complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c),
                radius=float(lcfg.get("radius", 5.0)),
                turns=int(lcfg.get("turns", 1)),
            )
        elif kind == "polyline":
            pts = lcfg.get("points")
            if not pts:
                raise ConfigError("polyline path needs 'points'")
            lp = PolylinePath(tuple(complex(p[0], p[1]) for p in pts))
        else:
            raise ConfigError(f"unknown L_path kind {kind!r}")
        return PathSpec(
            family=cfg.get("family", "schottky"),
            lpath=lp,
            compose_iota_flag=bool(cfg.get("compose_iota", False)),
            samples=int(cfg.get("samples", 33)),
            refine_budget=int(cfg.get("refine_budget", DEFAULT_BUDGET)),
            label=cfg.get("label", ""),
        )


def _guarded_eigensystem(rep, word, prev_eigs, t):
    try:
        eig = rep_eigensystem(rep, word, tol=GAP_FAIL)
    except DegenerateSpectrum as exc:
        raise PathLeavesDomain(f"spectral gap lost at t = {t}: {exc}", t=t) from exc
    mods = np.abs(eig.eigenvalues)
    gap = min(1.0 - mods[1] / mods[0], 1.0 - mods[-1] / mods[-2])
    if gap < GAP_GUARD and prev_eigs is not None:
        # modulus order unreliable: pair with the previous sample instead
        order = _nearest_pairing(eig.eigenvalues, prev_eigs)
        eig = type(eig)(
            eig.eigenvalues[order],
            eig.right_vectors[:, order],
            eig.left_covectors[order, :],
        )
    return eig


def _nearest_pairing(eigs, prev):
    n = len(eigs)
    taken = set()
    order = np.empty(n, dtype=int)
    for i in range(n):
        dists = [
            (abs(eigs[j] - prev[i]), j) for j in range(n) if j not in taken
        ]
        _, best = min(dists)
        order[i] = best
        taken.add(best)
    return order


@dataclass(frozen=True)
class TrackedQuantity:
    """What a branch track follows: a boundary length or one term."""

    kind: str  # "length" | "term"
    j: int = 0
    key: TermKey | None = None

    def __str__(self):
        return f"length[{self.j + 1}]" if self.kind == "length" else f"term{self.key}"


class _QuantityEvaluator:
    """Raw multiplicative value Q(t) of one quantity, with guard state."""

    def __init__(self, path: PathSpec, quantity: TrackedQuantity, bc: BoundaryConfig | None):
        self.path = path
        self.q = quantity
        self.bc = bc
        if quantity.kind == "term" and bc is None:
            raise ValueError("term tracking needs a boundary configuration")

    def __call__(self, t: float, state: dict | None) -> tuple[complex, dict]:
        state = state or {}
        rep = self.path.representation_at(t)
        if self.q.kind == "length":
            word = self.bc.words[self.q.j]
            eig = _guarded_eigensystem(rep, word, state.get(word.letters), t)
            value = complex(eig.eigenvalues[0] / eig.eigenvalues[-1])
            return value, {word.letters: eig.eigenvalues}
        key = self.q.key
        wj, wq = self.bc.words[key.j], self.bc.words[key.q]
        flags_j, ej = self.path.flags_at(t, wj, state.get(wj.letters))
        flags_q, eq = self.path.flags_at(t, wq, state.get(wq.letters))
        m = rep.evaluate(key.word)
        om = m @ flags_q.plus_line.vec
        omp = m @ flags_q.minus_line.vec
        phi = flags_j.plus_hyperplane.vec
        phip = flags_j.minus_hyperplane.vec
        num = np.dot(wedge_coords(phi, phip), wedge_coords(om, omp))
        den = np.dot(phi, omp) * np.dot(phip, om)
        if den == 0:
            raise PathLeavesDomain(f"transversality lost at t = {t}", t=t)
        value = 1.0 + complex(num / den)
        return value, {wj.letters: ej, wq.letters: eq}


@dataclass
class BranchTrack:
    """Unwrapped samples of one quantity along a path."""

    quantity: TrackedQuantity
    ts: list[float]
    values: list[complex]  # unwrapped logs
    raw: list[complex]  # the underlying multiplicative values

    @property
    def winding(self) -> float:
        """Accumulated phase between endpoints, in units of 2 pi."""
        return (self.values[-1] - self.values[0]).imag / (2.0 * math.pi)

    def value_at(self, t: float) -> complex:
        try:
            return self.values[self.ts.index(t)]
        except ValueError:
            raise KeyError(f"t = {t} is not a sample of this track") from None


def track(
    path: PathSpec,
    quantity: TrackedQuantity,
    bc: BoundaryConfig | None = None,
    initial_branch: complex | None = None,
    num_samples: int | None = None,
    budget: int | None = None,
) -> BranchTrack:
    """Analytically continue one quantity along the path.

    Starts from the principal log at t = 0 (or the supplied branch) and
    adds principal logs of successive sample ratios, bisecting every step
    whose phase change reaches pi/2.
    """
    num_samples = path.samples if num_samples is None else num_samples
    budget = path.refine_budget if budget is None else budget
    ev = _QuantityEvaluator(path, quantity, bc)
    base = np.linspace(0.0, 1.0, num_samples)

    q0, state = ev(float(base[0]), None)
    if q0 == 0:
        raise PathLeavesDomain("quantity vanished at path start", t=0.0)
    if initial_branch is None:
        v0 = cmath.log(q0)
    else:
        v0 = complex(initial_branch)
        if abs(cmath.exp(v0) - q0) > 1e-6 * abs(q0):
            raise ValueError("initial branch does not exponentiate to the start value")
    ts = [float(base[0])]
    vals = [v0]
    raws = [q0]
    used = 1

    # in-order adaptive traversal; pending holds right endpoints
    pending = [float(t) for t in base[1:]][::-1]
    while pending:
        t1 = pending[-1]
        t0, q_prev = ts[-1], raws[-1]
        q1, new_state = ev(t1, state)
        used += 1
        if used > budget:
            raise RefinementBudgetExceeded(
                f"phase condition not met within {budget} samples for {quantity}"
            )
        if q1 == 0:
            raise PathLeavesDomain(f"quantity vanished at t = {t1}", t=t1)
        ratio = q1 / q_prev
        if abs(cmath.phase(ratio)) >= PHASE_BOUND:
            mid = 0.5 * (t0 + t1)
            if mid <= t0 or mid >= t1:
                raise RefinementBudgetExceeded(
                    f"step at t = {t0} cannot be bisected further for {quantity}"
                )
            pending.append(mid)
            continue
        pending.pop()
        state = new_state
        ts.append(t1)
        vals.append(vals[-1] + cmath.log(ratio))
        raws.append(q1)
    return BranchTrack(quantity=quantity, ts=ts, values=vals, raw=raws)


@dataclass
class MonodromyTable:
    """Integer monodromies (units of 2 pi i) accumulated around a loop."""

    path_label: str
    per_key: list[tuple[TermKey, float, int]]  # (key, raw winding, integer)
    boundary: list[tuple[int, float, int]]  # (j, raw winding, integer)
    max_word_len: int
    aggregation: str = "rows aggregate identical words by summing over (j, q)"

    @property
    def word_rows(self) -> dict[str, int]:
        rows: dict[str, int] = {}
        for key, _, mono in self.per_key:
            name = str(key.word)
            rows[name] = rows.get(name, 0) + mono
        return rows

    @property
    def total(self) -> int:
        return sum(m for _, _, m in self.per_key)

    @property
    def boundary_total(self) -> int:
        return sum(m for _, _, m in self.boundary)

    @property
    def consistent(self) -> bool:
        """Total term monodromy must equal the boundary-length monodromy;
        a mismatch means words beyond the tracked range carry monodromy."""
        return self.total == self.boundary_total

    @property
    def max_integrality_defect(self) -> float:
        defects = [abs(w - m) for _, w, m in self.per_key]
        defects += [abs(w - m) for _, w, m in self.boundary]
        return max(defects) if defects else 0.0

    def as_pi_multiples(self) -> dict[str, int]:
        """Table rows as integer multiples of pi (winding k reads as 2k pi)."""
        return {word: 2 * m for word, m in self.word_rows.items()}

    def to_csv_rows(self) -> list[str]:
        def word_len(w: str) -> int:
            return 0 if w == "e" else len(w)

        rows = ["word,monodromy_pi"]
        for word, mono in sorted(
            self.word_rows.items(), key=lambda kv: (word_len(kv[0]), kv[0])
        ):
            rows.append(f"{word},{2 * mono}")
        rows.append(f"total,{2 * self.total}")
        return rows

    def __eq__(self, other):
        return (
            isinstance(other, MonodromyTable) and self.word_rows == other.word_rows
        )


def loop_monodromy(
    path: PathSpec,
    bc: BoundaryConfig,
    max_word_len: int,
    order: LetterOrder | None = None,
    num_samples: int | None = None,
    budget: int | None = None,
) -> MonodromyTable:
    """Monodromy of every tracked term (|w| <= max_word_len) and boundary
    length around a closed path."""
    if not path.is_closed():
        raise ConfigError("path endpoints differ; monodromy needs a closed loop")
    per_key = []
    for j, q in bc.pair_indices():
        for w in redlex_reps(j, q, bc, order, max_word_len):
            tr = track(
                path,
                TrackedQuantity("term", key=TermKey(j, q, w)),
                bc,
                num_samples=num_samples,
                budget=budget,
            )
            per_key.append((TermKey(j, q, w), tr.winding, round(tr.winding)))
    boundary = []
    for j in range(bc.k):
        tr = track(
            path,
            TrackedQuantity("length", j=j),
            bc,
            num_samples=num_samples,
            budget=budget,
        )
        boundary.append((j, tr.winding, round(tr.winding)))
    return MonodromyTable(
        path_label=path.label,
        per_key=per_key,
        boundary=boundary,
        max_word_len=max_word_len,
    )


def continued_identity(
    path: PathSpec,
    bc: BoundaryConfig,
    max_word_len: int,
    tol: float = 1e-9,
    order: LetterOrder | None = None,
    num_samples: int | None = None,
    dimension_len: int = 8,
    dimension_margin: float = 0.0,
    check_dimension: bool = True,
) -> tuple[list[IdentityReport], MonodromyTable | None]:
    """Verify the identity mod 2 pi i at every base sample of the path,
    with all branches carried continuously from t = 0.

    Raises DomainViolation at the first sample failing the dimension gate.
    Returns one report per base sample, plus the monodromy table when the
    path is closed.
    """
    num_samples = path.samples if num_samples is None else num_samples
    base = [float(t) for t in np.linspace(0.0, 1.0, num_samples)]

    if check_dimension:
        for t in base:
            ok, est = in_S_less1(path.representation_at(t), dimension_len, dimension_margin)
            if not ok:
                raise DomainViolation(
                    f"dimension gate failed at t = {t}: h = {est.h:.4f} "
                    f"+/- {est.confidence_halfwidth:.4f}",
                    t=t,
                )

    keys = [
        TermKey(j, q, w)
        for j, q in bc.pair_indices()
        for w in redlex_reps(j, q, bc, order, max_word_len)
    ]
    term_tracks = {
        key: track(path, TrackedQuantity("term", key=key), bc, num_samples=num_samples)
        for key in keys
    }
    length_tracks = [
        track(path, TrackedQuantity("length", j=j), bc, num_samples=num_samples)
        for j in range(bc.k)
    ]

    reports = []
    for t in base:
        rep = path.representation_at(t)
        blens = [trk.value_at(t) for trk in length_tracks]
        lhs_t = _fsum_complex(blens)
        terms_t = [(key, term_tracks[key].value_at(t)) for key in keys]
        rhs_t = _fsum_complex([v for _, v in terms_t])
        residual = lhs_t - rhs_t
        engine = TermEngine(rep, bc, max_word_len, order)
        try:
            tail = tail_estimate(rep, bc, max_word_len, order, engine=engine)
            err = None
        except Exception as exc:  # noqa: BLE001 - surfaced in the report
            tail = math.inf
            err = f"{type(exc).__name__}: {exc}"
        gap = abs(residual) if rep.is_real else residual_mod_2pi(residual)
        reports.append(
            IdentityReport(
                lhs=lhs_t,
                rhs_partial=rhs_t,
                terms=terms_t,
                max_word_len=max_word_len,
                tail_estimate=tail,
                residual=residual,
                residual_mod=residual_mod_2pi(residual),
                is_real_locus=rep.is_real,
                tol=tol,
                passed=err is None and gap <= tail + tol,
                boundary_lengths=blens,
                diagnostics={"t": t},
                error=err,
            )
        )
    table = None
    if path.is_closed():
        per_key = [
            (key, trk.winding, round(trk.winding)) for key, trk in term_tracks.items()
        ]
        boundary = [
            (j, trk.winding, round(trk.winding))
            for j, trk in enumerate(length_tracks)
        ]
        table = MonodromyTable(
            path_label=path.label,
            per_key=per_key,
            boundary=boundary,
            max_word_len=max_word_len,
        )
    return reports, table
