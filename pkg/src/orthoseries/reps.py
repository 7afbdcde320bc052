"""Representations of a free group into PGL(n, C).

A representation stores one matrix per letter (generators and inverses),
evaluates words through a prefix-memoized product cache, and exposes the
eigen flag data (attracting/repelling lines and hyperplanes) that the
cross-ratio terms consume.  The Schottky families and the irreducible
embedding of 2x2 into 3x3 matrices used by the monodromy experiments are
constructed here.
"""

from __future__ import annotations

import cmath
import threading

import numpy as np

from .errors import BranchPointError, ConfigError, TransversalityFailure
from .matrices import (
    EigenSystem,
    ProjHyperplane,
    ProjLine,
    det_normalized,
    eigensystem,
    pair,
)
from .words import Word

__all__ = [
    "Representation",
    "FlagData",
    "schottky_x_root",
    "schottky_gamma",
    "schottky_gamma_prime",
    "iota3",
    "compose_iota",
    "sym_square_eigensystem",
    "rep_eigensystem",
    "fixed_flags",
    "complex_length",
]

INVERSE_TOL = 1e-10
TRANSVERSALITY_TOL = 1e-10


class Representation:
    """Generator-to-matrix assignment, with a thread-safe evaluation cache.

    ``images[l]`` is the matrix of letter ``l`` in the integer encoding of
    :mod:`orthoseries.words`.  Instances are immutable after construction;
    concurrent ``evaluate`` calls are safe and return identical arrays
    (the cache is filled with a lock, and values for a given word are
    always the same product in the same association order).
    """

    def __init__(self, images, rank: int, n: int, label: str = ""):
        if rank < 2:
            raise ConfigError("free-group rank must be >= 2")
        images = [np.asarray(m, dtype=complex) for m in images]
        if len(images) != 2 * rank:
            raise ConfigError(f"expected {2 * rank} images, got {len(images)}")
        for m in images:
            if m.shape != (n, n):
                raise ConfigError(f"image has shape {m.shape}, expected {(n, n)}")
            if abs(np.linalg.det(m)) < 1e-300:
                raise ConfigError("generator image is singular")
        eye = np.eye(n)
        for i in range(rank):
            g, ginv = images[2 * i], images[2 * i + 1]
            err = np.abs(g @ ginv - eye).max()
            # the achievable residual scales with the conditioning of the pair
            scale = max(1.0, float(np.linalg.norm(g) * np.linalg.norm(ginv)))
            if err > INVERSE_TOL * scale:
                raise ConfigError(
                    f"generator {i} and its inverse disagree by {err:.2e} "
                    f"(tolerance {INVERSE_TOL * scale:.2e})"
                )
        self.rank = rank
        self.n = n
        self.label = label
        self.images = tuple(m.copy() for m in images)
        for m in self.images:
            m.setflags(write=False)
        # set by compose_iota: the 2x2 representation this one is the
        # symmetric square of, used for spectrally exact flag data
        self.iota_base: Representation | None = None
        self._cache: dict[tuple[int, ...], np.ndarray] = {(): eye.astype(complex)}
        self._lift_cache: dict[tuple[int, ...], np.ndarray] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_generators(cls, generators, label: str = "") -> "Representation":
        """Build from generator matrices only; inverses are computed."""
        gens = [np.asarray(g, dtype=complex) for g in generators]
        images = []
        for g in gens:
            images.append(g)
            images.append(np.linalg.inv(g))
        n = gens[0].shape[0]
        return cls(images, rank=len(gens), n=n, label=label)

    @property
    def is_real(self) -> bool:
        return not any(m.imag.any() for m in self.images)

    def image(self, l: int) -> np.ndarray:
        return self.images[l]

    def evaluate(self, w: Word) -> np.ndarray:
        """Product of generator images along w, memoized by prefix.

        A batch over all words of length <= N therefore costs one matrix
        multiply per word.
        """
        letters = w.letters
        got = self._cache.get(letters)
        if got is not None:
            return got
        # find the longest cached prefix, then extend one letter at a time
        k = len(letters) - 1
        while k > 0 and letters[:k] not in self._cache:
            k -= 1
        m = self._cache[letters[:k]]
        with self._lock:
            for i in range(k, len(letters)):
                key = letters[: i + 1]
                nxt = self._cache.get(key)
                if nxt is None:
                    nxt = m @ self.images[letters[i]]
                    nxt.setflags(write=False)
                    self._cache[key] = nxt
                m = nxt
        return m

    def lifted(self, w: Word) -> np.ndarray:
        """Determinant-one lift of evaluate(w); the n-th root is chosen once
        per word and reused."""
        letters = w.letters
        got = self._lift_cache.get(letters)
        if got is None:
            got = det_normalized(self.evaluate(w))
            got.setflags(write=False)
            with self._lock:
                got = self._lift_cache.setdefault(letters, got)
        return got

    def conjugated(self, s: np.ndarray, label: str | None = None) -> "Representation":
        s = np.asarray(s, dtype=complex)
        sinv = np.linalg.inv(s)
        images = [s @ m @ sinv for m in self.images]
        return Representation(
            images, self.rank, self.n, label=label or f"{self.label}^S"
        )

    def __repr__(self):
        tag = self.label or "unlabeled"
        return f"Representation({tag!r}, rank={self.rank}, n={self.n})"

    # -- config round trip ---------------------------------------------------

    def to_config(self) -> dict:
        return {
            "family": "explicit",
            "n": self.n,
            "rank": self.rank,
            "label": self.label,
            "matrices": [
                [[[float(z.real), float(z.imag)] for z in row] for row in m]
                for m in self.images
            ],
        }

    @staticmethod
    def from_config(cfg: dict) -> "Representation":
        family = cfg.get("family", "explicit")
        compose = bool(cfg.get("compose_iota", False))
        if family in ("schottky", "schottky_prime"):
            lre, lim = cfg.get("L", [5.0, 0.0])
            build = schottky_gamma if family == "schottky" else schottky_gamma_prime
            rep = build(complex(lre, lim))
        elif family == "explicit":
            mats = cfg.get("matrices")
            if mats is None:
                raise ConfigError("explicit representation requires 'matrices'")
            images = [
                np.array([[complex(re, im) for re, im in row] for row in m])
                for m in mats
            ]
            rank = int(cfg.get("rank", len(images) // 2))
            n = int(cfg.get("n", images[0].shape[0]))
            rep = Representation(images, rank, n, label=cfg.get("label", "explicit"))
        else:
            raise ConfigError(f"unknown representation family {family!r}")
        if compose:
            rep = compose_iota(rep)
        return rep


def schottky_x_root(L: complex, prev: complex | None = None) -> complex:
    """The root x of x^2 + L x + 1 = 0 defining the second Schottky
    generator.

    At a path start the root with |x| < 1 is taken; along a path the root
    nearest to the previous sample keeps the choice continuous (the
    equation only determines x up to x <-> 1/x).
    """
    L = complex(L)
    if abs(L * L - 4.0) < 1e-12:
        raise BranchPointError(f"L = {L} is a branch point (L^2 = 4)")
    disc = cmath.sqrt(L * L - 4.0)
    r1, r2 = (-L + disc) / 2.0, (-L - disc) / 2.0
    if prev is not None:
        return r1 if abs(r1 - prev) <= abs(r2 - prev) else r2
    if abs(abs(r1) - abs(r2)) < 1e-12:
        # both roots on the unit circle; pick the upper one deterministically
        return r1 if r1.imag > 0 else r2
    return r1 if abs(r1) < abs(r2) else r2


def _schottky_matrices(L: complex, x: complex) -> tuple[np.ndarray, np.ndarray]:
    X = np.array([[L, 1.0], [-1.0, 0.0]], dtype=complex)
    Y = np.array([[0.0, x], [-1.0 / x, L]], dtype=complex)
    if L.imag == 0 and x.imag == 0:
        X, Y = X.real.astype(complex), Y.real.astype(complex)
    return X, Y


def schottky_gamma(L: complex, x: complex | None = None, label: str | None = None) -> Representation:
    """The rank-2 family a -> [[L,1],[-1,0]], b -> [[0,x],[-1/x,L]]."""
    x = schottky_x_root(L) if x is None else complex(x)
    X, Y = _schottky_matrices(complex(L), x)
    return Representation.from_generators(
        [X, Y], label=label or f"schottky(L={complex(L):.6g})"
    )


def schottky_gamma_prime(L: complex, x: complex | None = None, label: str | None = None) -> Representation:
    """The companion family a -> X_L^2, b -> X_L Y_L^3."""
    x = schottky_x_root(L) if x is None else complex(x)
    X, Y = _schottky_matrices(complex(L), x)
    return Representation.from_generators(
        [X @ X, X @ Y @ Y @ Y], label=label or f"schottky'(L={complex(L):.6g})"
    )


_SQRT2 = float(np.sqrt(2.0))


def iota3(m: np.ndarray) -> np.ndarray:
    """Irreducible embedding of 2x2 into 3x3 matrices (symmetric square).

    Written in the orthonormal basis {e1^2, sqrt2 e1 e2, e2^2} of the
    symmetric square, so it is a homomorphism that sends unitaries to
    unitaries; singular values map to products sigma_i sigma_j and singular
    value ratios are preserved.  Diagonal matrices diag(l, 1/l) map to
    diag(l^2, 1, l^-2).
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError("iota3 expects a 2x2 matrix")
    a, b = m[0, 0], m[0, 1]
    c, d = m[1, 0], m[1, 1]
    return np.array(
        [
            [a * a, _SQRT2 * a * b, b * b],
            [_SQRT2 * a * c, a * d + b * c, _SQRT2 * b * d],
            [c * c, _SQRT2 * c * d, d * d],
        ]
    )


def compose_iota(rep: Representation) -> Representation:
    """Apply the 3-dimensional irreducible embedding generator-wise.

    The result remembers its 2x2 base: eigen data of word images is then
    computed from the base's spectrum (eigenvalues multiply pairwise,
    eigenvectors map to symmetric squares), which stays accurate even when
    the 3x3 product has norm far beyond 1/eps.
    """
    if rep.n != 2:
        raise ValueError("compose_iota requires a 2-dimensional representation")
    images = [iota3(m) for m in rep.images]
    out = Representation(images, rep.rank, 3, label=f"iota({rep.label})")
    out.iota_base = rep
    return out


def _sym_pair(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Symmetric product of two 2-vectors in the orthonormal basis
    {e1^2, sqrt2 e1 e2, e2^2} (works for covectors in the dual basis too)."""
    return np.array(
        [u[0] * v[0], (u[0] * v[1] + u[1] * v[0]) / _SQRT2, u[1] * v[1]]
    )


def sym_square_eigensystem(eig2: EigenSystem) -> EigenSystem:
    """Eigen data of the symmetric square from 2x2 eigen data.

    Eigenvalues are the pairwise products (l1^2, l1 l2, l2^2); right and
    left eigenvectors are the symmetric products of the corresponding 2x2
    ones.  Modulus order is inherited from the base.
    """
    lam = eig2.eigenvalues
    evals = np.array([lam[0] ** 2, lam[0] * lam[1], lam[1] ** 2])
    v1, v2 = eig2.right_vectors[:, 0], eig2.right_vectors[:, 1]
    right = np.stack(
        [_sym_pair(v1, v1), _sym_pair(v1, v2), _sym_pair(v2, v2)], axis=1
    )
    l1, l2 = eig2.left_covectors[0], eig2.left_covectors[1]
    left = np.stack([_sym_pair(l1, l1), _sym_pair(l1, l2), _sym_pair(l2, l2)], axis=0)
    right = right / np.linalg.norm(right, axis=0, keepdims=True)
    left = left / np.linalg.norm(left, axis=1, keepdims=True)
    return EigenSystem(evals, right, left)


def rep_eigensystem(rep: Representation, gamma: Word, tol: float = 1e-6) -> EigenSystem:
    """Eigen data of rho(gamma), routed through the 2x2 base for symmetric
    square representations."""
    if rep.iota_base is not None:
        return sym_square_eigensystem(eigensystem(rep.iota_base.lifted(gamma), tol=tol))
    return eigensystem(rep.lifted(gamma), tol=tol)


class FlagData:
    """Attracting/repelling eigen flags of a group element.

    ``plus_line`` is the top eigenline, ``minus_line`` the bottom one;
    ``plus_hyperplane`` is the attracting hyperplane (spanned by the top
    n-1 eigenvectors) stored as its annihilator, the left covector of the
    bottom eigenvalue, and ``minus_hyperplane`` is the left covector of the
    top eigenvalue.
    """

    __slots__ = ("plus_line", "minus_line", "plus_hyperplane", "minus_hyperplane")

    def __init__(self, eig: EigenSystem):
        self.plus_line = ProjLine(eig.right_vectors[:, 0])
        self.minus_line = ProjLine(eig.right_vectors[:, -1])
        self.plus_hyperplane = ProjHyperplane(eig.left_covectors[-1, :])
        self.minus_hyperplane = ProjHyperplane(eig.left_covectors[0, :])
        for phi, omega, what in (
            (self.plus_hyperplane, self.minus_line, "zeta^{n-1}(+) vs zeta^1(-)"),
            (self.minus_hyperplane, self.plus_line, "zeta^{n-1}(-) vs zeta^1(+)"),
        ):
            if abs(pair(phi, omega)) <= TRANSVERSALITY_TOL:
                raise TransversalityFailure(f"flag transversality failed: {what}")

    def swapped(self) -> "FlagData":
        out = object.__new__(FlagData)
        out.plus_line = self.minus_line
        out.minus_line = self.plus_line
        out.plus_hyperplane = self.minus_hyperplane
        out.minus_hyperplane = self.plus_hyperplane
        return out


def fixed_flags(rep: Representation, gamma: Word, tol: float = 1e-6) -> FlagData:
    """Eigen flag data of rho(gamma); requires modulus gaps at both ends."""
    if gamma.is_identity():
        raise ValueError("fixed flags require a nontrivial word")
    return FlagData(rep_eigensystem(rep, gamma, tol=tol))


def complex_length(rep: Representation, gamma: Word, tol: float = 1e-6) -> complex:
    """Principal value of log(lambda_1 / lambda_n) of the det-1 lift of
    rho(gamma); well defined mod 2 pi i."""
    eig = rep_eigensystem(rep, gamma, tol=tol)
    return complex(np.log(eig.eigenvalues[0] / eig.eigenvalues[-1]))
