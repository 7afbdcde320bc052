"""Dense small-dimension complex linear algebra.

Eigen data feeds the flag maps and complex lengths, singular value ratios
feed the Poincare series, and the wedge helpers implement the
cancellation-free cross-ratio evaluation: by Cauchy-Binet,

    phi(om) phi'(om') - phi(om') phi'(om) = <phi ^ phi', om ^ om'>,

so the deviation of a cross ratio from 1 is computed as a product of
well-conditioned factors instead of a difference of nearly equal ones.

Eigen decompositions are delegated to LAPACK through numpy; the residual
and gap contracts are enforced on every call, and a real fast path keeps
imaginary parts of flag data exactly zero for real representations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateSpectrum

__all__ = [
    "EigenSystem",
    "ProjLine",
    "ProjHyperplane",
    "eigensystem",
    "singular_ratio",
    "grassmann_distance",
    "pair",
    "det_normalized",
    "wedge_coords",
    "wedge_pair_index",
    "batched_wedge_matrices",
    "batched_sigma_ratios",
    "log1p_complex",
]

EIGEN_RESIDUAL_TOL = 1e-10
DEFAULT_GAP_TOL = 1e-6


def _check_matrix(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    n = a.shape[0]
    if not 2 <= n <= 8:
        raise ValueError(f"dimension {n} outside supported range [2, 8]")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def det_normalized(a: np.ndarray) -> np.ndarray:
    """Rescale to determinant one using the principal n-th root of det(a)."""
    a = _check_matrix(a)
    d = complex(np.linalg.det(a))
    if d == 0:
        raise ValueError("matrix is singular")
    root = d ** (1.0 / a.shape[0])
    # real input with a real root keeps exactly zero imaginary parts
    return np.asarray(a, dtype=complex) / root


@dataclass(frozen=True)
class EigenSystem:
    """Eigen data of an invertible matrix, sorted by decreasing modulus.

    ``right_vectors[:, i]`` and ``left_covectors[i, :]`` are unit-norm right
    and left eigenvectors for ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_covectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def gap_1(self) -> float:
        """|lambda_2| / |lambda_1|."""
        ev = np.abs(self.eigenvalues)
        return float(ev[1] / ev[0])

    @property
    def gap_n(self) -> float:
        """|lambda_n| / |lambda_{n-1}|."""
        ev = np.abs(self.eigenvalues)
        return float(ev[-1] / ev[-2])


def eigensystem(a: np.ndarray, tol: float = DEFAULT_GAP_TOL) -> EigenSystem:
    """Full eigen decomposition with the modulus gaps the flag maps need.

    Raises
    ------
    DegenerateSpectrum
        If |lambda_1| ~ |lambda_2| or |lambda_{n-1}| ~ |lambda_n| within
        `tol`, or if the residual contract fails (near-defective input).
    """
    a = _check_matrix(a)
    # real fast path: dgeev keeps flag data exactly real on the real locus
    work = a.real if (np.iscomplexobj(a) and not a.imag.any()) else a
    ew, v = np.linalg.eig(work)
    order = np.argsort(-np.abs(ew), kind="stable")
    ew, v = ew[order], v[:, order]

    mods = np.abs(ew)
    if mods[-1] == 0:
        raise ValueError("matrix is singular")
    if mods[1] / mods[0] > 1 - tol or mods[-1] / mods[-2] > 1 - tol:
        raise DegenerateSpectrum(
            f"top/bottom eigenvalue moduli coincide within {tol}: {mods}"
        )
    try:
        left = np.linalg.inv(v)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSpectrum("eigenvector basis is numerically singular") from exc

    norm_a = np.linalg.norm(a)
    res_r = np.linalg.norm(a @ v - v * ew[None, :], axis=0)
    res_l = np.linalg.norm(left @ a - ew[:, None] * left, axis=1)
    scale_l = np.linalg.norm(left, axis=1)
    if np.any(res_r > EIGEN_RESIDUAL_TOL * norm_a) or np.any(
        res_l > EIGEN_RESIDUAL_TOL * norm_a * scale_l
    ):
        raise DegenerateSpectrum("eigen residual exceeds contract; spectrum too close to defective")
    prod = np.prod(ew)
    det = np.linalg.det(a)
    # achievable absolute accuracy of both sides scales like eps * ||A||^n
    det_floor = a.shape[0] * np.finfo(float).eps * norm_a ** a.shape[0]
    if abs(prod - det) > 1e-9 * abs(det) + det_floor:
        raise DegenerateSpectrum("eigenvalue product disagrees with determinant")

    v = v / np.linalg.norm(v, axis=0, keepdims=True)
    left = left / np.linalg.norm(left, axis=1, keepdims=True)
    ew = ew.astype(complex)
    return EigenSystem(ew, v.astype(complex), left.astype(complex))


def singular_ratio(a: np.ndarray) -> float:
    """sigma_2 / sigma_1, the top singular value ratio in (0, 1].

    Invariant under nonzero rescaling of `a`, so the determinant-one lift
    is implicit.
    """
    a = _check_matrix(a)
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0:
        raise ValueError("matrix is zero")
    return float(s[1] / s[0])


def _unit(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    n = np.linalg.norm(v)
    if n == 0 or not np.isfinite(n):
        raise ValueError("projective representative must be nonzero and finite")
    return v / n


class _Projective:
    __slots__ = ("vec",)

    def __init__(self, vec):
        object.__setattr__(self, "vec", _unit(vec))
        self.vec.setflags(write=False)

    def __setattr__(self, *a):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def n(self) -> int:
        return len(self.vec)

    def proportional_to(self, other, tol: float = 1e-10) -> bool:
        inner = abs(np.vdot(self.vec, other.vec))
        return bool(inner >= 1 - tol)

    def __eq__(self, other):
        return isinstance(other, type(self)) and self.proportional_to(other)

    def __repr__(self):
        return f"{type(self).__name__}({np.array2string(self.vec, precision=6)})"


class ProjLine(_Projective):
    """A point of P(C^n): a line, stored by a unit representative."""


class ProjHyperplane(_Projective):
    """A point of P(C^n*): a hyperplane, stored by its unit annihilating
    covector."""


def pair(phi: ProjHyperplane, omega: ProjLine) -> complex:
    """Bilinear application phi(omega) of the covector to the line
    representative (no conjugation; only ratios of pairings are used
    downstream, so the scale covariance is harmless)."""
    return complex(np.dot(phi.vec, omega.vec))


def grassmann_distance(u: ProjLine, v: ProjLine) -> float:
    """Sine of the principal angle: ||u ^ v|| / (||u|| ||v||), with the
    Hermitian wedge norm ||u ^ v||^2 = sum_{i<j} |u_i v_j - u_j v_i|^2.

    Computed directly from the wedge coordinates: unlike the
    sqrt(1 - |<u,v>|^2) shortcut this keeps full relative accuracy for
    nearly equal lines and is exactly zero on proportional representatives.
    """
    w = wedge_coords(u.vec, v.vec)
    return float(min(1.0, np.linalg.norm(w)))


# -- wedge machinery ---------------------------------------------------------

def wedge_pair_index(n: int) -> list[tuple[int, int]]:
    """Index pairs (i < j) giving the coordinate order on wedge^2 C^n."""
    return list(combinations(range(n), 2))


def wedge_coords(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Coordinates u_i v_j - u_j v_i of u ^ v, pairs in lexicographic order."""
    u = np.asarray(u).reshape(-1)
    v = np.asarray(v).reshape(-1)
    pairs = wedge_pair_index(len(u))
    return np.array([u[i] * v[j] - u[j] * v[i] for i, j in pairs])


def batched_wedge_matrices(mats: np.ndarray) -> np.ndarray:
    """Second exterior power of a stack of matrices.

    Satisfies ``wedge(M) @ wedge_coords(u, v) = wedge_coords(Mu, Mv)`` and
    is multiplicative, so wedge matrices of long products can reuse the
    same prefix recursion as the matrices themselves.
    """
    mats = np.asarray(mats)
    n = mats.shape[-1]
    pairs = wedge_pair_index(n)
    k = len(pairs)
    out = np.empty(mats.shape[:-2] + (k, k), dtype=mats.dtype)
    for r, (i, j) in enumerate(pairs):
        for c, (kk, ll) in enumerate(pairs):
            out[..., r, c] = (
                mats[..., i, kk] * mats[..., j, ll]
                - mats[..., i, ll] * mats[..., j, kk]
            )
    return out


def batched_top_singular(mats: np.ndarray) -> np.ndarray:
    """Largest singular value for a stack of matrices (always relatively
    accurate; it is a norm)."""
    mats = np.asarray(mats)
    n = mats.shape[-1]
    if n == 1:
        return np.abs(mats[..., 0, 0])
    if n == 2:
        fro2 = np.einsum("...ij,...ij->...", mats, mats.conj()).real
        det = mats[..., 0, 0] * mats[..., 1, 1] - mats[..., 0, 1] * mats[..., 1, 0]
        disc2 = fro2 * fro2 - 4.0 * np.abs(det) ** 2
        return np.sqrt((fro2 + np.sqrt(np.maximum(disc2, 0.0))) / 2.0)
    gram = np.matmul(np.conj(np.swapaxes(mats, -1, -2)), mats)
    return np.sqrt(np.maximum(np.linalg.eigvalsh(gram)[..., -1], 0.0))


def batched_sigma_ratios(mats: np.ndarray, wedges: np.ndarray | None = None) -> np.ndarray:
    """sigma_2/sigma_1 for a stack of matrices.

    The ratio is computed as sigma_1(wedge^2 M) / sigma_1(M)^2: the top
    singular value of the second exterior power is sigma_1 sigma_2.  Both
    factors are norms, so the result keeps full relative accuracy even for
    products contracted far below machine epsilon, where any route through
    small singular values or product determinants collapses into rounding
    noise.  Callers that already carry wedge matrices through a product
    recursion pass them in; otherwise they are formed on the spot.
    """
    mats = np.asarray(mats)
    if wedges is None:
        wedges = batched_wedge_matrices(mats)
    s1 = batched_top_singular(mats)
    w1 = batched_top_singular(wedges)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.minimum(w1 / (s1 * s1), 1.0)


def log1p_complex(z: np.ndarray) -> np.ndarray:
    """Principal log(1 + z) accurate for tiny |z|, elementwise.

    numpy's log1p is real-only; for |z| below 1e-4 a five-term series keeps
    full relative precision (truncation below |z|^5), above that the direct
    log is already fine.
    """
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(1.0 + z)
    small = np.abs(z) < 1e-4
    if np.any(small):
        zs = np.where(small, z, 0.0)
        series = zs * (1 - zs * (1 / 2 - zs * (1 / 3 - zs * (1 / 4 - zs / 5))))
        out = np.where(small, series, out)
    return out
