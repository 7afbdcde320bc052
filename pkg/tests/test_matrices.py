import math

import numpy as np
import pytest

from orthoseries.errors import DegenerateSpectrum
from orthoseries.matrices import (
    ProjHyperplane,
    ProjLine,
    batched_sigma_ratios,
    batched_wedge_matrices,
    det_normalized,
    eigensystem,
    grassmann_distance,
    log1p_complex,
    pair,
    singular_ratio,
    wedge_coords,
)
from orthoseries.reps import iota3

from oracles import gram_sigma_ratio

X5 = np.array([[5.0, 1.0], [-1.0, 0.0]])
LAM1 = (5 + math.sqrt(21)) / 2
LAM2 = (5 - math.sqrt(21)) / 2


def random_spread_matrix(rng, n):
    """Random invertible matrix with well separated eigenvalue moduli."""
    diag = np.diag([2.0 ** k for k in range(n)]).astype(complex)
    s = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return s @ diag @ np.linalg.inv(s)


class TestEigensystem:
    def test_x5_eigenvalues(self):
        eig = eigensystem(X5)
        # roots of t^2 - 5t + 1
        assert eig.eigenvalues[0] == pytest.approx(LAM1, abs=1e-12)
        assert eig.eigenvalues[1] == pytest.approx(LAM2, abs=1e-12)

    def test_identity_degenerate(self):
        with pytest.raises(DegenerateSpectrum):
            eigensystem(np.eye(3))

    def test_iota_diag(self):
        lam = 1.7
        eig = eigensystem(iota3(np.diag([lam, 1 / lam])))
        assert np.allclose(eig.eigenvalues, [lam ** 2, 1.0, lam ** -2], atol=1e-12)

    def test_residual_contract(self, rng):
        for n in (2, 3, 5, 8):
            a = random_spread_matrix(rng, n)
            eig = eigensystem(a)
            norm = np.linalg.norm(a)
            for i in range(n):
                v = eig.right_vectors[:, i]
                phi = eig.left_covectors[i]
                lam = eig.eigenvalues[i]
                assert np.linalg.norm(a @ v - lam * v) <= 1e-10 * norm
                assert np.linalg.norm(phi @ a - lam * phi) <= 1e-10 * norm

    def test_modulus_sorted(self, rng):
        a = random_spread_matrix(rng, 6)
        mods = np.abs(eigensystem(a).eigenvalues)
        assert np.all(np.diff(mods) <= 0)

    def test_similarity_invariance(self, rng):
        a = random_spread_matrix(rng, 4)
        for _ in range(5):
            s = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            ew1 = eigensystem(a).eigenvalues
            ew2 = eigensystem(s @ a @ np.linalg.inv(s)).eigenvalues
            assert np.allclose(ew1, ew2, rtol=1e-8)

    def test_real_input_real_flags(self):
        eig = eigensystem(X5.astype(complex))
        assert not eig.right_vectors.imag.any()
        assert not eig.left_covectors.imag.any()

    def test_product_vs_det(self, rng):
        a = random_spread_matrix(rng, 3)
        eig = eigensystem(a)
        assert np.prod(eig.eigenvalues) == pytest.approx(np.linalg.det(a), rel=1e-9)


class TestSingularRatio:
    def test_unitary(self):
        t = 0.3
        u = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
        assert singular_ratio(u) == pytest.approx(1.0, abs=1e-12)

    def test_diagonal(self):
        assert singular_ratio(np.diag([3.0, 1 / 3.0])) == pytest.approx(1 / 9, abs=1e-14)

    def test_scale_invariance(self, rng):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert singular_ratio(a) == pytest.approx(singular_ratio(3.7j * a), abs=1e-13)

    def test_iota_invariance(self, rng):
        for _ in range(100):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            assert abs(singular_ratio(iota3(a)) - singular_ratio(a)) < 1e-12

    def test_against_gram_oracle(self, rng):
        for n in (2, 3, 4):
            a = rng.normal(size=(n, n))
            assert singular_ratio(a) == pytest.approx(gram_sigma_ratio(a), abs=1e-10)

    def test_batched_matches_scalar(self, rng):
        for n in (2, 3):
            mats = rng.normal(size=(40, n, n)) + 1j * rng.normal(size=(40, n, n))
            batch = batched_sigma_ratios(mats)
            scalar = [singular_ratio(m) for m in mats]
            assert np.allclose(batch, scalar, atol=1e-12)

    def test_batched_deep_contraction_accuracy(self):
        # products with norm ~1e8 still give relatively accurate ratios (2x2)
        m = np.linalg.matrix_power(X5, 12).astype(float)[None]
        ratio = batched_sigma_ratios(m)[0]
        s = np.linalg.svd(m[0], compute_uv=False)
        assert ratio == pytest.approx(s[1] / s[0], rel=1e-8)
        assert ratio < 1e-10  # genuinely deep


class TestProjective:
    def test_pair_examples(self):
        assert pair(ProjHyperplane([0, 1]), ProjLine([1, 0])) == pytest.approx(0.0, abs=1e-15)
        assert pair(ProjHyperplane([1, 0]), ProjLine([2, 1])) == pytest.approx(
            2 / math.sqrt(5), abs=1e-14
        )
        got = pair(ProjHyperplane([1, -1]), ProjLine([3, 1]))
        assert got == pytest.approx(2 / math.sqrt(20), abs=1e-14)

    def test_proportional_equality(self):
        assert ProjLine([1, 2j]) == ProjLine([-3, -6j])
        assert ProjLine([1, 0]) != ProjLine([0, 1])

    def test_grassmann_examples(self):
        e1, e2 = ProjLine([1, 0]), ProjLine([0, 1])
        assert grassmann_distance(e1, e1) == 0.0
        assert grassmann_distance(e1, e2) == pytest.approx(1.0, abs=1e-15)
        mid = ProjLine([1, 1])
        assert grassmann_distance(e1, mid) == pytest.approx(1 / math.sqrt(2), abs=1e-12)

    def test_grassmann_metric(self, rng):
        pts = [ProjLine(rng.normal(size=4) + 1j * rng.normal(size=4)) for _ in range(12)]
        for u in pts:
            assert grassmann_distance(u, u) <= 1e-12
        for u in pts:
            for v in pts:
                duv = grassmann_distance(u, v)
                assert duv == pytest.approx(grassmann_distance(v, u), abs=1e-12)
                for w in pts:
                    assert duv <= grassmann_distance(u, w) + grassmann_distance(w, v) + 1e-12

    def test_wedge_norm_formula(self, rng):
        u = rng.normal(size=5) + 1j * rng.normal(size=5)
        v = rng.normal(size=5) + 1j * rng.normal(size=5)
        direct = math.sqrt(sum(abs(u[i] * v[j] - u[j] * v[i]) ** 2
                               for i in range(5) for j in range(i + 1, 5)))
        d = grassmann_distance(ProjLine(u), ProjLine(v))
        assert d == pytest.approx(direct / (np.linalg.norm(u) * np.linalg.norm(v)), abs=1e-12)


class TestWedge:
    def test_cauchy_binet_pairing(self, rng):
        for n in (2, 3, 4, 5):
            phi = rng.normal(size=n) + 1j * rng.normal(size=n)
            phip = rng.normal(size=n) + 1j * rng.normal(size=n)
            om = rng.normal(size=n) + 1j * rng.normal(size=n)
            omp = rng.normal(size=n) + 1j * rng.normal(size=n)
            lhs = np.dot(wedge_coords(phi, phip), wedge_coords(om, omp))
            rhs = np.dot(phi, om) * np.dot(phip, omp) - np.dot(phi, omp) * np.dot(phip, om)
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_wedge_matrix_action(self, rng):
        for n in (2, 3, 4):
            m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            u = rng.normal(size=n) + 1j * rng.normal(size=n)
            v = rng.normal(size=n) + 1j * rng.normal(size=n)
            w = batched_wedge_matrices(m[None])[0]
            assert np.allclose(w @ wedge_coords(u, v), wedge_coords(m @ u, m @ v), atol=1e-10)

    def test_wedge_multiplicative(self, rng):
        a = rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3))
        wa, wb, wab = (batched_wedge_matrices(x[None])[0] for x in (a, b, a @ b))
        assert np.allclose(wa @ wb, wab, atol=1e-10)


class TestHelpers:
    def test_det_normalized(self, rng):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = det_normalized(a)
        assert np.linalg.det(b) == pytest.approx(1.0, abs=1e-12)

    def test_det_normalized_real_stays_real(self):
        b = det_normalized(X5)
        assert not b.imag.any()

    def test_log1p_complex_small(self):
        z = np.array([1e-9 + 2e-10j, -3e-12j, 1e-5])
        out = log1p_complex(z)
        expected = z - z ** 2 / 2 + z ** 3 / 3
        assert np.allclose(out, expected, rtol=1e-13, atol=0)

    def test_log1p_complex_large(self):
        z = np.array([0.5 + 0.25j, -0.9, 2.0])
        assert np.allclose(log1p_complex(z), np.log(1 + z), rtol=1e-14)

    def test_log1p_real_zero_imag(self):
        out = log1p_complex(np.array([1e-8 + 0j, 0.3 + 0j]))
        assert not out.imag.any()
