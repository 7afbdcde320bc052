import json
import math

import numpy as np
import pytest

from orthoseries.errors import ExtrapolationUnstable
from orthoseries.identity import (
    TermEngine,
    gap_table,
    lhs,
    rep_sigma_level_sums,
    residual_mod_2pi,
    rhs_partial,
    tail_estimate,
    terms_to_csv_rows,
    verify,
)
from orthoseries.reps import complex_length, schottky_gamma
from orthoseries.words import Word, boundary_preset

W = Word.from_string
LAM1 = (5 + math.sqrt(21)) / 2


class TestLhs:
    def test_pants_lengths(self, gamma5, pants_bc):
        # 2 log(lambda_1) for each of X, Y, (XY)^-1; all three share the
        # same trace, hence the same length
        single = 2 * math.log(LAM1)
        val = lhs(gamma5, pants_bc)
        assert val == pytest.approx(3 * single, rel=1e-12)

    def test_iota_doubles(self, gamma5, gamma5_iota, torus_bc):
        assert lhs(gamma5_iota, torus_bc) == pytest.approx(
            2 * lhs(gamma5, torus_bc), rel=1e-9
        )

    def test_empty_boundary(self, gamma5):
        assert lhs(gamma5, None) == 0j


class TestRhsPartial:
    def test_monotone_in_truncation(self, engine_g5_8):
        sums = [engine_g5_8.rhs_sum(n).real for n in range(1, 9)]
        assert all(b > a for a, b in zip(sums, sums[1:]))

    def test_pants_level_zero(self, gamma5, pants_bc):
        total, table = rhs_partial(gamma5, pants_bc, 0)
        keys = {(k.j, k.q) for k, _ in table}
        assert keys == {(j, q) for j in range(3) for q in range(3) if j != q}
        assert all(k.word == Word() for k, _ in table)

    def test_bookkeeping_sum(self, engine_g5_8):
        table = engine_g5_8.table()
        total = engine_g5_8.rhs_sum()
        assert total == pytest.approx(sum(v for _, v in table), abs=1e-12)

    def test_permutation_invariance(self, engine_g5_8, rng):
        vals = np.array([v for _, v in engine_g5_8.table()])
        perm = rng.permutation(len(vals))
        a = math.fsum(vals.real.tolist())
        b = math.fsum(vals.real[perm].tolist())
        assert a == pytest.approx(b, abs=1e-12)

    def test_term_order_deterministic(self, gamma5, torus_bc):
        _, t1 = rhs_partial(gamma5, torus_bc, 4)
        _, t2 = rhs_partial(gamma5, torus_bc, 4)
        assert [k for k, _ in t1] == [k for k, _ in t2]
        lens = [len(k.word) for k, _ in t1]
        assert lens == sorted(lens)


class TestTailEstimate:
    def test_contractive_regime(self, gamma5, torus_bc):
        t8 = tail_estimate(gamma5, torus_bc, 8)
        assert 0 < t8 < math.inf

    def test_decreasing_in_truncation(self, gamma5, torus_bc):
        t6 = tail_estimate(gamma5, torus_bc, 6)
        t8 = tail_estimate(gamma5, torus_bc, 8)
        assert t8 < t6

    def test_unitary_rep_unstable(self, unitary_rep, torus_bc):
        with pytest.raises(ExtrapolationUnstable):
            tail_estimate(unitary_rep, torus_bc, 4)

    def test_level_sums_need_no_flags(self, unitary_rep, torus_bc):
        sums = rep_sigma_level_sums(unitary_rep, torus_bc, 4)
        assert np.all(sums[1:] > 0)


class TestVerify:
    def test_gamma5_passes(self, gamma5, torus_bc):
        report = verify(gamma5, torus_bc, 8)
        assert report.passed and report.error is None
        assert report.is_real_locus
        assert abs(report.residual) <= report.tail_estimate + report.tol
        assert report.lhs.real == pytest.approx(
            complex_length(gamma5, W("abAB")).real, rel=1e-12
        )

    def test_off_real_locus_mod_gate(self, torus_bc):
        rep = schottky_gamma(2.0j)
        report = verify(rep, torus_bc, 8)
        assert not report.is_real_locus
        assert report.error is None
        assert report.passed
        assert report.residual_mod <= report.tail_estimate + report.tol

    def test_unitary_error_report(self, unitary_rep, torus_bc):
        report = verify(unitary_rep, torus_bc, 4)
        assert not report.passed
        assert report.error and "DegenerateSpectrum" in report.error

    def test_noncontracting_error_report(self, torus_bc):
        report = verify(schottky_gamma(1.2j), torus_bc, 6)
        assert not report.passed
        assert report.error and "ExtrapolationUnstable" in report.error

    def test_residual_mod_unchanged_by_rebranching(self, engine_g5_8, gamma5, torus_bc):
        report = verify(gamma5, torus_bc, 6)
        shifted = report.residual + 2j * math.pi
        assert residual_mod_2pi(shifted) == pytest.approx(report.residual_mod, abs=1e-12)

    def test_json_round_trip(self, gamma5, torus_bc):
        report = verify(gamma5, torus_bc, 4)
        payload = json.dumps(report.to_json_dict(), sort_keys=True)
        back = json.loads(payload)
        assert back["passed"] is True
        assert back["lhs"][0] == pytest.approx(report.lhs.real)
        assert back["lhs"][1] == 0.0


class TestGapTable:
    def test_gaps_positive_and_bounded(self, gamma5, torus_bc):
        table = gap_table(gamma5, torus_bc, 0, 8)
        assert all(g > 0 for _, g in table.gaps)
        assert table.total < table.circle_length
        assert table.deficit <= tail_estimate(gamma5, torus_bc, 8) + 1e-9

    def test_refinement_is_superset(self, gamma5, torus_bc):
        small = gap_table(gamma5, torus_bc, 0, 4)
        big = gap_table(gamma5, torus_bc, 0, 6)
        small_keys = {k for k, _ in small.gaps}
        big_keys = {k for k, _ in big.gaps}
        assert small_keys < big_keys

    def test_rejects_complex_rep(self, torus_bc):
        with pytest.raises(ValueError):
            gap_table(schottky_gamma(2.0j), torus_bc, 0, 4)


class TestCsv:
    def test_rows_shape(self, gamma5, torus_bc):
        engine = TermEngine(gamma5, torus_bc, 3)
        rows = terms_to_csv_rows(engine.iter_table())
        assert rows[0] == "j,q,word,re_term,im_term,word_len,singular_ratio"
        first = rows[1].split(",")
        assert first[0] == "1" and first[1] == "1"
        assert len(rows) == 1 + len(engine.table())
