import math

import numpy as np
import pytest

from orthoseries.continuation import (
    CirclePath,
    MonodromyTable,
    PathSpec,
    PolylinePath,
    TrackedQuantity,
    continued_identity,
    loop_monodromy,
    track,
)
from orthoseries.crossratio import TermKey
from orthoseries.errors import (
    ConfigError,
    DomainViolation,
    PathLeavesDomain,
    RefinementBudgetExceeded,
)
from orthoseries.identity import verify
from orthoseries.reps import complex_length
from orthoseries.words import Word

W = Word.from_string


@pytest.fixture(scope="module")
def torus_bc():
    from orthoseries.words import boundary_preset

    return boundary_preset("torus")


@pytest.fixture(scope="module")
def circle_iota():
    return PathSpec("schottky", CirclePath(radius=5.0), compose_iota_flag=True, samples=65)


class TestPathSpec:
    def test_circle_closes(self, circle_iota):
        assert circle_iota.is_closed()

    def test_x_branch_closes(self, circle_iota):
        assert abs(circle_iota.x_at(0.0) - circle_iota.x_at(1.0)) < 1e-12

    def test_polyline_open(self):
        path = PathSpec("schottky", PolylinePath((5 + 0j, 7 + 0j)))
        assert not path.is_closed()

    def test_from_config_round_trip(self):
        cfg = {
            "family": "schottky",
            "compose_iota": True,
            "L_path": {"kind": "circle", "center": [0, 0], "radius": 5, "turns": 1},
            "samples": 65,
        }
        path = PathSpec.from_config(cfg)
        assert path.is_closed() and path.compose_iota_flag

    def test_bad_configs(self):
        with pytest.raises(ConfigError):
            PathSpec.from_config({"family": "schottky"})
        with pytest.raises(ConfigError):
            PathSpec.from_config({"family": "schottky", "L_path": {"kind": "wavy"}})
        with pytest.raises(ConfigError):
            PathSpec("mystery", CirclePath())


class TestTrack:
    def test_constant_path(self, torus_bc):
        path = PathSpec("schottky", PolylinePath((5 + 0j, 5 + 0j)), samples=9)
        tr = track(path, TrackedQuantity("length", j=0), torus_bc)
        assert tr.winding == 0.0
        assert max(abs(v - tr.values[0]) for v in tr.values) < 1e-12

    def test_real_segment_stays_real(self, torus_bc):
        path = PathSpec("schottky", PolylinePath((5 + 0j, 7 + 0j)), samples=17)
        tr = track(path, TrackedQuantity("length", j=0), torus_bc)
        assert tr.winding == pytest.approx(0.0, abs=1e-12)
        assert all(v.imag == 0.0 for v in tr.values)
        # endpoint values agree with the principal lengths
        rep0 = path.representation_at(0.0)
        rep1 = path.representation_at(1.0)
        assert tr.values[0] == pytest.approx(complex_length(rep0, W("abAB")), rel=1e-12)
        assert tr.values[-1] == pytest.approx(complex_length(rep1, W("abAB")), rel=1e-12)

    def test_term_track_real_segment(self, torus_bc):
        path = PathSpec("schottky", PolylinePath((5 + 0j, 6 + 0j)), samples=9)
        key = TermKey(0, 0, W("a"))
        tr = track(path, TrackedQuantity("term", key=key), torus_bc)
        assert all(v.imag == 0.0 for v in tr.values)

    def test_circle_word_winding(self, torus_bc, circle_iota):
        tr = track(circle_iota, TrackedQuantity("term", key=TermKey(0, 0, W("a"))), torus_bc)
        assert tr.winding == pytest.approx(2.0, abs=1e-6)

    def test_psl2_winding_is_half(self, torus_bc):
        path = PathSpec("schottky", CirclePath(radius=5.0), samples=65)
        tr = track(path, TrackedQuantity("term", key=TermKey(0, 0, W("a"))), torus_bc)
        assert tr.winding == pytest.approx(1.0, abs=1e-6)

    def test_out_and_back_coherence(self, torus_bc):
        path = PathSpec("schottky", PolylinePath((5 + 0j, 4 + 2j, 5 + 0j)), samples=33)
        for quantity in (
            TrackedQuantity("length", j=0),
            TrackedQuantity("term", key=TermKey(0, 0, W("ab"))),
        ):
            tr = track(path, quantity, torus_bc)
            assert abs(tr.values[-1] - tr.values[0]) < 1e-8

    def test_budget_exceeded(self, torus_bc):
        # the second family's boundary length winds many times around this
        # loop; a handful of samples cannot satisfy the phase bound
        path = PathSpec("schottky_prime", CirclePath(radius=5.0), samples=9)
        with pytest.raises(RefinementBudgetExceeded):
            track(
                path,
                TrackedQuantity("length", j=0),
                torus_bc,
                num_samples=9,
                budget=12,
            )

    def test_initial_branch_validation(self, torus_bc):
        path = PathSpec("schottky", PolylinePath((5 + 0j, 6 + 0j)), samples=5)
        q = TrackedQuantity("length", j=0)
        base = track(path, q, torus_bc)
        shifted = track(path, q, torus_bc, initial_branch=base.values[0] + 2j * math.pi)
        assert shifted.values[-1] == pytest.approx(base.values[-1] + 2j * math.pi)
        with pytest.raises(ValueError):
            track(path, q, torus_bc, initial_branch=base.values[0] + 1.0)

    def test_path_leaves_domain(self, torus_bc):
        # L = 3 makes the commutator parabolic: the length gap collapses
        path = PathSpec("schottky", PolylinePath((5 + 0j, 3 + 0j, 5 + 0j)), samples=9)
        with pytest.raises(PathLeavesDomain):
            track(path, TrackedQuantity("length", j=0), torus_bc)


class TestLoopMonodromy:
    def test_open_path_rejected(self, torus_bc):
        path = PathSpec("schottky", PolylinePath((5 + 0j, 7 + 0j)))
        with pytest.raises(ConfigError):
            loop_monodromy(path, torus_bc, 1)

    def test_real_loop_all_zero(self, torus_bc):
        path = PathSpec("schottky", PolylinePath((5 + 0j, 7 + 0j, 5 + 0j)), samples=17)
        table = loop_monodromy(path, torus_bc, 2)
        assert all(m == 0 for m in table.word_rows.values())
        assert table.total == 0 and table.boundary_total == 0
        assert table.max_integrality_defect < 1e-9

    def test_circle_loop_table(self, torus_bc, circle_iota):
        table = loop_monodromy(circle_iota, torus_bc, 2)
        rows = table.as_pi_multiples()
        assert rows["a"] == 4 and rows["ab"] == 4 and rows["aB"] == 0
        assert table.consistent
        assert table.max_integrality_defect < 1e-6

    def test_csv_rows(self, torus_bc, circle_iota):
        table = loop_monodromy(circle_iota, torus_bc, 1)
        rows = table.to_csv_rows()
        assert rows[0] == "word,monodromy_pi"
        assert rows[-1].startswith("total,")

    def test_table_equality_by_rows(self):
        t1 = MonodromyTable("p", [(TermKey(0, 0, W("a")), 1.0, 1)], [(0, 1.0, 1)], 1)
        t2 = MonodromyTable("q", [(TermKey(0, 0, W("a")), 1.0, 1)], [(0, 1.0, 1)], 1)
        t3 = MonodromyTable("r", [(TermKey(0, 0, W("a")), 0.0, 0)], [(0, 0.0, 0)], 1)
        assert t1 == t2 and t1 != t3


class TestContinuedIdentity:
    def test_real_start_matches_direct_verify(self, torus_bc):
        path = PathSpec("schottky", PolylinePath((5 + 0j, 5.5 + 0.0j)), samples=5)
        reports, table = continued_identity(path, torus_bc, 4, num_samples=5)
        assert table is None
        direct = verify(path.representation_at(0.0), torus_bc, 4)
        assert reports[0].lhs == pytest.approx(direct.lhs, rel=1e-10)
        assert reports[0].rhs_partial == pytest.approx(direct.rhs_partial, rel=1e-10)
        assert all(r.passed for r in reports)

    def test_loop_residuals_and_monodromy(self, torus_bc, circle_iota):
        reports, table = continued_identity(
            circle_iota, torus_bc, 3, num_samples=9, dimension_len=8
        )
        assert all(r.passed for r in reports)
        assert all(b.real > 0 for r in reports for b in r.boundary_lengths)
        assert table is not None and table.as_pi_multiples()["a"] == 4

    def test_domain_violation(self, torus_bc):
        path = PathSpec("schottky", PolylinePath((5 + 0j, 6 + 0j)), samples=3)
        with pytest.raises(DomainViolation):
            continued_identity(
                path, torus_bc, 2, num_samples=3, dimension_len=8, dimension_margin=0.9
            )
