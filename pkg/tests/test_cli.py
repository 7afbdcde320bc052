import json

import pytest

from orthoseries.cli import main

GAMMA5 = {"family": "schottky", "L": [5.0, 0.0]}


def write_config(tmp_path, **overrides):
    cfg = {
        "representation": GAMMA5,
        "boundary": {"preset": "torus"},
        "max_word_len": 5,
        "tol": 1e-9,
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


class TestEnumerate:
    def test_pants_table(self, tmp_path):
        cfg = write_config(
            tmp_path, boundary={"preset": "pants"}, max_word_len=4
        )
        code = main(["enumerate", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "coset_table.csv").read_text().splitlines()
        assert rows[0] == "p,q,word,word_len"
        assert "1,2,e,0" in rows
        assert "1,2,BA,2" in rows
        assert "1,1,a,1" not in rows

    def test_deterministic_output(self, tmp_path):
        cfg = write_config(tmp_path, max_word_len=4)
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert main(["enumerate", "--config", str(cfg), "--out", str(out1)]) == 0
        assert main(["enumerate", "--config", str(cfg), "--out", str(out2)]) == 0
        assert (out1 / "coset_table.csv").read_bytes() == (out2 / "coset_table.csv").read_bytes()


class TestVerify:
    def test_gamma5_pass(self, tmp_path):
        cfg = write_config(tmp_path, max_word_len=6)
        code = main(["verify", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["passed"] is True
        assert report["config"]["boundary"] == {"preset": "torus"}
        terms = (tmp_path / "terms.csv").read_text().splitlines()
        assert terms[0].startswith("j,q,word")

    def test_unitary_structured_error(self, tmp_path):
        unitary = {
            "family": "explicit",
            "rank": 2,
            "n": 2,
            "matrices": [
                [[[0.0, 0.0], [-1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]],
                [[[0.0, 0.0], [1.0, 0.0]], [[-1.0, 0.0], [0.0, 0.0]]],
                [[[0.6, 0.0], [-0.8, 0.0]], [[0.8, 0.0], [0.6, 0.0]]],
                [[[0.6, 0.0], [0.8, 0.0]], [[-0.8, 0.0], [0.6, 0.0]]],
            ],
        }
        cfg = write_config(tmp_path, representation=unitary, max_word_len=4)
        code = main(["verify", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 2
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["error"] is not None

    def test_flag_overrides(self, tmp_path):
        cfg = write_config(tmp_path)
        code = main(
            ["verify", "--config", str(cfg), "--max-len", "4", "--out", str(tmp_path)]
        )
        assert code == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["max_word_len"] == 4


class TestDimension:
    def test_gate_pass(self, tmp_path):
        cfg = write_config(tmp_path, max_word_len=8, margin=0.05)
        code = main(["dimension", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 0
        payload = json.loads((tmp_path / "dimension.json").read_text())
        assert payload["in_S_less1"] is True
        assert 0.4 < payload["h"] < 0.55
        assert "box_counting_h" in payload


class TestMonodromy:
    def test_table_matches_known_loop(self, tmp_path):
        cfg = write_config(
            tmp_path,
            representation={"family": "schottky", "L": [5.0, 0.0], "compose_iota": True},
            path={
                "family": "schottky",
                "compose_iota": True,
                "L_path": {"kind": "circle", "center": [0, 0], "radius": 5, "turns": 1},
                "samples": 65,
                "track_len": 2,
                "identity_check_len": 3,
            },
        )
        code = main(["monodromy", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "monodromy.csv").read_text().splitlines()
        assert "a,4" in rows and "aB,0" in rows and "total,24" in rows
        residuals = (tmp_path / "residuals.csv").read_text().splitlines()
        assert residuals[0] == "t,residual_mod,tail_estimate,passed"
        assert len(residuals) > 2

    def test_open_path_config_error(self, tmp_path):
        cfg = write_config(
            tmp_path,
            path={
                "family": "schottky",
                "L_path": {"kind": "polyline", "points": [[5, 0], [7, 0]]},
            },
        )
        assert main(["monodromy", "--config", str(cfg), "--out", str(tmp_path)]) == 3

    def test_missing_path_config_error(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["monodromy", "--config", str(cfg), "--out", str(tmp_path)]) == 3


class TestGaps:
    def test_gaps_written(self, tmp_path):
        cfg = write_config(tmp_path, max_word_len=5)
        code = main(["gaps", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "gaps.csv").read_text().splitlines()
        assert rows[0] == "j,q,word,gap,circle_length"
        assert len(rows) > 5


class TestConfigHandling:
    def test_missing_file(self, tmp_path):
        assert main(["verify", "--config", str(tmp_path / "nope.json")]) == 3

    def test_invalid_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["verify", "--config", str(bad)]) == 3

    def test_bad_boundary(self, tmp_path):
        cfg = write_config(tmp_path, boundary={"preset": "dodecahedron"})
        assert main(["verify", "--config", str(cfg)]) == 3

    def test_bad_words(self, tmp_path):
        cfg = write_config(tmp_path, boundary={"words": ["aA"]})
        assert main(["verify", "--config", str(cfg)]) == 3
