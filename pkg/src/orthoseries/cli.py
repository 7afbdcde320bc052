"""Batch command-line front end.

Commands: enumerate | verify | dimension | monodromy | gaps.  All input
comes from a JSON session config (complex numbers as [re, im] pairs); a
few flags override single fields.  Outputs are deterministic: fixed key
order, fixed iteration order, no wall-clock data.

Exit codes: 0 pass, 1 numeric gate failed, 2 domain violation (left the
admissible representation domain), 3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .continuation import PathSpec, continued_identity, loop_monodromy
from .dimension import box_counting_dimension, in_S_less1
from .errors import (
    ConfigError,
    DomainViolation,
    ExtrapolationUnstable,
    NonHyperbolicData,
    OrthoseriesError,
    PathLeavesDomain,
)
from .identity import TermEngine, gap_table, terms_to_csv_rows, verify
from .reps import Representation
from .words import BoundaryConfig, LetterOrder, boundary_preset

EXIT_PASS = 0
EXIT_GATE_FAILED = 1
EXIT_DOMAIN = 2
EXIT_CONFIG = 3


class SessionConfig:
    """Parsed session configuration with documented defaults."""

    DEFAULTS = {
        "letter_order": None,
        "max_word_len": 8,
        "tol": 1e-9,
        "margin": 0.05,
        "seed": 0,
        "format": "csv",
    }

    def __init__(self, raw: dict):
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        self.raw = dict(raw)
        try:
            self.representation = Representation.from_config(
                raw.get("representation", {"family": "schottky", "L": [5.0, 0.0]})
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad representation config: {exc}") from exc
        self.boundary = self._parse_boundary(raw.get("boundary", {"preset": "torus"}))
        order_str = raw.get("letter_order", self.DEFAULTS["letter_order"])
        self.order = (
            LetterOrder.from_string(order_str)
            if order_str
            else LetterOrder.default(self.representation.rank)
        )
        self.max_word_len = int(raw.get("max_word_len", self.DEFAULTS["max_word_len"]))
        self.tol = float(raw.get("tol", self.DEFAULTS["tol"]))
        self.margin = float(raw.get("margin", self.DEFAULTS["margin"]))
        self.seed = int(raw.get("seed", self.DEFAULTS["seed"]))
        self.format = raw.get("format", self.DEFAULTS["format"])
        self.path_config = raw.get("path")
        if self.max_word_len < 0:
            raise ConfigError("max_word_len must be >= 0")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be 'csv' or 'json'")

    @staticmethod
    def _parse_boundary(cfg) -> BoundaryConfig:
        if not isinstance(cfg, dict):
            raise ConfigError("boundary config must be an object")
        if "preset" in cfg:
            try:
                return boundary_preset(cfg["preset"])
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        if "words" in cfg:
            try:
                return BoundaryConfig.from_strings(cfg["words"], name="custom")
            except ValueError as exc:
                raise ConfigError(f"bad boundary words: {exc}") from exc
        raise ConfigError("boundary config needs 'preset' or 'words'")

    def serialize(self) -> dict:
        """Round-trippable echo of the effective configuration."""
        out = {
            "representation": self.raw.get(
                "representation", {"family": "schottky", "L": [5.0, 0.0]}
            ),
            "boundary": (
                {"preset": self.boundary.name}
                if self.boundary.name in ("torus", "pants", "two-boundary")
                else {"words": [str(w) for w in self.boundary.words]}
            ),
            "letter_order": self.order.to_string(),
            "max_word_len": self.max_word_len,
            "tol": self.tol,
            "margin": self.margin,
            "seed": self.seed,
            "format": self.format,
        }
        if self.path_config is not None:
            out["path"] = self.path_config
        return out


def _load_config(args) -> SessionConfig:
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {args.config}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON (line {exc.lineno}): {exc.msg}") from exc
    cfg = dict(raw)
    if args.max_len is not None:
        cfg["max_word_len"] = args.max_len
    if args.tol is not None:
        cfg["tol"] = args.tol
    if args.margin is not None:
        cfg["margin"] = args.margin
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.format is not None:
        cfg["format"] = args.format
    return SessionConfig(cfg)


def _outdir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str):
    path.write_text(text)
    print(f"wrote {path}")


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_enumerate(cfg: SessionConfig, out: Path) -> int:
    engine = TermEngine(
        cfg.representation, cfg.boundary, cfg.max_word_len, cfg.order
    )
    rows = ["p,q,word,word_len"]
    for key, _val, _sig in engine.iter_table():
        rows.append(f"{key.j + 1},{key.q + 1},{key.word},{len(key.word)}")
    _write(out / "coset_table.csv", "\n".join(rows) + "\n")
    return EXIT_PASS


def cmd_verify(cfg: SessionConfig, out: Path) -> int:
    report = verify(
        cfg.representation, cfg.boundary, cfg.max_word_len, cfg.tol, cfg.order
    )
    payload = report.to_json_dict()
    payload["config"] = cfg.serialize()
    _write(out / "report.json", _dump_json(payload))
    if report.error:
        _write(out / "terms.csv", "j,q,word,re_term,im_term,word_len,singular_ratio\n")
        print(f"verify: {report.error}")
        return EXIT_DOMAIN
    engine = TermEngine(cfg.representation, cfg.boundary, cfg.max_word_len, cfg.order)
    _write(out / "terms.csv", "\n".join(terms_to_csv_rows(engine.iter_table())) + "\n")
    print(
        f"verify: residual {abs(report.residual):.3e}"
        f" (mod 2πi: {report.residual_mod:.3e}),"
        f" tail {report.tail_estimate:.3e}, {'PASS' if report.passed else 'FAIL'}"
    )
    return EXIT_PASS if report.passed else EXIT_GATE_FAILED


def cmd_dimension(cfg: SessionConfig, out: Path) -> int:
    try:
        ok, est = in_S_less1(cfg.representation, cfg.max_word_len, cfg.margin)
    except NonHyperbolicData as exc:
        print(f"dimension: {exc}")
        return EXIT_DOMAIN
    payload = est.to_json_dict()
    payload["in_S_less1"] = ok
    payload["margin"] = cfg.margin
    if (
        cfg.representation.n == 2
        and cfg.representation.is_real
        and cfg.max_word_len >= 8
    ):
        payload["box_counting_h"] = box_counting_dimension(
            cfg.representation, word_len=cfg.max_word_len
        )
    payload["config"] = cfg.serialize()
    _write(out / "dimension.json", _dump_json(payload))
    print(f"dimension: h = {est.h:.6f} +/- {est.confidence_halfwidth:.2e}, gate {'PASS' if ok else 'FAIL'}")
    return EXIT_PASS if ok else EXIT_GATE_FAILED


def cmd_monodromy(cfg: SessionConfig, out: Path) -> int:
    if not cfg.path_config:
        raise ConfigError("monodromy needs a 'path' table in the config")
    path = PathSpec.from_config(cfg.path_config)
    if not path.is_closed():
        raise ConfigError("path endpoints differ; monodromy needs a closed loop")
    track_len = int(cfg.path_config.get("track_len", 2))
    table = loop_monodromy(path, cfg.boundary, track_len, cfg.order)
    _write(out / "monodromy.csv", "\n".join(table.to_csv_rows()) + "\n")

    check_len = int(cfg.path_config.get("identity_check_len", 4))
    reports, _ = continued_identity(
        path,
        cfg.boundary,
        check_len,
        cfg.tol,
        cfg.order,
        num_samples=min(path.samples, 17),
        dimension_len=max(6, min(cfg.max_word_len, 10)),
        dimension_margin=0.0,
    )
    rows = ["t,residual_mod,tail_estimate,passed"]
    for rep in reports:
        rows.append(
            f"{rep.diagnostics['t']!r},{rep.residual_mod!r},{rep.tail_estimate!r},{int(rep.passed)}"
        )
    _write(out / "residuals.csv", "\n".join(rows) + "\n")

    ok = table.max_integrality_defect < 1e-6 and table.consistent
    print(
        f"monodromy: total {2 * table.total}π, boundary {2 * table.boundary_total}π,"
        f" max integrality defect {table.max_integrality_defect:.2e},"
        f" {'PASS' if ok else 'FAIL'}"
    )
    return EXIT_PASS if ok else EXIT_GATE_FAILED


def cmd_gaps(cfg: SessionConfig, out: Path) -> int:
    if not cfg.representation.is_real:
        print("gaps: gap tables are a real-locus diagnostic")
        return EXIT_DOMAIN
    engine = TermEngine(cfg.representation, cfg.boundary, cfg.max_word_len, cfg.order)
    rows = ["j,q,word,gap,circle_length"]
    all_ok = True
    for j in range(cfg.boundary.k):
        table = gap_table(
            cfg.representation, cfg.boundary, j, cfg.max_word_len, cfg.order, engine
        )
        for key, gap in table.gaps:
            rows.append(f"{j + 1},{key.q + 1},{key.word},{gap!r},{table.circle_length!r}")
        all_ok &= table.deficit >= -cfg.tol and all(g > 0 for _, g in table.gaps)
    _write(out / "gaps.csv", "\n".join(rows) + "\n")
    print(f"gaps: {'PASS' if all_ok else 'FAIL'}")
    return EXIT_PASS if all_ok else EXIT_GATE_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orthoseries",
        description="Series identities for hyperconvex representations: "
        "enumeration, verification, dimension gate, monodromy.",
    )
    parser.add_argument("command", choices=["enumerate", "verify", "dimension", "monodromy", "gaps"])
    parser.add_argument("--config", help="JSON session config path")
    parser.add_argument("--max-len", type=int, dest="max_len", help="word length truncation")
    parser.add_argument("--tol", type=float, help="residual gate tolerance")
    parser.add_argument("--margin", type=float, help="dimension gate margin")
    parser.add_argument("--seed", type=int, help="seed recorded for reproducibility")
    parser.add_argument("--out", help="output directory (default: cwd)")
    parser.add_argument("--format", choices=["csv", "json"], help="preferred table format")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        out = _outdir(args)
        handler = {
            "enumerate": cmd_enumerate,
            "verify": cmd_verify,
            "dimension": cmd_dimension,
            "monodromy": cmd_monodromy,
            "gaps": cmd_gaps,
        }[args.command]
        return handler(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainViolation, PathLeavesDomain, ExtrapolationUnstable, NonHyperbolicData) as exc:
        print(f"domain violation: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OrthoseriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GATE_FAILED


if __name__ == "__main__":
    sys.exit(main())
