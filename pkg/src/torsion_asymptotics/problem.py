"""Module for reading problem files and turning their payloads into domain objects"""

from __future__ import annotations

import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import sympy

from .asymptotics import BTExpansion, Phi, radial_grid
from .chernring import BundleData, IntersectionData, RingCtx
from .errors import InputError, TorsionError
from .exponents import ColengthSpec, MonodromySpec
from .kappa import QuadraticRank2, quadratic_curve_config
from .singularity import BrieskornPham, Explicit, Germ, NewtonConvenient, QuasiHomogeneous

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

PAYLOAD_KEYS = ("germs", "monodromy", "colength", "quadratic", "semistable", "fit", "bt", "curvature")


@dataclass
class ProblemFile:
    """Dataclass for holding one problem payload"""

    kind: str
    payload: Any
    schema_version: int = SCHEMA_VERSION
    source: Path | None = field(default=None, compare=False)

    def resolve(self, relative: str) -> Path:
        """Paths inside a problem file are relative to the file itself"""
        path = Path(relative)
        if path.is_absolute() or self.source is None:
            return path
        return self.source.parent / path


def is_problem_file(path: Path) -> bool:
    """Check if the path looks like a JSON problem file"""
    return path.suffix.lower() == ".json"


def parse_rational(value, what: str = "value") -> sympy.Rational:
    """Exact rational from an int or a "p/q" string; floats are refused"""
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError(f"{what} must be an integer or a \"p/q\" string, got {value!r}")
    try:
        result = sympy.Rational(value)
    except (TypeError, ValueError) as e:
        raise InputError(f"{what} {value!r} is not a rational number") from e
    return result


def require(data: dict, key: str, what: str):
    if not isinstance(data, dict):
        raise InputError(f"{what} must be a JSON object, got {type(data).__name__}")
    if key not in data:
        raise InputError(f"{what} is missing {key!r}")
    return data[key]


@contextmanager
def malformed(what: str):
    """Re-raise failed coercions of payload values as InputError naming the field"""
    try:
        yield
    except TorsionError:
        raise
    except (TypeError, ValueError, AttributeError, KeyError, IndexError) as e:
        raise InputError(f"malformed {what}: {e}") from e


def parse_germ(data: dict) -> Germ:
    kind = require(data, "kind", "germ")
    with malformed(f"{kind} germ"):
        if kind == "brieskorn_pham":
            return BrieskornPham(tuple(require(data, "exponents", "germ")))
        if kind == "quasi_homogeneous":
            weights = tuple(parse_rational(w, "weight") for w in require(data, "weights", "germ"))
            terms = tuple((tuple(m), parse_rational(c, "coefficient")) for m, c in require(data, "terms", "germ"))
            return QuasiHomogeneous(weights, terms)
        if kind == "newton_convenient":
            return NewtonConvenient(tuple(tuple(v) for v in require(data, "vertices", "germ")))
        if kind == "explicit":
            return Explicit(
                str(require(data, "polynomial", "germ")),
                tuple(require(data, "variables", "germ")),
                int(data.get("degree_bound", 12)),
            )
    raise InputError(f"unknown germ kind {kind!r}")


def _parse_bundle(ctx: RingCtx, data: dict, name: str) -> BundleData:
    with malformed(f"bundle {name}"):
        return BundleData.from_exprs(ctx, name, int(require(data, "rank", name)), [str(c) for c in data.get("chern", [])])


def parse_quadratic(data: dict) -> QuadraticRank2:
    """Either a connected curve {"curve": {...}} or an explicit ring with bundles"""
    with malformed("quadratic configuration"):
        if "curve" in data:
            curve = data["curve"]
            return quadratic_curve_config(
                int(require(curve, "genus", "curve")),
                parse_rational(require(curve, "degXi", "curve"), "degXi"),
                int(require(curve, "rankXi", "curve")),
                parse_rational(require(curve, "degH", "curve"), "degH"),
                int(curve.get("m", 0)),
            )
        ctx = RingCtx(int(require(data, "dim", "quadratic")), tuple(tuple(g) for g in require(data, "generators", "quadratic")))
        return QuadraticRank2(
            _parse_bundle(ctx, require(data, "tangent", "quadratic"), "T"),
            _parse_bundle(ctx, require(data, "normal", "quadratic"), "N"),
            _parse_bundle(ctx, require(data, "xi", "quadratic"), "xi"),
            _parse_bundle(ctx, require(data, "hyperplane", "quadratic"), "H"),
            IntersectionData.from_exprs(ctx, require(data, "intersection", "quadratic")),
            int(data.get("m", 0)),
            bool(data.get("additive", False)),
        )


def parse_monodromy(data: dict) -> MonodromySpec:
    n = require(data, "n", "monodromy")
    with malformed("monodromy perDegree"):
        per_degree = {int(q): tuple(parse_rational(a, "angle") for a in angles) for q, angles in data.get("perDegree", {}).items()}
    with malformed("monodromy n"):
        return MonodromySpec(int(n), per_degree)


def parse_colength(data: dict) -> ColengthSpec:
    deg_mu = require(data, "degMu", "colength")
    with malformed("colength perDegree"):
        per_degree = {int(q): int(v) for q, v in data.get("perDegree", {}).items()}
    with malformed("colength degMu"):
        return ColengthSpec(int(deg_mu), per_degree)


def parse_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InputError(f"complex numbers are [re, im] pairs, got {value!r}")
        with malformed("complex number"):
            return complex(float(value[0]), float(value[1]))
    with malformed("complex number"):
        return complex(float(value))


def parse_matrix(rows) -> np.ndarray:
    with malformed("matrix"):
        return np.array([[parse_complex(entry) for entry in row] for row in rows], dtype=complex)


def parse_grid(data: dict) -> list[complex]:
    with malformed("grid"):
        return radial_grid(
            float(require(data, "rMin", "grid")),
            float(require(data, "rMax", "grid")),
            int(data.get("count", 25)),
            tuple(float(a) for a in data.get("angles", [0.0])),
        )


def parse_bt_expansion(data: dict) -> BTExpansion:
    with malformed("expansion"):
        return BTExpansion(
            tuple(int(e) for e in require(data, "exponents", "expansion")),
            tuple(parse_matrix(a) for a in require(data, "coefficients", "expansion")),
        )


X, Y = sympy.symbols("x y", real=True)


def parse_phi(expr: str) -> Phi:
    """Smooth coefficient phi(x, y) with t = x + iy, compiled through numpy"""
    try:
        parsed = sympy.sympify(expr, locals={"x": X, "y": Y})
    except sympy.SympifyError as e:
        raise InputError(f"cannot read phi = {expr!r}: {e}") from e
    if parsed.free_symbols - {X, Y}:
        raise InputError(f"phi = {expr!r} may only depend on x and y")
    return sympy.lambdify((X, Y), parsed, modules="numpy")


def parse_curvature_terms(rows) -> list[tuple[int, Phi]]:
    with malformed("curvature terms"):
        return [(int(require(row, "power", "term")), parse_phi(str(row.get("phi", "1")))) for row in rows]


def read_problem(file_path: Path) -> ProblemFile:
    """Read a problem file"""
    try:
        data = json.loads(Path(file_path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read problem file {file_path}: {e}") from e
    return problem_from_dict(data, Path(file_path))


def problem_from_dict(data: dict, source: Path | None = None) -> ProblemFile:
    if not isinstance(data, dict):
        raise InputError("a problem file holds a JSON object")
    version = data.get("schemaVersion")
    if version != SCHEMA_VERSION:
        raise InputError(f"unsupported schemaVersion {version!r}, expected {SCHEMA_VERSION}")
    present = [key for key in PAYLOAD_KEYS if key in data]
    if len(present) != 1:
        raise InputError(f"a problem file needs exactly one of {PAYLOAD_KEYS}, found {present}")
    kind = present[0]
    logger.debug("problem %s from %s", kind, source)
    if kind == "germs":
        with malformed("germs problem"):
            if not isinstance(data["germs"], list):
                raise InputError("germs must be a JSON list")
            germs = [parse_germ(g) for g in data["germs"]]
            payload = {
                "germs": germs,
                "n": int(data.get("n", germs[0].n if germs else 1)),
                "rank": int(data.get("rank", 1)),
            }
        return ProblemFile(kind, payload, version, source)
    if not isinstance(data[kind], dict):
        raise InputError(f"the {kind} payload must be a JSON object")
    return ProblemFile(kind, data[kind], version, source)


def write_problem(file_path: Path, data: dict) -> None:
    """Write a problem file, stamping the schema version"""
    Path(file_path).write_text(json.dumps({"schemaVersion": SCHEMA_VERSION, **data}, indent=2, sort_keys=True) + "\n")
