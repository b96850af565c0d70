"""Corpus loading and the cross-check of every stored value through independent routes"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import sympy

from .errors import InputError, InvariantViolation, TorsionError
from .kappa import (
    alpha_eval,
    kappa_curve_closed_form,
    kappa_ihs,
    kappa_polynomial_in_m,
    kappa_quadratic,
    projectivized_normal_stratum,
    quadratic_curve_config,
)
from .singularity import (
    BrieskornPham,
    QuasiHomogeneous,
    brieskorn_pham_degree_bound,
    kouchnirenko,
    macaulay_milnor,
    milnor,
    milnor_orlik,
    partials_of,
    spectral_genus,
    spectrum,
)

logger = logging.getLogger(__name__)

GERMS_FILE = "brieskorn_pham.json"
CONFIGS_FILE = "quadratic_curves.json"


@dataclass
class Corpus:
    germs: list[dict] = field(default_factory=list)
    configs: list[dict] = field(default_factory=list)
    directory: Path | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.germs) + len(self.configs)


@dataclass(frozen=True)
class EntryDiff:
    entry: str
    mismatches: tuple[str, ...]


@dataclass(frozen=True)
class CorpusCheck:
    checked: int
    diffs: tuple[EntryDiff, ...]

    @property
    def ok(self) -> bool:
        return not self.diffs


def _read_list(path: Path, key: str) -> list[dict]:
    if not path.exists():
        return []
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read corpus file {path}: {e}") from e
    entries = data.get(key, [])
    if not isinstance(entries, list):
        raise InputError(f"{path}: {key!r} must be a list")
    return entries


def load_corpus(directory: Path) -> Corpus:
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"corpus directory {directory} does not exist")
    corpus = Corpus(_read_list(directory / GERMS_FILE, "germs"), _read_list(directory / CONFIGS_FILE, "configs"), directory)
    logger.info("loaded %d germs and %d configurations from %s", len(corpus.germs), len(corpus.configs), directory)
    return corpus


def _rational_list(values) -> list[sympy.Rational]:
    return sorted(sympy.Rational(v) for v in values)


def check_germ_entry(entry: dict) -> list[str]:
    """Milnor number by four routes, spectrum by two, spectral genus and the sign of kappa"""
    g = BrieskornPham(tuple(entry["exponents"]))
    stored_mu = int(entry["mu"])
    mismatches = []
    routes = {
        "closed form": milnor(g),
        "Milnor-Orlik": milnor_orlik(g.weights),
        "Kouchnirenko": kouchnirenko(g.newton_vertices()),
        "Macaulay": macaulay_milnor(partials_of(g), g.nvars, brieskorn_pham_degree_bound(g)),
    }
    for route, mu in routes.items():
        if mu != stored_mu:
            mismatches.append(f"mu: stored {stored_mu}, {route} gives {mu}")

    stored_spectrum = _rational_list(entry["spectrum"])
    basis_spectrum = spectrum(g)
    weighted_spectrum = spectrum(QuasiHomogeneous(g.weights, g.terms))
    if list(basis_spectrum.entries) != stored_spectrum:
        mismatches.append("spectrum: stored values differ from the monomial-basis spectrum")
    if weighted_spectrum.entries != basis_spectrum.entries:
        mismatches.append("spectrum: Poincare-series route differs from the monomial-basis route")
    if len(stored_spectrum) != stored_mu:
        mismatches.append(f"spectrum: {len(stored_spectrum)} entries but mu = {stored_mu}")
    if not basis_spectrum.is_symmetric():
        mismatches.append("spectrum: not symmetric about (n+1)/2")

    stored_pg = sympy.Rational(entry["spectralGenus"])
    from_stored = sum((1 - a for a in stored_spectrum if a < 1), sympy.Integer(0))
    computed_pg = spectral_genus(g)
    if computed_pg != stored_pg or from_stored != stored_pg:
        mismatches.append(f"spectral genus: stored {stored_pg}, computed {computed_pg}, from stored spectrum {from_stored}")

    if g.n == 1:
        kappa = kappa_ihs([g], n=1)
        if not kappa < 0:
            mismatches.append(f"kappa = {kappa} is not negative for a plane curve singularity")
    return mismatches


def check_config_entry(entry: dict) -> list[str]:
    """Engine integral, exceptional-divisor alpha and the curve closed form must agree with the stored kappa"""
    args = (int(entry["genus"]), sympy.Rational(entry["degXi"]), int(entry["rankXi"]), sympy.Rational(entry["degH"]))
    m = int(entry.get("m", 0))
    config = quadratic_curve_config(*args, m)
    stored = sympy.Rational(entry["kappa"])
    values = {
        "engine": kappa_quadratic(config),
        "alpha": alpha_eval([projectivized_normal_stratum(config)]),
        "closed form": kappa_curve_closed_form(*args, m),
    }
    mismatches = [f"kappa: stored {stored}, {route} gives {v}" for route, v in values.items() if v != stored]
    try:
        kappa_polynomial_in_m(config)
    except InvariantViolation as e:
        mismatches.append(str(e))
    return mismatches


def _check(entry: dict, checker, kind: str, index: int) -> EntryDiff | None:
    name = str(entry.get("id", f"{kind}[{index}]"))
    try:
        mismatches = checker(entry)
    except (KeyError, TypeError, ValueError, TorsionError) as e:
        mismatches = [f"unreadable entry: {e!r}"]
    if mismatches:
        logger.error("corpus entry %s: %s", name, "; ".join(mismatches))
        return EntryDiff(name, tuple(mismatches))
    return None


def corpus_check(corpus: Corpus) -> CorpusCheck:
    """Re-derive every corpus value; one diff per mismatching entry"""
    if not len(corpus):
        logger.warning("corpus at %s is empty, nothing to check", corpus.directory)
        return CorpusCheck(0, ())
    diffs = []
    for index, entry in enumerate(corpus.germs):
        diff = _check(entry, check_germ_entry, "germ", index)
        if diff is not None:
            diffs.append(diff)
    for index, entry in enumerate(corpus.configs):
        diff = _check(entry, check_config_entry, "config", index)
        if diff is not None:
            diffs.append(diff)
    logger.info("corpus check: %d entries, %d diffs", len(corpus), len(diffs))
    return CorpusCheck(len(corpus), tuple(diffs))
