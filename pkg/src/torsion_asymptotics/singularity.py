"""Isolated hypersurface singularity invariants: Milnor number, spectrum, spectral genus, monodromy"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np
import sympy
from scipy.spatial import ConvexHull
from sympy.polys.matrices import DomainMatrix
from sympy.polys.polyerrors import BasePolynomialError

from .errors import SingularityError

logger = logging.getLogger(__name__)

CONVENTIONS = ("steenbrink", "alt")

Exponent = tuple[int, ...]


class Germ:
    """Base class of germ descriptions; nvars = n + 1"""

    @property
    def nvars(self) -> int:
        raise NotImplementedError

    @property
    def n(self) -> int:
        return self.nvars - 1


@dataclass(frozen=True)
class BrieskornPham(Germ):
    """x_0^{a_0} + ... + x_n^{a_n}"""

    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(a) for a in self.exponents))
        if not self.exponents or any(a < 2 for a in self.exponents):
            raise SingularityError(f"Brieskorn-Pham exponents must all be >= 2, got {self.exponents}")

    @property
    def nvars(self) -> int:
        return len(self.exponents)

    @property
    def weights(self) -> tuple[sympy.Rational, ...]:
        return tuple(sympy.Rational(1, a) for a in self.exponents)

    @property
    def terms(self) -> tuple[tuple[Exponent, sympy.Rational], ...]:
        nvars = self.nvars
        return tuple(
            (tuple(a if j == i else 0 for j in range(nvars)), sympy.Integer(1)) for i, a in enumerate(self.exponents)
        )

    def newton_vertices(self) -> tuple[Exponent, ...]:
        return tuple(monomial for monomial, _ in self.terms)


@dataclass(frozen=True)
class QuasiHomogeneous(Germ):
    """Weighted-homogeneous polynomial of weighted degree 1"""

    weights: tuple[sympy.Rational, ...]
    terms: tuple[tuple[Exponent, sympy.Rational], ...]

    def __post_init__(self):
        weights = tuple(sympy.Rational(w) for w in self.weights)
        terms = tuple((tuple(int(e) for e in m), sympy.Rational(c)) for m, c in self.terms)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "terms", terms)
        if not weights or any(not (0 < w <= sympy.Rational(1, 2)) for w in weights):
            raise SingularityError(f"weights must lie in (0, 1/2], got {[str(w) for w in weights]}")
        for monomial, coeff in terms:
            if len(monomial) != len(weights):
                raise SingularityError(f"monomial {monomial} does not match {len(weights)} variables")
            if coeff != 0 and sum(e * w for e, w in zip(monomial, weights)) != 1:
                raise SingularityError(f"monomial {monomial} is not of weighted degree 1")

    @property
    def nvars(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class NewtonConvenient(Germ):
    """Germ known only through the vertices of a convenient Newton diagram"""

    vertices: tuple[Exponent, ...]

    def __post_init__(self):
        vertices = tuple(tuple(int(e) for e in v) for v in self.vertices)
        object.__setattr__(self, "vertices", vertices)
        if not vertices or len({len(v) for v in vertices}) != 1:
            raise SingularityError("Newton vertices must be non-empty and of equal length")
        for axis in range(len(vertices[0])):
            if not any(_on_axis(v, axis) for v in vertices):
                raise SingularityError(f"Newton diagram does not meet coordinate axis {axis}")

    @property
    def nvars(self) -> int:
        return len(self.vertices[0])


@dataclass(frozen=True)
class Explicit(Germ):
    """Polynomial germ given as an expression in named variables"""

    polynomial: str
    variables: tuple[str, ...]
    degree_bound: int = 12
    poly: sympy.Poly = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        symbols = sympy.symbols(self.variables)
        try:
            expr = sympy.sympify(self.polynomial, locals={str(s): s for s in symbols})
            poly = sympy.Poly(expr, *symbols, domain=sympy.QQ)
        except (sympy.SympifyError, BasePolynomialError, TypeError) as e:
            raise SingularityError(f"cannot read {self.polynomial!r} as a polynomial: {e}") from e
        object.__setattr__(self, "poly", poly)
        if self.degree_bound < 1:
            raise SingularityError("degree bound must be positive")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @cached_property
    def partials(self) -> list[dict[Exponent, sympy.Rational]]:
        return [dict(self.poly.diff(s).terms()) for s in self.poly.gens]


@dataclass(frozen=True)
class Spectrum:
    """Multiset of spectral numbers in (0, n+1), kept sorted"""

    n: int
    entries: tuple[sympy.Rational, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(sympy.Rational(a) for a in self.entries)))

    def __len__(self) -> int:
        return len(self.entries)

    def counts(self) -> Counter:
        return Counter(self.entries)

    def is_symmetric(self) -> bool:
        return self.counts() == Counter(self.n + 1 - a for a in self.entries)


def _on_axis(vertex: Exponent, axis: int) -> bool:
    return vertex[axis] > 0 and all(e == 0 for j, e in enumerate(vertex) if j != axis)


def brieskorn_pham_basis(g: BrieskornPham) -> list[Exponent]:
    """Monomial basis x^k, 0 <= k_i <= a_i - 2, of the Milnor algebra"""
    return list(itertools.product(*(range(a - 1) for a in g.exponents)))


def milnor_orlik(weights) -> int:
    """mu = prod (1/w_i - 1) for weighted-homogeneous isolated singularities"""
    value = reduce(lambda acc, w: acc * (1 / sympy.Rational(w) - 1), weights, sympy.Integer(1))
    if not value.is_integer:
        raise SingularityError(f"weights {[str(w) for w in weights]} admit no isolated singularity")
    return int(value)


def _lower_covolume(points: list[Exponent]) -> int:
    """k! times the volume between the origin and the compact faces of the Newton polyhedron"""
    k = len(points[0])
    if k == 1:
        return min(p[0] for p in points)
    reach = max(max(p) for p in points) + 1
    cloud = set(points)
    for p in points:
        for axis in range(k):
            cloud.add(tuple(e + reach if j == axis else e for j, e in enumerate(p)))
    cloud = sorted(cloud)
    hull = ConvexHull(np.array(cloud, dtype=float))
    total = 0
    compact = 0
    for simplex, equation in zip(hull.simplices, hull.equations):
        if np.all(equation[:-1] < -1e-9):
            compact += 1
            total += abs(sympy.Matrix([cloud[i] for i in simplex]).det())
    logger.debug("Newton covolume in dimension %d: %d compact simplices", k, compact)
    return int(total)


def kouchnirenko(vertices, nvars: int | None = None) -> int:
    """mu = sum_k (-1)^{N-k} k! V_k over coordinate subspaces of a convenient diagram"""
    vertices = [tuple(v) for v in vertices]
    nvars = len(vertices[0]) if nvars is None else nvars
    mu = (-1) ** nvars
    for k in range(1, nvars + 1):
        for subset in itertools.combinations(range(nvars), k):
            restricted = [
                tuple(v[i] for i in subset)
                for v in vertices
                if all(v[j] == 0 for j in range(nvars) if j not in subset) and any(v[i] for i in subset)
            ]
            mu += (-1) ** (nvars - k) * _lower_covolume(restricted)
    return mu


def _monomials_below(nvars: int, degree: int) -> list[Exponent]:
    return [m for total in range(degree) for m in _compositions(total, nvars)]


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def macaulay_local_dimension(partials: list[dict[Exponent, sympy.Rational]], nvars: int, degree: int) -> int:
    """dim Q[x]/(J + m^degree), from the rank of the truncated Macaulay matrix of J"""
    columns = {m: i for i, m in enumerate(_monomials_below(nvars, degree))}
    rows: dict[int, dict[int, object]] = {}
    for g in partials:
        for shift in columns:
            row = {}
            for m, c in g.items():
                target = tuple(a + b for a, b in zip(shift, m))
                if target in columns and c != 0:
                    row[columns[target]] = sympy.QQ.from_sympy(sympy.Rational(c))
            if row:
                rows[len(rows)] = row
    if not rows:
        return len(columns)
    matrix = DomainMatrix(rows, (len(rows), len(columns)), sympy.QQ)
    rank = matrix.rank()
    logger.debug("Macaulay matrix %dx%d at degree %d has rank %d", len(rows), len(columns), degree, rank)
    return len(columns) - rank


def macaulay_milnor(partials, nvars: int, degree_bound: int) -> int:
    """Local Milnor number; the dimension must agree at degree bounds d and d+2"""
    low = macaulay_local_dimension(partials, nvars, degree_bound)
    high = macaulay_local_dimension(partials, nvars, degree_bound + 2)
    if low != high:
        raise SingularityError(
            f"local algebra dimension did not stabilize ({low} at degree {degree_bound}, "
            f"{high} at degree {degree_bound + 2}); the singularity is not isolated or the bound is too small"
        )
    return low


def brieskorn_pham_degree_bound(g: BrieskornPham) -> int:
    """Smallest d with m^d contained in the Jacobian ideal"""
    return sum(a - 2 for a in g.exponents) + 1


def partials_of(g: Germ) -> list[dict[Exponent, sympy.Rational]]:
    if isinstance(g, Explicit):
        return g.partials
    if isinstance(g, (BrieskornPham, QuasiHomogeneous)):
        result = []
        for i in range(g.nvars):
            d = Counter()
            for m, c in g.terms:
                if m[i] > 0:
                    d[tuple(e - 1 if j == i else e for j, e in enumerate(m))] += c * m[i]
            result.append(dict(d))
        return result
    raise SingularityError(f"no polynomial available for {type(g).__name__}")


def milnor(g: Germ) -> int:
    """Milnor number through the backend matching the germ description"""
    if isinstance(g, BrieskornPham):
        return math.prod(a - 1 for a in g.exponents)
    if isinstance(g, QuasiHomogeneous):
        return milnor_orlik(g.weights)
    if isinstance(g, NewtonConvenient):
        return kouchnirenko(g.vertices)
    if isinstance(g, Explicit):
        return macaulay_milnor(g.partials, g.nvars, g.degree_bound)
    raise SingularityError(f"unknown germ type {type(g).__name__}")


def _weighted_spectrum(weights, n: int) -> Spectrum:
    """Spectrum from the Poincare series prod (t^{w_i} - t)/(1 - t^{w_i}) written in u = t^{1/D}"""
    weights = [sympy.Rational(w) for w in weights]
    denominator = reduce(sympy.ilcm, (w.q for w in weights), 1)
    u = sympy.Symbol("u")
    numerator = sympy.Poly(1, u)
    divisor = sympy.Poly(1, u)
    for w in weights:
        v = int(w * denominator)
        numerator *= sympy.Poly(u**v - u**denominator, u)
        divisor *= sympy.Poly(1 - u**v, u)
    quotient, remainder = sympy.div(numerator, divisor)
    if not remainder.is_zero:
        raise SingularityError(f"weights {[str(w) for w in weights]} admit no isolated singularity")
    entries = []
    for (e,), c in quotient.terms():
        if c < 0 or not sympy.Rational(c).is_integer:
            raise SingularityError("Poincare series has non-natural coefficients")
        entries.extend([sympy.Rational(e, denominator)] * int(c))
    return Spectrum(n, tuple(entries))


def spectrum(g: Germ) -> Spectrum:
    """Steenbrink spectrum in (0, n+1) of a weighted-homogeneous germ"""
    if isinstance(g, BrieskornPham):
        weights = g.weights
        entries = [sum((k + 1) * w for k, w in zip(basis, weights)) for basis in brieskorn_pham_basis(g)]
        return Spectrum(g.n, tuple(entries))
    if isinstance(g, QuasiHomogeneous):
        return _weighted_spectrum(g.weights, g.n)
    raise SingularityError(f"spectrum unsupported for {type(g).__name__} germs")


def spectral_genus(g: Germ, convention: str = "steenbrink") -> sympy.Rational:
    """Trace of (2 pi i)^{-1} log M_s on Gr_F^n, read off the spectral numbers in (0, 1)"""
    if convention not in CONVENTIONS:
        raise SingularityError(f"unknown convention {convention!r}, expected one of {CONVENTIONS}")
    low = [a for a in spectrum(g).entries if 0 < a < 1]
    if convention == "steenbrink":
        return sum((1 - a for a in low), sympy.Integer(0))
    return sum(low, sympy.Integer(0))


def monodromy_eigenvalues(g: Germ) -> tuple[sympy.Rational, ...]:
    """Angles theta in [0, 1) of the eigenvalues exp(-2 pi i alpha) = exp(2 pi i theta)"""
    return tuple(sorted((-a) % 1 for a in spectrum(g).entries))
