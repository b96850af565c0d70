"""Truncated graded algebra in named Chern-class generators, bundle genera and integration"""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property

import sympy
from sympy.polys.polyerrors import BasePolynomialError

from .errors import ChernRingError
from .series import Series, ps_td, ps_td_dual

logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class RingCtx:
    """Graded ring Q[generators] truncated above degree `dim`"""

    dim: int
    generators: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple((str(n), int(d)) for n, d in self.generators))
        if self.dim < 0:
            raise ChernRingError(f"ring dimension must be non-negative, got {self.dim}")
        names = [name for name, _ in self.generators]
        if len(set(names)) != len(names):
            raise ChernRingError(f"generator names must be unique: {names}")
        for name, degree in self.generators:
            if not 1 <= degree <= self.dim:
                raise ChernRingError(f"generator {name} has degree {degree} outside 1..{self.dim}")

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.generators)

    @cached_property
    def symbols(self) -> tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(name) for name in self.names)

    def degree(self, monomial: Monomial) -> int:
        return sum(e * d for e, (_, d) in zip(monomial, self.generators))

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ChernRingError(f"generator {name!r} is not declared in {self.names}") from None

    def extend(self, name: str, degree: int, dim: int | None = None) -> "RingCtx":
        """A larger ring with one more generator (and possibly a larger top degree)"""
        return RingCtx(self.dim if dim is None else dim, self.generators + ((name, degree),))

    def top_monomials(self) -> list[Monomial]:
        """All monomials of degree exactly `dim`"""
        result: list[Monomial] = []

        def walk(i: int, remaining: int, prefix: list[int]) -> None:
            if i == len(self.generators):
                if remaining == 0:
                    result.append(tuple(prefix))
                return
            degree = self.generators[i][1]
            for e in range(remaining // degree + 1):
                walk(i + 1, remaining - e * degree, prefix + [e])

        walk(0, self.dim, [])
        return result


@dataclass(frozen=True)
class GradedElt:
    """Element of a RingCtx; zero coefficients and monomials above the top degree are dropped"""

    ctx: RingCtx
    terms: Mapping[Monomial, sympy.Rational] = field(default_factory=dict)

    def __post_init__(self):
        ngens = len(self.ctx.generators)
        cleaned: dict[Monomial, sympy.Rational] = {}
        for monomial, coeff in self.terms.items():
            monomial = tuple(monomial)
            if len(monomial) != ngens:
                raise ChernRingError(f"monomial {monomial} does not match generators {self.ctx.names}")
            coeff = sympy.Rational(coeff)
            if coeff != 0 and self.ctx.degree(monomial) <= self.ctx.dim:
                cleaned[monomial] = coeff
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def scalar(cls, ctx: RingCtx, value) -> "GradedElt":
        return cls(ctx, {(0,) * len(ctx.generators): value})

    @classmethod
    def zero(cls, ctx: RingCtx) -> "GradedElt":
        return cls(ctx, {})

    @classmethod
    def generator(cls, ctx: RingCtx, name: str) -> "GradedElt":
        monomial = [0] * len(ctx.generators)
        monomial[ctx.index(name)] = 1
        return cls(ctx, {tuple(monomial): 1})

    @classmethod
    def from_expr(cls, ctx: RingCtx, expr) -> "GradedElt":
        """Parse a polynomial expression in the generator names, e.g. "(2-2*g)*p" with g substituted"""
        locals_ = {name: sym for name, sym in zip(ctx.names, ctx.symbols)}
        try:
            value = sympy.sympify(expr, locals=locals_) if isinstance(expr, str) else sympy.sympify(expr)
            if not ctx.generators:
                return cls.scalar(ctx, sympy.Rational(value))
            poly = sympy.Poly(value, *ctx.symbols, domain=sympy.QQ)
        except (sympy.SympifyError, BasePolynomialError, TypeError) as e:
            raise ChernRingError(f"cannot read {expr!r} as a polynomial in {ctx.names}: {e}") from e
        return cls(ctx, {monomial: sympy.Rational(c) for monomial, c in poly.terms()})

    def _check_ctx(self, other: "GradedElt") -> None:
        if other.ctx != self.ctx:
            raise ChernRingError("ring contexts do not match")

    def __add__(self, other) -> "GradedElt":
        if not isinstance(other, GradedElt):
            other = GradedElt.scalar(self.ctx, other)
        self._check_ctx(other)
        terms = defaultdict(lambda: sympy.Integer(0), self.terms)
        for monomial, coeff in other.terms.items():
            terms[monomial] += coeff
        return GradedElt(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self) -> "GradedElt":
        return GradedElt(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "GradedElt":
        return self + (-other)

    def __rsub__(self, other) -> "GradedElt":
        return (-self) + other

    def __mul__(self, other) -> "GradedElt":
        if not isinstance(other, GradedElt):
            value = sympy.Rational(other)
            return GradedElt(self.ctx, {m: c * value for m, c in self.terms.items()})
        self._check_ctx(other)
        dim = self.ctx.dim
        terms = defaultdict(lambda: sympy.Integer(0))
        for m1, c1 in self.terms.items():
            d1 = self.ctx.degree(m1)
            for m2, c2 in other.terms.items():
                if d1 + self.ctx.degree(m2) > dim:
                    continue
                terms[tuple(a + b for a, b in zip(m1, m2))] += c1 * c2
        return GradedElt(self.ctx, terms)

    __rmul__ = __mul__

    def __truediv__(self, value) -> "GradedElt":
        return self * (sympy.Integer(1) / sympy.Rational(value))

    def __pow__(self, n: int) -> "GradedElt":
        result = GradedElt.scalar(self.ctx, 1)
        for _ in range(n):
            result = result * self
        return result

    def constant_term(self) -> sympy.Rational:
        return self.terms.get((0,) * len(self.ctx.generators), sympy.Integer(0))

    def homogeneous_part(self, degree: int) -> "GradedElt":
        return GradedElt(self.ctx, {m: c for m, c in self.terms.items() if self.ctx.degree(m) == degree})

    def is_homogeneous(self, degree: int) -> bool:
        return all(self.ctx.degree(m) == degree for m in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def exp(self) -> "GradedElt":
        """exp of a nilpotent element (no constant term)"""
        if self.constant_term() != 0:
            raise ChernRingError("exp is only defined for elements without constant term")
        result = GradedElt.scalar(self.ctx, 1)
        power = GradedElt.scalar(self.ctx, 1)
        for j in range(1, self.ctx.dim + 1):
            power = power * self / j
            if power.is_zero():
                break
            result = result + power
        return result

    def embed(self, ctx: RingCtx) -> "GradedElt":
        """Same class in a ring whose generators include ours (pullback along a projection)"""
        positions = [ctx.index(name) for name in self.ctx.names]
        terms = {}
        for monomial, coeff in self.terms.items():
            target = [0] * len(ctx.generators)
            for position, e in zip(positions, monomial):
                target[position] = e
            terms[tuple(target)] = coeff
        return GradedElt(ctx, terms)

    def to_expr(self) -> sympy.Expr:
        return sympy.Add(
            *(c * sympy.Mul(*(s**e for s, e in zip(self.ctx.symbols, m))) for m, c in self.terms.items())
        )

    def __str__(self) -> str:
        return str(self.to_expr())


@dataclass(frozen=True)
class BundleData:
    """Chern data (c_1, c_2, ...) of a vector bundle, truncated at min(rank, dim)"""

    name: str
    rank: int
    chern: tuple[GradedElt, ...]
    ctx: RingCtx = field(compare=False, default=None)

    def __post_init__(self):
        if self.rank < 1:
            raise ChernRingError(f"bundle {self.name} must have positive rank")
        chern = tuple(self.chern)
        ctx = self.ctx if self.ctx is not None else (chern[0].ctx if chern else None)
        if ctx is None:
            raise ChernRingError(f"bundle {self.name} needs a ring context")
        length = min(self.rank, ctx.dim)
        if len(chern) > self.rank:
            raise ChernRingError(f"bundle {self.name} of rank {self.rank} has {len(chern)} Chern classes")
        chern = chern[:length] + tuple(GradedElt.zero(ctx) for _ in range(length - len(chern)))
        for i, c in enumerate(chern):
            if c.ctx != ctx:
                raise ChernRingError(f"c_{i + 1}({self.name}) lives in a different ring")
            if not c.is_homogeneous(i + 1):
                raise ChernRingError(f"c_{i + 1}({self.name}) is not homogeneous of degree {i + 1}")
        object.__setattr__(self, "chern", chern)
        object.__setattr__(self, "ctx", ctx)

    @classmethod
    def from_exprs(cls, ctx: RingCtx, name: str, rank: int, chern: Iterable) -> "BundleData":
        return cls(name, rank, tuple(GradedElt.from_expr(ctx, c) for c in chern), ctx)

    def c(self, i: int) -> GradedElt:
        """c_i with c_0 = 1 and c_i = 0 beyond the stored range"""
        if i == 0:
            return GradedElt.scalar(self.ctx, 1)
        if 1 <= i <= len(self.chern):
            return self.chern[i - 1]
        return GradedElt.zero(self.ctx)

    def total_chern(self) -> GradedElt:
        result = GradedElt.scalar(self.ctx, 1)
        for c in self.chern:
            result = result + c
        return result

    def power_sums(self, order: int | None = None) -> list[GradedElt]:
        """p_0 = rank, p_k = sum of k-th powers of Chern roots via Newton's identities"""
        order = self.ctx.dim if order is None else order
        sums = [GradedElt.scalar(self.ctx, self.rank)]
        for k in range(1, order + 1):
            p = self.c(k) * ((-1) ** (k - 1) * k)
            for i in range(1, k):
                p = p + self.c(i) * sums[k - i] * ((-1) ** (i - 1))
            sums.append(p)
        return sums


def trivial_bundle(ctx: RingCtx, rank: int, name: str = "O") -> BundleData:
    return BundleData(name, rank, (), ctx)


def line_bundle(ctx: RingCtx, c1, name: str = "L") -> BundleData:
    c1 = c1 if isinstance(c1, GradedElt) else GradedElt.from_expr(ctx, c1)
    return BundleData(name, 1, (c1,), ctx)


def bundle_from_total_chern(ctx: RingCtx, name: str, rank: int, total: GradedElt) -> BundleData:
    chern = tuple(total.homogeneous_part(i) for i in range(1, min(rank, ctx.dim) + 1))
    return BundleData(name, rank, chern, ctx)


def direct_sum(a: BundleData, b: BundleData) -> BundleData:
    """Encoded by the total Chern class c(a + b) = c(a) c(b)"""
    return bundle_from_total_chern(a.ctx, f"{a.name}+{b.name}", a.rank + b.rank, a.total_chern() * b.total_chern())


def dual_bundle(b: BundleData) -> BundleData:
    return BundleData(f"{b.name}^v", b.rank, tuple(c * (-1) ** (i + 1) for i, c in enumerate(b.chern)), b.ctx)


def tensor_line_bundles(a: BundleData, b: BundleData) -> BundleData:
    if a.rank != 1 or b.rank != 1:
        raise ChernRingError("tensor product is only encoded for line bundles")
    return line_bundle(a.ctx, a.c(1) + b.c(1), f"{a.name}*{b.name}")


def chern_character(b: BundleData, order: int | None = None) -> GradedElt:
    """ch(b) = rank + sum_k p_k/k!"""
    order = b.ctx.dim if order is None else order
    if order > b.ctx.dim:
        raise ChernRingError(f"order {order} exceeds ring dimension {b.ctx.dim}")
    sums = b.power_sums(order)
    result = sums[0]
    for k in range(1, order + 1):
        result = result + sums[k] / sympy.factorial(k)
    return result


def multiplicative_genus(phi: Series, b: BundleData) -> GradedElt:
    """prod_i phi(x_i) over the Chern roots, computed as exp(sum_k b_k p_k) with log phi = sum b_k x^k"""
    if phi[0] != 1:
        raise ChernRingError("a multiplicative genus needs a series with constant term 1")
    dim = b.ctx.dim
    if phi.order < dim:
        raise ChernRingError(f"series truncated at order {phi.order} below ring dimension {dim}")
    log_phi = phi.truncate(dim).log()
    sums = b.power_sums(dim)
    exponent = GradedElt.zero(b.ctx)
    for k in range(1, dim + 1):
        if log_phi[k] != 0:
            exponent = exponent + sums[k] * log_phi[k]
    return exponent.exp()


def additive_series_class(psi: Series, b: BundleData) -> GradedElt:
    """sum_i psi(x_i) over the Chern roots"""
    dim = b.ctx.dim
    sums = b.power_sums(dim)
    result = GradedElt.zero(b.ctx)
    for k in range(0, min(dim, psi.order) + 1):
        if psi[k] != 0:
            result = result + sums[k] * psi[k]
    return result


def _check_rank_two_traceless(b: BundleData) -> None:
    if b.rank != 2:
        raise ChernRingError(f"bundle {b.name} must have rank 2, got {b.rank}")
    if not b.c(1).is_zero():
        raise ChernRingError(f"bundle {b.name} must have c_1 = 0")


def even_series_class(psi: Series, b: BundleData) -> GradedElt:
    """psi(N) for rank-2 N with c_1 = 0: roots are +-x, so x^2 is replaced by -c_2"""
    if not psi.is_even():
        raise ChernRingError("even_series_class needs an even series")
    _check_rank_two_traceless(b)
    minus_c2 = -b.c(2)
    result = GradedElt.zero(b.ctx)
    power = GradedElt.scalar(b.ctx, 1)
    for j in range(0, b.ctx.dim // 2 + 1):
        if 2 * j > psi.order:
            break
        result = result + power * psi[2 * j]
        power = power * minus_c2
    return result


def series_class(psi: Series, b: BundleData, additive: bool = False) -> GradedElt:
    """Bismut-type even class of a rank-2 traceless bundle in either convention"""
    if additive:
        _check_rank_two_traceless(b)
        return additive_series_class(psi, b)
    return even_series_class(psi, b)


def td_class(b: BundleData) -> GradedElt:
    return multiplicative_genus(ps_td(max(b.ctx.dim, 1)), b)


def td_dual_class(b: BundleData) -> GradedElt:
    return multiplicative_genus(ps_td_dual(max(b.ctx.dim, 1)), b)


@dataclass(frozen=True)
class IntersectionData:
    """Linear functional on top-degree monomials; undeclared monomials integrate to 0"""

    ctx: RingCtx
    values: Mapping[Monomial, sympy.Rational] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for monomial, value in self.values.items():
            monomial = tuple(monomial)
            if len(monomial) != len(self.ctx.generators) or self.ctx.degree(monomial) != self.ctx.dim:
                raise ChernRingError(f"{monomial} is not a top-degree monomial of {self.ctx.names}")
            cleaned[monomial] = sympy.Rational(value)
        object.__setattr__(self, "values", cleaned)

    @classmethod
    def from_exprs(cls, ctx: RingCtx, values: Mapping[str, object]) -> "IntersectionData":
        """Keys are monomials written in the generator names, e.g. {"p": 1} or {"a*b": 2}"""
        parsed = {}
        for key, value in values.items():
            element = GradedElt.from_expr(ctx, key)
            if len(element.terms) != 1 or next(iter(element.terms.values())) != 1:
                raise ChernRingError(f"intersection key {key!r} is not a monomial")
            parsed[next(iter(element.terms))] = sympy.Rational(sympy.sympify(value))
        return cls(ctx, parsed)


def integrate(e: GradedElt, data: IntersectionData) -> sympy.Rational:
    """sum over top-degree monomials of coefficient times declared value"""
    if e.ctx != data.ctx:
        raise ChernRingError("element and intersection data live in different rings")
    total = sympy.Integer(0)
    for monomial, coeff in e.terms.items():
        if e.ctx.degree(monomial) == e.ctx.dim:
            total += coeff * data.values.get(monomial, 0)
    return total
