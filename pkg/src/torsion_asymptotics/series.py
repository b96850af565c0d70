"""Truncated univariate power series over exact rationals and the genus-defining series"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import sympy
from scipy import integrate
from sympy import QQ
from sympy.polys.ring_series import (
    rs_exp,
    rs_log,
    rs_mul,
    rs_series_from_list,
    rs_series_inversion,
    rs_trunc,
)
from sympy.polys.rings import ring

from .errors import SeriesError

logger = logging.getLogger(__name__)

Rat = sympy.Rational

_RING, _X = ring("x", QQ)


def default_order(dim: int) -> int:
    """Truncation order used when the caller does not choose one"""
    return 2 * dim + 2


@dataclass(frozen=True)
class Series:
    """Power series truncated at `order` (inclusive), coefficients indexed 0..order"""

    coeffs: tuple[sympy.Rational, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise SeriesError("a series needs at least its constant term")
        object.__setattr__(self, "coeffs", tuple(sympy.Rational(c) for c in self.coeffs))

    @classmethod
    def from_coeffs(cls, coeffs, order: int | None = None) -> "Series":
        """Build a series, padding with zeros or truncating to `order`"""
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        coeffs = coeffs[: order + 1] + [0] * (order + 1 - len(coeffs))
        return cls(tuple(coeffs))

    @classmethod
    def constant(cls, value, order: int) -> "Series":
        return cls.from_coeffs([value], order)

    @classmethod
    def x(cls, order: int) -> "Series":
        """The series of the variable itself"""
        return cls.from_coeffs([0, 1], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> sympy.Rational:
        if 0 <= k <= self.order:
            return self.coeffs[k]
        return sympy.Integer(0)

    def truncate(self, order: int) -> "Series":
        return Series.from_coeffs(self.coeffs, order)

    def _poly(self):
        return _RING.from_dict({(k,): QQ.from_sympy(c) for k, c in enumerate(self.coeffs) if c != 0})

    @classmethod
    def _from_poly(cls, p, order: int) -> "Series":
        return cls(tuple(QQ.to_sympy(p.get((k,), QQ.zero)) for k in range(order + 1)))

    def _common_order(self, other: "Series") -> int:
        return min(self.order, other.order)

    def __add__(self, other) -> "Series":
        if not isinstance(other, Series):
            return Series((self.coeffs[0] + other,) + self.coeffs[1:])
        order = self._common_order(other)
        return Series(tuple(self[k] + other[k] for k in range(order + 1)))

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return Series(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "Series":
        return self + (-other)

    def __rsub__(self, other) -> "Series":
        return (-self) + other

    def __mul__(self, other) -> "Series":
        if not isinstance(other, Series):
            return Series(tuple(c * other for c in self.coeffs))
        order = self._common_order(other)
        return Series._from_poly(rs_mul(self._poly(), other._poly(), _X, order + 1), order)

    __rmul__ = __mul__

    def inverse(self) -> "Series":
        if self.coeffs[0] == 0:
            raise SeriesError("cannot invert a series with zero constant term")
        return Series._from_poly(rs_series_inversion(self._poly(), _X, self.order + 1), self.order)

    def __truediv__(self, other) -> "Series":
        if not isinstance(other, Series):
            if other == 0:
                raise SeriesError("division of a series by zero")
            return Series(tuple(c / sympy.Rational(other) for c in self.coeffs))
        if other.coeffs[0] == 0:
            raise SeriesError("division by a series with zero constant term")
        order = self._common_order(other)
        return self.truncate(order) * other.truncate(order).inverse()

    def compose(self, inner: "Series") -> "Series":
        """self(inner(x)); inner must vanish at 0"""
        if inner.coeffs[0] != 0:
            raise SeriesError("composition requires an inner series without constant term")
        order = self._common_order(inner)
        outer = [QQ.from_sympy(c) for c in self.coeffs[: order + 1]]
        p = rs_series_from_list(inner.truncate(order)._poly(), outer, _X, order + 1, concur=0)
        return Series._from_poly(rs_trunc(p, _X, order + 1), order)

    def exp(self) -> "Series":
        if self.coeffs[0] != 0:
            raise SeriesError("exp requires a series without constant term")
        return Series._from_poly(rs_exp(self._poly(), _X, self.order + 1), self.order)

    def log(self) -> "Series":
        if self.coeffs[0] != 1:
            raise SeriesError("log requires a series with constant term 1")
        return Series._from_poly(rs_log(self._poly(), _X, self.order + 1), self.order)

    def neg_x(self) -> "Series":
        """The series in -x"""
        return Series(tuple(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)))

    def shift_down(self) -> "Series":
        """Divide by x; the constant term must vanish and the order drops by one"""
        if self.coeffs[0] != 0:
            raise SeriesError("only a series without constant term is divisible by x")
        if self.order == 0:
            raise SeriesError("nothing left after dividing an order-0 series by x")
        return Series(self.coeffs[1:])

    def odd_part(self) -> "Series":
        return Series(tuple(c if k % 2 else 0 for k, c in enumerate(self.coeffs)))

    def even_part(self) -> "Series":
        return Series(tuple(0 if k % 2 else c for k, c in enumerate(self.coeffs)))

    def is_even(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    def __str__(self) -> str:
        terms = [f"{c}*x^{k}" for k, c in enumerate(self.coeffs) if c != 0]
        return " + ".join(terms) + f" + O(x^{self.order + 1})"


def compose(outer: Series, inner: Series) -> Series:
    return outer.compose(inner)


def exp(a: Series) -> Series:
    return a.exp()


def log(a: Series) -> Series:
    return a.log()


def _exp_minus_one_over_x(order: int, sign: int) -> Series:
    """(e^{sign x} - 1)/(sign x) = sum (sign x)^k/(k+1)!"""
    return Series.from_coeffs([sympy.Rational(sign**k, sympy.factorial(k + 1)) for k in range(order + 1)])


@lru_cache(maxsize=64)
def ps_td_inverse(order: int) -> Series:
    """Td^{-1}(x) = (1 - e^{-x})/x"""
    return _exp_minus_one_over_x(order, -1)


@lru_cache(maxsize=64)
def ps_td(order: int) -> Series:
    """Td(x) = x/(1 - e^{-x})"""
    if order < 0:
        raise SeriesError("order must be non-negative")
    return ps_td_inverse(order).inverse()


@lru_cache(maxsize=64)
def ps_td_dual(order: int) -> Series:
    """Td^v(x) = x/(e^x - 1)"""
    if order < 0:
        raise SeriesError("order must be non-negative")
    return _exp_minus_one_over_x(order, 1).inverse()


@lru_cache(maxsize=64)
def ps_f(order: int) -> Series:
    """f(x) = (Td^{-1}(x) - 1)/x"""
    return (ps_td_inverse(order + 1) - 1).shift_down()


@lru_cache(maxsize=64)
def ps_f_minus(order: int) -> Series:
    """f_-(x) = (f(x) - f(-x))/(2x), an even series"""
    if order < 0:
        raise SeriesError("order must be non-negative")
    return ps_f(order + 1).odd_part().shift_down()


@lru_cache(maxsize=64)
def ps_E(order: int) -> Series:
    """Bismut's E(x) = (x - sinh x)/(2x(1 - cosh x))"""
    if order < 0:
        raise SeriesError("order must be non-negative")
    # (x - sinh x)/x^3 and 2(1 - cosh x)/x^2, both even
    numerator = Series.from_coeffs(
        [0 if k % 2 else -sympy.Rational(1, sympy.factorial(k + 3)) for k in range(order + 1)]
    )
    denominator = Series.from_coeffs(
        [0 if k % 2 else -sympy.Rational(2, sympy.factorial(k + 2)) for k in range(order + 1)]
    )
    return numerator / denominator


def a_k(k: int) -> sympy.Rational:
    """a_k = (1/k) sum_{j<k} 1/j, with a_1 = 0"""
    if k < 1:
        raise SeriesError(f"a_k is defined for k >= 1, got {k}")
    return sympy.Rational(sympy.harmonic(k - 1), k)


def a_k_quadrature(k: int) -> float:
    """Numeric value of -int_0^oo log(rho)/(1+rho)^{k+1} drho"""
    if k < 1:
        raise SeriesError(f"a_k is defined for k >= 1, got {k}")

    def integrand(rho: float) -> float:
        return math.log(rho) / (1.0 + rho) ** (k + 1)

    head, _ = integrate.quad(integrand, 0.0, 1.0, limit=200)
    tail, _ = integrate.quad(integrand, 1.0, math.inf, limit=200)
    logger.debug("a_%d quadrature: head=%.3e tail=%.3e", k, head, tail)
    return -(head + tail)


@lru_cache(maxsize=64)
def ps_bott_chern_correction(order: int) -> Series:
    """sum_{k>=1} (-1)^k a_k/k! x^k, the difference between the Bott-Chern type current and the BGS current"""
    coeffs = [0] + [sympy.Rational((-1) ** k) * a_k(k) / sympy.factorial(k) for k in range(1, order + 1)]
    return Series.from_coeffs(coeffs, order)
