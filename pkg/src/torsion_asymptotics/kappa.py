"""The kappa coefficient in every computable regime and the identities tying alpha, delta, beta together"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace

import sympy

from .chernring import (
    BundleData,
    GradedElt,
    IntersectionData,
    RingCtx,
    chern_character,
    integrate,
    line_bundle,
    series_class,
    td_class,
)
from .errors import ChernRingError, InputError, InvariantViolation
from .series import default_order, ps_E, ps_f
from .singularity import Germ, milnor, spectral_genus

logger = logging.getLogger(__name__)

HYPERPLANE = "h"


@dataclass(frozen=True)
class IHSInputs:
    germs: tuple[Germ, ...]
    rank: int = 1
    n: int = 1
    convention: str = "steenbrink"


@dataclass(frozen=True)
class TopTrivialInputs:
    alpha: sympy.Rational
    epsilon: sympy.Rational
    rank: int = 1


@dataclass(frozen=True)
class SemistableInputs:
    alpha_f: sympy.Rational
    beta: sympy.Rational
    deg_mu: int = 1


@dataclass(frozen=True)
class QuadraticRank2:
    """Critical locus Sigma with pi = z_0 z_1 transversally; bundles live in Sigma's ring"""

    tangent: BundleData
    normal: BundleData
    xi: BundleData
    hyperplane: BundleData
    intersection: IntersectionData
    m: int = 0
    additive: bool = field(default=False, compare=False)

    def __post_init__(self):
        ctx = self.intersection.ctx
        for bundle in (self.tangent, self.normal, self.xi, self.hyperplane):
            if bundle.ctx != ctx:
                raise ChernRingError(f"bundle {bundle.name} does not live on the critical locus ring")
        if self.normal.rank != 2 or not self.normal.c(1).is_zero():
            raise ChernRingError("the normal bundle must have rank 2 and c_1 = 0")
        if self.hyperplane.rank != 1:
            raise ChernRingError("H must be a line bundle")

    @property
    def ctx(self) -> RingCtx:
        return self.intersection.ctx

    @property
    def sigma_dim(self) -> int:
        return self.ctx.dim


@dataclass(frozen=True)
class Stratum:
    """A pulled-back integrand on a stratum of the exceptional divisor and its intersection functional"""

    integrand: GradedElt
    data: IntersectionData


def kappa_ihs(germs: Iterable[Germ], rank: int = 1, n: int = 1, convention: str = "steenbrink") -> sympy.Rational:
    """-rank * sum_x (mu/(n+2)! - spectral genus) over the isolated singular points"""
    if rank < 1:
        raise InputError("rank must be positive")
    total = sympy.Integer(0)
    for g in germs:
        if g.nvars != n + 1:
            raise InputError(f"germ in {g.nvars} variables does not match fiber dimension n = {n}")
        total += sympy.Rational(milnor(g), sympy.factorial(n + 2)) - spectral_genus(g, convention)
    return -rank * total


def kappa_toptrivial(alpha, epsilon, rank: int = 1) -> sympy.Rational:
    """rank * (alpha + epsilon) when the bundle is topologically trivial near the singular locus"""
    return rank * (sympy.Rational(alpha) + sympy.Rational(epsilon))


def kappa_semistable(alpha_f, beta, deg_mu: int) -> sympy.Rational:
    """(alpha_f + beta)/deg mu from a semi-stable reduction"""
    if deg_mu < 1:
        raise InputError(f"deg mu must be >= 1, got {deg_mu}")
    return (sympy.Rational(alpha_f) + sympy.Rational(beta)) / deg_mu


def kappa_decomposition(alpha, delta) -> sympy.Rational:
    return sympy.Rational(alpha) + sympy.Rational(delta)


def delta_semistable(alpha, alpha_f, beta, deg_mu: int) -> sympy.Rational:
    """delta = (alpha_f + beta)/deg mu - alpha"""
    return kappa_semistable(alpha_f, beta, deg_mu) - sympy.Rational(alpha)


def _twisted_canonical_character(inputs: QuadraticRank2) -> GradedElt:
    """ch(K_Sigma (x) xi (x) H^m)"""
    twist = -inputs.tangent.c(1) + inputs.hyperplane.c(1) * inputs.m
    return chern_character(inputs.xi) * twist.exp()


def kappa_quadratic(inputs: QuadraticRank2, order: int | None = None) -> sympy.Rational:
    """-(1/2) int_Sigma Td(T Sigma) E(N) ch(K_Sigma(xi(m)))"""
    order = default_order(inputs.sigma_dim) if order is None else order
    if order < inputs.sigma_dim:
        raise InputError(f"truncation order {order} is below dim Sigma = {inputs.sigma_dim}")
    e_class = series_class(ps_E(order), inputs.normal, additive=inputs.additive)
    integrand = td_class(inputs.tangent) * e_class * _twisted_canonical_character(inputs)
    return -integrate(integrand, inputs.intersection) / 2


def kappa_curve_closed_form(genus: int, deg_xi, rank_xi: int, deg_h, m: int = 0) -> sympy.Rational:
    """2 kappa = -E(0) {deg xi(m) + r(xi)(g - 1)} on a connected critical curve of genus g"""
    e0 = ps_E(0)[0]
    deg_twisted = sympy.Rational(deg_xi) + m * rank_xi * sympy.Rational(deg_h)
    return -e0 * (deg_twisted + rank_xi * (genus - 1)) / 2


def quadratic_curve_config(genus: int, deg_xi, rank_xi: int, deg_h, m: int = 0) -> QuadraticRank2:
    """Connected critical curve of genus g, point class p with int p = 1"""
    ctx = RingCtx(1, (("p", 1),))
    point = GradedElt.generator(ctx, "p")
    tangent = line_bundle(ctx, point * (2 - 2 * genus), "T")
    normal = BundleData("N", 2, (), ctx)
    xi = BundleData("xi", rank_xi, (point * sympy.Rational(deg_xi),), ctx)
    hyperplane = line_bundle(ctx, point * sympy.Rational(deg_h), "H")
    return QuadraticRank2(tangent, normal, xi, hyperplane, IntersectionData(ctx, {(1,): 1}), m)


def projectivized_normal_stratum(inputs: QuadraticRank2, hyperplane: str = HYPERPLANE) -> Stratum:
    """Exceptional divisor P(N) over Sigma with h = c_1(H^v) restricted to it

    With Chern roots +-x of N (x^2 = -c_2), p_*(h^{2j+1}) = -x^{2j} and even powers push
    forward to 0; the two branches of z_0 z_1 = t give the weight 1/2.
    """
    base = inputs.ctx
    ctx = base.extend(hyperplane, 1, base.dim + 1)
    minus_c2 = -inputs.normal.c(2)
    h_index = ctx.index(hyperplane)
    values = {}
    for monomial in ctx.top_monomials():
        k = monomial[h_index]
        if k % 2 == 0:
            continue
        rest = tuple(e for i, e in enumerate(monomial) if i != h_index)
        base_class = GradedElt(base, {rest: 1}) * minus_c2 ** ((k - 1) // 2)
        value = -integrate(base_class, inputs.intersection) / 2
        if value != 0:
            values[monomial] = value
    pulled = td_class(inputs.tangent) * td_class(inputs.normal) * _twisted_canonical_character(inputs)
    return Stratum(pulled.embed(ctx), IntersectionData(ctx, values))


def alpha_eval(strata: Sequence[Stratum], hyperplane: str = HYPERPLANE) -> sympy.Rational:
    """sum over strata of int f(h) * integrand, f(x) = (Td^{-1}(x) - 1)/x

    A point stratum without the hyperplane generator contributes its integrand as is.
    """
    total = sympy.Integer(0)
    for stratum in strata:
        ctx = stratum.data.ctx
        if stratum.integrand.ctx != ctx:
            raise ChernRingError("stratum integrand and intersection data live in different rings")
        if ctx.dim == 0 and hyperplane not in ctx.names:
            total += integrate(stratum.integrand, stratum.data)
            continue
        f = ps_f(max(ctx.dim, 1))
        if hyperplane in ctx.names:
            if dict(ctx.generators)[hyperplane] != 1:
                raise ChernRingError(f"generator {hyperplane} must have degree 1")
            h = GradedElt.generator(ctx, hyperplane)
            f_of_h = GradedElt.zero(ctx)
            for k in range(ctx.dim + 1):
                f_of_h = f_of_h + h**k * f[k]
        else:
            raise ChernRingError(f"stratum ring {ctx.names} does not declare the generator {hyperplane}")
        total += integrate(f_of_h * stratum.integrand, stratum.data)
    return total


def kappa_polynomial_in_m(inputs: QuadraticRank2, m_values: Sequence[int] | None = None) -> sympy.Poly:
    """Exact interpolating polynomial of kappa_quadratic in the twist m"""
    dim = inputs.sigma_dim
    m_values = list(range(2 * dim + 4)) if m_values is None else list(m_values)
    if len(set(m_values)) < dim + 2:
        raise InputError(f"need at least {dim + 2} distinct values of m, got {len(set(m_values))}")
    points = [(m, kappa_quadratic(replace(inputs, m=m))) for m in sorted(set(m_values))]
    m = sympy.Symbol("m")
    poly = sympy.Poly(sympy.interpolate(points, m), m, domain=sympy.QQ)
    if poly.degree() > dim:
        raise InvariantViolation(f"kappa is not polynomial of degree <= {dim} in m (degree {poly.degree()})")
    logger.debug("kappa(m) = %s", poly.as_expr())
    return poly


def kappa(inputs) -> sympy.Rational:
    """Dispatch on the input variant"""
    if isinstance(inputs, IHSInputs):
        return kappa_ihs(inputs.germs, inputs.rank, inputs.n, inputs.convention)
    if isinstance(inputs, TopTrivialInputs):
        return kappa_toptrivial(inputs.alpha, inputs.epsilon, inputs.rank)
    if isinstance(inputs, QuadraticRank2):
        return kappa_quadratic(inputs)
    if isinstance(inputs, SemistableInputs):
        return kappa_semistable(inputs.alpha_f, inputs.beta, inputs.deg_mu)
    raise InputError(f"unknown kappa input {type(inputs).__name__}")
