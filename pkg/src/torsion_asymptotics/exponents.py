"""Elementary exponents and the delta/epsilon invariants from monodromy or colength data"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

import sympy

from .errors import InputError
from .singularity import Germ, spectrum

logger = logging.getLogger(__name__)


def _rational_angle(value) -> sympy.Rational:
    """Exact angle from an int, a Rational or a "p/q" string; floats are refused"""
    if isinstance(value, (bool, float)):
        raise InputError(f"monodromy angle {value!r} must be exact, give it as a \"p/q\" string")
    try:
        angle = sympy.sympify(value)
    except (sympy.SympifyError, TypeError) as e:
        raise InputError(f"cannot read monodromy angle {value!r}") from e
    if not angle.is_Rational:
        raise InputError(f"monodromy angle {value!r} is not rational")
    if not 0 <= angle < 1:
        raise InputError(f"monodromy angle {angle} is outside [0, 1)")
    return sympy.Rational(angle)


@dataclass(frozen=True)
class MonodromySpec:
    """Eigenvalue angles of M_s on F^n H^{n+q} of the limit, per degree q"""

    n: int
    per_degree: Mapping[int, tuple[sympy.Rational, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 0:
            raise InputError("fiber dimension must be non-negative")
        cleaned = {}
        for q, angles in self.per_degree.items():
            q = int(q)
            if not 0 <= q <= self.n:
                raise InputError(f"degree {q} outside 0..{self.n}")
            cleaned[q] = tuple(_rational_angle(a) for a in angles)
        object.__setattr__(self, "per_degree", dict(sorted(cleaned.items())))

    def with_trivial(self, q: int, count: int = 1) -> "MonodromySpec":
        """Append eigenvalue 1 (angle 0) in degree q"""
        per_degree = dict(self.per_degree)
        per_degree[q] = per_degree.get(q, ()) + (sympy.Integer(0),) * count
        return MonodromySpec(self.n, per_degree)


@dataclass(frozen=True)
class ColengthSpec:
    """Colengths of the direct images before and after semi-stable reduction"""

    deg_mu: int
    per_degree: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.deg_mu < 1:
            raise InputError(f"deg mu must be >= 1, got {self.deg_mu}")
        if any(int(v) < 0 for v in self.per_degree.values()):
            raise InputError("colengths must be non-negative")
        object.__setattr__(self, "per_degree", {int(q): int(v) for q, v in sorted(self.per_degree.items())})


def elementary_exponents(spec: MonodromySpec, q: int) -> tuple[sympy.Rational, ...]:
    if not 0 <= q <= spec.n:
        raise InputError(f"degree {q} outside 0..{spec.n}")
    return spec.per_degree.get(q, ())


def delta_q(spec: MonodromySpec, q: int) -> sympy.Rational:
    """(2 pi i)^{-1} Tr log M_s on F^n H^{n+q}"""
    return sum(elementary_exponents(spec, q), sympy.Integer(0))


def epsilon_pi(spec: MonodromySpec) -> sympy.Rational:
    """Alternating sum over q of delta_q"""
    return sum(((-1) ** q * delta_q(spec, q) for q in range(spec.n + 1)), sympy.Integer(0))


def delta_from_colength(spec: ColengthSpec) -> sympy.Rational:
    return sum((sympy.Rational((-1) ** q * v, spec.deg_mu) for q, v in spec.per_degree.items()), sympy.Integer(0))


def vanishing_monodromy_spec(g: Germ) -> MonodromySpec:
    """Angles of M_s on Gr_F^n of the vanishing cohomology, placed in degree 0"""
    angles = tuple((-a) % 1 for a in spectrum(g).entries if 0 < a <= 1)
    logger.debug("vanishing monodromy of %r on Gr_F^%d: %s", g, g.n, [str(a) for a in angles])
    return MonodromySpec(g.n, {0: angles})
