"""Dedekind eta determinants of flat tori along degenerating elliptic families"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from mpmath import mp

from .asymptotics import Sample
from .errors import InputError

logger = logging.getLogger(__name__)

TARGET_TAIL = 1e-30


def _check_tau(tau: complex) -> complex:
    tau = complex(tau)
    if not tau.imag > 0:
        raise InputError(f"tau must lie in the upper half plane, got {tau}")
    return tau


def default_terms(tau: complex) -> int:
    """Smallest product length with |q|^terms < 1e-30"""
    tau = _check_tau(tau)
    return max(1, math.ceil(-math.log(TARGET_TAIL) / (2 * math.pi * tau.imag)) + 1)


def eta(tau: complex, terms: int | None = None) -> complex:
    """q^{1/24} prod_{k=1}^{terms} (1 - q^k), q = e^{2 pi i tau}"""
    tau = _check_tau(tau)
    terms = default_terms(tau) if terms is None else terms
    q = cmath.exp(2j * math.pi * tau)
    factors = 1 - q ** np.arange(1, terms + 1)
    return cmath.exp(1j * math.pi * tau / 12) * complex(np.prod(factors))


def log_eta(tau: complex, terms: int | None = None) -> complex:
    """log eta with the q-product summed as logarithms; stays finite when q underflows"""
    tau = _check_tau(tau)
    terms = default_terms(tau) if terms is None else terms
    q = cmath.exp(2j * math.pi * tau)
    logs = np.log1p(-(q ** np.arange(1, terms + 1)))
    return 1j * math.pi * tau / 12 + complex(math.fsum(logs.real), math.fsum(logs.imag))


def eta_reference(tau: complex, dps: int = 40):
    """High-precision eta through mpmath's q-Pochhammer symbol"""
    tau = _check_tau(tau)
    with mp.workdps(dps):
        t = mp.mpc(tau.real, tau.imag)
        q = mp.exp(2j * mp.pi * t)
        return mp.exp(1j * mp.pi * t / 12) * mp.qp(q)


def eta_i_closed_form(dps: int = 40):
    """eta(i) = Gamma(1/4) / (2 pi^{3/4})"""
    with mp.workdps(dps):
        return mp.gamma(mp.mpf(1) / 4) / (2 * mp.pi ** (mp.mpf(3) / 4))


def torus_log_det(tau: complex) -> float:
    """log det' of the flat Laplacian on C/(Z + tau Z): 2 log Im tau + 4 log|eta(tau)|"""
    tau = _check_tau(tau)
    return 2 * math.log(tau.imag) + 4 * log_eta(tau).real


def torus_log_det_unit_area(tau: complex) -> float:
    """log Im tau + 4 log|eta(tau)|, invariant under the full modular group"""
    tau = _check_tau(tau)
    return math.log(tau.imag) + 4 * log_eta(tau).real


class FamilyKind:
    """A one-parameter family of moduli tau(s), sampled along s = r > 0"""

    def moduli(self, log_inv_r: Sequence[float] | None) -> list[tuple[float, complex]]:
        raise NotImplementedError


@dataclass(frozen=True)
class NodeTate(FamilyKind):
    """Tate curve degenerating to a nodal curve: tau(s) = log s / (2 pi i)"""

    def moduli(self, log_inv_r):
        if log_inv_r is None:
            raise InputError("the node family needs a sampling grid")
        result = []
        for L in log_inv_r:
            if not L > 2 * math.pi:
                raise InputError(f"node family needs r < exp(-2 pi), got log r^-1 = {L}")
            result.append((float(L), complex(0.0, L / (2 * math.pi))))
        return result


@dataclass(frozen=True)
class PrescribedTau(FamilyKind):
    """User table of (log r^{-1}, tau)"""

    table: tuple[tuple[float, complex], ...]

    def __post_init__(self):
        table = tuple((float(L), _check_tau(tau)) for L, tau in self.table)
        if not table:
            raise InputError("prescribed family table is empty")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_r(cls, rows: Sequence[tuple[float, complex]]) -> "PrescribedTau":
        for r, _ in rows:
            if not 0 < r < 1:
                raise InputError(f"radius {r} outside (0, 1)")
        return cls(tuple((-math.log(r), tau) for r, tau in rows))

    def moduli(self, log_inv_r):
        if log_inv_r is None:
            return list(self.table)
        lookup = dict(self.table)
        missing = [L for L in log_inv_r if float(L) not in lookup]
        if missing:
            raise InputError(f"no prescribed tau at log r^-1 = {missing[0]}")
        return [(float(L), lookup[float(L)]) for L in log_inv_r]


def sample_family_log(kind: FamilyKind, log_inv_r: Sequence[float] | None = None) -> list[Sample]:
    """Samples (L, -log det' of the flat Laplacian), the value standing in for log tau of the fiber"""
    samples = [Sample(L, -torus_log_det(tau)) for L, tau in kind.moduli(log_inv_r)]
    logger.debug("sampled %d fibers of %s", len(samples), type(kind).__name__)
    return samples


def sample_family(kind: FamilyKind, r_grid: Sequence[float] | None = None) -> list[Sample]:
    if r_grid is None:
        return sample_family_log(kind)
    for r in r_grid:
        if not 0 < r < 1:
            raise InputError(f"radius {r} outside (0, 1)")
    return sample_family_log(kind, [-math.log(r) for r in r_grid])


def node_tate_grid(im_tau_min: float, im_tau_max: float, count: int) -> list[float]:
    """log r^{-1} values 2 pi Im tau for Im tau evenly spaced in [min, max]"""
    if not 1 < im_tau_min < im_tau_max or count < 2:
        raise InputError("node grid needs 1 < Im tau min < Im tau max and at least two points")
    return [2 * math.pi * v for v in np.linspace(im_tau_min, im_tau_max, count)]
