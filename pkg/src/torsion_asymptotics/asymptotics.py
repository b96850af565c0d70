"""Boundary asymptotic models, least-squares fitting, Barlet-Takayama matrix models and curvature checks

All fitting works in L := log r^{-1} > 0. The model

    kappa * log r^2 - rho * log log r^{-2} + gamma + c / log r^{-1}

is linear in (kappa, rho, gamma, c) over the basis {-2L, -log 2L, 1, 1/L}.
"""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import FitError, InputError

logger = logging.getLogger(__name__)

DEFAULT_RHO_TOLERANCE = 0.1
CONDITIONING_WARNING = 1e8
MIN_LOG_SPAN = 2 * math.log(10)
CURVATURE_ENVELOPE_BOUND = 1.0


@dataclass(frozen=True)
class AsymModel:
    kappa: float
    rho: float
    gamma: float
    c: float = 0.0

    def __post_init__(self):
        for name in ("kappa", "rho", "gamma", "c"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InputError(f"model coefficient {name} is not finite")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class Sample:
    """One observation at r = exp(-log_inv_r); stored in log form so tiny r survive"""

    log_inv_r: float
    value: float

    def __post_init__(self):
        if not self.log_inv_r > 0 or not math.isfinite(self.log_inv_r):
            raise InputError(f"sample needs 0 < r < 1, got log r^-1 = {self.log_inv_r}")
        if not math.isfinite(self.value):
            raise InputError(f"sample value {self.value} is not finite")

    @classmethod
    def from_r(cls, r: float, value: float) -> "Sample":
        if not 0 < r < 1:
            raise InputError(f"sample radius {r} outside (0, 1)")
        return cls(-math.log(r), value)

    @property
    def r(self) -> float:
        return math.exp(-self.log_inv_r)


@dataclass(frozen=True)
class FitResult:
    model: AsymModel
    rho_rounded: int
    residual_rms: float
    conditioning: float
    rho_is_integral: bool = field(default=True, compare=False)


@dataclass(frozen=True)
class LogPowerFit:
    """ratio ~ coefficient * (log r^{-1})^exponent"""

    coefficient: float
    exponent: float
    exponent_rounded: int
    residual_rms: float
    conditioning: float


def _check_log_domain(log_inv_r: float) -> None:
    if not log_inv_r > 0.5:
        raise InputError(f"log log r^-2 is not positive at log r^-1 = {log_inv_r}")


def model_eval_log(m: AsymModel, log_inv_r: float) -> float:
    """The model at L = log r^{-1}"""
    _check_log_domain(log_inv_r)
    L = log_inv_r
    return m.kappa * (-2 * L) - m.rho * math.log(2 * L) + m.gamma + m.c / L


def model_eval(m: AsymModel, r: float) -> float:
    if not 0 < r < 1:
        raise InputError(f"radius {r} outside (0, 1)")
    return model_eval_log(m, -math.log(r))


def model_samples(m: AsymModel, log_inv_r: Iterable[float]) -> list[Sample]:
    return [Sample(L, model_eval_log(m, L)) for L in log_inv_r]


def _least_squares(design: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Column-scaled least squares; returns coefficients, residual RMS and cond of the normal system"""
    norms = np.linalg.norm(design, axis=0)
    if np.any(norms == 0):
        raise FitError("design matrix has a zero column", conditioning=math.inf)
    scaled = design / norms
    coef, _, rank, singular = scipy.linalg.lstsq(scaled, values)
    conditioning = float((singular[0] / singular[-1]) ** 2) if singular[-1] > 0 else math.inf
    if rank < design.shape[1]:
        raise FitError(
            f"design matrix is rank deficient (rank {rank} < {design.shape[1]}), conditioning {conditioning:.3e}",
            conditioning=conditioning,
        )
    if conditioning > CONDITIONING_WARNING:
        logger.warning("ill-conditioned fit: condition number %.3e", conditioning)
    coef = coef / norms
    residual = design @ coef - values
    rms = math.sqrt(math.fsum(residual**2) / len(values))
    return coef, rms, conditioning


def _log_inv_r(samples: Sequence[Sample], parameters: int) -> np.ndarray:
    if len(samples) < parameters:
        raise FitError(f"need at least {parameters} samples, got {len(samples)}")
    L = np.array([s.log_inv_r for s in samples], dtype=float)
    if L.max() - L.min() < MIN_LOG_SPAN:
        raise FitError("samples must span at least two decades of r")
    return L


def fit(samples: Sequence[Sample], with_c: bool = False, tolerance: float = DEFAULT_RHO_TOLERANCE) -> FitResult:
    """Least-squares (kappa, rho, gamma[, c]) with rho also rounded to the nearest integer"""
    L = _log_inv_r(samples, 4 if with_c else 3)
    for value in L:
        _check_log_domain(value)
    columns = [-2 * L, -np.log(2 * L), np.ones_like(L)]
    if with_c:
        columns.append(1 / L)
    values = np.array([s.value for s in samples], dtype=float)
    coef, rms, conditioning = _least_squares(np.column_stack(columns), values)
    kappa, rho, gamma = coef[:3]
    c = coef[3] if with_c else 0.0
    rho_rounded = int(round(rho))
    integral = bool(abs(rho - rho_rounded) <= tolerance)
    if not integral:
        logger.warning("fitted rho = %.6f is not within %.3g of an integer", rho, tolerance)
    logger.info("fit: kappa=%.9f rho=%.9f gamma=%.9f c=%.9f rms=%.3e", kappa, rho, gamma, c, rms)
    return FitResult(AsymModel(kappa, rho, gamma, c), rho_rounded, rms, conditioning, integral)


def fit_log_power(samples: Sequence[Sample], tolerance: float = DEFAULT_RHO_TOLERANCE) -> LogPowerFit:
    """Fit a positive ratio C' (log r^{-1})^rho through log ratio = log C' + rho log L"""
    L = _log_inv_r(samples, 2)
    values = np.array([s.value for s in samples], dtype=float)
    if np.any(values <= 0):
        raise FitError("the power-of-log model needs positive ratios")
    coef, rms, conditioning = _least_squares(np.column_stack([np.log(L), np.ones_like(L)]), np.log(values))
    exponent, log_coefficient = coef
    rounded = int(round(exponent))
    if abs(exponent - rounded) > tolerance:
        logger.warning("fitted log-power exponent %.6f is not within %.3g of an integer", exponent, tolerance)
    return LogPowerFit(math.exp(log_coefficient), float(exponent), rounded, rms, conditioning)


def read_samples(path: Path) -> list[Sample]:
    """CSV with header r,value or log_inv_r,value"""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{path} is empty") from None
        if header not in (["r", "value"], ["log_inv_r", "value"]):
            raise InputError(f"{path}: expected header r,value or log_inv_r,value, got {','.join(header)}")
        samples = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                x, value = (float(cell) for cell in row)
            except ValueError as e:
                raise InputError(f"{path}:{lineno}: {e}") from e
            samples.append(Sample.from_r(x, value) if header[0] == "r" else Sample(x, value))
    logger.info("read %d samples from %s", len(samples), path)
    return samples


def write_samples(path: Path, samples: Sequence[Sample]) -> None:
    """Writes r,value unless some r underflows a double, then log_inv_r,value"""
    tiny = any(s.r == 0.0 or s.r < np.finfo(float).tiny for s in samples)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        if tiny:
            writer.writerow(["log_inv_r", "value"])
            writer.writerows([repr(s.log_inv_r), repr(s.value)] for s in samples)
        else:
            writer.writerow(["r", "value"])
            writer.writerows([repr(s.r), repr(s.value)] for s in samples)


@dataclass(frozen=True)
class BTExpansion:
    """H~(t) = sum_m (log|t|^{-2})^m A_m with Hermitian A_m; H = D H~ D-bar, D = diag(t^{-e_i})"""

    exponents: tuple[int, ...]
    coefficients: tuple[np.ndarray, ...] = field(compare=False)

    def __post_init__(self):
        exponents = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exponents):
            raise InputError(f"exponents must be non-negative, got {exponents}")
        if not self.coefficients:
            raise InputError("a Barlet-Takayama expansion needs at least A_0")
        size = len(exponents)
        coefficients = tuple(np.asarray(a, dtype=complex) for a in self.coefficients)
        for m, a in enumerate(coefficients):
            if a.shape != (size, size):
                raise InputError(f"A_{m} has shape {a.shape}, expected {(size, size)}")
            if not np.allclose(a, a.conj().T):
                raise InputError(f"A_{m} is not Hermitian")
        object.__setattr__(self, "exponents", exponents)
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def size(self) -> int:
        return len(self.exponents)


def _check_disc(t: complex) -> float:
    radius = abs(t)
    if not 0 < radius < 1:
        raise InputError(f"|t| = {radius} outside (0, 1)")
    return radius


def bt_eval(b: BTExpansion, t: complex) -> np.ndarray:
    lam = -2 * math.log(_check_disc(t))
    result = np.zeros((b.size, b.size), dtype=complex)
    for a in reversed(b.coefficients):
        result = result * lam + a
    return result


def _scaling(exponents: Sequence[int], t: complex) -> np.ndarray:
    return np.array([complex(t) ** (-e) for e in exponents])


def bt_compose(b: BTExpansion, t: complex) -> np.ndarray:
    """H(t) = D(t) H~(t) D(t)-bar"""
    d = _scaling(b.exponents, t)
    return d[:, None] * bt_eval(b, t) * d.conj()[None, :]


@dataclass(frozen=True)
class DecompositionReport:
    tilde: tuple[np.ndarray, ...] = field(compare=False)
    min_eigenvalue: float
    argmin: complex


def dh_decompose(samples: Sequence[tuple[complex, np.ndarray]], exponents: Sequence[int]) -> DecompositionReport:
    """H~ = D^{-1} H D-bar^{-1} on each grid point, with the smallest eigenvalue over the grid"""
    if not samples:
        raise InputError("no grid points to decompose")
    if any(int(e) < 0 for e in exponents):
        raise InputError(f"exponents must be non-negative, got {tuple(exponents)}")
    tilde = []
    lowest, argmin = math.inf, 0j
    for t, h in samples:
        _check_disc(t)
        h = np.asarray(h, dtype=complex)
        if h.shape != (len(exponents), len(exponents)):
            raise InputError(f"matrix at t = {t} has shape {h.shape}, expected {len(exponents)}x{len(exponents)}")
        if not np.allclose(h, h.conj().T, rtol=1e-10, atol=0):
            raise InputError(f"matrix at t = {t} is not Hermitian")
        inverse = 1 / _scaling(exponents, t)
        h_tilde = inverse[:, None] * h * inverse.conj()[None, :]
        tilde.append(h_tilde)
        eigenvalue = float(np.linalg.eigvalsh(h_tilde)[0])
        if eigenvalue < lowest:
            lowest, argmin = eigenvalue, complex(t)
    logger.debug("dh_decompose: %d points, min eigenvalue %.6g at t = %s", len(tilde), lowest, argmin)
    return DecompositionReport(tuple(tilde), lowest, argmin)


@dataclass(frozen=True)
class BTDetFit:
    coefficients: tuple[float, ...]
    residual_rms: float
    conditioning: float


def bt_det_samples(b: BTExpansion, grid: Iterable[complex]) -> list[tuple[float, float]]:
    """(|t|, det H~(t)) pairs"""
    return [(abs(t), float(np.linalg.det(bt_eval(b, t)).real)) for t in grid]


def bt_det_fit(samples: Sequence[tuple[float, float]], degree: int) -> BTDetFit:
    """Coefficients a_m of det H~ = sum_m a_m (log|t|^{-2})^m"""
    if degree < 0:
        raise InputError("degree must be non-negative")
    if len(samples) < degree + 1:
        raise FitError(f"need at least {degree + 1} samples, got {len(samples)}")
    lam = np.array([-2 * math.log(_check_disc(radius)) for radius, _ in samples])
    values = np.array([value for _, value in samples], dtype=float)
    design = np.column_stack([lam**m for m in range(degree + 1)])
    coef, rms, conditioning = _least_squares(design, values)
    return BTDetFit(tuple(float(a) for a in coef), rms, conditioning)


def rho_from_coefficients(coefficients: Sequence[float], tolerance: float = 1e-6) -> int:
    """max{m : |a_m| > tolerance}, 0 when every coefficient vanishes"""
    nonzero = [m for m, a in enumerate(coefficients) if abs(a) > tolerance]
    return max(nonzero, default=0)


def positive_bt_expansion(
    exponents: Sequence[int], degree: int, rng: np.random.Generator | None = None
) -> BTExpansion:
    """Random model with A_0 = B^*B + I and positive semi-definite A_m, so H~ >= I for |t| < 1"""
    rng = np.random.default_rng() if rng is None else rng
    size = len(exponents)

    def gram() -> np.ndarray:
        b = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        return b.conj().T @ b

    coefficients = [gram() + np.eye(size)] + [gram() for _ in range(degree)]
    return BTExpansion(tuple(exponents), tuple(coefficients))


def radial_grid(r_min: float, r_max: float, count: int, angles: Sequence[float] = (0.0,)) -> list[complex]:
    """Log-spaced radii times the given arguments"""
    if not 0 < r_min <= r_max < 1:
        raise InputError(f"radii must satisfy 0 < r_min <= r_max < 1, got {r_min}, {r_max}")
    radii = np.geomspace(r_min, r_max, count)
    return [complex(r * math.cos(a), r * math.sin(a)) for r in radii for a in angles]


Phi = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CurvatureReport:
    """Numeric d d-bar log g against the leading term -l/(4|t|^2 (log|t|^{-1})^2)"""

    leading_power: int
    points: int
    max_relative_error: float
    envelope: float
    poincare: float
    envelope_bound: float = CURVATURE_ENVELOPE_BOUND

    @property
    def within_envelope(self) -> bool:
        return bool(self.envelope <= self.envelope_bound)


def _log_g(terms: Sequence[tuple[int, Phi]], x: np.ndarray, y: np.ndarray) -> np.ndarray:
    w = np.log(x * x + y * y)
    g = np.zeros_like(w)
    for power, phi in terms:
        g = g + w**power * np.broadcast_to(np.asarray(phi(x, y), dtype=float), w.shape)
    if np.any(g <= 0):
        raise InputError("g is not positive on the grid")
    return np.log(g)


def _laplacian(terms, x: float, y: float, h: float) -> float:
    xs = np.array([x, x + h, x - h, x, x])
    ys = np.array([y, y, y, y + h, y - h])
    u = _log_g(terms, xs, ys)
    return (u[1] + u[2] + u[3] + u[4] - 4 * u[0]) / (h * h)


def dd_bar_log(terms: Sequence[tuple[int, Phi]], t: complex) -> float:
    """d_t d_tbar log g = Laplacian / 4, central differences with step |t|/100 and one Richardson step"""
    radius = _check_disc(t)
    h = radius / 100
    coarse = _laplacian(terms, t.real, t.imag, h)
    fine = _laplacian(terms, t.real, t.imag, h / 2)
    return (4 * fine - coarse) / 3 / 4


def curvature_check(
    terms: Sequence[tuple[int, Phi]],
    grid: Sequence[complex],
    envelope_bound: float = CURVATURE_ENVELOPE_BOUND,
) -> CurvatureReport:
    """g(t) = sum_i (log|t|^2)^{l_i} phi_i(t); the leading power is the largest l_i with phi_i(0) != 0

    The remainder passes when |remainder| |t|^2 (log|t|^-1)^3 stays below `envelope_bound` on the grid.
    """
    if not grid:
        raise InputError("curvature grid is empty")
    if not envelope_bound > 0:
        raise InputError(f"envelope bound must be positive, got {envelope_bound}")
    for power, _ in terms:
        if power < 0:
            raise InputError(f"log powers must be non-negative, got {power}")
    zero = np.zeros(1)
    leading = max(
        (power for power, phi in terms if np.asarray(phi(zero, zero), dtype=float).ravel()[0] != 0),
        default=0,
    )
    relative, envelope, poincare = 0.0, 0.0, 0.0
    for t in grid:
        radius = _check_disc(t)
        L = -math.log(radius)
        numeric = dd_bar_log(terms, complex(t))
        exact = -leading / (4 * radius**2 * L**2)
        if exact != 0:
            relative = max(relative, abs(numeric - exact) / abs(exact))
        envelope = max(envelope, abs(numeric - exact) * radius**2 * L**3)
        poincare = max(poincare, abs(numeric) * radius**2 * L**2)
    logger.info("curvature check: l=%d envelope=%.6g poincare=%.6g", leading, envelope, poincare)
    if envelope > envelope_bound:
        logger.warning("curvature remainder envelope %.6g exceeds %.6g", envelope, envelope_bound)
    return CurvatureReport(leading, len(grid), relative, envelope, poincare, envelope_bound)
