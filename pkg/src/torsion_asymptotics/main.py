"""Command-line entry point"""

from __future__ import annotations

import argparse
import cmath
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import asymptotics, elliptic
from .config import CORPUS_ENV, Settings
from .errors import InputError, InvariantViolation, TorsionError
from .exponents import delta_from_colength, delta_q, elementary_exponents, epsilon_pi, vanishing_monodromy_spec
from .kappa import (
    alpha_eval,
    delta_semistable,
    kappa_curve_closed_form,
    kappa_decomposition,
    kappa_ihs,
    kappa_polynomial_in_m,
    kappa_quadratic,
    kappa_semistable,
    projectivized_normal_stratum,
)
from .oracles import corpus_check, load_corpus
from .problem import (
    ProblemFile,
    malformed,
    parse_bt_expansion,
    parse_complex,
    parse_colength,
    parse_curvature_terms,
    parse_grid,
    parse_matrix,
    parse_monodromy,
    parse_quadratic,
    parse_rational,
    read_problem,
    require,
)
from .report import Report, germ_rows
from .singularity import BrieskornPham, Explicit, NewtonConvenient, QuasiHomogeneous, milnor, spectral_genus, spectrum

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

MILNOR_SOURCES = {
    BrieskornPham: "Brieskorn-Pham closed form prod(a_i - 1)",
    QuasiHomogeneous: "Milnor-Orlik formula prod(1/w_i - 1)",
    NewtonConvenient: "Kouchnirenko formula on the Newton diagram",
    Explicit: "rank of the truncated Macaulay matrix of the Jacobian ideal",
}
SPECTRUM_SOURCES = {
    BrieskornPham: "monomial basis of the Milnor algebra",
    QuasiHomogeneous: "Poincare series of the Milnor algebra",
}
KAPPA_IHS_SOURCE = "kappa = -rank * sum (mu/(n+2)! - spectral genus) over isolated singular points"
KAPPA_QUADRATIC_SOURCE = "kappa = -(1/2) int Td(T Sigma) E(N) ch(K_Sigma(xi(m)))"
ALPHA_SOURCE = "alpha = int over P(N) of f(c_1(H^v)) Td ch, f = (Td^{-1} - 1)/x"
FIT_MODELS = ("asymptotic", "log-power")
FIT_SOURCE = "least squares over {log r^2, -log log r^-2, 1, 1/log r^-1}"
ETA_TOLERANCE = 1e-12
MODULAR_TOLERANCE = 1e-10
NODE_KAPPA = -1 / 12
NODE_KAPPA_TOLERANCE = 2e-3
NODE_RHO = 2


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=None, help="series and ring truncation order")
    common.add_argument("--convention", default="steenbrink", help="spectral genus convention: steenbrink or alt")
    common.add_argument("--tolerance", type=float, default=asymptotics.DEFAULT_RHO_TOLERANCE, help="rho rounding tolerance")
    common.add_argument("--output", default=None, help="write the JSON report to this path")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logging")
    return common


def _parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="torsion-asymptotics",
        description="Exact coefficients of analytic torsion asymptotics and numeric checks of the fitting machinery.",
    )
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("milnor", "spectrum", "spectral-genus", "kappa-ihs", "kappa-quadratic", "kappa-semistable", "exponents"):
        sub.add_parser(name, parents=[common]).add_argument("problem", type=Path)
    fit = sub.add_parser("fit", parents=[common])
    fit.add_argument("problem", type=Path, help="CSV samples or a JSON problem with a fit payload")
    fit.add_argument("--with-c", action="store_true", help="also fit the 1/log r^-1 coefficient")
    fit.add_argument("--model", choices=FIT_MODELS, default=None)
    for name in ("bt-fit", "curvature-check"):
        sub.add_parser(name, parents=[common]).add_argument("problem", type=Path)
    verify = sub.add_parser("elliptic-verify", parents=[common])
    verify.add_argument("--im-tau-min", type=float, default=10.0)
    verify.add_argument("--im-tau-max", type=float, default=200.0)
    verify.add_argument("--count", type=int, default=60)
    verify.add_argument("--csv", type=Path, default=None, help="also write the node-family samples here")
    check = sub.add_parser("corpus-check", parents=[common])
    check.add_argument("--corpus-dir", default=None, help=f"corpus location (default: ${CORPUS_ENV} or bundled)")
    return parser.parse_args(argv)


def _problem(path: Path, *kinds: str) -> ProblemFile:
    problem = read_problem(path)
    if problem.kind not in kinds:
        raise InputError(f"{path} holds a {problem.kind!r} problem, expected one of {kinds}")
    return problem


def _germs(path: Path) -> dict:
    return _problem(path, "germs").payload


def cmd_milnor(args, settings: Settings) -> Report:
    report = Report("milnor")
    germs = _germs(args.problem)["germs"]
    report.add_table("germs", germ_rows(germs, [("mu", milnor, lambda g: MILNOR_SOURCES[type(g)])]))
    return report


def cmd_spectrum(args, settings: Settings) -> Report:
    report = Report("spectrum")
    germs = _germs(args.problem)["germs"]
    columns = [
        ("spectrum", lambda g: list(spectrum(g).entries), lambda g: SPECTRUM_SOURCES.get(type(g), "unsupported")),
        ("symmetric", lambda g: spectrum(g).is_symmetric(), "alpha -> n + 1 - alpha"),
    ]
    report.add_table("germs", germ_rows(germs, columns))
    for row, g in zip(report.table("germs"), germs):
        if len(row["spectrum"].value) != milnor(g):
            report.violation(f"germ {row['index'].value}: |Sp| != mu")
    return report


def cmd_spectral_genus(args, settings: Settings) -> Report:
    report = Report("spectral-genus")
    germs = _germs(args.problem)["germs"]
    source = f"trace of log M_s on Gr_F^n, {settings.convention} convention"
    report.add_table("germs", germ_rows(germs, [("spectralGenus", lambda g: spectral_genus(g, settings.convention), source)]))
    return report


def cmd_kappa_ihs(args, settings: Settings) -> Report:
    payload = _germs(args.problem)
    report = Report("kappa-ihs")
    report.add("kappa", kappa_ihs(payload["germs"], payload["rank"], payload["n"], settings.convention), KAPPA_IHS_SOURCE)
    report.add("rank", payload["rank"], "input")
    report.add("n", payload["n"], "input")
    report.add_table("germs", germ_rows(payload["germs"], [("mu", milnor, lambda g: MILNOR_SOURCES[type(g)])]))
    return report


def cmd_kappa_quadratic(args, settings: Settings) -> Report:
    problem = _problem(args.problem, "quadratic")
    config = parse_quadratic(problem.payload)
    report = Report("kappa-quadratic")
    kappa = kappa_quadratic(config, settings.order)
    alpha = alpha_eval([projectivized_normal_stratum(config)])
    report.add("kappa", kappa, KAPPA_QUADRATIC_SOURCE)
    report.add("alpha", alpha, ALPHA_SOURCE)
    if alpha != kappa:
        report.violation(f"kappa = alpha fails: {kappa} != {alpha}")
    poly = kappa_polynomial_in_m(config)
    report.add("kappaPolynomialInM", [c for c in reversed(poly.all_coeffs())], "exact interpolation in m, ascending powers")
    if "curve" in problem.payload:
        curve = problem.payload["curve"]
        closed = kappa_curve_closed_form(
            int(curve["genus"]),
            parse_rational(curve["degXi"], "degXi"),
            int(curve["rankXi"]),
            parse_rational(curve["degH"], "degH"),
            int(curve.get("m", 0)),
        )
        report.add("kappaClosedForm", closed, "2 kappa = -E(0) (deg xi(m) + r(xi)(g - 1))")
        if closed != kappa:
            report.violation(f"closed form {closed} differs from the integral {kappa}")
    return report


def cmd_kappa_semistable(args, settings: Settings) -> Report:
    data = _problem(args.problem, "semistable").payload
    alpha_f = parse_rational(data.get("alphaF", 0), "alphaF")
    beta = parse_rational(data.get("beta", 0), "beta")
    with malformed("semistable degMu"):
        deg_mu = int(data.get("degMu", 1))
    report = Report("kappa-semistable")
    kappa = kappa_semistable(alpha_f, beta, deg_mu)
    report.add("kappa", kappa, "kappa = (alpha_f + beta)/deg mu")
    if "alpha" in data:
        alpha = parse_rational(data["alpha"], "alpha")
        delta = delta_semistable(alpha, alpha_f, beta, deg_mu)
        report.add("delta", delta, "delta = (alpha_f + beta)/deg mu - alpha")
        if kappa_decomposition(alpha, delta) != kappa:
            report.violation("kappa = alpha + delta fails")
    return report


def cmd_exponents(args, settings: Settings) -> Report:
    problem = _problem(args.problem, "monodromy", "colength", "germs")
    report = Report("exponents")
    if problem.kind == "monodromy":
        spec = parse_monodromy(problem.payload)
        for q in range(spec.n + 1):
            report.add(f"exponents{q}", list(elementary_exponents(spec, q)), "angles of M_s on F^n H^{n+q}")
            report.add(f"delta{q}", delta_q(spec, q), "sum of elementary exponents in degree q")
        report.add("epsilon", epsilon_pi(spec), "alternating sum of delta_q")
    elif problem.kind == "colength":
        report.add("delta", delta_from_colength(parse_colength(problem.payload)), "sum (-1)^q colength_q / deg mu")
    else:
        germs = problem.payload["germs"]
        rows = germ_rows(germs, [("delta0", lambda g: delta_q(vanishing_monodromy_spec(g), 0), "vanishing monodromy")])
        report.add_table("germs", rows)
        for row, g in zip(rows, germs):
            if row["delta0"].value != spectral_genus(g):
                report.violation(f"germ {row['index'].value}: delta_0 differs from the spectral genus")
    return report


def _samples(args) -> tuple[list[asymptotics.Sample], bool, str]:
    if args.problem.suffix.lower() == ".csv":
        return asymptotics.read_samples(args.problem), args.with_c, args.model or "asymptotic"
    problem = _problem(args.problem, "fit")
    data = problem.payload
    samples = asymptotics.read_samples(problem.resolve(str(require(data, "csv", "fit"))))
    model = args.model or data.get("model", "asymptotic")
    if model not in FIT_MODELS:
        raise InputError(f"unknown fit model {model!r}, expected one of {FIT_MODELS}")
    return samples, args.with_c or bool(data.get("withC", False)), model


def cmd_fit(args, settings: Settings) -> Report:
    samples, with_c, model = _samples(args)
    report = Report("fit")
    report.add("samples", len(samples), "input")
    if model == "log-power":
        result = asymptotics.fit_log_power(samples, settings.tolerance)
        source = "least squares of log ratio over {log log r^-1, 1}"
        report.add("coefficient", result.coefficient, source)
        report.add("rho", result.exponent, source)
        report.add("rhoRounded", result.exponent_rounded, "nearest integer")
    else:
        result = asymptotics.fit(samples, with_c, settings.tolerance)
        report.add("kappa", result.model.kappa, FIT_SOURCE)
        report.add("rho", result.model.rho, FIT_SOURCE)
        report.add("gamma", result.model.gamma, FIT_SOURCE)
        report.add("c", result.model.c, FIT_SOURCE if with_c else "fixed at 0")
        report.add("rhoRounded", result.rho_rounded, "nearest integer")
        report.add("rhoIsIntegral", result.rho_is_integral, f"|rho - rhoRounded| <= {settings.tolerance}")
    report.add("residualRMS", result.residual_rms, "root mean square of the residuals")
    report.add("conditioning", result.conditioning, "condition number of the column-scaled normal system")
    return report


def cmd_bt_fit(args, settings: Settings) -> Report:
    data = _problem(args.problem, "bt").payload
    report = Report("bt-fit")
    with malformed("bt tolerance"):
        tolerance = float(data.get("tolerance", 1e-6))
    det_samples = None
    degree = data.get("degree")
    if "detSamples" in data:
        with malformed("bt detSamples"):
            det_samples = [(float(r), float(v)) for r, v in data["detSamples"]]
    elif "expansion" in data:
        expansion = parse_bt_expansion(data["expansion"])
        grid = parse_grid(data.get("grid", {"rMin": 1e-6, "rMax": 0.5}))
        composed = [(t, asymptotics.bt_compose(expansion, t)) for t in grid]
        decomposition = asymptotics.dh_decompose(composed, expansion.exponents)
        error = max(
            float(np.max(np.abs(h - asymptotics.bt_eval(expansion, t))) / max(1.0, np.max(np.abs(asymptotics.bt_eval(expansion, t)))))
            for t, h in zip(grid, decomposition.tilde)
        )
        report.add("roundTripError", error, "max relative |D^-1 (D H~ D-bar) D-bar^-1 - H~|")
        if error > 1e-9:
            report.violation(f"decomposition does not invert composition (error {error:.3e})")
        report.add("minEigenvalue", decomposition.min_eigenvalue, "smallest eigenvalue of H~ on the grid")
        det_samples = [(abs(t), float(np.linalg.det(h).real)) for t, h in zip(grid, decomposition.tilde)]
        degree = expansion.size * expansion.degree if degree is None else degree
    elif "samples" in data:
        with malformed("bt exponents"):
            exponents = tuple(int(e) for e in require(data, "exponents", "bt"))
        with malformed("bt samples"):
            samples = [
                (parse_complex(require(row, "t", "sample")), parse_matrix(require(row, "h", "sample")))
                for row in require(data, "samples", "bt")
            ]
        decomposition = asymptotics.dh_decompose(samples, exponents)
        report.add("minEigenvalue", decomposition.min_eigenvalue, "smallest eigenvalue of H~ on the grid")
        if degree is not None:
            det_samples = [(abs(t), float(np.linalg.det(h).real)) for (t, _), h in zip(samples, decomposition.tilde)]
    else:
        raise InputError("a bt payload needs detSamples, expansion or samples")
    if det_samples is not None:
        if degree is None:
            raise InputError("determinant fitting needs a degree")
        with malformed("bt degree"):
            degree = int(degree)
        result = asymptotics.bt_det_fit(det_samples, degree)
        report.add("coefficients", list(result.coefficients), "least squares of det H~ over powers of log|t|^-2")
        report.add("rho", asymptotics.rho_from_coefficients(result.coefficients, tolerance), f"max m with |a_m| > {tolerance}")
        report.add("residualRMS", result.residual_rms, "root mean square of the residuals")
        report.add("conditioning", result.conditioning, "condition number of the column-scaled normal system")
    return report


def cmd_curvature_check(args, settings: Settings) -> Report:
    data = _problem(args.problem, "curvature").payload
    terms = parse_curvature_terms(require(data, "terms", "curvature"))
    with malformed("curvature envelopeBound"):
        bound = float(data.get("envelopeBound", asymptotics.CURVATURE_ENVELOPE_BOUND))
    result = asymptotics.curvature_check(terms, parse_grid(require(data, "grid", "curvature")), bound)
    source = "central differences of log g, step |t|/100, one Richardson step"
    report = Report("curvature-check")
    report.add("leadingPower", result.leading_power, "largest l_i with phi_i(0) != 0")
    report.add("points", result.points, "grid")
    report.add("maxRelativeError", result.max_relative_error, f"{source} against -l/(4|t|^2 (log|t|^-1)^2)")
    report.add("envelope", result.envelope, "sup |remainder| |t|^2 (log|t|^-1)^3")
    report.add("envelopeBound", result.envelope_bound, "input" if "envelopeBound" in data else "default")
    report.add("withinEnvelope", result.within_envelope, "envelope <= envelopeBound")
    report.add("poincare", result.poincare, "sup |d d-bar log g| |t|^2 (log|t|^-1)^2")
    if not result.within_envelope:
        report.violation(f"curvature remainder envelope {result.envelope:.6g} exceeds {result.envelope_bound:.6g}")
    return report


def cmd_elliptic_verify(args, settings: Settings) -> Report:
    report = Report("elliptic-verify")
    tau = 1j
    checks = {
        "etaAtI": abs(elliptic.eta(tau) - complex(elliptic.eta_i_closed_form())),
        "etaTranslation": abs(elliptic.eta(tau + 1) - cmath.exp(1j * math.pi / 12) * elliptic.eta(tau)),
        "etaInversion": abs(elliptic.eta(-1 / (2j)) - cmath.sqrt(-1j * 2j) * elliptic.eta(2j)),
    }
    for name, error in checks.items():
        report.add(name, error, "q-product against the modular identity")
        if error > ETA_TOLERANCE:
            report.violation(f"{name}: error {error:.3e}")
    report.add("etaI", elliptic.eta(tau).real, "q-product")
    invariance = max(
        abs(elliptic.torus_log_det_unit_area(-1 / t) - elliptic.torus_log_det_unit_area(t)) for t in (2j, 0.3 + 1.1j)
    )
    report.add("unitAreaInversionError", invariance, "log Im tau + 4 log|eta| under tau -> -1/tau")
    if invariance > MODULAR_TOLERANCE:
        report.violation(f"unit-area determinant not modular invariant (error {invariance:.3e})")
    report.add("logDetAtI", elliptic.torus_log_det(tau), "2 log Im tau + 4 log|eta(tau)|")

    grid = elliptic.node_tate_grid(args.im_tau_min, args.im_tau_max, args.count)
    samples = elliptic.sample_family_log(elliptic.NodeTate(), grid)
    if args.csv is not None:
        asymptotics.write_samples(args.csv, samples)
    result = asymptotics.fit(samples, tolerance=settings.tolerance)
    report.add("kappa", result.model.kappa, f"{FIT_SOURCE} on the node family")
    report.add("rho", result.model.rho, f"{FIT_SOURCE} on the node family")
    report.add("rhoRounded", result.rho_rounded, "nearest integer")
    report.add("residualRMS", result.residual_rms, "root mean square of the residuals")
    if abs(result.model.kappa - NODE_KAPPA) > NODE_KAPPA_TOLERANCE:
        report.violation(f"node family kappa {result.model.kappa:.6f} is not -1/12")
    if result.rho_rounded != NODE_RHO:
        report.violation(f"node family rho rounds to {result.rho_rounded}, expected {NODE_RHO}")
    report.note("flat unit metric; the induced-metric value -1/6 per node is not expected here")
    return report


def cmd_corpus_check(args, settings: Settings) -> Report:
    report = Report("corpus-check")
    corpus = load_corpus(settings.corpus_dir)
    result = corpus_check(corpus)
    report.add("checked", result.checked, "entries in the corpus")
    report.add("diffs", len(result.diffs), "entries with at least one mismatch")
    if not corpus.germs and not corpus.configs:
        report.note("corpus is empty")
    for diff in result.diffs:
        report.violation(f"{diff.entry}: " + "; ".join(diff.mismatches))
    return report


COMMANDS = {
    "milnor": cmd_milnor,
    "spectrum": cmd_spectrum,
    "spectral-genus": cmd_spectral_genus,
    "kappa-ihs": cmd_kappa_ihs,
    "kappa-quadratic": cmd_kappa_quadratic,
    "kappa-semistable": cmd_kappa_semistable,
    "exponents": cmd_exponents,
    "fit": cmd_fit,
    "bt-fit": cmd_bt_fit,
    "curvature-check": cmd_curvature_check,
    "elliptic-verify": cmd_elliptic_verify,
    "corpus-check": cmd_corpus_check,
}


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    """Run one subcommand; 0 on success, 2 on input errors, 3 on invariant violations"""
    try:
        args = _parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    _configure_logging(args.verbose)
    try:
        settings = Settings.from_args(args)
        report = COMMANDS[args.command](args, settings)
        text = report.write(settings.output)
    except InvariantViolation as e:
        logger.error("%s", e)
        return e.exit_code
    except TorsionError as e:
        logger.error("%s", e)
        return e.exit_code
    except OSError as e:
        logger.error("%s", e)
        return InputError.exit_code
    if settings.output is None:
        sys.stdout.write(text)
    if report.violations:
        for violation in report.violations:
            logger.error("%s", violation)
        return InvariantViolation.exit_code
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
