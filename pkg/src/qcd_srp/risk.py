"""Closed-form performance metrics and the minimax gap analysis.

All quantities are per unit time of the observed process: the mean time to
false alarm of the statistic started at x is A - x; the post-change delay
from headstart x is (2/mu^2)[F(2/(mu^2 A)) - F(2/(mu^2 x))]; the optimal
generalized-Bayes delay risk B(T) is an explicit one-dimensional integral;
and the randomized-start procedure's delay risk admits two independent
representations whose agreement is the strongest internal consistency check
of the whole evaluator chain.
"""

import logging
import math
from dataclasses import dataclass

from . import qsd, specfun
from .numerics import (NoSignChangeError, Tolerance, find_root_bracketed,
                       integrate_adaptive)
from .qsd import EigenPair, Model, QsdEval

logger = logging.getLogger(__name__)

# |lambda_{A_T} * T - 1| achieved by threshold calibration.
CALIBRATION_TOL = 1e-8

_DEFAULT_QUAD = Tolerance(rel=1e-9, abs=1e-13, max_iter=20_000)


@dataclass(frozen=True)
class RiskReport:
    """Per-T record of the calibrated threshold, bound, risk, and gap."""

    model: Model
    T: float
    A_T: float
    lam: float
    B: float
    C: float
    gap: float
    gap_bound: float

    def __post_init__(self):
        mu = abs(self.model.mu)
        if not (self.T - 1e-9 * self.T <= self.A_T
                <= self.T + math.sqrt(self.T) / mu + 1e-9 * self.T):
            raise ValueError(
                f"A_T={self.A_T!r} outside [T, T + sqrt(T)/|mu|] for T={self.T!r}")
        if abs(self.lam * self.T - 1.0) > 10.0 * CALIBRATION_TOL:
            raise ValueError(
                f"calibration residual {self.lam * self.T - 1.0!r} too large")
        if not (-1e-8 <= self.gap <= self.gap_bound + 1e-8):
            raise ValueError(
                f"gap {self.gap!r} violates [0, {self.gap_bound!r}] within tolerance")


def arl_gsr(A: float, x: float) -> float:
    """Mean time to alarm under the no-change measure: A - x."""
    if not (A > 0.0 and 0.0 <= x <= A):
        raise ValueError(f"need 0 <= x <= A with A > 0, got A={A!r}, x={x!r}")
    return A - x


def add0_gsr(model: Model, A: float, x: float) -> float:
    """Immediate-change mean delay (2/mu^2)[F(2/(mu^2 A)) - F(2/(mu^2 x))].

    The x = 0 case takes the limit F(inf) = 0.
    """
    if not (A > 0.0 and 0.0 <= x <= A):
        raise ValueError(f"need 0 <= x <= A with A > 0, got A={A!r}, x={x!r}")
    mu2 = model.mu2
    fa = specfun.f_func(2.0 / (mu2 * A))
    fx = 0.0 if x == 0.0 else specfun.f_func(2.0 / (mu2 * x))
    return (2.0 / mu2) * (fa - fx)


def lower_bound_B(model: Model, T: float, tol: Tolerance = _DEFAULT_QUAD) -> float:
    """Optimal generalized-Bayes delay risk at false-alarm constraint T.

    B(T) = (2/mu^2) { F(2/(mu^2 T)) - 1 + (2/(mu^2 T)) int_0^T F(2/(mu^2 x)) dx/x }.
    The integrand tends to mu^2/2 as x -> 0+, so the integral is proper.
    """
    if not (T > 0.0 and math.isfinite(T)):
        raise ValueError(f"T must be finite positive, got {T!r}")
    mu2 = model.mu2

    def integrand(x):
        return specfun.f_func(2.0 / (mu2 * x)) / x

    tail = integrate_adaptive(integrand, 0.0, T, tol)
    b = (2.0 / mu2) * (specfun.f_func(2.0 / (mu2 * T)) - 1.0 + (2.0 / (mu2 * T)) * tail)
    return b if b > 0.0 else 0.0


def b_tail_term(model: Model, T: float, tol: Tolerance = _DEFAULT_QUAD) -> float:
    """The nonnegative integral term (2/(mu^2 T)) int_0^T F(2/(mu^2 x)) dx/x."""
    mu2 = model.mu2
    tail = integrate_adaptive(lambda x: specfun.f_func(2.0 / (mu2 * x)) / x, 0.0, T, tol)
    return (2.0 / (mu2 * T)) * tail


def calibrate_threshold(model: Model, T: float,
                        tol: Tolerance | None = None) -> EigenPair:
    """Threshold A_T in [T, T + sqrt(T)/|mu|] with lambda_{A_T} = 1/T.

    Scan-then-bisect: monotonicity of lambda_A in A is not assumed.  If the
    scan sees several sign changes the smallest A (most conservative
    threshold) is used and a warning is logged.
    """
    if not (T > 0.0 and math.isfinite(T)):
        raise ValueError(f"T must be finite positive, got {T!r}")
    lo = T
    hi = T + math.sqrt(T) / abs(model.mu)
    cache: dict[float, float] = {}

    def g(A):
        if A not in cache:
            cache[A] = qsd.solve_lambda(model, A).lam * T - 1.0
        return cache[A]

    n_scan = 16
    xs = [lo + (hi - lo) * i / n_scan for i in range(n_scan + 1)]
    fs = [g(x) for x in xs]
    brackets = []
    for i in range(n_scan):
        if fs[i] == 0.0:
            brackets.append((xs[i], xs[i]))
        elif (fs[i] > 0.0) != (fs[i + 1] > 0.0):
            brackets.append((xs[i], xs[i + 1]))
    if fs[-1] == 0.0:
        brackets.append((xs[-1], xs[-1]))
    if not brackets:
        raise NoSignChangeError(
            f"calibration found no sign change on [{lo!r}, {hi!r}] for "
            f"mu={model.mu!r}, T={T!r}; endpoint residuals {fs[0]!r}, {fs[-1]!r}")
    if len(brackets) > 1:
        logger.warning("calibration for mu=%r, T=%r saw %d sign changes; "
                       "using the smallest threshold", model.mu, T, len(brackets))
    a, b = brackets[0]
    if a == b:
        A_T = a
    else:
        if tol is None:
            tol = Tolerance(rel=1e-13, abs=1e-10 * T, max_iter=300)
        A_T = find_root_bracketed(g, a, b, tol)
    pair = qsd.solve_lambda(model, A_T)
    residual = pair.lam * T - 1.0
    if abs(residual) > CALIBRATION_TOL:
        raise RuntimeError(
            f"calibration residual {residual!r} exceeds {CALIBRATION_TOL} "
            f"for mu={model.mu!r}, T={T!r}")
    return pair


def srp_delay(model: Model, e: EigenPair, tol: Tolerance = _DEFAULT_QUAD) -> float:
    """Randomized-start delay risk via the integration-by-parts form:

    (2/mu^2) { F(2/(mu^2 A)) - 1 + (2 lam/mu^2) int_0^A F(2/(mu^2 x)) Q_A(x) dx/x }.
    """
    mu2 = model.mu2
    q = QsdEval(e)
    cutoff = e.A * qsd.PDF_CUTOFF

    def integrand(x):
        if x <= cutoff:
            return 0.0
        return specfun.f_func(2.0 / (mu2 * x)) * qsd.qsd_cdf(q, x) / x

    integral = integrate_adaptive(integrand, 0.0, e.A, tol)
    fa = specfun.f_func(2.0 / (mu2 * e.A))
    return (2.0 / mu2) * (fa - 1.0 + (2.0 * e.lam / mu2) * integral)


def srp_delay_direct(model: Model, e: EigenPair,
                     tol: Tolerance = _DEFAULT_QUAD) -> float:
    """Randomized-start delay risk via direct averaging of the headstart
    delay against the quasi-stationary density (the independent route)."""
    q = QsdEval(e)
    cutoff = e.A * qsd.PDF_CUTOFF

    def integrand(x):
        if x <= cutoff:
            return 0.0
        return add0_gsr(model, e.A, x) * qsd.qsd_pdf(q, x)

    return integrate_adaptive(integrand, 0.0, e.A, tol)


def gap_bound_terms(model: Model, T: float):
    """Analytic upper bounds for the two pieces of the delay-risk gap."""
    j1 = 1.0 / (abs(model.mu) * math.sqrt(T))
    j2 = (1.0 + j1) * j1
    return j1, j2


def optimality_gap(model: Model, T: float,
                   tol: Tolerance = _DEFAULT_QUAD) -> RiskReport:
    """Calibrate A_T, compute bound B, risk C, their gap, and its bound."""
    pair = calibrate_threshold(model, T)
    b = lower_bound_B(model, T, tol)
    c = srp_delay(model, pair, tol)
    j1, j2 = gap_bound_terms(model, T)
    return RiskReport(model=model, T=T, A_T=pair.A, lam=pair.lam,
                      B=b, C=c, gap=c - b,
                      gap_bound=(2.0 / model.mu2) * (j1 + j2))
