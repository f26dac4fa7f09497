"""Quasi-stationary law of the detection statistic below its threshold.

For a threshold A the statistic, conditioned on never having alarmed, has a
limiting distribution on [0, A].  Its density and cdf are ratios of scaled
recessive confluent solutions; the decay rate lambda_A of the survival
probability is the smallest positive root of

    W[1, xi(lambda)/2](2 / (mu^2 A)) = 0,   xi(lambda)^2 = 1 - 8 lambda / mu^2,

and lies in the bracket [1/A, 1/A + (1 + sqrt(4 mu^2 A + 1)) / (2 mu^2 A^2)].
"""

import math
from dataclasses import dataclass

from . import specfun
from .numerics import (NoSignChangeError, Tolerance, find_root_bracketed,
                       scan_for_bracket)

# Below x = A * PDF_CUTOFF the density/cdf underflow double precision anyway
# (net decay exp(-2/(mu^2 x))); return exact zeros there.
PDF_CUTOFF = 1e-8


class EigenvalueSolveError(RuntimeError):
    """Raised when no root of the threshold equation is found in the bracket."""


@dataclass(frozen=True)
class Model:
    """Detection problem parameters: known post-change drift magnitude."""

    mu: float

    def __post_init__(self):
        if not (isinstance(self.mu, (int, float)) and math.isfinite(self.mu)
                and self.mu != 0.0):
            raise ValueError(f"mu must be a finite nonzero real, got {self.mu!r}")

    @property
    def mu2(self) -> float:
        return self.mu * self.mu


def lambda_bracket(model: Model, A: float):
    """Bracket [lo, hi] guaranteed to contain the decay rate lambda_A."""
    lo = 1.0 / A
    hi = lo + (1.0 + math.sqrt(4.0 * model.mu2 * A + 1.0)) / (2.0 * model.mu2 * A * A)
    return lo, hi


@dataclass(frozen=True)
class EigenPair:
    """Threshold A with its survival decay rate and derived xi^2."""

    model: Model
    A: float
    lam: float
    xi2: float

    def __post_init__(self):
        if not (self.A > 0.0 and math.isfinite(self.A)):
            raise ValueError(f"A must be finite positive, got {self.A!r}")
        lo, hi = lambda_bracket(self.model, self.A)
        slack = 1e-9 * (hi - lo)
        if not (lo - slack <= self.lam <= hi + slack):
            raise ValueError(
                f"lambda {self.lam!r} outside bracket [{lo!r}, {hi!r}]")
        expected = 1.0 - 8.0 * self.lam / self.model.mu2
        if abs(self.xi2 - expected) > 1e-12 * max(1.0, abs(expected)):
            raise ValueError(f"xi2 {self.xi2!r} inconsistent with lambda")

    @property
    def z_threshold(self) -> float:
        """Argument 2 / (mu^2 A) at which the threshold equation is imposed."""
        return 2.0 / (self.model.mu2 * self.A)


def solve_lambda(model: Model, A: float, tol: Tolerance | None = None) -> EigenPair:
    """Smallest positive root of the threshold equation, within the bracket.

    The bracket endpoints are tried first; when they do not straddle a sign
    change, a left-to-right scan over 64 subpanels locates the first one
    (the equation is not assumed monotone in lambda).
    """
    if not (A > 0.0 and math.isfinite(A)):
        raise ValueError(f"A must be finite positive, got {A!r}")
    if tol is None:
        # lambda enters downstream as 1/lambda, so resolve it to ~1e-12/A.
        tol = Tolerance(rel=1e-13, abs=1e-12 / A, max_iter=300)
    mu2 = model.mu2
    z = 2.0 / (mu2 * A)

    def g(lam):
        return specfun.whittaker_w_scaled(1, 1.0 - 8.0 * lam / mu2, z)

    lo, hi = lambda_bracket(model, A)
    try:
        lam = find_root_bracketed(g, lo, hi, tol)
    except NoSignChangeError:
        try:
            a, b = scan_for_bracket(g, lo, hi, n=64)
        except NoSignChangeError as exc:
            raise EigenvalueSolveError(
                f"no sign change of the threshold equation for mu={model.mu!r}, "
                f"A={A!r}: g(lo)={g(lo)!r}, g(hi)={g(hi)!r}") from exc
        lam = a if a == b else find_root_bracketed(g, a, b, tol)
    return EigenPair(model=model, A=A, lam=lam, xi2=1.0 - 8.0 * lam / mu2)


class QsdEval:
    """Evaluator for the quasi-stationary pdf/cdf of a given EigenPair.

    The normalizer exp(-1/(mu^2 A)) W[0, xi/2](2/(mu^2 A)) is computed once
    at construction; every pdf/cdf call reuses it.  Instances are immutable
    and safe for concurrent use.
    """

    def __init__(self, eigen: EigenPair, rtol: float = 1e-12):
        self.eigen = eigen
        self._rtol = rtol
        zA = eigen.z_threshold
        self._u0_zA = specfun.whittaker_w_scaled(0, eigen.xi2, zA, rtol)
        self.normalizer = math.exp(-zA) * self._u0_zA
        if not (self.normalizer > 0.0 and math.isfinite(self.normalizer)):
            raise ValueError(
                f"normalizer must be positive, got {self.normalizer!r} "
                f"(A={eigen.A!r}, lambda={eigen.lam!r})")

    def _y(self, x):
        return 2.0 / (self.eigen.model.mu2 * x)


def qsd_pdf(q: QsdEval, x: float) -> float:
    """Density q_A(x); zero outside [0, A], zero in the limit x -> 0+."""
    e = q.eigen
    if not (x > e.A * PDF_CUTOFF) or x > e.A:
        return 0.0
    y = q._y(x)
    zA = e.z_threshold
    u1 = specfun.whittaker_w_scaled(1, e.xi2, y, q._rtol)
    val = math.exp(zA - y) * u1 / (x * q._u0_zA)
    return val if val > 0.0 else 0.0


def qsd_cdf(q: QsdEval, x: float) -> float:
    """Distribution function Q_A(x); 0 for x <= 0, 1 for x >= A."""
    e = q.eigen
    if x >= e.A:
        return 1.0
    if not (x > e.A * PDF_CUTOFF):
        return 0.0
    y = q._y(x)
    zA = e.z_threshold
    u0 = specfun.whittaker_w_scaled(0, e.xi2, y, q._rtol)
    val = math.exp(zA - y) * u0 / q._u0_zA
    return min(1.0, max(0.0, val))


def qsd_mean(e: EigenPair) -> float:
    """Mean A - 1/lambda of the quasi-stationary law; lies in [0, A)."""
    return e.A - 1.0 / e.lam


def qsd_var(e: EigenPair) -> float:
    """Variance [lambda - mu^2 (A lambda - 1)^2] / [lambda^2 (mu^2 + lambda)]."""
    mu2 = e.model.mu2
    lam = e.lam
    v = (lam - mu2 * (e.A * lam - 1.0) ** 2) / (lam * lam * (mu2 + lam))
    return v if v > 0.0 else 0.0


def qsd_sample(q: QsdEval, u: float) -> float:
    """Quantile x with Q_A(x) = u, by bracketed root finding on [0, A]."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"u must lie in [0, 1], got {u!r}")
    A = q.eigen.A
    if u == 0.0:
        return 0.0
    if u == 1.0:
        return A
    return find_root_bracketed(
        lambda x: qsd_cdf(q, x) - u, 0.0, A,
        Tolerance(rel=1e-12, abs=1e-13 * A, max_iter=300))
