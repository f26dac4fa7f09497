"""Monte Carlo oracle: simulate the detection statistic to threshold.

The statistic solves d psi = dt + mu psi dX with X a Brownian motion that
gains drift mu after the change-point.  Paths are advanced through the
exact solution representation psi_t = L_t (x + int_0^t L_s^{-1} ds) with
L_t = exp(mu X_t - mu^2 t / 2), written as the positivity-preserving
recursion over one grid step of size h:

    psi_{k+1} = rho_k psi_k + (h/2)(rho_k + 1),
    rho_k     = exp(mu dX_k - mu^2 h / 2),

which samples the multiplicative increments rho_k exactly (lognormal) and
applies the trapezoid rule to the time integral.  The boundary is checked
at grid points only, so passage times are biased high by O(sqrt(h)).

Reproducibility: path i draws from a counter-based stream keyed by
(seed, i); a randomized headstart consumes one dedicated uniform from the
path's stream before any Gaussian increments.  Results are independent of
block sizes and of how paths are scheduled.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import _backend, qsd, specfun
from .qsd import EigenPair, Model, QsdEval

QSD_HEADSTART = "qsd"

_BLOCK_PASSAGE = 512
_BLOCK_FV = 1024
_RESAMPLE_STREAM_INDEX = 2 ** 63
_CDF_TABLE_SIZE = 2049


class SimulationConfigError(ValueError):
    """Invalid simulation configuration."""


class InsufficientSurvivorsError(RuntimeError):
    """Too few paths survive past the change-point to condition on."""


class ExtinctionError(RuntimeError):
    """Every particle was absorbed within a single step."""


class ExcessiveCensoringWarning(UserWarning):
    """More than 1% of paths were still running at t_max."""


@dataclass(frozen=True)
class SimConfig:
    """Configuration of one simulation run.

    ``headstart`` is either a fixed value in [0, A] or the string "qsd" for
    a headstart drawn from the quasi-stationary law.  ``theta`` is the
    change-point (math.inf = the change never happens).  ``t_max`` caps the
    simulated horizon; None resolves to 50 A past the change-point, which
    keeps censoring negligible for false-alarm runs.
    """

    model: Model
    A: float
    headstart: float | str = 0.0
    theta: float = math.inf
    step: float = 1e-3
    n_paths: int = 10_000
    seed: int = 0
    t_max: float | None = None

    def __post_init__(self):
        if not (self.A > 0.0 and math.isfinite(self.A)):
            raise SimulationConfigError(f"A must be finite positive, got {self.A!r}")
        if not (self.step > 0.0 and math.isfinite(self.step)):
            raise SimulationConfigError(f"step must be positive, got {self.step!r}")
        if self.n_paths < 100:
            raise SimulationConfigError(
                f"n_paths must be at least 100, got {self.n_paths!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise SimulationConfigError(
                f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        if not (self.theta >= 0.0):
            raise SimulationConfigError(f"theta must be >= 0, got {self.theta!r}")
        if isinstance(self.headstart, str):
            if self.headstart != QSD_HEADSTART:
                raise SimulationConfigError(
                    f"headstart must be a value in [0, A] or {QSD_HEADSTART!r}")
        elif not (0.0 <= self.headstart <= self.A):
            raise SimulationConfigError(
                f"headstart {self.headstart!r} outside [0, {self.A!r}]")
        if self.t_max is not None and self.t_max < 10.0 * self.A:
            raise SimulationConfigError(
                f"t_max must be at least 10 A, got {self.t_max!r}")
        if self.step > self.A / 100.0:
            warnings.warn(f"step {self.step!r} exceeds the recommended A/100",
                          stacklevel=2)

    def resolved_t_max(self) -> float:
        if self.t_max is not None:
            return self.t_max
        extra = self.theta if math.isfinite(self.theta) else 0.0
        return 50.0 * self.A + extra


@dataclass(frozen=True)
class SimEstimate:
    """Point estimate with its standard error and censoring diagnostics."""

    mean: float
    std_err: float
    n_effective: int
    censored: int
    config: SimConfig


@dataclass(frozen=True)
class SrpResult:
    """Per-change-point estimates of the randomized-start procedure.

    ``estimates`` maps each requested change-point to a SimEstimate; the
    math.inf entry is the false-alarm time (unconditional), finite entries
    are delays conditional on surviving past the change-point.  ``cv`` is
    the coefficient of variation of the false-alarm sample (1 for an
    exponential law), None when math.inf was not requested.
    """

    estimates: dict = field(default_factory=dict)
    cv: float | None = None

    @property
    def false_alarm(self):
        return self.estimates.get(math.inf)


def _path_streams(seed, n):
    return [np.random.Generator(np.random.Philox(key=np.array([seed, i],
                                                              dtype=np.uint64)))
            for i in range(n)]


def _resample_stream(seed):
    key = np.array([seed, _RESAMPLE_STREAM_INDEX], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def inverse_cdf_table(q: QsdEval, n: int = _CDF_TABLE_SIZE):
    """(x grid, cdf grid) for fast inverse-cdf headstart sampling.

    Built from a single inward sweep of the scaled recessive solution over
    all grid arguments, then monotonized; interpolation error is far below
    the Monte Carlo resolution and is checked against the exact quantile
    routine in the test suite.
    """
    e = q.eigen
    mu2 = e.model.mu2
    xs = np.linspace(0.0, e.A, n)
    ys = 2.0 / (mu2 * xs[1:])
    us = np.asarray(specfun.whittaker_w_scaled_chain(0, e.xi2, ys))
    zA = e.z_threshold
    cdf = np.empty(n)
    cdf[0] = 0.0
    with np.errstate(under="ignore"):
        cdf[1:] = np.exp(zA - ys) * us / us[-1]
    cdf[-1] = 1.0
    np.clip(cdf, 0.0, 1.0, out=cdf)
    np.maximum.accumulate(cdf, out=cdf)
    return xs, cdf


def _headstarts(cfg: SimConfig, streams, table=None):
    if cfg.headstart == QSD_HEADSTART:
        if table is None:
            pair = qsd.solve_lambda(cfg.model, cfg.A)
            table = inverse_cdf_table(QsdEval(pair))
        xs, cdf = table
        u = np.array([g.random() for g in streams])
        return np.interp(u, cdf, xs)
    return np.full(cfg.n_paths, float(cfg.headstart))


def _simulate_passage_times(cfg: SimConfig, theta, table=None):
    """Grid passage times of every path; returns (times, n_censored).

    Censored paths contribute t_max as a lower bound on their passage time.
    """
    model = cfg.model
    mu, mu2, h = model.mu, model.mu2, cfg.step
    a = cfg.A
    n = cfg.n_paths
    max_steps = int(math.ceil(cfg.resolved_t_max() / h))
    if math.isinf(theta):
        drift_from = max_steps + 1
    else:
        # increments gain mean from the first grid point at or above theta
        drift_from = int(math.ceil(theta / h))
    streams = _path_streams(cfg.seed, n)
    psi = _headstarts(cfg, streams, table)

    kern = _backend.kernels
    times = np.full(n, np.nan)
    start_hit = psi >= a
    times[start_hit] = 0.0
    active = np.flatnonzero(~start_hit)
    psi_act = psi[active].copy()

    sqrt_h = math.sqrt(h)
    c_half = 0.5 * mu2 * h
    h2 = 0.5 * h
    step0 = 0
    while active.size and step0 < max_steps:
        m = min(_BLOCK_PASSAGE, max_steps - step0)
        z = np.empty((active.size, m))
        for r, i in enumerate(active):
            z[r] = streams[i].standard_normal(m)
        sidx = np.arange(step0, step0 + m)
        shift = np.where(sidx >= drift_from, mu2 * h - c_half, -c_half)
        rho = np.exp((mu * sqrt_h) * z + shift)
        crossed = np.empty(active.size, dtype=np.int64)
        kern.gsr_advance(psi_act, rho, h2, a, crossed)
        hit = crossed >= 0
        if hit.any():
            times[active[hit]] = (step0 + crossed[hit] + 1) * h
            keep = ~hit
            active = active[keep]
            psi_act = psi_act[keep].copy()
        step0 += m
    n_censored = active.size
    times[active] = max_steps * h
    return times, n_censored


def _estimate(values, cfg: SimConfig, censored: int) -> SimEstimate:
    n = len(values)
    mean = math.fsum(values) / n
    if n > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    else:
        var = 0.0
    return SimEstimate(mean=mean, std_err=math.sqrt(var / n),
                       n_effective=n, censored=censored, config=cfg)


def _warn_censoring(cfg: SimConfig, censored: int):
    if censored > 0.01 * cfg.n_paths:
        warnings.warn(
            f"{censored}/{cfg.n_paths} paths censored at t_max; passage "
            f"means are biased low by the t_max lower bound",
            ExcessiveCensoringWarning, stacklevel=3)


def simulate_gsr_passage(cfg: SimConfig) -> SimEstimate:
    """Mean first-passage time of the statistic to A under the configured
    change-point (theta = inf gives the false-alarm time, mean A - x)."""
    times, censored = _simulate_passage_times(cfg, cfg.theta)
    _warn_censoring(cfg, censored)
    return _estimate(times, cfg, censored)


def simulate_srp(cfg: SimConfig, thetas) -> SrpResult:
    """Randomized-headstart runs across several change-points.

    The same per-path streams are reused for every theta (common random
    numbers), which only tightens the pairwise delay comparisons.  For
    finite theta the estimate is the delay conditional on the procedure
    still running at theta; paths that alarmed earlier are discarded and
    reported through n_effective.
    """
    if cfg.headstart != QSD_HEADSTART:
        raise SimulationConfigError("simulate_srp requires the qsd headstart")
    pair = qsd.solve_lambda(cfg.model, cfg.A)
    table = inverse_cdf_table(QsdEval(pair))
    estimates = {}
    cv = None
    for theta in thetas:
        run_cfg = replace(cfg, theta=theta)
        times, censored = _simulate_passage_times(run_cfg, theta, table)
        _warn_censoring(run_cfg, censored)
        if math.isinf(theta):
            est = _estimate(times, run_cfg, censored)
            cv = (est.std_err * math.sqrt(est.n_effective) / est.mean
                  if est.mean > 0.0 else math.inf)
            estimates[theta] = est
        else:
            survivors = times[times >= theta] - theta
            if survivors.size < 100:
                raise InsufficientSurvivorsError(
                    f"only {survivors.size} paths survive past theta={theta!r}")
            estimates[theta] = _estimate(survivors, run_cfg, censored)
    return SrpResult(estimates=estimates, cv=cv)


def estimate_qsd_empirical(cfg: SimConfig) -> np.ndarray:
    """Empirical quasi-stationary sample via Fleming-Viot branching.

    ``n_paths`` particles start at the fixed headstart and evolve under the
    no-change measure; a particle hitting A restarts at the current
    position of a uniformly chosen surviving particle.  After a burn-in of
    5 A time units the sorted particle positions are returned; their
    empirical cdf approximates the quasi-stationary law.
    """
    if not math.isinf(cfg.theta):
        raise SimulationConfigError(
            "the quasi-stationary law is defined under theta = inf")
    if cfg.headstart == QSD_HEADSTART:
        raise SimulationConfigError(
            "the empirical estimator needs a fixed headstart")
    model = cfg.model
    mu, mu2, h = model.mu, model.mu2, cfg.step
    a = cfg.A
    n = cfg.n_paths
    steps = int(round(5.0 * a / h))
    streams = _path_streams(cfg.seed, n)
    rstream = _resample_stream(cfg.seed)
    kern = _backend.kernels

    psi = np.full(n, float(cfg.headstart))
    sqrt_h = math.sqrt(h)
    c_half = 0.5 * mu2 * h
    h2 = 0.5 * h
    done = 0
    while done < steps:
        m = min(_BLOCK_FV, steps - done)
        z = np.empty((n, m))
        for i, g in enumerate(streams):
            z[i] = g.standard_normal(m)
        rho_sm = np.ascontiguousarray(np.exp((mu * sqrt_h) * z - c_half).T)
        j = 0
        while j < m:
            j_stop = kern.fv_advance(psi, rho_sm, j, h2, a)
            if j_stop == m:
                break
            absorbed = np.flatnonzero(psi >= a)
            survivors = np.flatnonzero(psi < a)
            if survivors.size == 0:
                raise ExtinctionError(
                    f"all {n} particles absorbed at step {done + j_stop}; "
                    f"the step size {h!r} is too coarse for A={a!r}")
            u = rstream.random(absorbed.size)
            pick = np.minimum((u * survivors.size).astype(np.int64),
                              survivors.size - 1)
            psi[absorbed] = psi[survivors[pick]]
            j = j_stop + 1
        done += m
    return np.sort(psi)
