"""Special functions: the exponential integral E1, F(x) = exp(x) E1(x), and
the confluent second-order solution recessive at +infinity.

The recessive solution W[k, xi/2](z) is evaluated by seeding the divergent
large-argument expansion at a point z0 beyond the evaluation argument and
integrating the defining equation inward; inward marching is stable because
contamination by the dominant (growing) solution decays in that direction.
All arithmetic is real even when xi is purely imaginary: the equation and
the expansion coefficients depend on the second index only through xi^2.

Internally everything is propagated in the exponentially scaled form
u(z) = exp(z/2) W(z), which stays O(z^k) for large z and therefore never
under- or overflows on its own; the public evaluator reattaches exp(-z/2).
"""

import math
from dataclasses import dataclass

from . import _backend
from .numerics import AccuracyError, NonConvergenceError, StepUnderflowError

EULER_GAMMA = 0.5772156649015328606065

_E1_SWITCH = 1.5          # series below, continued fraction above
_SEED_TOL = 1e-11         # acceptable truncation error of the seed expansion
_SEED_MAX_TERMS = 400
_MARCH_RTOL = 1e-12


def _e1_series(x):
    # E1(x) = -gamma - ln x + sum_{n>=1} (-1)^(n+1) x^n / (n n!)
    s = 0.0
    term = 1.0
    for n in range(1, 80):
        term *= x / n
        contrib = term / n
        if n % 2 == 0:
            contrib = -contrib
        s += contrib
        if abs(contrib) < 1e-18 * max(1.0, abs(s)):
            break
    return -EULER_GAMMA - math.log(x) + s


def _f_cf(x):
    # Modified Lentz evaluation of the continued fraction for exp(x) E1(x):
    #   F(x) = 1 / (x + 1 - 1^2 / (x + 3 - 2^2 / (x + 5 - ...)))
    # No exponentials appear, so this is safe for arbitrarily large x.
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 300):
        an = -float(i) * float(i)
        b += 2.0
        d = an * d + b
        if d == 0.0:
            d = tiny
        c = b + an / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise AccuracyError(f"continued fraction for F did not converge at x={x!r}")


def _require_positive(x, name):
    if not (isinstance(x, (int, float)) and math.isfinite(x) and x > 0.0):
        raise ValueError(f"{name} must be a finite positive real, got {x!r}")


def exp_int_e1(x: float) -> float:
    """Exponential integral E1(x) = int_x^inf exp(-t)/t dt, for x > 0."""
    _require_positive(x, "x")
    if x <= _E1_SWITCH:
        return _e1_series(x)
    return math.exp(-x) * _f_cf(x)


def f_func(x: float) -> float:
    """F(x) = exp(x) E1(x), for x > 0; nonincreasing, 0 < F(x) <= 1/x."""
    _require_positive(x, "x")
    if x <= _E1_SWITCH:
        return math.exp(x) * _e1_series(x)
    return _f_cf(x)


@dataclass(frozen=True)
class WhittakerIndex:
    """First index k (0 or 1) and the square xi^2 of twice the second index.

    xi2 may be negative; the evaluated function is real either way.
    """

    k: int
    xi2: float

    def __post_init__(self):
        if self.k not in (0, 1):
            raise ValueError(f"k must be 0 or 1, got {self.k!r}")
        if not math.isfinite(self.xi2):
            raise ValueError(f"xi2 must be finite, got {self.xi2!r}")


def _seed_point(z, xi2):
    # The optimally truncated expansion needs z0 beyond ~|xi| to shake off
    # the parameter-dominated prefix of the series; 40 + 2|xi| keeps the
    # truncation error below ~1e-13 across all xi2 met in practice.
    return max(40.0 + 2.0 * math.sqrt(abs(xi2)), z)


def _asymptotic_seed(k, xi2, z0):
    """Seed values (u, u') at z0 from the large-z expansion of the scaled
    solution u(z) = z^k * sum_j c_j z^-j, truncated at its smallest term.

    For large |xi2| the term magnitudes first grow (an exp-like prefix),
    then decay, then diverge; the sum is rolled back to the global minimum
    term, whose size bounds the truncation error.
    """
    zinv = 1.0 / z0
    c = 1.0
    zp = 1.0
    s = 1.0
    t = float(k)
    best_s, best_t, best_mag = s, t, math.inf
    for j in range(1, _SEED_MAX_TERMS + 1):
        c *= (0.25 * xi2 - (k - j + 0.5) ** 2) / j
        zp *= zinv
        term = c * zp
        mag = abs(term)
        s += term
        t += (k - j) * term
        if mag <= 1e-17 * abs(s):
            best_s, best_t, best_mag = s, t, 0.0
            break
        if mag < best_mag:
            best_s, best_t, best_mag = s, t, mag
        elif mag > 1e280 or mag > 1e6 * best_mag:
            break  # sustained divergence: the recorded minimum is final
    s, t, tail = best_s, best_t, best_mag
    if abs(s) == 0.0 or tail > _SEED_TOL * abs(s):
        raise AccuracyError(
            f"seed expansion cannot reach {_SEED_TOL} at z0={z0!r} "
            f"(k={k}, xi2={xi2!r}); estimated error {tail / max(abs(s), 1e-300):.2e}")
    u = z0 ** k * s
    du = z0 ** (k - 1) * t
    return u, du


def _march_scaled(k, xi2, z_from, z_to, u, du, rtol):
    y, dy, status, _ = _backend.kernels.march_ode(
        True, k, xi2, z_from, z_to, u, du, rtol, 1e-300, 2_000_000)
    if status == _backend.kernels.STATUS_STEP_UNDERFLOW:
        raise StepUnderflowError(
            f"step underflow marching to z={z_to!r} (k={k}, xi2={xi2!r})")
    if status == _backend.kernels.STATUS_STEP_BUDGET:
        raise NonConvergenceError(
            f"step budget exhausted marching to z={z_to!r} (k={k}, xi2={xi2!r})")
    return y, dy


def whittaker_w_scaled_pair(k, xi2, z, rtol=_MARCH_RTOL):
    """(u, u') at z for the scaled recessive solution u = exp(z/2) W."""
    _require_positive(z, "z")
    if k not in (0, 1):
        raise ValueError(f"k must be 0 or 1, got {k!r}")
    if not math.isfinite(xi2):
        raise ValueError(f"xi2 must be finite, got {xi2!r}")
    z0 = _seed_point(z, xi2)
    u, du = _asymptotic_seed(k, xi2, z0)
    if z0 == z:
        return u, du
    return _march_scaled(k, xi2, z0, z, u, du, rtol)


def whittaker_w_scaled(k, xi2, z, rtol=_MARCH_RTOL):
    """exp(z/2) W[k, xi/2](z); same zeros as W, no exponential decay."""
    return whittaker_w_scaled_pair(k, xi2, z, rtol)[0]


def whittaker_w_scaled_chain(k, xi2, zs, rtol=_MARCH_RTOL):
    """Scaled values at a decreasing sequence of arguments in one sweep.

    ``zs`` must be positive and nonincreasing.  One inward march visits all
    points, which is far cheaper than independent evaluations when many
    arguments are needed (grids, cdf tables).
    """
    out = []
    prev_z = None
    u = du = 0.0
    for z in zs:
        z = float(z)
        _require_positive(z, "z")
        if prev_z is not None and z > prev_z:
            raise ValueError("chain arguments must be nonincreasing")
        if prev_z is None:
            z0 = _seed_point(z, xi2)
            u, du = _asymptotic_seed(k, xi2, z0)
            if z0 > z:
                u, du = _march_scaled(k, xi2, z0, z, u, du, rtol)
        elif z < prev_z:
            u, du = _march_scaled(k, xi2, prev_z, z, u, du, rtol)
        out.append(u)
        prev_z = z
    return out


def whittaker_w(index: WhittakerIndex, z: float, rtol=_MARCH_RTOL) -> float:
    """W[k, xi/2](z): the solution recessive at +infinity of

        w'' + (-1/4 + k/z + (1 - xi^2)/(4 z^2)) w = 0.

    Underflows gracefully to 0.0 when exp(-z/2) is subnormal.
    """
    u = whittaker_w_scaled(index.k, index.xi2, z, rtol)
    return u * math.exp(-0.5 * z)
