"""Tolerance-controlled root finding, adaptive quadrature, and ODE marching.

These are the generic numeric workhorses shared by the analytic modules.
Everything is deterministic: no randomized pivoting, fixed tie-breaking,
fixed subdivision order.
"""

import math
from dataclasses import dataclass

from . import _backend

_EPS = 2.220446049250313e-16


class NumericsError(RuntimeError):
    """Base class for numeric-routine failures."""


class NoSignChangeError(NumericsError):
    """The supplied bracket does not straddle a root."""


class NonConvergenceError(NumericsError):
    """Iteration budget exhausted before reaching tolerance."""


class SubdivisionLimitError(NumericsError):
    """Quadrature panel budget exhausted; ``partial`` holds the estimate."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class StepUnderflowError(NumericsError):
    """ODE step size collapsed (typically while approaching z -> 0+)."""


class AccuracyError(NumericsError):
    """Requested accuracy cannot be met by the chosen expansion."""


@dataclass(frozen=True)
class Tolerance:
    """Relative/absolute targets plus an iteration or subdivision budget."""

    rel: float = 1e-9
    abs: float = 1e-12
    max_iter: int = 10_000

    def __post_init__(self):
        if not (self.rel >= 1e-14 and math.isfinite(self.rel)):
            raise ValueError("rel tolerance must be finite and >= 1e-14")
        if not (self.abs >= 0.0 and math.isfinite(self.abs)):
            raise ValueError("abs tolerance must be finite and >= 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


ROOT_TOL = Tolerance(rel=1e-12, abs=1e-15, max_iter=200)
QUAD_TOL = Tolerance(rel=1e-9, abs=1e-12, max_iter=20_000)
MARCH_TOL = Tolerance(rel=1e-12, abs=1e-300, max_iter=2_000_000)


def find_root_bracketed(f, lo, hi, tol=ROOT_TOL):
    """Brent's method on [lo, hi]; requires f(lo) * f(hi) <= 0.

    Deterministic: interpolation falls back to the midpoint bisection step
    under the classical acceptance conditions.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    a, b = lo, hi
    fa, fb = f(a), f(b)
    if not (math.isfinite(fa) and math.isfinite(fb)):
        raise ValueError("f must be finite at the bracket endpoints")
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise NoSignChangeError(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={fa!r}, f(hi)={fb!r}")
    c, fc = a, fa
    d = e = b - a
    for _ in range(tol.max_iter):
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * max(tol.abs, tol.rel * abs(b))
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        if abs(d) > tol1:
            b += d
        else:
            b += tol1 if xm > 0.0 else -tol1
        fb = f(b)
    raise NonConvergenceError(f"no convergence in {tol.max_iter} iterations")


def scan_for_bracket(f, lo, hi, n=64):
    """Locate the leftmost sign change of f on [lo, hi] over n subpanels."""
    xs = [lo + (hi - lo) * i / n for i in range(n + 1)]
    fprev = f(xs[0])
    if fprev == 0.0:
        return xs[0], xs[0]
    for i in range(1, n + 1):
        fcur = f(xs[i])
        if fcur == 0.0:
            return xs[i], xs[i]
        if (fprev > 0.0) != (fcur > 0.0):
            return xs[i - 1], xs[i]
        fprev = fcur
    raise NoSignChangeError(f"no sign change found on [{lo!r}, {hi!r}] with {n} panels")


# Gauss-Kronrod 15(7) on [-1, 1]; Kronrod nodes/weights, with the embedded
# 7-point Gauss rule sitting on the odd-index nodes.
_XK = (0.991455371120813, 0.949107912342759, 0.864864423359769,
       0.741531185599394, 0.586087235467691, 0.405845151377397,
       0.207784955007898)
_WK = (0.022935322010529, 0.063092092629979, 0.104790010322250,
       0.140653259715525, 0.169004726639267, 0.190350578064785,
       0.204432940075298)
_WK0 = 0.209482141084728
_WG = (0.129484966168870, 0.279705391489277, 0.381830050505119)
_WG0 = 0.417959183673469


def _gk15(f, a, b):
    """Kronrod estimate and |K15 - G7| error gauge on [a, b]."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    k = _WK0 * fc
    g = _WG0 * fc
    for i in range(7):
        x = h * _XK[i]
        f1 = f(c - x)
        f2 = f(c + x)
        k += _WK[i] * (f1 + f2)
        if i % 2 == 1:
            g += _WG[i // 2] * (f1 + f2)
    return k * h, abs(k - g) * abs(h)


def integrate_adaptive(f, a, b, tol=QUAD_TOL):
    """Adaptive Gauss-Kronrod integration of f over [a, b].

    ``b`` may be ``math.inf``; the tail is mapped to [0, 1) through
    t = a + u / (1 - u).  Endpoints are never evaluated, so integrable
    endpoint singularities (e.g. log) are handled by subdivision.
    """
    if not a < b:
        raise ValueError("need a < b")
    if math.isinf(b):
        if math.isinf(a):
            raise ValueError("doubly infinite ranges are not supported")
        g = f
        a0 = a

        def f(u, _g=g, _a=a0):
            w = 1.0 - u
            return _g(_a + u / w) / (w * w)

        a, b = 0.0, 1.0

    whole, err = _gk15(f, a, b)
    budget = max(tol.abs, tol.rel * abs(whole))
    if err <= budget:
        return whole
    total = 0.0
    panels = 1
    stack = [(a, b, budget)]
    while stack:
        lo, hi, allowed = stack.pop()
        est, err = _gk15(f, lo, hi)
        panels += 1
        if err <= allowed or (hi - lo) <= _EPS * (abs(lo) + abs(hi)):
            total += est
            continue
        if panels >= tol.max_iter:
            partial = total + est + sum(_gk15(f, s[0], s[1])[0] for s in stack)
            raise SubdivisionLimitError(
                f"panel budget {tol.max_iter} exhausted", partial)
        mid = 0.5 * (lo + hi)
        half = 0.5 * allowed
        # Left half processed first (deterministic order).
        stack.append((mid, hi, half))
        stack.append((lo, mid, half))
    return total


def march_whittaker_ode(k, xi2, z_from, z_to, w0, dw0, tol=MARCH_TOL):
    """March w'' = (1/4 - k/z - (1 - xi2)/(4 z^2)) w from z_from down to z_to.

    Initial data (w0, dw0) is given at z_from; returns (w, w') at z_to.
    """
    if not (z_from > z_to > 0.0):
        raise ValueError("need z_from > z_to > 0")
    if k not in (0, 1):
        raise ValueError("k must be 0 or 1")
    y, dy, status, _ = _backend.kernels.march_ode(
        False, k, xi2, z_from, z_to, w0, dw0, tol.rel, tol.abs, tol.max_iter)
    if status == _backend.kernels.STATUS_STEP_UNDERFLOW:
        raise StepUnderflowError(f"step underflow near z={z_to!r}")
    if status == _backend.kernels.STATUS_STEP_BUDGET:
        raise NonConvergenceError(f"step budget {tol.max_iter} exhausted")
    return y, dy
