"""Pure-Python fallback for the hot numeric kernels.

This module mirrors the compiled extension ``qcd_srp._kernels``.  The SDE
recursions below perform the same elementwise floating-point operations in
the same order as the C loops (the extension is built with FP contraction
disabled), and both backends consume identical precomputed ``exp`` blocks,
so a fixed configuration yields the same trajectories on either backend.
"""

import math

import numpy as np

BACKEND_NAME = "python"

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_STEP_BUDGET = 2

_EPS = 2.220446049250313e-16

# Dormand-Prince 5(4) embedded pair.
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)


def _rhs(scaled: bool, k: float, xi2: float, z: float, y0: float, y1: float):
    # Coefficient of the confluent second-order equation at z.  The scaled
    # form propagates u = exp(z/2) * w, which stays O(z^k) at large z.
    c = k / z + (1.0 - xi2) / (4.0 * z * z)
    if scaled:
        return y1, y1 - c * y0
    return y1, (0.25 - c) * y0


def march_ode(scaled, k, xi2, z_from, z_to, y0, y1, rtol, atol, max_steps):
    """Adaptive Dormand-Prince march of the (optionally scaled) equation.

    Returns ``(y, dy, status, steps)`` with status 0 on success, 1 on step
    underflow near z -> 0+, and 2 when the step budget is exhausted.
    """
    if z_from == z_to:
        return y0, y1, STATUS_OK, 0
    kk = float(k)
    direction = 1.0 if z_to > z_from else -1.0
    z = z_from
    h = direction * min(abs(z_to - z_from), 0.1 + 0.02 * abs(z_from))
    steps = 0
    f0, f1 = _rhs(scaled, kk, xi2, z, y0, y1)
    while (z_to - z) * direction > 0.0:
        if steps >= max_steps:
            return y0, y1, STATUS_STEP_BUDGET, steps
        if abs(h) < 4.0 * _EPS * abs(z):
            return y0, y1, STATUS_STEP_UNDERFLOW, steps
        if (z + h - z_to) * direction > 0.0:
            h = z_to - z

        k1_0, k1_1 = f0, f1
        w0 = y0 + h * (_A21 * k1_0)
        w1 = y1 + h * (_A21 * k1_1)
        k2_0, k2_1 = _rhs(scaled, kk, xi2, z + _C2 * h, w0, w1)
        w0 = y0 + h * (_A31 * k1_0 + _A32 * k2_0)
        w1 = y1 + h * (_A31 * k1_1 + _A32 * k2_1)
        k3_0, k3_1 = _rhs(scaled, kk, xi2, z + _C3 * h, w0, w1)
        w0 = y0 + h * (_A41 * k1_0 + _A42 * k2_0 + _A43 * k3_0)
        w1 = y1 + h * (_A41 * k1_1 + _A42 * k2_1 + _A43 * k3_1)
        k4_0, k4_1 = _rhs(scaled, kk, xi2, z + _C4 * h, w0, w1)
        w0 = y0 + h * (_A51 * k1_0 + _A52 * k2_0 + _A53 * k3_0 + _A54 * k4_0)
        w1 = y1 + h * (_A51 * k1_1 + _A52 * k2_1 + _A53 * k3_1 + _A54 * k4_1)
        k5_0, k5_1 = _rhs(scaled, kk, xi2, z + _C5 * h, w0, w1)
        w0 = y0 + h * (_A61 * k1_0 + _A62 * k2_0 + _A63 * k3_0
                       + _A64 * k4_0 + _A65 * k5_0)
        w1 = y1 + h * (_A61 * k1_1 + _A62 * k2_1 + _A63 * k3_1
                       + _A64 * k4_1 + _A65 * k5_1)
        k6_0, k6_1 = _rhs(scaled, kk, xi2, z + h, w0, w1)
        y5_0 = y0 + h * (_B1 * k1_0 + _B3 * k3_0 + _B4 * k4_0
                         + _B5 * k5_0 + _B6 * k6_0)
        y5_1 = y1 + h * (_B1 * k1_1 + _B3 * k3_1 + _B4 * k4_1
                         + _B5 * k5_1 + _B6 * k6_1)
        k7_0, k7_1 = _rhs(scaled, kk, xi2, z + h, y5_0, y5_1)
        e0 = h * (_E1 * k1_0 + _E3 * k3_0 + _E4 * k4_0 + _E5 * k5_0
                  + _E6 * k6_0 + _E7 * k7_0)
        e1 = h * (_E1 * k1_1 + _E3 * k3_1 + _E4 * k4_1 + _E5 * k5_1
                  + _E6 * k6_1 + _E7 * k7_1)
        sc0 = atol + rtol * max(abs(y0), abs(y5_0))
        sc1 = atol + rtol * max(abs(y1), abs(y5_1))
        err = math.sqrt(0.5 * ((e0 / sc0) ** 2 + (e1 / sc1) ** 2))
        if err <= 1.0:
            z += h
            y0, y1 = y5_0, y5_1
            f0, f1 = k7_0, k7_1  # FSAL
            steps += 1
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            fac = max(0.1, 0.9 * err ** -0.2)
        h *= fac
    return y0, y1, STATUS_OK, steps


def gsr_advance(psi, rho, h2, a, crossed):
    """Advance detection-statistic paths through one block of steps.

    ``psi``: in-place compact state vector of the still-running paths.
    ``rho``: per-path, per-step multiplicative increments, shape (n, m).
    ``crossed[i]``: local step index at which path i first reached ``a``
    (state frozen there), or -1 if it survived the whole block.
    """
    n, m = rho.shape
    crossed.fill(-1)
    alive = np.arange(n)
    for j in range(m):
        r = rho[alive, j]
        p = r * psi[alive] + h2 * (r + 1.0)
        assert (p >= 0.0).all()
        psi[alive] = p
        hit = p >= a
        if hit.any():
            stopped = alive[hit]
            crossed[stopped] = j
            alive = alive[~hit]
            if alive.size == 0:
                break


def fv_advance(psi, rho_sm, j0, h2, a):
    """Advance all particles from step ``j0`` until a step absorbs someone.

    ``rho_sm`` is step-major, shape (m, n).  Returns the index of the step
    after which at least one particle sits at or above ``a`` (that step has
    been applied), or m when the block completed without absorptions.
    """
    m = rho_sm.shape[0]
    for j in range(j0, m):
        r = rho_sm[j]
        psi[:] = r * psi + h2 * (r + 1.0)
        assert (psi >= 0.0).all()
        if (psi >= a).any():
            return j
    return m
