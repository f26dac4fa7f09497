# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels: ODE marching and SDE path recursions.

Mirror of qcd_srp._kernels_py; see that module for the contracts.  Built
with FP contraction off so the arithmetic matches the NumPy fallback
operation for operation.
"""

from libc.math cimport fabs, sqrt, pow
from libc.stdint cimport int64_t

BACKEND_NAME = "compiled"

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_STEP_BUDGET = 2

cdef int _ST_OK = 0
cdef int _ST_UNDERFLOW = 1
cdef int _ST_BUDGET = 2

cdef double _EPS = 2.220446049250313e-16

cdef double _C2 = 1.0 / 5.0, _C3 = 3.0 / 10.0, _C4 = 4.0 / 5.0, _C5 = 8.0 / 9.0
cdef double _A21 = 1.0 / 5.0
cdef double _A31 = 3.0 / 40.0, _A32 = 9.0 / 40.0
cdef double _A41 = 44.0 / 45.0, _A42 = -56.0 / 15.0, _A43 = 32.0 / 9.0
cdef double _A51 = 19372.0 / 6561.0, _A52 = -25360.0 / 2187.0
cdef double _A53 = 64448.0 / 6561.0, _A54 = -212.0 / 729.0
cdef double _A61 = 9017.0 / 3168.0, _A62 = -355.0 / 33.0
cdef double _A63 = 46732.0 / 5247.0, _A64 = 49.0 / 176.0
cdef double _A65 = -5103.0 / 18656.0
cdef double _B1 = 35.0 / 384.0, _B3 = 500.0 / 1113.0, _B4 = 125.0 / 192.0
cdef double _B5 = -2187.0 / 6784.0, _B6 = 11.0 / 84.0
cdef double _E1 = 71.0 / 57600.0, _E3 = -71.0 / 16695.0, _E4 = 71.0 / 1920.0
cdef double _E5 = -17253.0 / 339200.0, _E6 = 22.0 / 525.0, _E7 = -1.0 / 40.0


cdef inline void _rhs(bint scaled, double k, double xi2, double z,
                      double y0, double y1, double* f0, double* f1) noexcept nogil:
    cdef double c = k / z + (1.0 - xi2) / (4.0 * z * z)
    f0[0] = y1
    if scaled:
        f1[0] = y1 - c * y0
    else:
        f1[0] = (0.25 - c) * y0


def march_ode(bint scaled, long k, double xi2, double z_from, double z_to,
              double y0, double y1, double rtol, double atol, long max_steps):
    """See _kernels_py.march_ode."""
    cdef double kk = <double>k
    cdef double direction, z, h, err, fac, sc0, sc1
    cdef double f0, f1, w0, w1, e0, e1, y5_0, y5_1
    cdef double k1_0, k1_1, k2_0, k2_1, k3_0, k3_1, k4_0, k4_1
    cdef double k5_0, k5_1, k6_0, k6_1, k7_0, k7_1
    cdef long steps = 0
    cdef int status = _ST_OK

    if z_from == z_to:
        return y0, y1, _ST_OK, 0
    direction = 1.0 if z_to > z_from else -1.0
    z = z_from
    h = fabs(z_to - z_from)
    if h > 0.1 + 0.02 * fabs(z_from):
        h = 0.1 + 0.02 * fabs(z_from)
    h *= direction

    with nogil:
        _rhs(scaled, kk, xi2, z, y0, y1, &f0, &f1)
        while (z_to - z) * direction > 0.0:
            if steps >= max_steps:
                status = _ST_BUDGET
                break
            if fabs(h) < 4.0 * _EPS * fabs(z):
                status = _ST_UNDERFLOW
                break
            if (z + h - z_to) * direction > 0.0:
                h = z_to - z

            k1_0 = f0
            k1_1 = f1
            w0 = y0 + h * (_A21 * k1_0)
            w1 = y1 + h * (_A21 * k1_1)
            _rhs(scaled, kk, xi2, z + _C2 * h, w0, w1, &k2_0, &k2_1)
            w0 = y0 + h * (_A31 * k1_0 + _A32 * k2_0)
            w1 = y1 + h * (_A31 * k1_1 + _A32 * k2_1)
            _rhs(scaled, kk, xi2, z + _C3 * h, w0, w1, &k3_0, &k3_1)
            w0 = y0 + h * (_A41 * k1_0 + _A42 * k2_0 + _A43 * k3_0)
            w1 = y1 + h * (_A41 * k1_1 + _A42 * k2_1 + _A43 * k3_1)
            _rhs(scaled, kk, xi2, z + _C4 * h, w0, w1, &k4_0, &k4_1)
            w0 = y0 + h * (_A51 * k1_0 + _A52 * k2_0 + _A53 * k3_0 + _A54 * k4_0)
            w1 = y1 + h * (_A51 * k1_1 + _A52 * k2_1 + _A53 * k3_1 + _A54 * k4_1)
            _rhs(scaled, kk, xi2, z + _C5 * h, w0, w1, &k5_0, &k5_1)
            w0 = y0 + h * (_A61 * k1_0 + _A62 * k2_0 + _A63 * k3_0
                           + _A64 * k4_0 + _A65 * k5_0)
            w1 = y1 + h * (_A61 * k1_1 + _A62 * k2_1 + _A63 * k3_1
                           + _A64 * k4_1 + _A65 * k5_1)
            _rhs(scaled, kk, xi2, z + h, w0, w1, &k6_0, &k6_1)
            y5_0 = y0 + h * (_B1 * k1_0 + _B3 * k3_0 + _B4 * k4_0
                             + _B5 * k5_0 + _B6 * k6_0)
            y5_1 = y1 + h * (_B1 * k1_1 + _B3 * k3_1 + _B4 * k4_1
                             + _B5 * k5_1 + _B6 * k6_1)
            _rhs(scaled, kk, xi2, z + h, y5_0, y5_1, &k7_0, &k7_1)
            e0 = h * (_E1 * k1_0 + _E3 * k3_0 + _E4 * k4_0 + _E5 * k5_0
                      + _E6 * k6_0 + _E7 * k7_0)
            e1 = h * (_E1 * k1_1 + _E3 * k3_1 + _E4 * k4_1 + _E5 * k5_1
                      + _E6 * k6_1 + _E7 * k7_1)
            sc0 = atol + rtol * (fabs(y0) if fabs(y0) > fabs(y5_0) else fabs(y5_0))
            sc1 = atol + rtol * (fabs(y1) if fabs(y1) > fabs(y5_1) else fabs(y5_1))
            err = sqrt(0.5 * ((e0 / sc0) * (e0 / sc0) + (e1 / sc1) * (e1 / sc1)))
            if err <= 1.0:
                z += h
                y0 = y5_0
                y1 = y5_1
                f0 = k7_0
                f1 = k7_1
                steps += 1
                if err == 0.0:
                    fac = 5.0
                else:
                    fac = 0.9 * pow(err, -0.2)
                    if fac > 5.0:
                        fac = 5.0
                    elif fac < 0.2:
                        fac = 0.2
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac < 0.1:
                    fac = 0.1
            h *= fac

    return y0, y1, status, steps


def gsr_advance(double[::1] psi, double[:, ::1] rho, double h2, double a,
                int64_t[::1] crossed):
    """See _kernels_py.gsr_advance."""
    cdef Py_ssize_t n = rho.shape[0], m = rho.shape[1]
    cdef Py_ssize_t i, j
    cdef double p, r
    with nogil:
        for i in range(n):
            crossed[i] = -1
            p = psi[i]
            for j in range(m):
                r = rho[i, j]
                p = r * p + h2 * (r + 1.0)
                if p >= a:
                    crossed[i] = j
                    break
            psi[i] = p


def fv_advance(double[::1] psi, double[:, ::1] rho_sm, Py_ssize_t j0,
               double h2, double a):
    """See _kernels_py.fv_advance."""
    cdef Py_ssize_t m = rho_sm.shape[0], n = rho_sm.shape[1]
    cdef Py_ssize_t i, j
    cdef double p, r
    cdef bint hit
    cdef Py_ssize_t stop = m
    with nogil:
        for j in range(j0, m):
            hit = False
            for i in range(n):
                r = rho_sm[j, i]
                p = r * psi[i] + h2 * (r + 1.0)
                psi[i] = p
                if p >= a:
                    hit = True
            if hit:
                stop = j
                break
    return stop
