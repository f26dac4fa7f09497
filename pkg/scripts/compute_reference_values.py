#!/usr/bin/env python3
"""High-precision reference values for the frozen test constants.

Everything here is computed with mpmath, entirely independently of the
package's own evaluators: Whittaker W via mpmath.whitw (complex second
index allowed), E1 via mpmath.e1, integrals via mpmath.quad with two
different rules.  Run it to regenerate the constants pinned in tests/:

    python3 scripts/compute_reference_values.py
"""

import mpmath as mp

mp.mp.dps = 40


def F(x):
    # e^x E1(x); mpmath keeps full precision even for large x
    return mp.exp(x) * mp.e1(x)


def whit_w1(xi2, z):
    """W_{1, xi/2}(z) with xi = sqrt(xi2), xi2 any real (value is real)."""
    m = mp.sqrt(mp.mpc(xi2)) / 2
    return mp.whitw(1, m, z).real


def whit_w0(xi2, z):
    m = mp.sqrt(mp.mpc(xi2)) / 2
    return mp.whitw(0, m, z).real


def solve_lambda(mu, A, digits=34):
    """Smallest root of W_{1,xi(lam)/2}(2/(mu^2 A)) = 0 in the bracket
    [1/A, 1/A + (1+sqrt(4 mu^2 A + 1))/(2 mu^2 A^2)], by scan + bisection."""
    mu2 = mp.mpf(mu) ** 2
    A = mp.mpf(A)
    z = 2 / (mu2 * A)
    lo = 1 / A
    hi = lo + (1 + mp.sqrt(4 * mu2 * A + 1)) / (2 * mu2 * A**2)

    def g(lam):
        return whit_w1(1 - 8 * lam / mu2, z)

    n = 64
    xs = [lo + (hi - lo) * k / n for k in range(n + 1)]
    fs = [g(x) for x in xs]
    a = b = None
    for k in range(n):
        if fs[k] == 0:
            return xs[k]
        if fs[k] * fs[k + 1] < 0:
            a, b, fa = xs[k], xs[k + 1], fs[k]
            break
    assert a is not None, f"no sign change for mu={mu} A={A}"
    for _ in range(int(digits * 3.4) + 10):
        mid = (a + b) / 2
        fm = g(mid)
        if fm == 0:
            return mid
        if fa * fm < 0:
            b = mid
        else:
            a, fa = mid, fm
    return (a + b) / 2


def qsd_cdf_factory(mu, A, lam):
    mu2 = mp.mpf(mu) ** 2
    A = mp.mpf(A)
    xi2 = 1 - 8 * lam / mu2
    zA = 2 / (mu2 * A)
    denom = mp.exp(-1 / (mu2 * A)) * whit_w0(xi2, zA)

    def cdf(x):
        if x <= 0:
            return mp.mpf(0)
        if x >= A:
            return mp.mpf(1)
        y = 2 / (mu2 * x)
        return mp.exp(-1 / (mu2 * x)) * whit_w0(xi2, y) / denom

    def pdf(x):
        if x <= 0 or x > A:
            return mp.mpf(0)
        y = 2 / (mu2 * x)
        return mp.exp(-1 / (mu2 * x)) * whit_w1(xi2, y) / (x * denom)

    return cdf, pdf


def lower_bound_B(mu, T):
    mu2 = mp.mpf(mu) ** 2
    T = mp.mpf(T)

    def integrand(x):
        if x == 0:
            return mu2 / 2
        return F(2 / (mu2 * x)) / x

    pts = [0, min(1, T / 10), T / 2, T]
    i_ts = mp.quad(integrand, pts)                      # tanh-sinh
    i_gl = mp.quad(integrand, pts, method="gauss-legendre")
    assert abs(i_ts - i_gl) < mp.mpf("1e-25") * abs(i_ts), (i_ts, i_gl)
    return (2 / mu2) * (F(2 / (mu2 * T)) - 1 + (2 / (mu2 * T)) * i_ts)


def srp_delay_two_routes(mu, A):
    mu2 = mp.mpf(mu) ** 2
    A = mp.mpf(A)
    lam = solve_lambda(mu, A)
    cdf, pdf = qsd_cdf_factory(mu, A, lam)

    def g1(x):
        return F(2 / (mu2 * x)) * cdf(x) / x if x > 0 else mp.mpf(0)

    pts = [A / 1000, A / 100, A / 10, A / 2, A]
    i1 = mp.quad(g1, pts)
    c1 = (2 / mu2) * (F(2 / (mu2 * A)) - 1 + (2 * lam / mu2) * i1)

    FA = F(2 / (mu2 * A))

    def g2(x):
        if x <= 0:
            return mp.mpf(0)
        add0 = (2 / mu2) * (FA - F(2 / (mu2 * x)))
        return add0 * pdf(x)

    c2 = mp.quad(g2, pts)
    return lam, c1, c2


def calibrate_threshold(mu, T, digits=30):
    """A_T in [T, T + sqrt(T)/|mu|] with lambda_{A_T} = 1/T."""
    mu = mp.mpf(mu)
    T = mp.mpf(T)
    target = 1 / T
    lo, hi = T, T + mp.sqrt(T) / abs(mu)

    def g(A):
        return solve_lambda(mu, A) - target

    fa, fb = g(lo), g(hi)
    assert fa * fb <= 0, (fa, fb)
    a, b = lo, hi
    for _ in range(int(digits * 3.4) + 10):
        mid = (a + b) / 2
        fm = g(mid)
        if fm == 0:
            return mid
        if fa * fm < 0:
            b = mid
        else:
            a, fa = mid, fm
    return (a + b) / 2


def check_kronrod():
    """Sanity check of the hardcoded G7/K15 nodes+weights on monomials."""
    xk = [0.991455371120813, 0.949107912342759, 0.864864423359769,
          0.741531185599394, 0.586087235467691, 0.405845151377397,
          0.207784955007898, 0.0]
    wk = [0.022935322010529, 0.063092092629979, 0.104790010322250,
          0.140653259715525, 0.169004726639267, 0.190350578064785,
          0.204432940075298, 0.209482141084728]
    wg = [0.129484966168870, 0.279705391489277, 0.381830050505119,
          0.417959183673469]
    worst_k = worst_g = 0.0
    for p in range(0, 23, 2):
        exact = mp.mpf(2) / (p + 1)
        sk = wk[7] * (0.0 ** p if p else 1.0)
        for i in range(7):
            sk += wk[i] * 2 * xk[i] ** p
        worst_k = max(worst_k, abs(float(sk - exact)))
        if p <= 10:
            sg = wg[3] * (0.0 ** p if p else 1.0)
            for i in range(3):
                sg += wg[i] * 2 * xk[2 * i + 1] ** p
            worst_g = max(worst_g, abs(float(sg - exact)))
    print(f"K15 monomial exactness (deg<=22) worst abs err: {worst_k:.3e}")
    print(f"G7  monomial exactness (deg<=10) worst abs err: {worst_g:.3e}")


def main():
    show = lambda name, v: print(f"{name} = {mp.nstr(v, 22)}")

    print("# special function spot values")
    show("E1(1.0)", mp.e1(1))
    show("E1(0.5)", mp.e1(mp.mpf("0.5")))
    show("E1(0.1)", mp.e1(mp.mpf("0.1")))
    show("E1(10.0)", mp.e1(10))
    show("F(1.0)", F(1))
    show("F(0.2)", F(mp.mpf("0.2")))
    show("F(0.4)", F(mp.mpf("0.4")))
    show("W_{0,1/2}(2)", mp.whitw(0, mp.mpf("0.5"), 2))
    show("W_{1,1/2}(2)", mp.whitw(1, mp.mpf("0.5"), 2))
    show("W_{0,0}(2) = sqrt(2/pi) K0(1)", mp.sqrt(2 / mp.pi) * mp.besselk(0, 1))
    assert abs(mp.whitw(0, 0, 2) - mp.sqrt(2 / mp.pi) * mp.besselk(0, 1)) < mp.mpf("1e-35")

    print("\n# eigenvalues")
    lam_1_10 = solve_lambda(1, 10)
    show("lambda(mu=1, A=10)", lam_1_10)
    show("  xi2 at that lambda", 1 - 8 * lam_1_10)
    show("  mean A - 1/lambda", 10 - 1 / lam_1_10)
    var = (lam_1_10 - (10 * lam_1_10 - 1) ** 2) / (lam_1_10**2 * (1 + lam_1_10))
    show("  var formula value", var)
    show("lambda(mu=1, A=5)", solve_lambda(1, 5))
    show("lambda(mu=0.5, A=10)", solve_lambda(mp.mpf("0.5"), 10))
    show("lambda(mu=2, A=100)", solve_lambda(2, 100))

    print("\n# lower bound B(T)")
    show("B(mu=sqrt(2), T=100)", lower_bound_B(mp.sqrt(2), 100))
    show("B(mu=1, T=10)", lower_bound_B(1, 10))

    print("\n# SRP delay risk, both routes (mu=1, A=10)")
    lam, c1, c2 = srp_delay_two_routes(1, 10)
    show("lambda", lam)
    show("C via integration-by-parts form", c1)
    show("C via direct pdf average", c2)
    show("|route1 - route2|", abs(c1 - c2))

    print("\n# calibrated threshold")
    at = calibrate_threshold(mp.mpf("0.5"), 50)
    show("A_T(mu=0.5, T=50)", at)
    show("  lambda(A_T)*T - 1", solve_lambda(mp.mpf("0.5"), at) * 50 - 1)

    print()
    check_kronrod()


if __name__ == "__main__":
    main()
