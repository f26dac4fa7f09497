import math

import numpy as np
import pytest

import _pinned as pin
from qcd_srp import (EigenPair, Model, QsdEval, lambda_bracket, qsd_cdf,
                     qsd_mean, qsd_pdf, qsd_sample, qsd_var, solve_lambda)
from qcd_srp.numerics import Tolerance, integrate_adaptive

QUAD = Tolerance(rel=1e-10, abs=1e-14)


class TestModel:
    @pytest.mark.parametrize("bad", [0.0, math.nan, math.inf])
    def test_rejects_bad_drift(self, bad):
        with pytest.raises(ValueError):
            Model(bad)

    def test_mu_squared(self):
        assert Model(-0.5).mu2 == 0.25


class TestSolveLambda:
    def test_bracket_arithmetic_a10(self):
        lo, hi = lambda_bracket(Model(1.0), 10.0)
        assert lo == pytest.approx(0.1)
        assert hi == pytest.approx(0.1 + (1.0 + math.sqrt(41.0)) / 200.0)
        lam = solve_lambda(Model(1.0), 10.0).lam
        assert lo <= lam <= hi

    def test_bracket_arithmetic_a1e4(self):
        lo, hi = lambda_bracket(Model(1.0), 1e4)
        assert lo == pytest.approx(1e-4)
        assert hi == pytest.approx(1e-4 + (1.0 + math.sqrt(4e4 + 1.0)) / 2e8)
        lam = solve_lambda(Model(1.0), 1e4).lam
        assert lo <= lam <= hi

    def test_pinned_eigenvalues(self):
        assert solve_lambda(Model(1.0), 10.0).lam == pytest.approx(
            pin.LAMBDA_MU1_A10, rel=1e-10)
        assert solve_lambda(Model(1.0), 5.0).lam == pytest.approx(
            pin.LAMBDA_MU1_A5, rel=1e-10)
        assert solve_lambda(Model(0.5), 10.0).lam == pytest.approx(
            pin.LAMBDA_MU05_A10, rel=1e-10)
        assert solve_lambda(Model(2.0), 100.0).lam == pytest.approx(
            pin.LAMBDA_MU2_A100, rel=1e-10)

    def test_xi2_consistency(self, eigen_mu1_a10):
        assert eigen_mu1_a10.xi2 == pytest.approx(pin.XI2_MU1_A10, rel=1e-8)
        assert eigen_mu1_a10.xi2 == 1.0 - 8.0 * eigen_mu1_a10.lam

    @pytest.mark.parametrize("mu,A", [(0.25, 1.0), (0.25, 1000.0), (0.5, 5.0),
                                      (2.0, 1.0), (2.0, 1000.0)])
    def test_bracket_holds_in_hard_regimes(self, mu, A):
        pair = solve_lambda(Model(mu), A)
        lo, hi = lambda_bracket(Model(mu), A)
        assert lo <= pair.lam <= hi

    @pytest.mark.parametrize("A", [1e2, 1e3, 1e4])
    def test_large_threshold_asymptotic(self, A):
        lam = solve_lambda(Model(1.0), A).lam
        assert abs(lam * A - 1.0) <= 3.0 / math.sqrt(A)

    def test_invalid_threshold(self):
        with pytest.raises(ValueError):
            solve_lambda(Model(1.0), -1.0)


class TestEigenPair:
    def test_rejects_lambda_outside_bracket(self):
        with pytest.raises(ValueError):
            EigenPair(model=Model(1.0), A=10.0, lam=0.5, xi2=1.0 - 4.0)

    def test_rejects_inconsistent_xi2(self):
        with pytest.raises(ValueError):
            EigenPair(model=Model(1.0), A=10.0, lam=0.12, xi2=0.5)

    def test_boundary_lambda_gives_zero_mean(self):
        pair = EigenPair(model=Model(1.0), A=10.0, lam=0.1, xi2=1.0 - 0.8)
        assert qsd_mean(pair) == pytest.approx(0.0, abs=1e-12)


class TestDistribution:
    def test_pdf_zero_at_threshold(self, qsd_mu1_a10):
        assert qsd_pdf(qsd_mu1_a10, 10.0) == pytest.approx(0.0, abs=1e-9)

    def test_pdf_zero_outside_support(self, qsd_mu1_a10):
        assert qsd_pdf(qsd_mu1_a10, -1.0) == 0.0
        assert qsd_pdf(qsd_mu1_a10, 11.0) == 0.0

    def test_pdf_normalizes(self, qsd_mu1_a10):
        total = integrate_adaptive(lambda x: qsd_pdf(qsd_mu1_a10, x), 0.0, 10.0, QUAD)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_cdf_boundary_cases(self, qsd_mu1_a10):
        assert qsd_cdf(qsd_mu1_a10, 10.0) == 1.0
        assert qsd_cdf(qsd_mu1_a10, 12.0) == 1.0
        assert qsd_cdf(qsd_mu1_a10, 0.0) == 0.0
        assert qsd_cdf(qsd_mu1_a10, -3.0) == 0.0

    def test_cdf_matches_pdf_integral(self, qsd_mu1_a10):
        half = integrate_adaptive(lambda x: qsd_pdf(qsd_mu1_a10, x), 0.0, 5.0, QUAD)
        assert qsd_cdf(qsd_mu1_a10, 5.0) == pytest.approx(half, abs=1e-7)

    @pytest.mark.parametrize("mu,A", [(1.0, 10.0), (0.5, 5.0)])
    def test_cdf_nondecreasing(self, mu, A):
        q = QsdEval(solve_lambda(Model(mu), A))
        xs = np.linspace(0.0, A, 400)
        vals = [qsd_cdf(q, float(x)) for x in xs]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_pdf_is_cdf_derivative(self, qsd_mu1_a10):
        xs = np.linspace(0.5, 9.5, 50)
        for x in xs:
            h = 1e-5
            fd = (qsd_cdf(qsd_mu1_a10, x + h) - qsd_cdf(qsd_mu1_a10, x - h)) / (2 * h)
            assert fd == pytest.approx(qsd_pdf(qsd_mu1_a10, float(x)),
                                       rel=5e-6, abs=1e-9)

    def test_pdf_unimodal(self, qsd_mu1_a10):
        xs = np.linspace(0.0, 10.0, 1000)[1:-1]
        vals = np.array([qsd_pdf(qsd_mu1_a10, float(x)) for x in xs])
        d = np.diff(vals)
        maxima = np.flatnonzero((d[:-1] > 0) & (d[1:] <= 0))
        assert len(maxima) == 1


class TestMoments:
    def test_mean_formula(self, eigen_mu1_a10):
        assert qsd_mean(eigen_mu1_a10) == pytest.approx(pin.MEAN_MU1_A10, rel=1e-9)

    def test_var_formula(self, eigen_mu1_a10):
        assert qsd_var(eigen_mu1_a10) == pytest.approx(pin.VAR_MU1_A10, rel=1e-9)

    def test_mean_matches_quadrature(self, eigen_mu1_a10, qsd_mu1_a10):
        m = integrate_adaptive(lambda x: x * qsd_pdf(qsd_mu1_a10, x), 0.0, 10.0, QUAD)
        assert m == pytest.approx(qsd_mean(eigen_mu1_a10), rel=1e-6)

    def test_var_matches_quadrature(self, eigen_mu1_a10, qsd_mu1_a10):
        m2 = integrate_adaptive(lambda x: x * x * qsd_pdf(qsd_mu1_a10, x),
                                0.0, 10.0, QUAD)
        v = m2 - qsd_mean(eigen_mu1_a10) ** 2
        assert v == pytest.approx(qsd_var(eigen_mu1_a10), rel=1e-5)

    def test_variance_vanishes_at_bracket_edge(self):
        # the upper bracket endpoint is the larger root of the variance
        # numerator, so the formula value collapses to ~0 there
        model = Model(1.0)
        _, hi = lambda_bracket(model, 10.0)
        pair = EigenPair(model=model, A=10.0, lam=hi, xi2=1.0 - 8.0 * hi)
        assert qsd_var(pair) == pytest.approx(0.0, abs=1e-10)
        lo_root = 0.1 + (1.0 - math.sqrt(41.0)) / 200.0
        assert lo_root - (10.0 * lo_root - 1.0) ** 2 == pytest.approx(0.0, abs=1e-12)


class TestSampling:
    def test_endpoints(self, qsd_mu1_a10):
        assert qsd_sample(qsd_mu1_a10, 0.0) == 0.0
        assert qsd_sample(qsd_mu1_a10, 1.0) == 10.0

    def test_median_self_consistency(self, qsd_mu1_a10):
        x = qsd_sample(qsd_mu1_a10, 0.5)
        assert qsd_cdf(qsd_mu1_a10, x) == pytest.approx(0.5, abs=1e-8)

    def test_rejects_bad_probability(self, qsd_mu1_a10):
        with pytest.raises(ValueError):
            qsd_sample(qsd_mu1_a10, 1.5)
