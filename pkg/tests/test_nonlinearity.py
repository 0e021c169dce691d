import numpy as np
import pytest

from kpzlab.nonlinearity import (
    BATTERY,
    NonlinearitySpec,
    QuadratureDivergence,
    effective_beta,
    gaussian_l2_check,
    get_nonlinearity,
    hermite_coefficients,
)

EXP_SHARP = NonlinearitySpec("exp_sharp", lambda x: np.exp(x * x), lambda r: 1.0)


class TestEffectiveBeta:
    def test_square_exact(self):
        assert abs(effective_beta(get_nonlinearity("square")) - 1.0) < 1e-12

    def test_odd_functions_vanish(self):
        for name in ("identity", "cubic", "sin"):
            assert abs(effective_beta(get_nonlinearity(name))) < 1e-12

    def test_known_values(self):
        for name, F in BATTERY.items():
            if F.known_beta is None or name == "abs":
                continue
            assert abs(effective_beta(F) - F.known_beta) < 1e-9, name

    def test_abs_needs_fine_rule(self):
        # the kink converges like 1/order: coarse rules sit far from the
        # exact value and the refinement check reports it
        with pytest.raises(QuadratureDivergence):
            effective_beta(get_nonlinearity("abs"), quad_order=64, tol=1e-6)

    def test_abs_converges_at_high_order(self):
        val = effective_beta(get_nonlinearity("abs"), quad_order=400_000, tol=1e-6)
        assert abs(val - 0.5 * np.sqrt(2 / np.pi)) < 1e-6

    def test_rejects_small_order(self):
        with pytest.raises(ValueError):
            effective_beta(get_nonlinearity("square"), quad_order=16)

    def test_linearity_in_f(self, rng):
        names = list(BATTERY)
        for _ in range(6):
            a, b = rng.uniform(-2, 2, size=2)
            n1, n2 = rng.choice(names, size=2, replace=False)
            f1, f2 = get_nonlinearity(n1), get_nonlinearity(n2)
            combo = NonlinearitySpec(
                "combo", lambda x, a=a, b=b, f1=f1, f2=f2: a * f1.fn(x) + b * f2.fn(x),
                lambda r: 1.0,
            )
            lhs = effective_beta(combo, 512, check=False)
            rhs = a * effective_beta(f1, 512, check=False) + b * effective_beta(f2, 512, check=False)
            assert abs(lhs - rhs) < 1e-8

    def test_odd_perturbation_invariance(self, rng):
        base = get_nonlinearity("square")
        for _ in range(5):
            c = rng.uniform(-1, 1)
            perturbed = NonlinearitySpec(
                "pert", lambda x, c=c: x * x + c * np.sin(3 * x), lambda r: 1.0
            )
            assert abs(effective_beta(perturbed, 512, check=False) - effective_beta(base)) < 1e-8


class TestGaussianL2Check:
    def test_square_moments(self):
        rep = gaussian_l2_check(get_nonlinearity("square"))
        assert rep.passed
        assert np.isclose(rep.norm_f ** 2, 3.0, rtol=1e-10)  # E X^4
        assert np.isclose(rep.norm_f_prime ** 2, 4.0, rtol=1e-6)  # E (2X)^2

    def test_abs_norm_one(self):
        rep = gaussian_l2_check(get_nonlinearity("abs"))
        assert rep.passed
        assert np.isclose(rep.norm_f ** 2, 1.0, rtol=1e-10)
        assert np.isclose(rep.norm_f_prime ** 2, 1.0, atol=1e-5)

    def test_exp_mild_closed_form(self):
        # E exp(x^2/4) = sqrt(2)
        rep = gaussian_l2_check(get_nonlinearity("exp_mild"))
        assert rep.passed
        assert np.isclose(rep.norm_f ** 2, np.sqrt(2.0), rtol=1e-10)

    def test_exp_sharp_fails(self):
        rep = gaussian_l2_check(EXP_SHARP)
        assert not rep.passed


class TestHermiteCoefficients:
    def test_square(self):
        exp = hermite_coefficients(get_nonlinearity("square"), 6)
        assert np.allclose(exp.coeffs, [1, 0, 1, 0, 0, 0, 0], atol=1e-10)
        assert exp.tail_norm_sq < 1e-10

    def test_cubic(self):
        exp = hermite_coefficients(get_nonlinearity("cubic"), 5)
        assert np.allclose(exp.coeffs, [0, 3, 0, 1, 0, 0], atol=1e-10)

    def test_c2_equals_beta_battery(self):
        for name in ("square", "square_plus_cubic", "sin", "exp_mild", "abs"):
            F = get_nonlinearity(name)
            exp = hermite_coefficients(F, 4)
            beta = effective_beta(F, quad_order=max(256, 16), check=False)
            assert abs(exp.coeffs[2] - beta) < 1e-8, name

    def test_abs_even(self):
        exp = hermite_coefficients(get_nonlinearity("abs"), 7, quad_order=5000)
        assert np.max(np.abs(exp.coeffs[1::2])) < 1e-10
        assert abs(exp.coeffs[2] - 0.5 * np.sqrt(2 / np.pi)) < 1e-3

    def test_rejects_small_order(self):
        with pytest.raises(ValueError):
            hermite_coefficients(get_nonlinearity("square"), 1)


def test_montecarlo_oracle_abs(rng):
    # independent oracle for beta(|x|): 1e7-draw Monte Carlo of |X|(X^2-1)/2
    total = 0.0
    total_sq = 0.0
    n = 10_000_000
    chunk = 1_000_000
    for _ in range(n // chunk):
        x = rng.standard_normal(chunk)
        y = 0.5 * np.abs(x) * (x * x - 1.0)
        total += y.sum()
        total_sq += (y * y).sum()
    mc = total / n
    se = np.sqrt(total_sq / n - mc * mc) / np.sqrt(n)
    gh = effective_beta(get_nonlinearity("abs"), quad_order=200_000, tol=1e-5)
    assert abs(gh - mc) < 3 * se
