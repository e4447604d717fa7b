#!/usr/bin/env python3
"""
Tests for the exponential tail bound evaluators.
"""

import math
import sys
import unittest
from fractions import Fraction
from pathlib import Path

from hypothesis import given, settings
from hypothesis import strategies as st

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.bernoulli_bounds.bounds import (
    BoundFamily,
    Regime,
    bernoulli_sharp_bound,
    classical_bernoulli_bound,
    continuous_bound,
    continuous_gamma,
    correction_factor,
    crossover_epsilon,
    evaluate,
    exponent_coefficient,
    general_discrete_bound,
    hoeffding_advantage_threshold,
    hoeffding_bound,
    log1p_lower,
    normalized_hoeffding_bound,
    normalized_sum_bound,
    one_sided_bound,
    p0_bound_base,
    p0_upper_bound,
    phi_correction,
    uspensky_bound,
)
from src.bernoulli_bounds.errors import DomainError, RegimeError


class TestElementaryFamilies(unittest.TestCase):

    def test_published_values(self):
        self.assertAlmostEqual(general_discrete_bound(33, "2/33").value, 0.785420, places=5)
        self.assertAlmostEqual(hoeffding_bound(33, "11/33").value, 0.001307, places=6)
        self.assertEqual(hoeffding_bound(33, 0).value, 2.0)
        self.assertAlmostEqual(uspensky_bound(100, 0.1).value, 2 * math.exp(-0.5), places=12)

    def test_regime_flags(self):
        self.assertEqual(bernoulli_sharp_bound(12, "1/4", "1/2").regime, Regime.CERTIFIED)
        self.assertEqual(bernoulli_sharp_bound(12, "1/4", "1/3").regime, Regime.HEURISTIC)
        self.assertTrue(general_discrete_bound(33, "2/33", "15/33").certified)
        self.assertFalse(general_discrete_bound(33, "1/33").certified)
        self.assertFalse(general_discrete_bound(33, 0.0625).certified)

    def test_rejects_bad_inputs(self):
        with self.assertRaises(DomainError):
            hoeffding_bound(0, 0.1)
        with self.assertRaises(DomainError):
            hoeffding_bound(10, -0.1)

    def test_exponent_coefficient(self):
        self.assertAlmostEqual(exponent_coefficient(0.5), 1.6)
        self.assertEqual(exponent_coefficient(0), 2.0)

    @settings(max_examples=80, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=10_000),
        eps=st.floats(min_value=0.001, max_value=1.0),
    )
    def test_family_ordering(self, n, eps):
        sharp = bernoulli_sharp_bound(n, eps).value
        general = general_discrete_bound(n, eps).value
        hoeffding = hoeffding_bound(n, eps).value
        self.assertLessEqual(sharp, general)
        self.assertAlmostEqual(hoeffding, 2 * sharp, delta=1e-12)


class TestClassicalBound(unittest.TestCase):

    def test_constant(self):
        params, bound = classical_bernoulli_bound(1, 2, 2)
        self.assertEqual(params.xi1, 1)
        self.assertEqual(params.xi2, 1)
        self.assertAlmostEqual(params.C, 1.5)
        self.assertAlmostEqual(bound.value, 0.4)

    def test_simplified(self):
        params, bound = classical_bernoulli_bound(1, 2, 2, simplified=True)
        self.assertAlmostEqual(params.simplified_C, 1.5 ** 0.25)
        self.assertAlmostEqual(bound.value, 1 / (1 + 1.5 ** 0.25))

    def test_degenerate_grids(self):
        with self.assertRaises(DomainError):
            classical_bernoulli_bound(1, 1, 3)
        with self.assertRaises(DomainError):
            classical_bernoulli_bound(1, 3, 1)

    def test_xi_floor(self):
        for k in range(1, 21):
            for r in range(2, 21):
                for s in range(2, 21):
                    params, _ = classical_bernoulli_bound(k, r, s)
                    floor = Fraction(k, r + s)
                    self.assertGreaterEqual(params.xi1, floor, (k, r, s))
                    self.assertGreaterEqual(params.xi2, floor, (k, r, s))

    def test_via_registry(self):
        bound = evaluate(BoundFamily.CLASSICAL_BERNOULLI, 12, "1/4", "1/2")
        self.assertEqual(bound.family, BoundFamily.CLASSICAL_BERNOULLI)
        with self.assertRaises(RegimeError):
            evaluate(BoundFamily.CLASSICAL_BERNOULLI, 12, "1/5", "1/2")


class TestContinuousCase(unittest.TestCase):

    def test_correction_factor_table(self):
        self.assertAlmostEqual(correction_factor(100, 0.1), 1.1436, delta=1e-4)
        self.assertAlmostEqual(correction_factor(100, 0.02), 1.0412, delta=1e-4)
        self.assertAlmostEqual(correction_factor(1000, 0.3), 1.7566, delta=1e-4)
        self.assertAlmostEqual(correction_factor(100000, 0.35), 2.0348, delta=1e-4)

    def test_phi_needs_n_eps_above_one(self):
        with self.assertRaises(RegimeError) as ctx:
            phi_correction(100, 0.005)
        self.assertEqual(ctx.exception.condition, "ascond2")

    def test_bound_is_corrected_general_bound(self):
        bound = continuous_bound(100, 0.5, 0.1)
        expected = correction_factor(100, 0.1) * general_discrete_bound(100, 0.1).value
        self.assertAlmostEqual(bound.value / expected, 1.0, places=12)
        self.assertEqual(bound.details["theta"], 1.0)

    def test_bound_reports_exponent_coefficient(self):
        bound = continuous_bound(100, 0.5, 0.1)
        gamma = bound.details["gamma"]
        self.assertEqual(gamma, continuous_gamma(100, 0.1, bound.details["theta"]))
        # (2 - 1/10) / (1.01 + (1.3 + 9/400)/100)
        self.assertAlmostEqual(gamma, 1.9 / 1.0232250, places=9)
        self.assertLess(gamma, exponent_coefficient(0.1))

    def test_registry_needs_p(self):
        with self.assertRaises(RegimeError) as ctx:
            evaluate(BoundFamily.CONTINUOUS_CORRECTED, 100, 0.1)
        self.assertEqual(ctx.exception.condition, "ascond1")


class TestOneSidedAndLimits(unittest.TestCase):

    def test_one_sided(self):
        bound = one_sided_bound(12, "1/2", "1/4")
        self.assertAlmostEqual(bound.value, 0.5 * math.exp(-1.5), places=12)
        self.assertTrue(bound.certified)
        with self.assertRaises(DomainError):
            one_sided_bound(12, 1, "1/4")

    def test_normalized_limit(self):
        self.assertAlmostEqual(normalized_sum_bound(1.0, 0.5), math.exp(-0.5))
        self.assertAlmostEqual(normalized_hoeffding_bound(1.0, 0.5), 2 * math.exp(-0.5))
        with self.assertRaises(DomainError):
            evaluate(BoundFamily.NORMALIZED_ASYMPTOTIC, 10, 0.1)


class TestVacuityAndMonotonicity(unittest.TestCase):
    """Every α·exp(-β·n·ε²) family starts at α and strictly decreases in ε."""

    N = 50
    EPS = [k / 100 for k in range(1, 101)]

    def families(self):
        return {
            "uspensky": lambda e: uspensky_bound(self.N, e),
            "hoeffding": lambda e: hoeffding_bound(self.N, e),
            "bernoulli-sharp": lambda e: bernoulli_sharp_bound(self.N, e),
            "general-discrete": lambda e: general_discrete_bound(self.N, e),
            "one-sided": lambda e: one_sided_bound(self.N, 0.3, e),
        }

    def test_value_at_zero_is_alpha(self):
        for name, bound in self.families().items():
            at_zero = bound(0.0)
            self.assertGreaterEqual(at_zero.value, at_zero.alpha, name)

    def test_strictly_decreasing(self):
        for name, bound in self.families().items():
            values = [bound(e).value for e in self.EPS]
            self.assertTrue(all(a > b for a, b in zip(values, values[1:])), name)

    def test_continuous_strictly_decreasing_on_admissible_range(self):
        # 1/n < eps <= min(p, 1 - p) for n = 100, p = 1/2
        values = [continuous_bound(100, 0.5, k / 100).value for k in range(2, 51)]
        self.assertTrue(all(a > b for a, b in zip(values, values[1:])))

    def test_vacuous_values_are_representable(self):
        self.assertGreater(uspensky_bound(1, 0.01).value, 1.0)
        self.assertGreater(continuous_bound(100, 0.5, 0.011).value, 1.0)


class TestCrossover(unittest.TestCase):

    def test_mu_of_33(self):
        mu = crossover_epsilon(33).mu
        self.assertGreater(mu, 10 / 33)
        self.assertLess(mu, 11 / 33)

    def test_bounds_meet_at_mu(self):
        for n in (20, 33, 100, 5000):
            mu = crossover_epsilon(n).mu
            self.assertAlmostEqual(
                general_discrete_bound(n, mu).value / hoeffding_bound(n, mu).value, 1.0, places=9
            )

    def test_sign_flips_at_mu(self):
        for n in (10, 20, 33, 100, 1000):
            mu = crossover_epsilon(n).mu
            below, above = mu * (1 - 1e-6), mu * (1 + 1e-6)
            self.assertLess(
                general_discrete_bound(n, below).value - hoeffding_bound(n, below).value, 0, f"n={n}"
            )
            self.assertGreater(
                general_discrete_bound(n, above).value - hoeffding_bound(n, above).value, 0, f"n={n}"
            )

    def test_quarter_power_scaling(self):
        scaled = 1e8 ** 0.25 * crossover_epsilon(10 ** 8).mu
        self.assertAlmostEqual(scaled, (math.log(2) / 2) ** 0.25, delta=1e-3)
        self.assertAlmostEqual((math.log(2) / 2) ** 0.25, 0.767273, places=6)

    def test_advantage_threshold(self):
        n = hoeffding_advantage_threshold(0.1)
        self.assertLess(crossover_epsilon(n).mu, 0.1)
        self.assertGreaterEqual(crossover_epsilon(n - 1).mu, 0.1)
        self.assertLess(hoeffding_bound(n, 0.1).value, general_discrete_bound(n, 0.1).value)


class TestAuxiliary(unittest.TestCase):

    def test_log1p_lower(self):
        self.assertAlmostEqual(log1p_lower(1.0), 2 / 3)
        self.assertLessEqual(log1p_lower(1.0), math.log(2))
        with self.assertRaises(DomainError):
            log1p_lower(-0.5)

    def test_p0_bound(self):
        self.assertEqual(p0_bound_base(0.0), 1.0)
        self.assertAlmostEqual(p0_bound_base(1.0), 1.0)
        self.assertAlmostEqual(p0_bound_base(0.5), math.sqrt(0.75))
        self.assertAlmostEqual(p0_upper_bound(10, 0.5), 243 / 1024)
        # the central mass exceeds the bound at n = 10
        self.assertGreater(252 / 1024, p0_upper_bound(10, 0.5))


if __name__ == "__main__":
    unittest.main()
