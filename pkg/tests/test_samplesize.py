#!/usr/bin/env python3
"""
Tests for sample-size planning.
"""

import sys
import unittest
from pathlib import Path

from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.bernoulli_bounds.bounds import BoundFamily
from src.bernoulli_bounds.errors import DomainError, PlanningError
from src.bernoulli_bounds.samplesize import (
    PlanQuery,
    best_family,
    family_bound,
    min_eps,
    min_n,
    solve,
)

EPS = st.floats(min_value=0.01, max_value=0.5)
TARGET = st.floats(min_value=1e-6, max_value=0.5)


class TestMinimalSampleSize(unittest.TestCase):

    def test_closed_form_values(self):
        self.assertEqual(min_n(0.1, 0.05, BoundFamily.HOEFFDING).n_min, 185)
        self.assertEqual(min_n(0.1, 0.05, BoundFamily.BERNOULLI_SHARP).n_min, 150)
        self.assertEqual(min_n(0.1, 0.05, BoundFamily.GENERAL_DISCRETE).n_min, 152)
        self.assertEqual(min_n(0.1, 0.05, "uspensky").n_min, 738)

    def test_continuous_is_minimal(self):
        result = min_n(0.1, 0.05, BoundFamily.CONTINUOUS_CORRECTED, p=0.5)
        n = result.n_min
        self.assertEqual(result.method, "bisection")
        self.assertLessEqual(result.achieved_bound, 0.05)
        self.assertGreater(family_bound(BoundFamily.CONTINUOUS_CORRECTED, n - 1, 0.1).value, 0.05)
        self.assertTrue(result.certified)

    def test_target_above_alpha(self):
        result = min_n(0.1, 0.6, BoundFamily.ONE_SIDED_HALF, p=0.5)
        self.assertEqual(result.n_min, 1)
        self.assertIsNotNone(result.note)

    def test_rejects_bad_inputs(self):
        with self.assertRaises(DomainError):
            min_n(0.0, 0.05, BoundFamily.HOEFFDING)
        with self.assertRaises(DomainError):
            min_n(0.1, 1.5, BoundFamily.HOEFFDING)
        with self.assertRaises(PlanningError):
            min_n(0.1, 0.05, BoundFamily.CLASSICAL_BERNOULLI)
        with self.assertRaises(PlanningError):
            min_n(0.1, 0.05, BoundFamily.ONE_SIDED_HALF)

    @settings(max_examples=100, deadline=None)
    @given(
        eps=EPS,
        target=TARGET,
        family=st.sampled_from([BoundFamily.HOEFFDING, BoundFamily.GENERAL_DISCRETE, BoundFamily.USPENSKY]),
    )
    def test_closed_form_matches_bisection(self, eps, target, family):
        closed = min_n(eps, target, family)
        searched = min_n(eps, target, family, force_bisection=True)
        self.assertEqual(closed.n_min, searched.n_min)
        self.assertLessEqual(closed.achieved_bound, target)
        if closed.n_min > 1:
            self.assertGreater(family_bound(family, closed.n_min - 1, eps).value, target)


class TestSampleSizeMinimality(unittest.TestCase):
    """bound(n_min) <= target < bound(n_min - 1), by direct evaluation."""

    def assert_minimal(self, family, eps, target, p=None):
        result = min_n(eps, target, family, p=p)
        n = result.n_min
        self.assertLessEqual(family_bound(family, n, eps, p).value, target)
        # a note marks n_min = 1 or the first n where the bound is defined
        if n > 1 and result.note is None:
            self.assertGreater(family_bound(family, n - 1, eps, p).value, target)

    @settings(max_examples=100, deadline=None)
    @given(eps=EPS, target=TARGET)
    def test_uspensky(self, eps, target):
        self.assert_minimal(BoundFamily.USPENSKY, eps, target)

    @settings(max_examples=100, deadline=None)
    @given(eps=EPS, target=TARGET)
    def test_hoeffding(self, eps, target):
        self.assert_minimal(BoundFamily.HOEFFDING, eps, target)

    @settings(max_examples=100, deadline=None)
    @given(eps=EPS, target=TARGET)
    def test_bernoulli_sharp(self, eps, target):
        self.assert_minimal(BoundFamily.BERNOULLI_SHARP, eps, target)

    @settings(max_examples=100, deadline=None)
    @given(eps=EPS, target=TARGET)
    def test_general_discrete(self, eps, target):
        self.assert_minimal(BoundFamily.GENERAL_DISCRETE, eps, target)

    @settings(max_examples=100, deadline=None)
    @given(eps=EPS, target=TARGET, p=st.floats(min_value=0.05, max_value=0.95))
    def test_continuous(self, eps, target, p):
        self.assert_minimal(BoundFamily.CONTINUOUS_CORRECTED, eps, target, p)

    @settings(max_examples=100, deadline=None)
    @given(eps=EPS, target=TARGET, p=st.floats(min_value=0.05, max_value=0.95))
    def test_one_sided(self, eps, target, p):
        self.assert_minimal(BoundFamily.ONE_SIDED_HALF, eps, target, p)


class TestMinimalDeviation(unittest.TestCase):

    def test_hoeffding(self):
        result = min_eps(185, 0.05, BoundFamily.HOEFFDING)
        self.assertLess(result.eps_min, 0.1)
        self.assertLessEqual(result.achieved_bound, 0.05)
        self.assertAlmostEqual(result.eps_min, 0.099849, delta=1e-5)

    def test_general_discrete(self):
        result = min_eps(152, 0.05, BoundFamily.GENERAL_DISCRETE)
        self.assertLessEqual(result.eps_min, 0.1)
        self.assertLessEqual(result.achieved_bound, 0.05)

    def test_continuous(self):
        result = min_eps(1000, 0.05, BoundFamily.CONTINUOUS_CORRECTED)
        self.assertEqual(result.method, "brentq")
        self.assertLessEqual(result.achieved_bound, 0.05)
        slightly_less = result.eps_min * (1 - 1e-9)
        self.assertGreater(
            family_bound(BoundFamily.CONTINUOUS_CORRECTED, 1000, slightly_less).value, 0.05
        )

    def test_unreachable(self):
        with self.assertRaises(PlanningError):
            min_eps(1, 0.05, BoundFamily.CONTINUOUS_CORRECTED)


class TestQueries(unittest.TestCase):

    def test_query_needs_one_unknown(self):
        with self.assertRaises(ValidationError):
            PlanQuery(target=0.05, family=BoundFamily.HOEFFDING, eps=0.1, n=100)
        with self.assertRaises(ValidationError):
            PlanQuery(target=0.05, family=BoundFamily.HOEFFDING)

    def test_solve(self):
        by_eps = solve(PlanQuery(target=0.05, family=BoundFamily.HOEFFDING, eps=0.1))
        self.assertEqual(by_eps.n_min, 185)
        by_n = solve(PlanQuery(target=0.05, family=BoundFamily.HOEFFDING, n=185))
        self.assertLess(by_n.eps_min, 0.1)

    def test_best_family(self):
        ranked = best_family(0.05, eps=0.1)
        self.assertEqual(ranked[0].family, BoundFamily.BERNOULLI_SHARP)
        self.assertEqual(ranked[1].family, BoundFamily.GENERAL_DISCRETE)
        self.assertEqual([r.n_min for r in ranked], sorted(r.n_min for r in ranked))

    def test_best_family_needs_a_question(self):
        with self.assertRaises(DomainError):
            best_family(0.05)


if __name__ == "__main__":
    unittest.main()
