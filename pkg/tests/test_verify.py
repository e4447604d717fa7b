#!/usr/bin/env python3
"""
Tests for the per-configuration verification checks.
"""

import sys
import unittest
from fractions import Fraction
from pathlib import Path

from hypothesis import given, settings
from hypothesis import strategies as st

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.bernoulli_bounds.errors import DomainError
from src.bernoulli_bounds.exact_binomial import BernoulliGrid, DiscreteGrid
from src.bernoulli_bounds.verify import (
    Verdict,
    certify_at_least,
    certify_below,
    check_corollaries,
    check_gbound,
    check_lemma1,
    check_median,
    check_normalized_limit,
    check_one_sided,
    check_proposition1,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    check_theorem4,
    decimal_string,
    normalized_limit_report,
    proposition1_report,
    table1_grids,
    theorem4_exponent,
)


class TestCertifiedComparisons(unittest.TestCase):

    def test_at_least(self):
        verdict, margin, _ = certify_at_least(3, 1, Fraction(1), 128)
        self.assertEqual(verdict, Verdict.PASS)
        self.assertGreater(margin, 0)
        verdict, _, _ = certify_at_least(2, 1, Fraction(1), 128)
        self.assertEqual(verdict, Verdict.FAIL)

    def test_below_strict_and_weak(self):
        # exp(0) = 1 exactly, so a tie separates the two forms
        self.assertEqual(certify_below(1, 1, Fraction(0), 128, strict=True)[0], Verdict.FAIL)
        self.assertEqual(certify_below(1, 1, Fraction(0), 128, strict=False)[0], Verdict.PASS)
        self.assertEqual(certify_below(1, 3, Fraction(1), 128)[0], Verdict.PASS)

    def test_decimal_string(self):
        self.assertEqual(decimal_string(54, 12), "4.5")
        self.assertEqual(decimal_string(1, 3, 5), "0.33333")


class TestGroupTheorems(unittest.TestCase):

    def test_right_groups(self):
        report = check_theorem1(BernoulliGrid(2, 3, 2))
        self.assertEqual(report.status, Verdict.PASS)
        self.assertEqual(len(report.checks), 1)
        self.assertAlmostEqual(float(report.checks[0].lhs), 7.2465, delta=1e-3)
        self.assertIsNotNone(report.consequence)
        self.assertEqual(report.summary["pass"], 2)
        self.assertEqual(report.details["factor_exponent"], "4/5")

    def test_single_right_group_is_vacuous(self):
        report = check_theorem1(BernoulliGrid(1, 1, 1))
        self.assertEqual(report.status, Verdict.PASS)
        self.assertEqual(report.checks, [])
        self.assertTrue(any("vacuous" in note for note in report.notes))

    def test_left_groups(self):
        report = check_theorem2(BernoulliGrid(1, 3, 1))
        self.assertEqual(report.status, Verdict.PASS)
        self.assertEqual([check.lhs for check in report.checks], ["4.5", "12"])

    def test_lazy_checks_keep_counts(self):
        full = check_theorem2(BernoulliGrid(3, 5, 4))
        lazy = check_theorem2(BernoulliGrid(3, 5, 4), keep_checks=False)
        self.assertEqual(full.summary, lazy.summary)
        self.assertEqual(lazy.checks, [])

    def test_discrete_theorems(self):
        grid = DiscreteGrid(33, 17, 2)
        self.assertEqual(check_theorem3(grid).status, Verdict.PASS)
        self.assertEqual(check_theorem4(grid).status, Verdict.PASS)

    def test_theorem4_exponent(self):
        self.assertEqual(theorem4_exponent(DiscreteGrid(33, 17, 1)), Fraction(2, 33))
        self.assertEqual(theorem4_exponent(DiscreteGrid(33, 17, 2)), Fraction(264, 1093))

    def test_lower_half_grids_are_mirrored(self):
        report = check_theorem3(DiscreteGrid(10, 3, 2))
        self.assertEqual(report.details["mirrored"], DiscreteGrid(10, 7, 2).key)

    def test_short_groups_are_boundary_checks(self):
        report = check_theorem3(DiscreteGrid(20, 12, 3))
        self.assertEqual(report.status, Verdict.PASS)
        self.assertGreater(sum(report.boundary_summary.values()), 0)
        self.assertTrue(all(not check.full_size for check in report.boundary_checks))

    @settings(max_examples=30, deadline=None)
    @given(
        k=st.integers(min_value=1, max_value=4),
        r=st.integers(min_value=1, max_value=8),
        s=st.integers(min_value=1, max_value=8),
    )
    def test_bernoulli_grids_pass(self, k, r, s):
        grid = BernoulliGrid(k, r, s)
        self.assertEqual(check_theorem1(grid, keep_checks=False).status, Verdict.PASS)
        self.assertEqual(check_theorem2(grid, keep_checks=False).status, Verdict.PASS)


class TestCorollaries(unittest.TestCase):

    def test_table_grids(self):
        grids = table1_grids()
        self.assertEqual(len(grids), 14)
        for grid in grids:
            self.assertEqual(check_corollaries(grid).status, Verdict.PASS, grid.key)

    def test_bernoulli_tail(self):
        report = check_corollaries(BernoulliGrid(3, 2, 2))
        self.assertEqual(report.status, Verdict.PASS)
        self.assertEqual(report.tail_vs_bound[0].tail, "79/2048")
        self.assertEqual(report.details["bound_exponent"], "-3/2")

    def test_unit_group_size_uses_bernoulli_form(self):
        report = check_corollaries(DiscreteGrid(9, 5, 1))
        self.assertEqual(report.status, Verdict.PASS)
        self.assertEqual(report.details["bound_exponent"], "-2/9")


class TestOneSidedAndMedian(unittest.TestCase):

    def test_one_sided_symmetric_grid(self):
        report = check_one_sided(BernoulliGrid(2, 3, 3), 1)
        self.assertEqual(report.status, Verdict.PASS)
        self.assertEqual([tail.label for tail in report.tail_vs_bound], ["upper", "lower"])
        self.assertEqual(report.tail_vs_bound[0].tail, "299/4096")

    def test_one_sided_rejects_nu(self):
        with self.assertRaises(DomainError):
            check_one_sided(BernoulliGrid(1, 2, 1), 0)

    def test_median_weak_form_flagged(self):
        report = check_median(BernoulliGrid(1, 1, 1))
        self.assertEqual(report.status, Verdict.PASS)
        self.assertEqual(report.details["strict"], "1/4")
        self.assertFalse(report.details["weak_holds"])
        self.assertTrue(report.notes)

    def test_median_lower_half(self):
        report = check_median(BernoulliGrid(2, 1, 3))
        self.assertEqual(report.status, Verdict.PASS)


class TestLemmaAndLogBound(unittest.TestCase):

    def test_catalog_functions(self):
        for kind, phi in (("convex", "reciprocal"), ("convex", "neglog"), ("concave", "log"), ("concave", "sqrt")):
            for n in (1, 2, 3, 10, 50):
                report = check_lemma1(kind, phi, n)
                self.assertEqual(report.status, Verdict.PASS, f"{phi} n={n}")

    def test_function_kind_mismatch(self):
        with self.assertRaises(DomainError):
            check_lemma1("concave", "reciprocal", 3)
        with self.assertRaises(DomainError):
            check_lemma1("convex", "cube", 3)

    def test_gbound(self):
        for delta in (0, Fraction(1, 100), 1, 100):
            self.assertEqual(check_gbound(delta).status, Verdict.PASS)
        with self.assertRaises(DomainError):
            check_gbound(-1)


class TestDeviationSequence(unittest.TestCase):

    def test_table(self):
        table = check_proposition1((10, 100))
        self.assertTrue(table.deviation_non_decreasing)
        self.assertTrue(table.eps_squared_n_decreasing)
        first = table.rows[0]
        self.assertEqual(first.p0, "0.24609375")
        self.assertEqual(first.p0_bound_verdict, Verdict.FAIL)

    def test_report(self):
        report = proposition1_report((10, 100))
        self.assertEqual(report.status, Verdict.PASS)
        self.assertTrue(any("n=10" in note for note in report.notes))
        self.assertEqual(len(report.details["rows"]), 2)


class TestNormalizedLimit(unittest.TestCase):

    def test_limit_rows(self):
        table = check_normalized_limit(0.5, 1.0)
        self.assertEqual([row.n for row in table.rows], [100, 10_000, 1_000_000])
        self.assertLessEqual(table.max_gap(), 1e-3)
        self.assertIsNotNone(table.rows[0].continuous)

    def test_report(self):
        self.assertEqual(normalized_limit_report().status, Verdict.PASS)
        with self.assertRaises(DomainError):
            check_normalized_limit(0.5, 2.0)


if __name__ == "__main__":
    unittest.main()
