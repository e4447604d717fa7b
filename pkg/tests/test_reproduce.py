#!/usr/bin/env python3
"""
Tests for table and figure data reproduction.
"""

import math
import sys
import unittest
from fractions import Fraction
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.bernoulli_bounds.bounds import correction_factor, crossover_epsilon
from src.bernoulli_bounds.errors import DomainError
from src.bernoulli_bounds.reproduce import (
    TABLE2_EPS,
    TABLE2_NS,
    figure_data,
    fixed_decimal,
    quantize,
    table1,
    table2,
)

# eps -> (true probability, general discrete bound, Hoeffding bound)
PUBLISHED_TABLE1 = {
    0.0606: (0.600713, 0.785420, 1.569446),
    0.0909: (0.382439, 0.582175, 1.159157),
    0.1212: (0.220522, 0.384560, 0.758396),
    0.1515: (0.114271, 0.227376, 0.439550),
    0.1818: (0.052796, 0.120996, 0.225672),
    0.2121: (0.021571, 0.058319, 0.102638),
    0.2424: (0.007724, 0.025643, 0.041352),
    0.2727: (0.002400, 0.010366, 0.014758),
    0.3030: (0.000640, 0.003884, 0.004666),
    0.3333: (0.000145, 0.001360, 0.001307),
    0.3636: (0.000027, 0.000449, 0.000324),
    0.3939: (0.000004, 0.000141, 0.000071),
    0.4242: (0.000001, 0.000042, 0.000014),
    0.4545: (0.000000, 0.000012, 0.000002),
}

PUBLISHED_TABLE2 = {
    100: (1.0412, 1.0697, 1.1436, 1.3737, 1.7612, 2.0357),
    1000: (1.0221, 1.0582, 1.1336, 1.3652, 1.7566, 2.0349),
    100000: (1.0211, 1.0572, 1.1326, 1.3643, 1.7561, 2.0348),
}


class TestRounding(unittest.TestCase):

    def test_fixed_decimal_ties_away_from_zero(self):
        self.assertEqual(fixed_decimal(Fraction(1, 8), 2), "0.13")
        self.assertEqual(fixed_decimal(Fraction(3, 8), 2), "0.38")
        self.assertEqual(fixed_decimal(Fraction(1, 80), 3), "0.013")
        self.assertEqual(fixed_decimal(Fraction(0), 6), "0.000000")
        self.assertEqual(fixed_decimal(Fraction(-1, 4), 1), "-0.3")
        self.assertEqual(fixed_decimal(Fraction(-1, 3), 2), "-0.33")
        self.assertEqual(fixed_decimal(Fraction(-1, 1000), 2), "0.00")
        self.assertEqual(fixed_decimal(Fraction(5, 2), 0), "3")

    def test_quantize(self):
        self.assertEqual(quantize(Fraction(1, 3), 4), 0.3333)
        self.assertEqual(quantize(0.785420329, 6), 0.78542)
        self.assertEqual(quantize(Fraction(1, 80), 3), 0.013)
        # 0.125 is exact in binary, so this is a true tie
        self.assertEqual(quantize(0.125, 2), 0.13)
        self.assertEqual(quantize(-0.125, 2), -0.13)
        # the double nearest 2.675 lies below it
        self.assertEqual(quantize(2.675, 2), 2.67)


class TestTable1(unittest.TestCase):

    def test_shape(self):
        record = table1()
        self.assertEqual(len(record.rows), 14)
        self.assertEqual(
            list(record.rows[0]), ["eps", "true_probability", "general_discrete", "hoeffding"]
        )
        self.assertEqual(record.parameters["tail_boundary"], "weak")

    def test_published_rows(self):
        rows = {row["eps"]: row for row in table1().rows}
        self.assertEqual(sorted(rows), sorted(PUBLISHED_TABLE1))
        for eps, expected in PUBLISHED_TABLE1.items():
            row = rows[eps]
            got = (row["true_probability"], row["general_discrete"], row["hoeffding"])
            self.assertEqual(got, expected, f"eps={eps}")

    def test_true_probability_below_general_bound(self):
        for row in table1().rows:
            self.assertLess(row["true_probability"], row["general_discrete"])


class TestTable2(unittest.TestCase):

    def test_published_values(self):
        rows = {row["n"]: row for row in table2().rows}
        self.assertEqual(sorted(rows), [100, 1000, 100000])
        self.assertEqual(len(rows[100]), 7)
        for n, expected in PUBLISHED_TABLE2.items():
            got = tuple(rows[n][f"eps={eps}"] for eps in TABLE2_EPS)
            self.assertEqual(got, expected, f"n={n}")

    def test_columns_decrease_in_n(self):
        rows = {row["n"]: row for row in table2().rows}
        for eps in TABLE2_EPS:
            exact = [correction_factor(n, eps) for n in TABLE2_NS]
            self.assertTrue(all(a > b for a, b in zip(exact, exact[1:])), f"eps={eps}")
            printed = [rows[n][f"eps={eps}"] for n in TABLE2_NS]
            self.assertEqual(printed, sorted(printed, reverse=True), f"eps={eps}")

    def test_rows_increase_in_eps(self):
        for row in table2().rows:
            values = [row[f"eps={eps}"] for eps in TABLE2_EPS]
            self.assertEqual(values, sorted(values), f"n={row['n']}")


class TestFigureData(unittest.TestCase):

    def test_panel_a_endpoints(self):
        rows = figure_data("a").rows
        self.assertEqual(rows[0]["f"], 1.0)
        self.assertAlmostEqual(rows[-1]["f"], 1.0)
        self.assertTrue(all(row["f"] <= 1.0 + 1e-15 for row in rows))

    def test_panels_b_and_d_cross_at_mu(self):
        for panel, n in (("b", 20), ("d", 100)):
            record = figure_data(panel)
            mu = crossover_epsilon(n).mu
            self.assertEqual(record.parameters["crossover_eps"], mu)
            for row in record.rows:
                self.assertEqual(row["hoeffding_smaller"], row["eps"] > mu, f"{panel} eps={row['eps']}")

    def test_panel_c_asymptote(self):
        record = figure_data("c")
        limit = record.parameters["n_quarter_mu_limit"]
        self.assertAlmostEqual(limit, 0.767273, places=6)
        last = record.rows[-1]
        self.assertEqual(last["n"], 1_000_000)
        self.assertAlmostEqual(last["n_quarter_mu"], limit, delta=2e-3)
        mus = [row["mu"] for row in record.rows]
        self.assertEqual(mus, sorted(mus, reverse=True))
        self.assertTrue(all(math.isfinite(mu) for mu in mus))

    def test_unknown_panel(self):
        with self.assertRaises(DomainError):
            figure_data("e")


if __name__ == "__main__":
    unittest.main()
