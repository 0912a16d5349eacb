"""
Tests for the constant-depth Or, exact[t], threshold[t] and counting builders
"""

import unittest
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import numpy as np

from fanq.bits import popcount
from fanq.circuit import stats
from fanq.gates import (
    CountingParams, OrCircuitParams, PoissonBinomial, analytic_or_failure, build_counting,
    build_exact_approx, build_or_approx, build_threshold_approx, compute_pmf, constant_addition,
    counting_exact, counting_threshold, increment_diagonal, max_or_failure, result_purity,
    threshold_error_bound,
)
from fanq.simulator import Simulator, marginal_probability, register_distribution
from fanq.simulator.reversible import inputs_for, read, run_reversible


def p_out_one(circuit, x, sim):
    state = sim.run(circuit, {"x": x})
    return marginal_probability(state, circuit.register("out")[0], 1)


class TestAnalytic(unittest.TestCase):

    def test_pmf(self):
        np.testing.assert_allclose(compute_pmf([0.5, 0.5]), [0.25, 0.5, 0.25])
        law = PoissonBinomial([0.2, 0.3, 0.5])
        self.assertAlmostEqual(law.mean, 1.0)
        self.assertAlmostEqual(law.pmf.sum(), 1.0)

    def test_layout(self):
        self.assertEqual(OrCircuitParams.for_inputs(4).m, 8)
        self.assertEqual(OrCircuitParams.for_inputs(8).m, 24)
        self.assertEqual(len(OrCircuitParams.for_inputs(3).angles), 6)

    def test_two_inputs_use_two_repetitions(self):
        params = OrCircuitParams.for_inputs(2)
        self.assertEqual((params.a, params.m), (2, 4))
        self.assertAlmostEqual(analytic_or_failure(2, 2), 0.0)
        self.assertLess(analytic_or_failure(2, 1), 1.0)

    def test_zero_weight_never_fires(self):
        for n in (2, 5, 16):
            self.assertAlmostEqual(analytic_or_failure(n, 0), 1.0)

    def test_failure_shrinks(self):
        self.assertLess(max_or_failure(32), max_or_failure(4))
        for n in (4, 8, 16):
            self.assertLess(max_or_failure(n), 1.0)

    def test_threshold_bound_excludes_own_weight(self):
        n, t = 4, 2
        bound = threshold_error_bound(n, t, 3)
        expected = sum(analytic_or_failure(n, 3 - s) for s in (2, 4))
        self.assertAlmostEqual(bound, expected)
        with self.assertRaises(ValueError):
            threshold_error_bound(n, 5, 0)


class TestOrAndExact(unittest.TestCase):

    def setUp(self):
        self.sim = Simulator()

    def test_or_matches_analytic(self):
        for n in (2, 3):
            c = build_or_approx(n)
            for x in range(1 << n):
                expected = 1 - analytic_or_failure(n, bin(x).count("1"))
                self.assertAlmostEqual(p_out_one(c, x, self.sim), expected, places=9)

    def test_or_zero_input_is_exact(self):
        c = build_or_approx(3)
        self.assertAlmostEqual(p_out_one(c, 0, self.sim), 0.0, places=12)
        self.assertAlmostEqual(result_purity(c, 0, self.sim), 1.0)

    def test_or_is_constant_depth(self):
        depths = {stats(build_or_approx(n)).depth for n in (2, 4, 8, 16)}
        self.assertEqual(len(depths), 1)

    def test_exact_fires_on_weight(self):
        n, t = 3, 1
        c = build_exact_approx(n, t)
        for x in range(1 << n):
            w = bin(x).count("1")
            expected = 1.0 if w == t else analytic_or_failure(n, w - t)
            self.assertAlmostEqual(p_out_one(c, x, self.sim), expected, places=9)

    def test_bad_parameters(self):
        with self.assertRaises(ValueError):
            build_or_approx(1)
        with self.assertRaises(ValueError):
            build_exact_approx(3, 4)
        with self.assertRaises(ValueError):
            build_threshold_approx(3, 1, mode="sharp")


class TestThreshold(unittest.TestCase):

    def test_ideal_threshold(self):
        for n, t in ((3, 2), (4, 0), (4, 3)):
            c = build_threshold_approx(n, t, mode="ideal")
            outputs = run_reversible(c, inputs_for(c, "x", range(1 << n)))
            weights = popcount(np.arange(1 << n))
            np.testing.assert_array_equal(read(outputs, c, "out"), (weights >= t).astype(int))
            np.testing.assert_array_equal(read(outputs, c, "x"), np.arange(1 << n))
            for name, qubits in c.registers:
                if name not in ("x", "out"):
                    self.assertTrue(np.all(read(outputs, c, qubits) == 0), name)


class TestCounting(unittest.TestCase):

    def setUp(self):
        self.sim = Simulator()

    def test_constant_addition(self):
        m, b = 3, 3
        c = constant_addition(m, b)
        for v in range(1 << m):
            dist = register_distribution(self.sim.run(c, {"r": v}), c.register("r"))
            self.assertAlmostEqual(dist[(v + b) % (1 << m)], 1.0, places=9)

    def test_increment(self):
        d, increment = increment_diagonal(3)
        self.assertEqual(stats(d).depth, 1)
        for v in range(8):
            dist = register_distribution(self.sim.run(increment, {"r": v}), increment.register("r"))
            self.assertAlmostEqual(dist[(v + 1) % 8], 1.0, places=9)

    def test_exact_counter(self):
        n = 4
        c = build_counting(CountingParams(n))
        for x in range(1 << n):
            dist = register_distribution(self.sim.run(c, {"x": x}), c.register("counter"))
            self.assertAlmostEqual(dist[bin(x).count("1")], 1.0, places=9)

    def test_counting_threshold_and_exact(self):
        n, t = 4, 2
        above = counting_threshold(n, t)
        equal = counting_exact(n, t)
        for x in range(1 << n):
            w = bin(x).count("1")
            self.assertAlmostEqual(p_out_one(above, x, self.sim), float(w >= t), places=9)
            self.assertAlmostEqual(p_out_one(equal, x, self.sim), float(w == t), places=9)

    def test_params(self):
        self.assertEqual(CountingParams(7).m, 3)
        self.assertEqual(CountingParams(8).m, 4)
        with self.assertRaises(ValueError):
            CountingParams(4, qft_mode="fast")


if __name__ == '__main__':
    unittest.main()
