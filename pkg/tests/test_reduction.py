"""
Tests for Or-reduction, log-star exact Or and the size-reduced Or family
"""

import unittest
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from fanq.circuit import stats
from fanq.reduction import (
    OrReductionSpec, blocked_block_size, blocked_or_failures, blocked_or_reduction, dyadic_decompose,
    exact_logstar, exact_reduce_shifted, ilog, iterated_or, iterated_or_exact, linear_size_or,
    log_star, or_exact_logstar, or_reduce,
)
from fanq.simulator import Simulator, marginal_probability, register_distribution


def p_out_one(circuit, sim):
    """P[out = 1] for every x, from one sweep"""
    result = sim.sweep(circuit, "x")
    out = circuit.register("out")
    return [register_distribution(result.state(x), out)[1] for x in range(len(result))]


def ancillas_clean(circuit, sim) -> bool:
    result = sim.sweep(circuit, "x")
    ancillas = circuit.ancillas
    return all(register_distribution(result.state(x), ancillas)[0] > 1 - 1e-9 for x in range(len(result)))


class TestDyadic(unittest.TestCase):

    def test_decompose(self):
        d = dyadic_decompose(12)
        self.assertEqual((d.a, d.b), (2, 1))
        for w in range(1, 40):
            self.assertEqual(dyadic_decompose(w).recompose(), w)
        with self.assertRaises(ValueError):
            dyadic_decompose(0)

    def test_spec(self):
        self.assertEqual(OrReductionSpec(7).m, 3)
        self.assertEqual(OrReductionSpec(8).m, 4)
        with self.assertRaises(ValueError):
            OrReductionSpec(0)


class TestOrReduce(unittest.TestCase):

    def setUp(self):
        self.sim = Simulator()

    def test_zero_preserved(self):
        n = 6
        c = or_reduce(n)
        y = c.register("y")
        result = self.sim.sweep(c, "x")
        self.assertAlmostEqual(register_distribution(result.state(0), y)[0], 1.0)
        for x in range(1, 1 << n):
            a = dyadic_decompose(bin(x).count("1")).a
            self.assertAlmostEqual(marginal_probability(result.state(x), y[a], 1), 1.0, places=9)

    def test_shifted(self):
        n, t = 5, 2
        c = exact_reduce_shifted(n, t)
        result = self.sim.sweep(c, "x")
        for x in range(1 << n):
            p_zero = register_distribution(result.state(x), c.register("y"))[0]
            self.assertAlmostEqual(p_zero, float(bin(x).count("1") == t), places=9)

    def test_constant_depth(self):
        self.assertEqual({stats(or_reduce(n)).depth for n in (1, 5, 100)}, {3})


class TestLogStar(unittest.TestCase):

    def setUp(self):
        self.sim = Simulator()

    def test_log_star(self):
        self.assertEqual([log_star(n) for n in (1, 2, 3, 10, 16)], [0, 0, 1, 3, 3])

    def test_ilog(self):
        self.assertAlmostEqual(ilog(16, 2), 2.0)
        self.assertAlmostEqual(ilog(5, 0), 5.0)
        with self.assertRaises(ValueError):
            ilog(2, 2)

    def test_exact_or(self):
        for n in (1, 3, 7):
            c = or_exact_logstar(n)
            for x, p in enumerate(p_out_one(c, self.sim)):
                self.assertAlmostEqual(p, float(x != 0), places=9)
            self.assertTrue(ancillas_clean(c, self.sim))

    def test_exact_weight(self):
        n, t = 4, 2
        c = exact_logstar(n, t)
        for x, p in enumerate(p_out_one(c, self.sim)):
            self.assertAlmostEqual(p, float(bin(x).count("1") == t), places=9)


class TestSizeReduced(unittest.TestCase):

    def setUp(self):
        self.sim = Simulator()

    def test_blocked_ideal_tail(self):
        c = blocked_or_reduction(4, "ideal")
        for x, p in enumerate(p_out_one(c, self.sim)):
            self.assertAlmostEqual(p, float(x != 0), places=9)
        self.assertTrue(c.clean_ancillas)

    def test_blocked_failures_match_simulation(self):
        c = blocked_or_reduction(4, "approx", runs=1)
        failures = blocked_or_failures(4, runs=1)
        for x, p in enumerate(p_out_one(c, self.sim)):
            self.assertAlmostEqual(1 - p, failures[x], places=9)
        self.assertAlmostEqual(failures[0], 1.0)

    def test_linear_size_or(self):
        for n in (3, 5):
            c = linear_size_or(n)
            for x, p in enumerate(p_out_one(c, self.sim)):
                self.assertAlmostEqual(p, float(x != 0), places=9)

    def test_small_inputs_fall_back(self):
        self.assertEqual(iterated_or(3, 2), or_exact_logstar(3))
        self.assertEqual(iterated_or_exact(3, 4), or_exact_logstar(3))

    def test_block_size(self):
        self.assertEqual(blocked_block_size(16), 16)
        self.assertEqual(blocked_block_size(4), 4)

    def test_bad_arguments(self):
        with self.assertRaises(ValueError):
            blocked_or_reduction(3)
        with self.assertRaises(ValueError):
            blocked_or_reduction(16, tail="exact")
        with self.assertRaises(ValueError):
            iterated_or(16, 0)
        with self.assertRaises(ValueError):
            linear_size_or(0)


if __name__ == '__main__':
    unittest.main()
