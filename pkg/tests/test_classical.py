"""
Tests for the classical baselines: GF(2) normal forms, the degree bound and the randomized Or
"""

import unittest
import sys
from fractions import Fraction
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import numpy as np

from fanq.classical import (
    And2, ClassicalBuilder, ClassicalCircuit, FanoutGate, Gf2Polynomial, Not, Or2, ParityGate,
    and_chain, and_tree, anf, anf_from_truth_table, degree_bound_check, evaluate, or_tree,
    or_tree_depth, per_repetition_failure, random_circuit, randomized_or, randomized_or_failure,
)


class TestPolynomials(unittest.TestCase):

    def test_arithmetic(self):
        x0, x1 = Gf2Polynomial.variable(0), Gf2Polynomial.variable(1)
        one = Gf2Polynomial.constant(1)
        self.assertEqual(str(one + x0), "1 + x0")
        self.assertEqual((x0 + x0).degree, -1)
        self.assertEqual((x0 * x1).degree, 2)
        self.assertEqual(x0 * x0, x0)

    def test_truth_table_roundtrip(self):
        table = [0, 1, 1, 0, 1, 0, 0, 1]
        p = anf_from_truth_table(table, 3)
        self.assertEqual(p.degree, 1)
        np.testing.assert_array_equal(p.truth_table(3), table)

    def test_table_size_checked(self):
        with self.assertRaises(ValueError):
            anf_from_truth_table([0, 1, 1], 2)


class TestCircuits(unittest.TestCase):

    def test_builder_wires(self):
        b = ClassicalBuilder(2)
        (copies,) = b.layer([FanoutGate(0, 2)])
        self.assertEqual(copies, (2, 3))
        (out,) = b.layer([Or2(copies[0], 1)])
        c = b.build(out[0])
        np.testing.assert_array_equal(evaluate(c), [0, 1, 1, 1])

    def test_shared_reads_rejected(self):
        with self.assertRaises(ValueError):
            ClassicalCircuit(2, [[And2(0, 0)]])
        with self.assertRaises(ValueError):
            ClassicalCircuit(2, [[Not(2)]])

    def test_trees(self):
        np.testing.assert_array_equal(evaluate(or_tree(3)), (np.arange(8) != 0).astype(int))
        np.testing.assert_array_equal(evaluate(and_tree(3)), (np.arange(8) == 7).astype(int))
        self.assertEqual(or_tree(8).depth, 3)

    def test_degrees(self):
        self.assertEqual(anf(and_tree(1 << 3)).degree, 8)
        self.assertEqual(anf(or_tree(5)).degree, 5)
        self.assertEqual(anf(and_chain(3)).degree, 4)
        parity = ClassicalCircuit(4, [[ParityGate((0, 1, 2, 3))]])
        self.assertEqual(anf(parity).degree, 1)

    def test_anf_matches_evaluation(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            c = random_circuit(5, 3, rng)
            p = anf(c)
            np.testing.assert_array_equal(p.truth_table(5), evaluate(c))
            self.assertEqual(anf_from_truth_table(evaluate(c), 5), p)
            self.assertTrue(degree_bound_check(c))


class TestRandomizedOr(unittest.TestCase):

    def test_matches_parities(self):
        n, r = 4, 5
        sampled = randomized_or(n, r, 11)
        x = np.arange(1 << n)
        expected = np.zeros(1 << n, dtype=int)
        for s in sampled.strings:
            mask = int(sum(int(bit) << k for k, bit in enumerate(s)))
            expected |= np.array([bin(v & mask).count("1") % 2 for v in x])
        np.testing.assert_array_equal(evaluate(sampled.circuit), expected)
        self.assertEqual(evaluate(sampled.circuit, 0)[0], 0)

    def test_depth(self):
        for r in (1, 2, 8):
            self.assertEqual(randomized_or(3, r, 0).circuit.depth, or_tree_depth(r))

    def test_failure_probabilities(self):
        self.assertEqual(per_repetition_failure(3, 5), Fraction(1, 2))
        self.assertEqual(randomized_or_failure(4, 3), Fraction(1, 8))
        self.assertEqual(randomized_or(4, 3, 0).failure_bound, Fraction(1, 8))


if __name__ == '__main__':
    unittest.main()
