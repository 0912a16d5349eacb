"""
Tests for Fourier states, copying, phase estimation from copies and the QFT pipelines
"""

import math
import unittest
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import numpy as np

from fanq.circuit import stats
from fanq.qft import (
    CountingPhaseOracle, QfpSymbol, QftParams, decode_value, fourier_copies, fourier_state,
    majority_success, phase_estimation, pipeline_fidelity, qfp, qfp_decode, qfp_exact_success,
    qfp_success_rate, qfs, qft_circuit, qft_pow2, qft_q, qft_q_fidelity, qft_q_ideal, qft_q_joint_fidelity,
    sample_majority, vote_counts, w_norm,
)
from fanq.qft.decode import bitwise_majority
from fanq.qft.modular import default_copies
from fanq.simulator import Simulator, register_distribution, register_fidelity


class TestFourierStates(unittest.TestCase):

    def setUp(self):
        self.sim = Simulator()

    def test_fourier_state(self):
        np.testing.assert_allclose(fourier_state(0, 4), np.full(4, 0.5))
        phi = fourier_state(1, 3, width=2)
        self.assertEqual(phi[3], 0)
        self.assertAlmostEqual(np.linalg.norm(phi), 1.0)

    def test_exact_qft(self):
        m = 3
        c = qft_circuit(m)
        for v in range(1 << m):
            state = self.sim.run(c, {"r": v})
            self.assertAlmostEqual(register_fidelity(state, c.register("r"), fourier_state(v, 1 << m, m)), 1.0)

    def test_qfs(self):
        n = 3
        c = qfs(n)
        self.assertEqual(stats(c).depth, 2)
        result = self.sim.sweep(c, "x")
        for x in range(1 << n):
            fid = register_fidelity(result.state(x), c.register("out"), fourier_state(x, 1 << n, n))
            self.assertAlmostEqual(fid, 1.0)

    def test_copies_hold_the_same_state(self):
        n, m = 2, 3
        c = fourier_copies(n, m)
        for x in range(1 << n):
            state = self.sim.run(c, {"x": x})
            target = fourier_state(x, 1 << n, n)
            for name in ("out", "copy1", "copy2"):
                self.assertAlmostEqual(register_fidelity(state, c.register(name), target), 1.0)


class TestDecoding(unittest.TestCase):

    def test_votes(self):
        self.assertIs(vote_counts(2, 0, 0, 0), QfpSymbol.ZERO)
        self.assertIs(vote_counts(0, 0, 1, 1), QfpSymbol.UNKNOWN)
        self.assertIs(vote_counts(1, 0, 2, 0), QfpSymbol.P)
        self.assertIs(vote_counts(0, 3, 1, 2), QfpSymbol.ONE)

    def test_decode_bits(self):
        symbols = [QfpSymbol.ONE, QfpSymbol.ZERO, QfpSymbol.ONE]
        self.assertEqual(decode_value(symbols), 5)

    def test_decode_parities(self):
        self.assertEqual(qfp_decode([QfpSymbol.P, QfpSymbol.P, QfpSymbol.ZERO]), "000")
        self.assertEqual(qfp_decode([QfpSymbol.N, QfpSymbol.P, QfpSymbol.ONE]), "011")

    def test_zero_always_decodes(self):
        self.assertAlmostEqual(qfp_exact_success(3, 8, 0), 1.0)
        for x in range(8):
            self.assertTrue(0.0 <= qfp_exact_success(3, 8, x) <= 1.0)

    def test_odd_copies_rejected(self):
        with self.assertRaises(ValueError):
            qfp(3, 7)

    def test_success_rate(self):
        self.assertGreaterEqual(qfp_success_rate(3, 8, 400, seed=1), 0.75)


class TestPhaseEstimation(unittest.TestCase):

    def test_query_count(self):
        oracle = CountingPhaseOracle(5, 3)
        result = phase_estimation(oracle, 3, m=8, rng=np.random.default_rng(0))
        self.assertEqual(result.calls, 24)
        self.assertIn(result.estimate, range(8))

    def test_default_copies(self):
        self.assertEqual(default_copies(3), 18)
        self.assertEqual(default_copies(3) % 2, 0)


class TestPipelines(unittest.TestCase):

    def setUp(self):
        self.sim = Simulator()

    def test_pow2_ideal(self):
        n = 2
        c = qft_pow2(n, 2, "ideal")
        for x in range(1 << n):
            self.assertAlmostEqual(pipeline_fidelity(c, x, 1 << n, self.sim), 1.0)
            state = self.sim.run(c, {"x": x})
            self.assertAlmostEqual(register_distribution(state, c.register("x"))[0], 1.0)

    def test_pow2_bad_mode(self):
        with self.assertRaises(ValueError):
            qft_pow2(2, 2, "magic")

    def test_modular_params(self):
        params = QftParams(5)
        self.assertEqual((params.n, params.N, params.u, params.r, params.v), (3, 9, 102, 7, 2))
        self.assertAlmostEqual(params.neglected_norm, math.sqrt(2 / 512))
        with self.assertRaises(ValueError):
            QftParams(1)

    def test_neglected_branch(self):
        params = QftParams(5)
        self.assertAlmostEqual(w_norm(params), params.neglected_norm, places=9)
        self.assertEqual(w_norm(QftParams(4)), 0.0)

    def test_majority(self):
        row = np.array([1.0, 0.0, 0.0])
        self.assertAlmostEqual(majority_success(row, 0, 3, 2), 1.0)
        self.assertEqual(sample_majority(row, 0, 3, 2, 50, np.random.default_rng(0)), 1.0)
        self.assertAlmostEqual(majority_success(row, 1, 3, 2), 0.0)

    def test_idealized_modular_pipeline(self):
        q = 3
        c = qft_q_ideal(QftParams(q))
        for x in range(q):
            self.assertAlmostEqual(pipeline_fidelity(c, x, q, self.sim), 1.0)

    def test_bitwise_majority_oracle(self):
        widths = (2, 2, 2, 2)
        *_, target = bitwise_majority([np.array([1]), np.array([3]), np.array([2]), np.array([0])], widths)
        self.assertEqual(int(target[0]), 3)
        *_, target = bitwise_majority([np.array([1]), np.array([2]), np.array([1])], (2, 2, 2))
        self.assertEqual(int(target[0]), 1)

    def test_composed_pipeline_uses_every_stage(self):
        c = qft_q(QftParams(3))
        names = {getattr(g, "name", None) for g in c.gates()}
        for name in ("div_floor", "add_mod", "round_div", "bitwise_majority"):
            self.assertIn(name, names)
        self.assertEqual(len(c.register("out")), 2)
        self.assertEqual(c.qubit_count, 9 + 13 * 12)

    def test_composed_pipeline_matches_factorized_fidelity(self):
        params = QftParams(2, copies=1)
        self.assertEqual(qft_q(params).qubit_count, 10)
        for x in range(2):
            joint = qft_q_joint_fidelity(params, x, simulator=self.sim)
            self.assertAlmostEqual(joint, qft_q_fidelity(params, x), places=9)
            self.assertGreater(joint, 0.0)


if __name__ == '__main__':
    unittest.main()
