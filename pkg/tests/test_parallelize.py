"""
Tests for fan-out/parity equivalence, controlled unitaries, commuting-gate parallelisation and rotations
"""

import cmath
import math
import unittest
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import numpy as np
from scipy.stats import unitary_group

from fanq.bits import popcount
from fanq.circuit import H, X, Circuit, ControlledOneQubit, OneQubit, QubitRole, Unitary2, ry, rz, stats
from fanq.errors import DiagonalizationError, SearchExhaustedError
from fanq.parallelize import (
    CommutingGateSet, approx_rotation_fixed_basis, controlled_u_circuit, direct_fanout, direct_parity,
    fanout_from_parity, mod_q_builder, parallelize_commuting, parity_from_fanout, random_commuting_set,
    rotate_state, rotate_state_amplitudes, rotation_by_hamming_weight, rotation_by_value,
    sequential_product,
)
from fanq.simulator import Simulator, register_distribution, register_fidelity, unitary_distance


class TestFanoutParity(unittest.TestCase):

    def test_parity_from_fanout(self):
        for n in range(1, 4):
            self.assertLess(unitary_distance(parity_from_fanout(n), direct_parity(n)), 1e-9)

    def test_fanout_from_parity(self):
        for n in range(1, 4):
            self.assertLess(unitary_distance(fanout_from_parity(n), direct_fanout(n)), 1e-9)

    def test_cost(self):
        s = stats(parity_from_fanout(5))
        self.assertEqual(s.depth, 3)
        self.assertEqual(s.size, 3 * 6)

    def test_rejects_empty(self):
        with self.assertRaises(ValueError):
            parity_from_fanout(0)


class TestControlledU(unittest.TestCase):

    def reference(self, u: Unitary2) -> Circuit:
        return Circuit(2, (QubitRole.INPUT,) * 2, [[ControlledOneQubit(u, 0, 1)]])

    def test_named_gates(self):
        for u in (H, X, rz(0.7) @ ry(1.3)):
            self.assertLess(unitary_distance(controlled_u_circuit(u), self.reference(u)), 1e-9)

    def test_haar_random(self):
        for seed in range(3):
            u = Unitary2.from_matrix(unitary_group.rvs(2, random_state=seed))
            self.assertLess(unitary_distance(controlled_u_circuit(u), self.reference(u)), 1e-9)


class TestCommuting(unittest.TestCase):

    def test_matches_sequential_product(self):
        for seed, (n, k) in enumerate([(2, 1), (3, 1), (2, 2)]):
            gate_set = random_commuting_set(n, k, seed)
            parallel = parallelize_commuting(gate_set)
            self.assertLess(unitary_distance(parallel, sequential_product(gate_set)), 1e-8)
            self.assertEqual(stats(parallel).ancilla_count, (n - 1) * k)

    def test_non_diagonalizable_rejected(self):
        flip = Circuit(1, (QubitRole.INPUT,), [[OneQubit(X, 0)]])
        identity = Circuit(1, (QubitRole.INPUT,))
        with self.assertRaises(DiagonalizationError):
            parallelize_commuting(CommutingGateSet(1, [flip], identity))

    def test_width_mismatch(self):
        gate = Circuit(2, (QubitRole.INPUT,) * 2)
        with self.assertRaises(ValueError):
            parallelize_commuting(CommutingGateSet(1, [gate], Circuit(1, (QubitRole.INPUT,))))

    def test_mod_q_counts(self):
        c = mod_q_builder(3, 3)
        sim = Simulator()
        for x in range(8):
            dist = register_distribution(sim.run(c, {"x": x}), c.register("target"))
            self.assertAlmostEqual(dist[bin(x).count("1") % 3], 1.0, places=9)


class TestRotations(unittest.TestCase):

    def diagonal(self, circuit: Circuit) -> np.ndarray:
        u = Simulator().unitary(circuit)
        np.testing.assert_allclose(u, np.diag(np.diag(u)), atol=1e-12)
        return np.diag(u)

    def test_hamming_weight(self):
        n, phi = 3, 0.4
        d = self.diagonal(rotation_by_hamming_weight(n, phi))
        index = np.arange(1 << (n + 1))
        expected = np.exp(1j * phi * popcount(index >> 1) * (index & 1))
        np.testing.assert_allclose(d, expected, atol=1e-12)

    def test_value(self):
        n, phi = 3, 0.3
        d = self.diagonal(rotation_by_value(n, phi))
        for i, entry in enumerate(d):
            value = sum(((i >> (n - j)) & 1) << j for j in range(n))
            self.assertAlmostEqual(entry, cmath.exp(1j * phi * value * (i & 1)))

    def test_rotate_state(self):
        n, phi = 4, 1.1
        c = rotate_state(n, phi)
        sim = Simulator()
        for x in range(1 << n):
            state = sim.run(c, {"x": x})
            target = rotate_state_amplitudes(phi, bin(x).count("1"))
            self.assertAlmostEqual(register_fidelity(state, c.register("target"), target), 1.0)

    def test_fixed_basis_search(self):
        found = approx_rotation_fixed_basis(1.0, 1e-2)
        self.assertLessEqual(found.error, 1e-2)
        residual = abs((found.angle - 1.0 + math.pi) % (2 * math.pi) - math.pi)
        self.assertAlmostEqual(residual, found.error)

    def test_fixed_basis_exhausted(self):
        with self.assertRaises(SearchExhaustedError) as ctx:
            approx_rotation_fixed_basis(1.0, 1e-12, bound=10)
        self.assertLessEqual(ctx.exception.best_repetitions, 10)

    def test_fixed_basis_circuit(self):
        n, phi = 2, 0.8
        found = approx_rotation_fixed_basis(phi, 0.05, bound=200)
        d = self.diagonal_on_inputs(rotation_by_hamming_weight(n, phi, found), n)
        for x, entry in enumerate(d):
            w = bin(x).count("1")
            self.assertLess(abs(entry - cmath.exp(1j * phi * w)), 0.05 * n + 1e-9)

    def diagonal_on_inputs(self, circuit: Circuit, n: int):
        """Phase on target |1> for each x, ancillas starting in |0>"""
        sim = Simulator()
        target = circuit.register("target")[0]
        phases = []
        for x in range(1 << n):
            state = sim.run(circuit, {"x": x, "target": 1})
            index = int(np.argmax(np.abs(state.amplitudes)))
            self.assertEqual(index >> (circuit.qubit_count - 1 - target) & 1, 1)
            phases.append(state.amplitudes[index])
        return phases


if __name__ == '__main__':
    unittest.main()
