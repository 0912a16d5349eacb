"""
Tests for the statevector and reversible simulators
"""

import math
import unittest
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import numpy as np

from fanq.circuit import H, X, Circuit, CircuitBuilder, Fanout, OneQubit, Parity, QubitRole
from fanq.config import Settings
from fanq.errors import ConfigError, QubitBudgetError
from fanq.oracles import permutation
from fanq.simulator import (
    Simulator, basis_probability, fidelity, marginal_probability, measure, outcome_distribution,
    product_state, register_distribution, register_fidelity, unitary_distance,
)
from fanq.simulator.reversible import inputs_for, read, run_reversible


def or_circuit(n: int) -> Circuit:
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    out = b.register("out", 1, QubitRole.OUTPUT)
    b.append(permutation("or_into", (x, out)))
    return b.build()


class TestStatevector(unittest.TestCase):

    def setUp(self):
        self.sim = Simulator(Settings())

    def test_fanout_copies_control(self):
        c = Circuit(3, (QubitRole.INPUT,) * 3, [[Fanout(0, (1, 2))]])
        state = self.sim.run(c, "100")
        self.assertAlmostEqual(abs(state.amplitude("111")), 1.0)
        state = self.sim.run(c, "011")
        self.assertAlmostEqual(abs(state.amplitude("011")), 1.0)

    def test_parity_target(self):
        c = Circuit(4, (QubitRole.INPUT,) * 4, [[Parity((0, 1, 2), 3)]])
        state = self.sim.run(c, "1000")
        self.assertAlmostEqual(abs(state.amplitude("1001")), 1.0)

    def test_register_values_are_little_endian(self):
        c = or_circuit(3)
        state = self.sim.run(c, {"x": 5})
        dist = register_distribution(state, c.register("x"))
        self.assertAlmostEqual(dist[5], 1.0)
        self.assertAlmostEqual(marginal_probability(state, c.register("out")[0], 1), 1.0)

    def test_non_ancilla_bitstring_input(self):
        b = CircuitBuilder()
        x = b.register("x", 2, QubitRole.INPUT)
        b.register("anc", 1)
        c = b.build()
        state = self.sim.run(c, "10")
        self.assertAlmostEqual(register_distribution(state, x)[1], 1.0)

    def test_hadamard_marginal(self):
        c = Circuit(1, (QubitRole.INPUT,), [[OneQubit(H, 0)]])
        state = self.sim.run(c)
        self.assertAlmostEqual(marginal_probability(state, 0, 0), 0.5)
        self.assertAlmostEqual(basis_probability(state, 0, "hadamard", 0), 1.0)
        np.testing.assert_allclose(self.sim.unitary(c), H.matrix(), atol=1e-12)

    def test_sweep_matches_runs(self):
        c = or_circuit(3)
        result = self.sim.sweep(c, "x")
        self.assertEqual(len(result), 8)
        for value in range(8):
            dist = register_distribution(result.state(value), c.register("out"))
            self.assertAlmostEqual(dist[1], float(value != 0))

    def test_sweep_rejects_written_register(self):
        c = Circuit(2, (QubitRole.INPUT,) * 2, [[Fanout(0, (1,))]], registers={"x": (0, 1)})
        with self.assertRaises(ValueError):
            self.sim.sweep(c, "x")

    def test_qubit_budget(self):
        sim = Simulator(Settings(qubit_budget=3))
        with self.assertRaises(QubitBudgetError) as ctx:
            sim.run(or_circuit(3))
        self.assertEqual(ctx.exception.required, 4)

    def test_measure_collapses(self):
        c = Circuit(2, (QubitRole.INPUT,) * 2, [[OneQubit(H, 0)], [Fanout(0, (1,))]])
        state = self.sim.run(c)
        outcome, collapsed = measure(state, [(0, "computational")], np.random.default_rng(3))
        self.assertIn(outcome, ("0", "1"))
        expected = outcome * 2
        self.assertAlmostEqual(abs(collapsed.amplitude(expected)), 1.0)

    def test_outcome_distribution(self):
        c = Circuit(2, (QubitRole.INPUT,) * 2, [[OneQubit(H, 0)], [Fanout(0, (1,))]])
        dist = outcome_distribution(self.sim.run(c), [0, 1])
        self.assertAlmostEqual(dist["00"], 0.5)
        self.assertAlmostEqual(dist["11"], 0.5)
        self.assertEqual(dist["01"], 0.0)
        self.assertAlmostEqual(dist.total(), 1.0)

    def test_product_state_and_fidelity(self):
        c = or_circuit(2)
        plus = np.full(4, 0.5)
        state = product_state(c, {"x": plus})
        self.assertAlmostEqual(state.norm(), 1.0)
        self.assertAlmostEqual(register_fidelity(state, c.register("x"), plus), 1.0)
        self.assertAlmostEqual(fidelity(state, state), 1.0)

    def test_unitary_distance(self):
        c = Circuit(1, (QubitRole.INPUT,), [[OneQubit(H, 0)], [OneQubit(H, 0)]])
        self.assertLess(unitary_distance(c, Circuit(1, (QubitRole.INPUT,))), 1e-9)
        flip = Circuit(1, (QubitRole.INPUT,), [[OneQubit(X, 0)]])
        self.assertAlmostEqual(unitary_distance(flip, Circuit(1, (QubitRole.INPUT,))), 2.0)


class TestReversible(unittest.TestCase):

    def test_or_oracle(self):
        c = or_circuit(4)
        out = run_reversible(c, inputs_for(c, "x", range(16)))
        np.testing.assert_array_equal(read(out, c, "out"), (np.arange(16) != 0).astype(int))
        np.testing.assert_array_equal(read(out, c, "x"), np.arange(16))

    def test_bitstring_inputs(self):
        c = Circuit(3, (QubitRole.INPUT,) * 3, [[Fanout(0, (1, 2))]])
        self.assertEqual(list(run_reversible(c, ["100", "000"])), [0b111, 0])

    def test_rejects_superposing_gate(self):
        c = Circuit(1, (QubitRole.INPUT,), [[OneQubit(H, 0)]])
        with self.assertRaises(ValueError):
            run_reversible(c, [0])


class TestSettings(unittest.TestCase):

    def test_from_env(self):
        settings = Settings.from_env({"FANQ_QUBIT_BUDGET": "20", "FANQ_LOG_LEVEL": "debug"})
        self.assertEqual(settings.qubit_budget, 20)
        self.assertEqual(settings.log_level, "DEBUG")

    def test_bad_budget(self):
        with self.assertRaises(ConfigError):
            Settings.from_env({"FANQ_QUBIT_BUDGET": "many"})
        with self.assertRaises(ConfigError):
            Settings.from_env({"FANQ_TOLERANCE": "-1"})

    def test_replace(self):
        self.assertEqual(Settings().replace(qubit_budget=5).qubit_budget, 5)
        self.assertTrue(math.isclose(Settings().tolerance, 1e-9))


if __name__ == '__main__':
    unittest.main()
