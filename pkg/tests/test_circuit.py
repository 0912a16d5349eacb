"""
Tests for the circuit IR, its cost model and the circuit file format
"""

import unittest
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import numpy as np

from fanq.circuit import (
    H, X, Circuit, CircuitBuilder, ControlledOneQubit, Fanout, OneQubit, Parity, QubitRole,
    Unitary2, compose, control_circuit, ensure_valid, expand_macros, inverse, rz, stats, validate,
)
from fanq.circuit.codec import deserialize, serialize, to_dict
from fanq.errors import CircuitParseError, OracleError, ValidationError
from fanq.oracles import permutation, weight_phase
from fanq.parallelize import mod_q_builder
from fanq.simulator import unitary_distance
from fanq.suites import build_construction
from fanq.suites import registry as suite_registry


def small_circuit() -> Circuit:
    b = CircuitBuilder()
    x = b.register("x", 3, QubitRole.INPUT)
    out = b.register("out", 1, QubitRole.OUTPUT)
    b.append(Fanout(x[0], (x[1],)))
    b.append(OneQubit(H, x[2]))
    b.append(Parity((x[0], x[2]), out[0]))
    return b.build()


class TestBuilder(unittest.TestCase):
    """ASAP placement and layer bookkeeping"""

    def test_asap_placement(self):
        c = small_circuit()
        self.assertEqual(c.depth, 2)
        self.assertEqual(len(c.layers[0]), 2)
        self.assertIsInstance(c.layers[1].gates[0], Parity)

    def test_cost_model(self):
        s = stats(small_circuit())
        self.assertEqual(s.depth, 2)
        self.assertEqual(s.size, 2 + 1 + 3)
        self.assertEqual(s.ancilla_count, 0)
        self.assertEqual(s.as_dict()["nominal_depth"], 2)

    def test_empty_layer_is_noop(self):
        b = CircuitBuilder()
        b.register("x", 2, QubitRole.INPUT)
        self.assertEqual(b.layer([]), 0)
        self.assertEqual(b.build().depth, 0)

    def test_layer_keeps_gates_together(self):
        b = CircuitBuilder()
        x = b.register("x", 2, QubitRole.INPUT)
        b.append(OneQubit(X, x[0]))
        index = b.layer([OneQubit(H, x[0]), OneQubit(H, x[1])])
        self.assertEqual(index, 1)
        self.assertEqual(len(b.build().layers[1]), 2)

    def test_duplicate_register(self):
        b = CircuitBuilder()
        b.register("x", 2)
        with self.assertRaises(ValueError):
            b.register("x", 1)

    def test_bind_allocates_fresh_registers(self):
        inner = small_circuit()
        b = CircuitBuilder()
        data = b.register("data", 3, QubitRole.INPUT)
        mapping = b.bind(inner, {"x": data}, "inner_")
        self.assertIn("inner_out", b.registers)
        self.assertEqual([mapping[q] for q in inner.register("x")], list(data))
        b.extend(inner, mapping)
        self.assertEqual(b.build().depth, 2)

    def test_parallel_blocks_share_start(self):
        inner = small_circuit()
        b = CircuitBuilder()
        first = b.bind(inner, {}, "a_")
        second = b.bind(inner, {}, "b_")
        b.parallel([(inner, first), (inner, second)])
        c = b.build()
        self.assertEqual(c.depth, 2)
        self.assertEqual(stats(c).size, 2 * stats(inner).size)

    def test_parallel_overlap_rejected(self):
        inner = small_circuit()
        b = CircuitBuilder()
        b.register("q", 4, QubitRole.INPUT)
        with self.assertRaises(ValueError):
            b.parallel([(inner, None), (inner, None)])


class TestValidation(unittest.TestCase):

    def test_shared_qubit_in_layer(self):
        c = Circuit(2, (QubitRole.INPUT,) * 2, [[OneQubit(X, 0), OneQubit(H, 0)]])
        problems = validate(c)
        self.assertTrue(any("share qubit 0" in p for p in problems))
        with self.assertRaises(ValidationError):
            ensure_valid(c)

    def test_fanout_control_in_targets(self):
        c = Circuit(3, (QubitRole.INPUT,) * 3, [[Fanout(0, (0, 1))]])
        self.assertTrue(any("also a target" in p for p in validate(c)))

    def test_qubit_out_of_range(self):
        c = Circuit(2, (QubitRole.INPUT,) * 2, [[Parity((0, 1), 2)]])
        self.assertTrue(validate(c))

    def test_non_unitary_rejected(self):
        with self.assertRaises(ValueError):
            Unitary2((1, 1, 0, 1))

    def test_bad_oracle_parameters(self):
        with self.assertRaises(OracleError):
            permutation("add_mod", ((0, 1), (2,)), q=5)


class TestTransforms(unittest.TestCase):

    def test_inverse_is_involution(self):
        b = CircuitBuilder()
        x = b.register("x", 2, QubitRole.INPUT)
        b.append(OneQubit(rz(0.3), x[0]))
        b.append(ControlledOneQubit(rz(1.1), x[0], x[1]))
        c = b.build()
        self.assertEqual(inverse(inverse(c)), c)
        self.assertLess(unitary_distance(compose(c, inverse(c)), Circuit(2, c.roles)), 1e-9)

    def test_added_control_counts_in_oracle_size(self):
        gate = permutation("or_into", ((0, 1), (2,)))
        self.assertEqual(gate.with_control(3), permutation("or_into", ((0, 1), (2,)), controls=(3,)))
        self.assertEqual(gate.with_control(3).size, gate.size + 1)

    def test_compose_mismatch(self):
        with self.assertRaises(ValueError):
            compose(small_circuit(), Circuit(2, (QubitRole.INPUT,) * 2))

    def test_control_qubit_must_be_free(self):
        with self.assertRaises(ValueError):
            control_circuit(small_circuit(), 0)

    def test_expand_weight_phase(self):
        b = CircuitBuilder()
        x = b.register("x", 2, QubitRole.INPUT)
        y = b.register("y", 2, QubitRole.INPUT)
        b.append(weight_phase(x, y, [0.7, -0.4]))
        c = b.build()
        s = stats(c)
        self.assertEqual((s.depth, s.nominal_depth, s.size), (1, 3, 24))
        expanded = expand_macros(c)
        self.assertEqual(expanded.depth, 3)
        self.assertEqual(expanded.qubit_count, 8)
        self.assertLess(unitary_distance(c, expanded), 1e-9)


class TestCodec(unittest.TestCase):

    def test_roundtrip(self):
        b = CircuitBuilder()
        x = b.register("x", 2, QubitRole.INPUT)
        y = b.register("y", 1, QubitRole.OUTPUT)
        b.append(OneQubit(H, x[0]))
        b.append(weight_phase(x, y, [0.25]))
        b.append(permutation("or_into", (x, y)))
        c = b.build()
        self.assertEqual(deserialize(serialize(c)), c)

    def test_roundtrip_every_construction(self):
        for name in suite_registry.construction_names():
            with self.subTest(construction=name):
                c = build_construction(name)
                back = deserialize(serialize(c))
                self.assertEqual(back, c)
                self.assertEqual(stats(back), stats(c))

    def test_roundtrip_keeps_controlled_oracle_size(self):
        c = mod_q_builder(2, 3)
        back = deserialize(serialize(c))
        self.assertEqual(back, c)
        self.assertEqual(stats(back), stats(c))

    def test_document_header(self):
        doc = to_dict(small_circuit())
        self.assertEqual(doc["format"], "fanq-circuit")
        self.assertEqual(doc["registers"]["out"], [3])
        self.assertEqual(doc["roles"][3], "output")

    def test_syntax_error_position(self):
        with self.assertRaises(CircuitParseError) as ctx:
            deserialize('{\n  "qubit_count": }')
        self.assertEqual(ctx.exception.line, 2)

    def test_unknown_gate_kind(self):
        text = '{"qubit_count": 1, "roles": ["input"], "layers": [[{"kind": "toffoli"}]]}'
        with self.assertRaises(CircuitParseError) as ctx:
            deserialize(text)
        self.assertIsNone(ctx.exception.line)
        self.assertTrue(str(ctx.exception).startswith("layers[0][0].kind: "))
        self.assertNotIn("line", str(ctx.exception))

    def test_invalid_circuit_rejected(self):
        text = ('{"qubit_count": 2, "roles": ["input", "input"], '
                '"layers": [[{"kind": "fanout", "control": 0, "targets": [0]}]]}')
        with self.assertRaises(ValidationError):
            deserialize(text)

    def test_unitary_entries_survive(self):
        c = Circuit(1, (QubitRole.INPUT,), [[OneQubit(rz(0.123), 0)]])
        back = deserialize(serialize(c))
        np.testing.assert_allclose(back.layers[0].gates[0].u.matrix(), rz(0.123).matrix())


if __name__ == '__main__':
    unittest.main()
