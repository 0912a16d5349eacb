"""
Circuit file format
JSON documents with one object per circuit; oracles are stored by registry name and parameters
"""

import json
from typing import Any, Dict, List

from ..errors import CircuitParseError
from . import (
    ORACLE_KINDS, Circuit, ControlledOneQubit, Fanout, Gate, Layer, OneQubit,
    Oracle, Parity, QubitRole, Unitary2, ensure_valid,
)

FORMAT_NAME = "fanq-circuit"
FORMAT_VERSION = 1
RESERVED_ORACLE_KEYS = ("kind", "name", "registers", "controls", "inverted")


def _unitary_record(u: Unitary2) -> List[float]:
    values = []
    for entry in u.entries:
        values.extend([entry.real, entry.imag])
    return values


def _gate_record(gate: Gate) -> Dict[str, Any]:
    if isinstance(gate, OneQubit):
        return {"kind": "one", "qubit": gate.qubit, "u": _unitary_record(gate.u)}
    if isinstance(gate, ControlledOneQubit):
        return {"kind": "controlled", "control": gate.control, "target": gate.target,
                "u": _unitary_record(gate.u)}
    if isinstance(gate, Fanout):
        return {"kind": "fanout", "control": gate.control, "targets": list(gate.targets)}
    if isinstance(gate, Parity):
        return {"kind": "parity", "sources": list(gate.sources), "target": gate.target}
    record = {"kind": gate.kind, "name": gate.name, "registers": [list(r) for r in gate.registers]}
    for key, value in gate.params:
        record[key] = _jsonable(value)
    if gate.controls:
        record["controls"] = list(gate.controls)
    if gate.inverted:
        record["inverted"] = True
    return record


def _jsonable(value):
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


def to_dict(circuit: Circuit) -> Dict[str, Any]:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "qubit_count": circuit.qubit_count,
        "roles": [role.value for role in circuit.roles],
        "clean_ancillas": circuit.clean_ancillas,
        "registers": {name: list(qubits) for name, qubits in circuit.registers},
        "layers": [[_gate_record(g) for g in layer.gates] for layer in circuit.layers],
    }


def serialize(circuit: Circuit, indent: int = None) -> str:
    """Serialize a valid circuit to text"""
    ensure_valid(circuit)
    return json.dumps(to_dict(circuit), indent=indent)


class _Reader:
    """Structural decoding with a path prefix for error messages"""

    def __init__(self, document):
        self.document = document

    def fail(self, path: str, message: str):
        raise CircuitParseError(f"{path}: {message}")

    def field(self, record, key, path, kind):
        if not isinstance(record, dict):
            self.fail(path, "expected an object")
        if key not in record:
            self.fail(path, f"missing field {key!r}")
        value = record[key]
        if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
            self.fail(f"{path}.{key}", "expected an integer")
        if kind is list and not isinstance(value, list):
            self.fail(f"{path}.{key}", "expected an array")
        return value

    def qubit_list(self, record, key, path):
        values = self.field(record, key, path, list)
        for i, v in enumerate(values):
            if isinstance(v, bool) or not isinstance(v, int):
                self.fail(f"{path}.{key}[{i}]", "expected an integer")
        return tuple(values)

    def unitary(self, record, path) -> Unitary2:
        values = self.field(record, "u", path, list)
        if len(values) != 8 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            self.fail(f"{path}.u", "expected 8 real numbers")
        try:
            return Unitary2(tuple(complex(values[2 * i], values[2 * i + 1]) for i in range(4)))
        except ValueError as e:
            self.fail(f"{path}.u", str(e))

    def gate(self, record, path) -> Gate:
        kind = self.field(record, "kind", path, str)
        if kind == "one":
            return OneQubit(self.unitary(record, path), self.field(record, "qubit", path, int))
        if kind == "controlled":
            return ControlledOneQubit(self.unitary(record, path), self.field(record, "control", path, int),
                                      self.field(record, "target", path, int))
        if kind == "fanout":
            return Fanout(self.field(record, "control", path, int), self.qubit_list(record, "targets", path))
        if kind == "parity":
            return Parity(self.qubit_list(record, "sources", path), self.field(record, "target", path, int))
        if kind in ORACLE_KINDS:
            return self.oracle(kind, record, path)
        self.fail(f"{path}.kind", f"unknown gate kind {kind!r}")

    def oracle(self, kind, record, path) -> Oracle:
        from ..oracles import make_oracle
        name = self.field(record, "name", path, str)
        registers = self.field(record, "registers", path, list)
        registers = tuple(self.qubit_list({"r": r}, "r", f"{path}.registers[{i}]") for i, r in enumerate(registers))
        controls = self.qubit_list(record, "controls", path) if "controls" in record else ()
        params = {k: v for k, v in record.items() if k not in RESERVED_ORACLE_KEYS}
        try:
            gate = make_oracle(kind, name, registers, controls=controls, **params)
        except (ValueError, TypeError) as e:
            self.fail(path, str(e))
        return gate.adjoint() if record.get("inverted", False) else gate

    def circuit(self) -> Circuit:
        doc = self.document
        if not isinstance(doc, dict):
            self.fail("document", "expected an object")
        if doc.get("format", FORMAT_NAME) != FORMAT_NAME:
            self.fail("format", f"expected {FORMAT_NAME!r}")
        qubit_count = self.field(doc, "qubit_count", "document", int)
        roles = []
        for i, role in enumerate(self.field(doc, "roles", "document", list)):
            try:
                roles.append(QubitRole(role))
            except ValueError:
                self.fail(f"roles[{i}]", f"unknown role {role!r}")
        registers = doc.get("registers", {})
        if not isinstance(registers, dict):
            self.fail("registers", "expected an object")
        registers = {name: self.qubit_list(registers, name, "registers") for name in registers}
        layers = []
        for i, layer in enumerate(self.field(doc, "layers", "document", list)):
            if not isinstance(layer, list):
                self.fail(f"layers[{i}]", "expected an array of gates")
            layers.append(Layer(tuple(self.gate(g, f"layers[{i}][{j}]") for j, g in enumerate(layer))))
        clean = doc.get("clean_ancillas", False)
        return Circuit(qubit_count, tuple(roles), tuple(layers), bool(clean), registers)


def from_dict(document) -> Circuit:
    return _Reader(document).circuit()


def deserialize(text: str) -> Circuit:
    """Parse a circuit document; syntax errors carry the JSON line and column"""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise CircuitParseError(e.msg, e.lineno, e.colno) from None
    return ensure_valid(from_dict(document))
