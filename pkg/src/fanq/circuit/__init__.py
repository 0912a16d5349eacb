"""
Circuit IR for fanq
Layered circuits over labeled qubits with the fan-out cost model:
depth is the number of layers, size is the total number of affected qubits
"""

import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import ClassVar, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import OracleError, ValidationError

logger = logging.getLogger(__name__)

UNITARY_TOLERANCE = 1e-12


class QubitRole(Enum):
    INPUT = "input"
    OUTPUT = "output"
    ANCILLA = "ancilla"


@dataclass(frozen=True)
class Unitary2:
    """2x2 unitary stored row-major"""
    entries: Tuple[complex, complex, complex, complex]

    def __post_init__(self):
        entries = tuple(complex(e) for e in self.entries)
        if len(entries) != 4:
            raise ValueError("Unitary2 needs exactly four entries")
        object.__setattr__(self, "entries", entries)
        m = np.array(entries, dtype=complex).reshape(2, 2)
        residual = np.max(np.abs(m.conj().T @ m - np.eye(2)))
        if residual > UNITARY_TOLERANCE:
            raise ValueError(f"matrix is not unitary (residual {residual:.3e})")

    @classmethod
    def from_matrix(cls, matrix) -> "Unitary2":
        m = np.asarray(matrix, dtype=complex)
        return cls(tuple(m.reshape(-1)))

    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=complex).reshape(2, 2)

    def adjoint(self) -> "Unitary2":
        a, b, c, d = self.entries
        return Unitary2((a.conjugate(), c.conjugate(), b.conjugate(), d.conjugate()))

    def __matmul__(self, other: "Unitary2") -> "Unitary2":
        return Unitary2.from_matrix(self.matrix() @ other.matrix())

    def is_diagonal(self, tolerance: float = UNITARY_TOLERANCE) -> bool:
        return abs(self.entries[1]) <= tolerance and abs(self.entries[2]) <= tolerance


def rz(phi: float) -> Unitary2:
    """Rz(phi) = diag(1, e^{i phi}), the phase-on-|1> convention"""
    return Unitary2((1, 0, 0, cmath.exp(1j * phi)))


def ry(theta: float) -> Unitary2:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return Unitary2((c, -s, s, c))


_R = 1 / math.sqrt(2)
H = Unitary2((_R, _R, _R, -_R))
X = Unitary2((0, 1, 1, 0))
I2 = Unitary2((1, 0, 0, 1))
S = Unitary2((1, 0, 0, 1j))
S_DAG = Unitary2((1, 0, 0, -1j))


# Gates

@dataclass(frozen=True)
class OneQubit:
    u: Unitary2
    qubit: int
    kind: ClassVar[str] = "one"

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (self.qubit,)

    @property
    def size(self) -> int:
        return 1

    @property
    def nominal_depth(self) -> int:
        return 1

    def adjoint(self) -> "OneQubit":
        return OneQubit(self.u.adjoint(), self.qubit)

    def remap(self, mapping: Mapping[int, int]) -> "OneQubit":
        return OneQubit(self.u, mapping[self.qubit])


@dataclass(frozen=True)
class ControlledOneQubit:
    u: Unitary2
    control: int
    target: int
    kind: ClassVar[str] = "controlled"

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (self.control, self.target)

    @property
    def size(self) -> int:
        return 2

    @property
    def nominal_depth(self) -> int:
        return 1

    def adjoint(self) -> "ControlledOneQubit":
        return ControlledOneQubit(self.u.adjoint(), self.control, self.target)

    def remap(self, mapping: Mapping[int, int]) -> "ControlledOneQubit":
        return ControlledOneQubit(self.u, mapping[self.control], mapping[self.target])


@dataclass(frozen=True)
class Fanout:
    """|c>|y_1..y_n> -> |c>|y_1 xor c, ..., y_n xor c>"""
    control: int
    targets: Tuple[int, ...]
    kind: ClassVar[str] = "fanout"

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (self.control,) + self.targets

    @property
    def size(self) -> int:
        return 1 + len(self.targets)

    @property
    def nominal_depth(self) -> int:
        return 1

    def adjoint(self) -> "Fanout":
        return self

    def remap(self, mapping: Mapping[int, int]) -> "Fanout":
        return Fanout(mapping[self.control], tuple(mapping[t] for t in self.targets))


@dataclass(frozen=True)
class Parity:
    """|x_1..x_n>|y> -> |x_1..x_n>|y xor x_1 xor ... xor x_n>"""
    sources: Tuple[int, ...]
    target: int
    kind: ClassVar[str] = "parity"

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.sources + (self.target,)

    @property
    def size(self) -> int:
        return len(self.sources) + 1

    @property
    def nominal_depth(self) -> int:
        return 1

    def adjoint(self) -> "Parity":
        return self

    def remap(self, mapping: Mapping[int, int]) -> "Parity":
        return Parity(tuple(mapping[s] for s in self.sources), mapping[self.target])


ParamValue = Union[int, float, str, Tuple]


def freeze_params(params: Mapping[str, object]) -> Tuple[Tuple[str, ParamValue], ...]:
    """Sorted, hashable parameter items; lists become tuples"""
    def freeze(value):
        if isinstance(value, (list, tuple)):
            return tuple(freeze(v) for v in value)
        if isinstance(value, np.integer):
            return int(value)
        if isinstance(value, np.floating):
            return float(value)
        return value
    return tuple(sorted((str(k), freeze(v)) for k, v in params.items()))


@dataclass(frozen=True)
class Oracle:
    """Registry-defined gate on one or more little-endian registers"""
    name: str
    registers: Tuple[Tuple[int, ...], ...]
    params: Tuple[Tuple[str, ParamValue], ...] = ()
    nominal_depth: int = 1
    nominal_size: int = 0
    inverted: bool = False
    controls: Tuple[int, ...] = ()
    kind: ClassVar[str] = "oracle"

    def __post_init__(self):
        object.__setattr__(self, "registers", tuple(tuple(r) for r in self.registers))
        object.__setattr__(self, "controls", tuple(self.controls))
        if isinstance(self.params, Mapping):
            object.__setattr__(self, "params", freeze_params(self.params))

    @property
    def qubits(self) -> Tuple[int, ...]:
        return tuple(q for r in self.registers for q in r) + self.controls

    @property
    def widths(self) -> Tuple[int, ...]:
        return tuple(len(r) for r in self.registers)

    @property
    def size(self) -> int:
        return self.nominal_size

    @property
    def param_dict(self) -> Dict[str, ParamValue]:
        return dict(self.params)

    def adjoint(self) -> "Oracle":
        return replace(self, inverted=not self.inverted)

    def remap(self, mapping: Mapping[int, int]) -> "Oracle":
        return replace(
            self,
            registers=tuple(tuple(mapping[q] for q in r) for r in self.registers),
            controls=tuple(mapping[c] for c in self.controls),
        )

    def with_control(self, control: int) -> "Oracle":
        return replace(self, controls=self.controls + (control,), nominal_size=self.nominal_size + 1)


@dataclass(frozen=True)
class PermutationOracle(Oracle):
    kind: ClassVar[str] = "perm"


@dataclass(frozen=True)
class DiagonalOracle(Oracle):
    kind: ClassVar[str] = "diag"


@dataclass(frozen=True)
class UnitaryOracle(Oracle):
    kind: ClassVar[str] = "unitary"


Gate = Union[OneQubit, ControlledOneQubit, Fanout, Parity, PermutationOracle, DiagonalOracle, UnitaryOracle]
ORACLE_KINDS = {"perm": PermutationOracle, "diag": DiagonalOracle, "unitary": UnitaryOracle}


@dataclass(frozen=True)
class Layer:
    gates: Tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    @property
    def qubits(self) -> Tuple[int, ...]:
        return tuple(q for g in self.gates for q in g.qubits)

    def __iter__(self):
        return iter(self.gates)

    def __len__(self):
        return len(self.gates)


@dataclass(frozen=True)
class Circuit:
    qubit_count: int
    roles: Tuple[QubitRole, ...]
    layers: Tuple[Layer, ...] = ()
    clean_ancillas: bool = False
    registers: Tuple[Tuple[str, Tuple[int, ...]], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "roles", tuple(self.roles))
        object.__setattr__(self, "layers", tuple(
            layer if isinstance(layer, Layer) else Layer(tuple(layer)) for layer in self.layers
        ))
        registers = self.registers.items() if isinstance(self.registers, Mapping) else self.registers
        object.__setattr__(self, "registers", tuple((name, tuple(qs)) for name, qs in registers))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def ancillas(self) -> Tuple[int, ...]:
        return tuple(q for q, role in enumerate(self.roles) if role is QubitRole.ANCILLA)

    @property
    def register_map(self) -> Dict[str, Tuple[int, ...]]:
        return dict(self.registers)

    def register(self, name: str) -> Tuple[int, ...]:
        for reg_name, qubits in self.registers:
            if reg_name == name:
                return qubits
        raise KeyError(f"circuit has no register named {name!r}")

    def gates(self) -> Iterable[Gate]:
        for layer in self.layers:
            yield from layer.gates


def empty_circuit(qubit_count: int, roles: Optional[Sequence[QubitRole]] = None,
                  registers: Optional[Mapping[str, Sequence[int]]] = None) -> Circuit:
    roles = tuple(roles) if roles is not None else (QubitRole.INPUT,) * qubit_count
    return Circuit(qubit_count, roles, (), True, dict(registers or {}))


@dataclass(frozen=True)
class CircuitStats:
    depth: int
    size: int
    ancilla_count: int
    nominal_depth: int

    def as_dict(self) -> Dict[str, int]:
        return {
            "depth": self.depth,
            "size": self.size,
            "ancillas": self.ancilla_count,
            "nominal_depth": self.nominal_depth,
        }


# Validation and accounting

def _gate_violations(gate: Gate, where: str, qubit_count: int) -> List[str]:
    problems = []
    for q in gate.qubits:
        if not (0 <= q < qubit_count):
            problems.append(f"{where}: qubit {q} outside 0..{qubit_count - 1}")
    if isinstance(gate, Fanout):
        if len(set(gate.targets)) != len(gate.targets):
            problems.append(f"{where}: fan-out targets repeat")
        if gate.control in gate.targets:
            problems.append(f"{where}: fan-out control {gate.control} is also a target")
    elif isinstance(gate, Parity):
        if len(set(gate.sources)) != len(gate.sources):
            problems.append(f"{where}: parity sources repeat")
        if gate.target in gate.sources:
            problems.append(f"{where}: parity target {gate.target} is also a source")
    elif isinstance(gate, ControlledOneQubit):
        if gate.control == gate.target:
            problems.append(f"{where}: control equals target {gate.target}")
    elif isinstance(gate, Oracle):
        flat = gate.qubits
        if len(set(flat)) != len(flat):
            problems.append(f"{where}: oracle {gate.name} registers overlap")
        from ..oracles import registry
        try:
            registry.check(gate)
        except OracleError as e:
            problems.append(f"{where}: {e}")
    return problems


def validate(circuit: Circuit) -> List[str]:
    """Return every invariant violation; an empty list means the circuit is valid"""
    problems = []
    if len(circuit.roles) != circuit.qubit_count:
        problems.append(f"{len(circuit.roles)} roles for {circuit.qubit_count} qubits")
    for name, qubits in circuit.registers:
        bad = [q for q in qubits if not (0 <= q < circuit.qubit_count)]
        if bad:
            problems.append(f"register {name}: qubits {bad} out of range")
    for i, layer in enumerate(circuit.layers):
        seen = set()
        for j, gate in enumerate(layer.gates):
            where = f"layer {i} gate {j}"
            problems.extend(_gate_violations(gate, where, circuit.qubit_count))
            for q in set(gate.qubits):
                if q in seen:
                    problems.append(f"layer {i}: gates share qubit {q}")
                seen.add(q)
    return problems


def ensure_valid(circuit: Circuit) -> Circuit:
    problems = validate(circuit)
    if problems:
        raise ValidationError(problems)
    return circuit


def stats(circuit: Circuit) -> CircuitStats:
    ensure_valid(circuit)
    size = 0
    nominal_depth = 0
    for layer in circuit.layers:
        size += sum(g.size for g in layer.gates)
        nominal_depth += max([1] + [g.nominal_depth for g in layer.gates])
    return CircuitStats(
        depth=len(circuit.layers),
        size=size,
        ancilla_count=len(circuit.ancillas),
        nominal_depth=nominal_depth,
    )


def compose(first: Circuit, *rest: Circuit) -> Circuit:
    """Layers of the first circuit followed by the layers of the others"""
    result = first
    for other in rest:
        if other.qubit_count != result.qubit_count:
            raise ValueError(f"cannot compose {result.qubit_count}-qubit and {other.qubit_count}-qubit circuits")
        if other.roles != result.roles:
            raise ValueError("cannot compose circuits with different qubit roles")
        registers = dict(result.registers)
        for name, qubits in other.registers:
            registers.setdefault(name, qubits)
        result = Circuit(
            result.qubit_count,
            result.roles,
            result.layers + other.layers,
            result.clean_ancillas and other.clean_ancillas,
            registers,
        )
    return result


def inverse(circuit: Circuit) -> Circuit:
    """Uncomputation: layers reversed, every gate replaced by its adjoint"""
    from ..oracles import registry
    layers = []
    for layer in reversed(circuit.layers):
        gates = []
        for gate in layer.gates:
            if isinstance(gate, PermutationOracle) and not registry.get(gate.name).invertible:
                raise OracleError(f"oracle {gate.name} has no inverse")
            gates.append(gate.adjoint())
        layers.append(Layer(tuple(gates)))
    return replace(circuit, layers=tuple(layers))


def remap(circuit: Circuit, mapping: Mapping[int, int], qubit_count: int,
          roles: Optional[Sequence[QubitRole]] = None) -> Circuit:
    """Embed a circuit into a larger register"""
    if roles is None:
        roles = [QubitRole.ANCILLA] * qubit_count
        for old, new in mapping.items():
            roles[new] = circuit.roles[old]
    layers = tuple(Layer(tuple(g.remap(mapping) for g in layer.gates)) for layer in circuit.layers)
    registers = {name: tuple(mapping[q] for q in qs) for name, qs in circuit.registers}
    return Circuit(qubit_count, tuple(roles), layers, circuit.clean_ancillas, registers)


def controlled(gate: Gate, control: int) -> Gate:
    if isinstance(gate, OneQubit):
        return ControlledOneQubit(gate.u, control, gate.qubit)
    if isinstance(gate, Oracle):
        return gate.with_control(control)
    raise ValueError(f"cannot add a control to a {gate.kind} gate")


def control_circuit(circuit: Circuit, control: int) -> Circuit:
    """Controlled version of a circuit; every gate gets its own layer since they share the control"""
    if control < circuit.qubit_count and any(control in g.qubits for g in circuit.gates()):
        raise ValueError(f"control {control} is used by the circuit")
    qubit_count = max(circuit.qubit_count, control + 1)
    roles = list(circuit.roles) + [QubitRole.INPUT] * (qubit_count - circuit.qubit_count)
    layers = tuple(Layer((controlled(g, control),)) for g in circuit.gates())
    return Circuit(qubit_count, tuple(roles), layers, circuit.clean_ancillas, circuit.registers)


class CircuitBuilder:
    """Incremental construction with ASAP placement and layer-preserving embedding"""

    def __init__(self):
        self.roles: List[QubitRole] = []
        self.registers: Dict[str, Tuple[int, ...]] = {}
        self.layers: List[List[Gate]] = []
        self.frontier: List[int] = []

    @property
    def qubit_count(self) -> int:
        return len(self.roles)

    def register(self, name: str, size: int, role: QubitRole = QubitRole.ANCILLA) -> Tuple[int, ...]:
        if name in self.registers:
            raise ValueError(f"register {name!r} already allocated")
        start = len(self.roles)
        qubits = tuple(range(start, start + size))
        self.roles.extend([role] * size)
        self.frontier.extend([0] * size)
        self.registers[name] = qubits
        return qubits

    def _place(self, start: int, gates: Sequence[Gate], offset: int = 0):
        index = start + offset
        while len(self.layers) <= index:
            self.layers.append([])
        self.layers[index].extend(gates)

    def _start(self, qubits: Iterable[int]) -> int:
        return max([0] + [self.frontier[q] for q in qubits])

    def append(self, gate: Gate) -> int:
        """Place a gate in the earliest layer after everything touching its qubits"""
        index = self._start(gate.qubits)
        self._place(index, [gate])
        for q in gate.qubits:
            self.frontier[q] = index + 1
        return index

    def layer(self, gates: Sequence[Gate]) -> int:
        """Place gates together in one layer"""
        gates = list(gates)
        if not gates:
            return self.depth
        qubits = [q for g in gates for q in g.qubits]
        index = self._start(qubits)
        self._place(index, gates)
        for q in qubits:
            self.frontier[q] = index + 1
        return index

    def extend(self, circuit: Circuit, mapping: Optional[Mapping[int, int]] = None) -> int:
        """Embed a circuit keeping its layer structure; returns the first layer index"""
        return self.parallel([(circuit, mapping)])

    def parallel(self, blocks: Sequence[Tuple[Circuit, Optional[Mapping[int, int]]]]) -> int:
        """Embed circuits on disjoint qubits side by side, all starting at the same layer"""
        blocks = [(c, m if m is not None else {q: q for q in range(c.qubit_count)}) for c, m in blocks]
        touched = [m[q] for c, m in blocks for q in range(c.qubit_count)]
        if len(set(touched)) != len(touched):
            raise ValueError("parallel blocks overlap")
        start = self._start(touched)
        depth = max([0] + [c.depth for c, _ in blocks])
        for circuit, mapping in blocks:
            for offset, layer in enumerate(circuit.layers):
                self._place(start, [g.remap(mapping) for g in layer.gates], offset)
        for q in touched:
            self.frontier[q] = start + depth
        return start

    def bind(self, circuit: Circuit, bindings: Mapping[str, Sequence[int]], prefix: str) -> Dict[int, int]:
        """Qubit map for embedding a circuit: bound registers reuse the given qubits,
        every other register gets fresh ancillas named prefix + name"""
        mapping: Dict[int, int] = {}
        for name, qubits in circuit.registers:
            target = bindings.get(name)
            if target is None:
                target = self.register(f"{prefix}{name}", len(qubits))
            elif len(target) != len(qubits):
                raise ValueError(f"register {name!r} has {len(qubits)} qubits, bound to {len(target)}")
            mapping.update(zip(qubits, target))
        missing = sorted(set(range(circuit.qubit_count)) - set(mapping))
        if missing:
            raise ValueError(f"qubits {missing} belong to no register")
        return mapping

    def barrier(self, qubits: Optional[Iterable[int]] = None):
        """Align the frontier of the given qubits (default all) to their latest layer"""
        qubits = list(range(self.qubit_count)) if qubits is None else list(qubits)
        level = self._start(qubits)
        for q in qubits:
            self.frontier[q] = level

    @property
    def depth(self) -> int:
        return len(self.layers)

    def build(self, clean_ancillas: bool = True) -> Circuit:
        return Circuit(
            self.qubit_count,
            tuple(self.roles),
            tuple(Layer(tuple(gates)) for gates in self.layers if gates),
            clean_ancillas,
            dict(self.registers),
        )


def expand_macros(circuit: Circuit) -> Circuit:
    """Replace every macro oracle by its explicit gadget; fresh ancillas are appended"""
    from ..oracles import registry

    roles = list(circuit.roles)

    def allocate(count: int) -> Tuple[int, ...]:
        start = len(roles)
        roles.extend([QubitRole.ANCILLA] * count)
        return tuple(range(start, start + count))

    layers: List[Layer] = []
    expanded = 0
    for layer in circuit.layers:
        plain = [g for g in layer.gates if not (isinstance(g, Oracle) and registry.get(g.name).is_macro)]
        macros = [g for g in layer.gates if g not in plain]
        if not macros:
            layers.append(layer)
            continue
        gadgets = [registry.get(g.name).expand(g, allocate) for g in macros]
        height = max(len(gadget) for gadget in gadgets)
        block = [list(plain) if i == 0 else [] for i in range(height)]
        for gadget in gadgets:
            for i, gates in enumerate(gadget):
                block[i].extend(gates)
        layers.extend(Layer(tuple(gates)) for gates in block)
        expanded += len(macros)
    logger.debug("expanded %d macro gates, %d ancillas added", expanded, len(roles) - circuit.qubit_count)
    return Circuit(len(roles), tuple(roles), tuple(layers), circuit.clean_ancillas, circuit.registers)


__all__ = [
    "QubitRole", "Unitary2", "rz", "ry", "H", "X", "I2", "S", "S_DAG",
    "OneQubit", "ControlledOneQubit", "Fanout", "Parity", "Oracle",
    "PermutationOracle", "DiagonalOracle", "UnitaryOracle", "Gate", "Layer",
    "Circuit", "CircuitStats", "CircuitBuilder", "empty_circuit", "freeze_params",
    "validate", "ensure_valid", "stats", "compose", "inverse", "remap",
    "controlled", "control_circuit", "expand_macros",
]
