"""
Statevector simulator for fanq circuits
Dense batched simulation, product-basis measurement, register sweeps and unitary comparison
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..bits import basis_index, read_register, write_register
from ..circuit import (
    Circuit, ControlledOneQubit, DiagonalOracle, Fanout, Gate, OneQubit, Parity,
    PermutationOracle, QubitRole, UnitaryOracle, ensure_valid,
)
from ..config import Settings, get_settings
from ..errors import QubitBudgetError
from ..oracles import registry

logger = logging.getLogger(__name__)

BASES = ("computational", "hadamard", "phase_pi_over_2")

_R = 1 / math.sqrt(2)
_H = np.array([[_R, _R], [_R, -_R]], dtype=complex)
_S = np.diag([1, 1j])
_S_DAG = np.diag([1, -1j])


@dataclass
class StateVector:
    """Amplitudes over the listed qubits; qubit labels[0] is the most significant index bit"""
    amplitudes: np.ndarray
    labels: Tuple[int, ...] = None

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = int(round(math.log2(len(self.amplitudes)))) if len(self.amplitudes) > 1 else 0
        if 1 << n != len(self.amplitudes):
            raise ValueError(f"amplitude vector of length {len(self.amplitudes)} is not a power of two")
        if self.labels is None:
            self.labels = tuple(range(n))
        self.labels = tuple(self.labels)
        if len(self.labels) != n:
            raise ValueError(f"{len(self.labels)} labels for {n} qubits")

    @property
    def qubit_count(self) -> int:
        return len(self.labels)

    def position(self, qubit: int) -> int:
        try:
            return self.labels.index(qubit)
        except ValueError:
            raise KeyError(f"qubit {qubit} is not part of this state") from None

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[basis_index(bits)])

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.qubit_count)


@dataclass
class OutcomeDistribution:
    """Exact outcome probabilities keyed by bitstring (character i is the i-th measured qubit)"""
    probabilities: Dict[str, float]

    def __getitem__(self, outcome: str) -> float:
        return self.probabilities.get(outcome, 0.0)

    def total(self) -> float:
        return float(sum(self.probabilities.values()))


# Gate application on batches of shape (B, 2^n)

def _apply_dense(states: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Apply a 2^k x 2^k matrix whose index bits are the given qubits, most significant first"""
    k = len(qubits)
    batch = states.shape[0]
    t = states.reshape((batch,) + (2,) * n)
    m = matrix.reshape((2,) * (2 * k))
    axes = [1 + q for q in qubits]
    t = np.tensordot(m, t, axes=(list(range(k, 2 * k)), axes))
    t = np.moveaxis(t, list(range(k)), axes)
    return np.ascontiguousarray(t).reshape(batch, -1)


def _controlled_matrix(matrix: np.ndarray, controls: int) -> np.ndarray:
    dim = matrix.shape[0]
    full = np.eye(dim << controls, dtype=complex)
    full[-dim:, -dim:] = matrix
    return full


def _control_mask(indices: np.ndarray, controls: Sequence[int], n: int) -> np.ndarray:
    mask = np.ones(indices.shape, dtype=bool)
    for c in controls:
        mask &= ((indices >> (n - 1 - c)) & 1).astype(bool)
    return mask


class _GateKernel:
    """Per-gate index maps and phase vectors for one qubit count"""

    def __init__(self, n: int, cache: bool):
        self.n = n
        self.indices = np.arange(1 << n, dtype=np.int64)
        self.cache: Optional[Dict[int, object]] = {} if cache else None

    def _memo(self, key, build):
        if self.cache is None:
            return build()
        if key not in self.cache:
            self.cache[key] = build()
        return self.cache[key]

    def gather_map(self, gate: Gate) -> np.ndarray:
        n, idx = self.n, self.indices
        if isinstance(gate, Fanout):
            mask = 0
            for t in gate.targets:
                mask |= 1 << (n - 1 - t)
            return idx ^ (((idx >> (n - 1 - gate.control)) & 1) * mask)
        # parity
        bit = np.zeros_like(idx)
        for s in gate.sources:
            bit ^= (idx >> (n - 1 - s)) & 1
        return idx ^ (bit << (n - 1 - gate.target))

    def scatter_map(self, gate: PermutationOracle) -> np.ndarray:
        n, idx = self.n, self.indices
        values = [read_register(idx, r, n) for r in gate.registers]
        moved = registry.apply_permutation(gate, values)
        dest = idx
        for r, v in zip(gate.registers, moved):
            dest = write_register(dest, r, v, n)
        if gate.controls:
            dest = np.where(_control_mask(idx, gate.controls, n), dest, idx)
        return dest

    def phase_vector(self, gate: DiagonalOracle) -> np.ndarray:
        n, idx = self.n, self.indices
        values = [read_register(idx, r, n) for r in gate.registers]
        angles = registry.phases(gate, values)
        phases = np.exp(1j * np.broadcast_to(angles, idx.shape))
        if gate.controls:
            phases = np.where(_control_mask(idx, gate.controls, n), phases, 1.0)
        return phases

    def apply(self, states: np.ndarray, gate: Gate, key: int) -> np.ndarray:
        n = self.n
        if isinstance(gate, OneQubit):
            return _apply_dense(states, gate.u.matrix(), [gate.qubit], n)
        if isinstance(gate, ControlledOneQubit):
            return _apply_dense(states, _controlled_matrix(gate.u.matrix(), 1), [gate.control, gate.target], n)
        if isinstance(gate, (Fanout, Parity)):
            return states[:, self._memo(key, lambda: self.gather_map(gate))]
        if isinstance(gate, PermutationOracle):
            dest = self._memo(key, lambda: self.scatter_map(gate))
            out = np.empty_like(states)
            out[:, dest] = states
            return out
        if isinstance(gate, DiagonalOracle):
            return states * self._memo(key, lambda: self.phase_vector(gate))
        if isinstance(gate, UnitaryOracle):
            matrix = registry.matrix(gate)
            qubits = [q for r in reversed(gate.registers) for q in reversed(r)]
            if gate.controls:
                matrix = _controlled_matrix(matrix, len(gate.controls))
                qubits = list(gate.controls) + qubits
            return _apply_dense(states, matrix, qubits, n)
        raise TypeError(f"cannot simulate {type(gate).__name__}")


InputSpec = Union[None, int, str, Mapping[str, int], StateVector, np.ndarray]


class Simulator:
    """Dense statevector simulation bounded by the configured qubit budget"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def check_budget(self, circuit: Circuit):
        if circuit.qubit_count > self.settings.qubit_budget:
            raise QubitBudgetError(circuit.qubit_count, self.settings.qubit_budget)

    def initial_index(self, circuit: Circuit, spec: Union[int, str, Mapping[str, int], None]) -> int:
        """Flat basis index for an input given as an index, a bitstring or register values"""
        n = circuit.qubit_count
        if spec is None:
            return 0
        if isinstance(spec, (int, np.integer)):
            return int(spec)
        if isinstance(spec, str):
            if len(spec) == n:
                return basis_index(spec)
            data = [q for q, role in enumerate(circuit.roles) if role is not QubitRole.ANCILLA]
            if len(spec) != len(data):
                raise ValueError(f"input of {len(spec)} bits for {n} qubits ({len(data)} non-ancilla)")
            index = 0
            for q, c in zip(data, spec):
                if c == "1":
                    index |= 1 << (n - 1 - q)
            return index
        index = np.zeros(1, dtype=np.int64)
        for name, value in spec.items():
            index = write_register(index, circuit.register(name), np.array([value]), n)
        return int(index[0])

    def run_states(self, circuit: Circuit, states: np.ndarray) -> np.ndarray:
        """Evolve a batch of states of shape (B, 2^n) through the circuit"""
        ensure_valid(circuit)
        self.check_budget(circuit)
        n = circuit.qubit_count
        states = np.asarray(states, dtype=complex).reshape(-1, 1 << n)
        chunk = max(1, self.settings.batch_amplitudes >> n)
        chunks = range(0, states.shape[0], chunk)
        kernel = _GateKernel(n, cache=len(chunks) > 1 and n <= 16)
        logger.debug("simulating %d qubits, %d states in %d chunks", n, states.shape[0], len(chunks))
        out = np.empty_like(states)
        gates = list(circuit.gates())
        for start in chunks:
            block = states[start:start + chunk]
            for key, gate in enumerate(gates):
                block = kernel.apply(block, gate, key)
            out[start:start + chunk] = block
        return out

    def run(self, circuit: Circuit, inputs: InputSpec = None) -> StateVector:
        """Final state for one basis input (ancillas start in |0>) or a given initial state"""
        n = circuit.qubit_count
        self.check_budget(circuit)
        if isinstance(inputs, StateVector):
            initial = inputs.amplitudes
        elif isinstance(inputs, np.ndarray):
            initial = inputs
        else:
            initial = np.zeros(1 << n, dtype=complex)
            initial[self.initial_index(circuit, inputs)] = 1.0
        return StateVector(self.run_states(circuit, initial[None, :])[0])

    def run_basis(self, circuit: Circuit, indices: Iterable[int]) -> Iterator[Tuple[int, StateVector]]:
        """Yield (input index, final state) for many basis inputs, simulated in batches"""
        n = circuit.qubit_count
        self.check_budget(circuit)
        indices = list(indices)
        chunk = max(1, self.settings.batch_amplitudes >> n)
        for start in range(0, len(indices), chunk):
            part = indices[start:start + chunk]
            initial = np.zeros((len(part), 1 << n), dtype=complex)
            initial[np.arange(len(part)), part] = 1.0
            for index, amplitudes in zip(part, self.run_states(circuit, initial)):
                yield index, StateVector(amplitudes)

    def sweep(self, circuit: Circuit, register: Union[str, Sequence[int]]) -> "SweepResult":
        """Output states for every value of a register the circuit only reads, from one run"""
        qubits = tuple(circuit.register(register)) if isinstance(register, str) else tuple(register)
        problems = read_only_violations(circuit, qubits)
        if problems:
            raise ValueError(f"register is modified by the circuit: {problems[0]}")
        n, w = circuit.qubit_count, len(qubits)
        self.check_budget(circuit)
        idx = np.arange(1 << n, dtype=np.int64)
        values = read_register(idx, qubits, n)
        register_mask = 0
        for q in qubits:
            register_mask |= 1 << (n - 1 - q)
        initial = np.zeros(1 << n, dtype=complex)
        initial[(idx & ~register_mask) == 0] = 1 / math.sqrt(1 << w)
        final = self.run_states(circuit, initial[None, :])[0]
        others = tuple(q for q in range(n) if q not in set(qubits))
        order = np.argsort(values, kind="stable")
        positions = order.reshape(1 << w, -1)
        states = final[positions] * math.sqrt(1 << w)
        return SweepResult(circuit, qubits, others, states)

    def unitary(self, circuit: Circuit, columns: Optional[Sequence[int]] = None) -> np.ndarray:
        """Full unitary (or the selected columns) with qubit 0 as the most significant index bit"""
        n = circuit.qubit_count
        if n > self.settings.unitary_qubit_limit:
            raise QubitBudgetError(n, self.settings.unitary_qubit_limit, "unitary")
        columns = list(range(1 << n)) if columns is None else list(columns)
        initial = np.zeros((len(columns), 1 << n), dtype=complex)
        initial[np.arange(len(columns)), columns] = 1.0
        return self.run_states(circuit, initial).T


@dataclass
class SweepResult:
    """Per-register-value output states; states[x] is over the other qubits in ascending order"""
    circuit: Circuit
    register: Tuple[int, ...]
    others: Tuple[int, ...]
    states: np.ndarray

    def __len__(self):
        return self.states.shape[0]

    def state(self, value: int) -> StateVector:
        return StateVector(self.states[value], self.others)


def read_only_violations(circuit: Circuit, qubits: Sequence[int]) -> List[str]:
    """Gates that may change the computational-basis value of the given qubits"""
    watched = set(qubits)
    problems = []
    for i, layer in enumerate(circuit.layers):
        for gate in layer.gates:
            touched = set()
            if isinstance(gate, OneQubit):
                if not gate.u.is_diagonal():
                    touched = {gate.qubit}
            elif isinstance(gate, ControlledOneQubit):
                if not gate.u.is_diagonal():
                    touched = {gate.target}
            elif isinstance(gate, Fanout):
                touched = set(gate.targets)
            elif isinstance(gate, Parity):
                touched = {gate.target}
            elif isinstance(gate, PermutationOracle):
                keep = set(registry.get(gate.name).read_only(len(gate.registers)))
                touched = {q for j, r in enumerate(gate.registers) if j not in keep for q in r}
            elif isinstance(gate, UnitaryOracle):
                touched = {q for r in gate.registers for q in r}
            hit = touched & watched
            if hit:
                problems.append(f"layer {i}: {gate.kind} gate writes qubit {min(hit)}")
    return problems


# State queries

def marginal_probability(state: StateVector, qubit: int, outcome: int) -> float:
    p = np.abs(state.tensor()) ** 2
    axis = state.position(qubit)
    p = np.moveaxis(p, axis, 0).reshape(2, -1)
    return float(p[outcome].sum())


def register_distribution(state: StateVector, register: Sequence[int]) -> np.ndarray:
    """Probabilities indexed by the little-endian register value"""
    p = np.abs(state.tensor()) ** 2
    axes = [state.position(q) for q in reversed(list(register))]
    p = np.moveaxis(p, axes, list(range(len(axes))))
    return p.reshape(1 << len(axes), -1).sum(axis=1)


def reduced_density_matrix(state: StateVector, register: Sequence[int]) -> np.ndarray:
    """Density matrix of a register, indexed by its little-endian value"""
    axes = [state.position(q) for q in reversed(list(register))]
    t = np.moveaxis(state.tensor(), axes, list(range(len(axes)))).reshape(1 << len(axes), -1)
    return t @ t.conj().T


def fidelity(state: StateVector, target) -> float:
    """|<target|state>| over the same qubits"""
    target = target.amplitudes if isinstance(target, StateVector) else np.asarray(target, dtype=complex)
    return float(abs(np.vdot(target, state.amplitudes)))


def register_fidelity(state: StateVector, register: Sequence[int], target) -> float:
    """sqrt(<target|rho|target>) for the reduced state of a register"""
    rho = reduced_density_matrix(state, register)
    target = np.asarray(target, dtype=complex)
    return float(math.sqrt(max(0.0, np.real(np.vdot(target, rho @ target)))))


def outcome_distribution(state: StateVector, qubits: Sequence[int]) -> OutcomeDistribution:
    p = np.abs(state.tensor()) ** 2
    axes = [state.position(q) for q in qubits]
    p = np.moveaxis(p, axes, list(range(len(axes)))).reshape(1 << len(axes), -1).sum(axis=1)
    k = len(axes)
    return OutcomeDistribution({
        format(i, f"0{k}b") if k else "": float(prob) for i, prob in enumerate(p) if prob > 0
    })


def _basis_change(basis: str) -> Tuple[np.ndarray, np.ndarray]:
    """(rotation into the computational basis, rotation back)"""
    if basis == "computational":
        return np.eye(2, dtype=complex), np.eye(2, dtype=complex)
    if basis == "hadamard":
        return _H, _H
    if basis == "phase_pi_over_2":
        return _H @ _S_DAG, _S @ _H
    raise ValueError(f"unknown measurement basis {basis!r}; expected one of {BASES}")


def measure(state: StateVector, spec: Union[Mapping[int, str], Sequence[Tuple[int, str]]],
            rng_seed=None) -> Tuple[str, StateVector]:
    """Measure qubits in product bases; returns the outcome bits (in spec order) and the collapsed state

    In the phase_pi_over_2 basis outcome 0 is (|0> + i|1>)/sqrt(2); in the Hadamard basis it is |+>.
    """
    items = list(spec.items()) if isinstance(spec, Mapping) else list(spec)
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    n = state.qubit_count
    amplitudes = state.amplitudes[None, :]
    for qubit, basis in items:
        into, _ = _basis_change(basis)
        amplitudes = _apply_dense(amplitudes, into, [state.position(qubit)], n)
    rotated = StateVector(amplitudes[0], state.labels)
    qubits = [q for q, _ in items]
    dist = outcome_distribution(rotated, qubits)
    outcomes = sorted(dist.probabilities)
    probs = np.array([dist.probabilities[o] for o in outcomes])
    outcome = outcomes[rng.choice(len(outcomes), p=probs / probs.sum())]
    t = rotated.tensor().copy()
    for (qubit, _), bit in zip(items, outcome):
        index = [slice(None)] * n
        index[state.position(qubit)] = 1 - int(bit)
        t[tuple(index)] = 0
    collapsed = t.reshape(1, -1) / math.sqrt(dist.probabilities[outcome])
    for qubit, basis in items:
        _, back = _basis_change(basis)
        collapsed = _apply_dense(collapsed, back, [state.position(qubit)], n)
    return outcome, StateVector(collapsed[0], state.labels)


def basis_probability(state: StateVector, qubit: int, basis: str, outcome: int = 0) -> float:
    """Probability of an outcome when one qubit is measured in the given basis"""
    into, _ = _basis_change(basis)
    rotated = _apply_dense(state.amplitudes[None, :], into, [state.position(qubit)], state.qubit_count)
    return marginal_probability(StateVector(rotated[0], state.labels), qubit, outcome)


def product_state(circuit: Circuit, registers: Mapping[str, np.ndarray]) -> StateVector:
    """Initial state with each named register in the given amplitudes (indexed by register value)
    and every other qubit in |0>"""
    n = circuit.qubit_count
    idx = np.arange(1 << n, dtype=np.int64)
    amplitudes = np.ones(1 << n, dtype=complex)
    covered = 0
    for name, values in registers.items():
        qubits = circuit.register(name)
        values = np.asarray(values, dtype=complex)
        if len(values) != 1 << len(qubits):
            raise ValueError(f"register {name!r} needs {1 << len(qubits)} amplitudes, got {len(values)}")
        amplitudes *= values[read_register(idx, qubits, n)]
        for q in qubits:
            covered |= 1 << (n - 1 - q)
    amplitudes[(idx & ~covered) != 0] = 0
    return StateVector(amplitudes)


def ancilla_zero_columns(circuit: Circuit) -> List[int]:
    n = circuit.qubit_count
    mask = 0
    for q in circuit.ancillas:
        mask |= 1 << (n - 1 - q)
    return [i for i in range(1 << n) if not i & mask]


def pad_ancillas(circuit: Circuit, qubit_count: int) -> Circuit:
    extra = qubit_count - circuit.qubit_count
    return Circuit(qubit_count, circuit.roles + (QubitRole.ANCILLA,) * extra,
                   circuit.layers, circuit.clean_ancillas, circuit.registers)


def unitary_distance(a: Circuit, b: Circuit, settings: Optional[Settings] = None) -> float:
    """Frobenius distance minimized over a global phase, on inputs with every ancilla in |0>

    A circuit with fewer qubits is padded with idle ancillas, so a compact circuit can be
    compared with its macro expansion.
    """
    n = max(a.qubit_count, b.qubit_count)
    a, b = pad_ancillas(a, n), pad_ancillas(b, n)
    roles = tuple(QubitRole.ANCILLA if QubitRole.ANCILLA in (ra, rb) else ra for ra, rb in zip(a.roles, b.roles))
    columns = ancilla_zero_columns(Circuit(n, roles))
    sim = Simulator(settings)
    ua, ub = sim.unitary(a, columns), sim.unitary(b, columns)
    overlap = abs(np.vdot(ua, ub))
    squared = np.linalg.norm(ua) ** 2 + np.linalg.norm(ub) ** 2 - 2 * overlap
    return float(math.sqrt(max(0.0, squared)))


def run(circuit: Circuit, inputs: InputSpec = None, settings: Optional[Settings] = None) -> StateVector:
    return Simulator(settings).run(circuit, inputs)


def sweep(circuit: Circuit, register, settings: Optional[Settings] = None) -> SweepResult:
    return Simulator(settings).sweep(circuit, register)


def unitary(circuit: Circuit, settings: Optional[Settings] = None) -> np.ndarray:
    return Simulator(settings).unitary(circuit)


__all__ = [
    "BASES", "StateVector", "OutcomeDistribution", "Simulator", "SweepResult", "run", "sweep",
    "unitary", "unitary_distance", "measure", "marginal_probability", "register_distribution",
    "reduced_density_matrix", "fidelity", "register_fidelity", "outcome_distribution",
    "read_only_violations", "ancilla_zero_columns", "basis_probability", "product_state",
]
