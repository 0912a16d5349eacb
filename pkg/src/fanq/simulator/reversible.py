"""
Reversible basis-state simulation
Runs classical circuits on integer basis indices without a statevector
"""

import logging
from typing import Iterable, Sequence, Union

import numpy as np

from ..bits import basis_index, read_register, write_register
from ..circuit import (
    Circuit, ControlledOneQubit, DiagonalOracle, Fanout, OneQubit, Parity, PermutationOracle,
    UnitaryOracle, ensure_valid,
)
from ..errors import QubitBudgetError
from ..oracles import registry

logger = logging.getLogger(__name__)

MAX_QUBITS = 62


def _is_flip(u) -> bool:
    """X up to phases on the two outputs"""
    return abs(u.entries[0]) < 1e-12 and abs(u.entries[3]) < 1e-12


def run_reversible(circuit: Circuit, inputs: Union[Iterable[int], Iterable[str]]) -> np.ndarray:
    """Output basis indices for basis inputs; diagonal gates only add phases and are skipped"""
    ensure_valid(circuit)
    n = circuit.qubit_count
    if n > MAX_QUBITS:
        raise QubitBudgetError(n, MAX_QUBITS, "reversible simulation")
    inputs = [basis_index(v) if isinstance(v, str) else int(v) for v in inputs]
    state = np.asarray(inputs, dtype=np.int64)

    def bit(q):
        return (state >> (n - 1 - q)) & 1

    for gate in circuit.gates():
        if isinstance(gate, OneQubit):
            if gate.u.is_diagonal():
                continue
            if not _is_flip(gate.u):
                raise ValueError("one-qubit gate is neither diagonal nor a bit flip")
            state = state ^ (np.int64(1) << (n - 1 - gate.qubit))
        elif isinstance(gate, ControlledOneQubit):
            if gate.u.is_diagonal():
                continue
            if not _is_flip(gate.u):
                raise ValueError("controlled gate is neither diagonal nor a controlled bit flip")
            state = state ^ (bit(gate.control) << (n - 1 - gate.target))
        elif isinstance(gate, Fanout):
            c = bit(gate.control)
            for t in gate.targets:
                state = state ^ (c << (n - 1 - t))
        elif isinstance(gate, Parity):
            p = np.zeros_like(state)
            for s in gate.sources:
                p ^= bit(s)
            state = state ^ (p << (n - 1 - gate.target))
        elif isinstance(gate, PermutationOracle):
            values = [read_register(state, r, n) for r in gate.registers]
            moved = registry.apply_permutation(gate, values)
            dest = state
            for r, v in zip(gate.registers, moved):
                dest = write_register(dest, r, v, n)
            if gate.controls:
                active = np.ones(state.shape, dtype=bool)
                for c in gate.controls:
                    active &= bit(c).astype(bool)
                dest = np.where(active, dest, state)
            state = dest
        elif isinstance(gate, DiagonalOracle):
            continue
        elif isinstance(gate, UnitaryOracle):
            raise ValueError(f"unitary oracle {gate.name} has no basis-state semantics")
    logger.debug("reversible run of %d inputs on %d qubits", len(inputs), n)
    return state


def read(outputs: np.ndarray, circuit: Circuit, register: Union[str, Sequence[int]]) -> np.ndarray:
    qubits = circuit.register(register) if isinstance(register, str) else register
    return read_register(outputs, qubits, circuit.qubit_count)


def inputs_for(circuit: Circuit, register: Union[str, Sequence[int]], values: Iterable[int]) -> np.ndarray:
    """Basis indices with the register set to each value and every other qubit 0"""
    qubits = circuit.register(register) if isinstance(register, str) else register
    values = np.asarray(list(values), dtype=np.int64)
    return write_register(np.zeros(len(values), dtype=np.int64), qubits, values, circuit.qubit_count)
