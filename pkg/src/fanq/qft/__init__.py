"""
Quantum Fourier transform stack
Exact QFT circuits, Fourier state construction, Fourier-state copying, phase estimation from copies
and the constant-depth QFT modulo 2^n
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..circuit import (
    H, S_DAG, X, Circuit, CircuitBuilder, ControlledOneQubit, Fanout, OneQubit, QubitRole, rz,
)
from ..oracles import permutation, unitary, weight_phase
from ..simulator import Simulator, StateVector, measure, register_fidelity
from .decode import (
    BIT_BASIS, PARITY_BASIS, QfpSymbol, copy_basis, decode_value, postprocess, qfp_decode,
    qfp_exact_success, vote, vote_counts,
)

logger = logging.getLogger(__name__)

QFP_MODES = ("collapse", "marginal")
PIPELINE_MODES = ("coherent", "ideal")


def fourier_state(x: int, q: int, width: Optional[int] = None) -> np.ndarray:
    """Amplitudes of sum_y w^{xy} |y> / sqrt(q), indexed by register value, zero above q"""
    width = max(1, (q - 1).bit_length()) if width is None else width
    amplitudes = np.zeros(1 << width, dtype=complex)
    y = np.arange(q)
    amplitudes[:q] = np.exp(2j * math.pi * x * y / q) / math.sqrt(q)
    return amplitudes


def qft_circuit(m: int) -> Circuit:
    """Exact F_{2^m} on register r: Hadamards, controlled phases and a closing swap network"""
    if m < 1:
        raise ValueError("qft_circuit needs m >= 1")
    b = CircuitBuilder()
    r = b.register("r", m, QubitRole.INPUT)
    for i in range(m - 1, -1, -1):
        b.append(OneQubit(H, r[i]))
        for j in range(i - 1, -1, -1):
            b.append(ControlledOneQubit(rz(2 * math.pi / (1 << (i - j + 1))), r[j], r[i]))
    for i in range(m // 2):
        a, c = r[i], r[m - 1 - i]
        for control, target in ((a, c), (c, a), (a, c)):
            b.append(ControlledOneQubit(X, control, target))
    return b.build()


def _value_angles(n: int) -> Tuple[float, ...]:
    return tuple(2 * math.pi * (1 << j) / (1 << n) for j in range(n))


def qfs(n: int) -> Circuit:
    """out <- Phi_x from input x in constant depth (Hadamards, then rotation by value on every qubit)"""
    if n < 1:
        raise ValueError("qfs needs n >= 1")
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    out = b.register("out", n, QubitRole.OUTPUT)
    b.layer([OneQubit(H, q) for q in out])
    b.append(weight_phase(x, out, _value_angles(n), "value"))
    return b.build()


def _copy_into(b: CircuitBuilder, source: Sequence[int], copies: List[Tuple[int, ...]], q: int):
    b.layer([OneQubit(H, c) for reg in copies for c in reg])
    if copies:
        b.append(permutation("add_mod", tuple(copies) + (tuple(source),), q=q).adjoint())


def copy_fourier(n: int, m: int) -> Circuit:
    """Copies Phi_x from register source into m-1 fresh registers by inverse multi-operand addition"""
    if m < 1:
        raise ValueError("copy_fourier needs m >= 1")
    b = CircuitBuilder()
    source = b.register("source", n, QubitRole.INPUT)
    copies = [b.register(f"copy{c}", n, QubitRole.OUTPUT) for c in range(1, m)]
    _copy_into(b, source, copies, 1 << n)
    return b.build()


def fourier_copies(n: int, m: int) -> Circuit:
    """QFS followed by COPY: out and copy1..copy{m-1} all hold Phi_x"""
    b = CircuitBuilder()
    b.register("x", n, QubitRole.INPUT)
    out = b.register("out", n, QubitRole.OUTPUT)
    copies = [b.register(f"copy{c}", n, QubitRole.OUTPUT) for c in range(1, m)]
    b.extend(qfs(n))
    _copy_into(b, out, copies, 1 << n)
    return b.build(clean_ancillas=False)


# Phase estimation from copies

@dataclass
class QfpOutcome:
    estimate: int
    symbols: List[QfpSymbol]
    outcomes: np.ndarray = field(repr=False)

    @property
    def flagged(self) -> bool:
        return any(s is QfpSymbol.UNKNOWN for s in self.symbols)


@dataclass
class QfpProcedure:
    """Measure m copies of Phi_x qubit by qubit, vote per position and decode

    collapse measures all n qubits of a copy jointly; marginal samples every qubit from its own
    marginal without collapsing the others.
    """
    n: int
    copies: int
    mode: str = "collapse"

    def __post_init__(self):
        if self.mode not in QFP_MODES:
            raise ValueError(f"unknown qfp mode {self.mode!r}; expected one of {QFP_MODES}")
        if self.copies < 1:
            raise ValueError("qfp needs at least one copy")

    @property
    def circuit(self) -> Circuit:
        """Preparation of one copy; all copies are identical product states"""
        return qfs(self.n)

    def bases(self) -> List[str]:
        return [copy_basis(c, self.copies) for c in range(self.copies)]

    def measure_copy(self, state: StateVector, register: Sequence[int], basis: str, rng) -> np.ndarray:
        """Outcomes indexed by symbol: symbol i lives on register qubit n-1-i"""
        qubits = [register[self.n - 1 - i] for i in range(self.n)]
        if self.mode == "collapse":
            bits, _ = measure(state, [(q, basis) for q in qubits], rng)
            return np.array([int(b) for b in bits], dtype=np.int64)
        return np.array([int(measure(state, [(q, basis)], rng)[0]) for q in qubits], dtype=np.int64)

    def postprocess(self, outcomes: np.ndarray) -> QfpOutcome:
        estimate, symbols = postprocess(outcomes)
        return QfpOutcome(estimate, symbols, np.asarray(outcomes))

    def run(self, state: StateVector, register: Sequence[int], rng) -> QfpOutcome:
        outcomes = np.stack([self.measure_copy(state, register, basis, rng) for basis in self.bases()])
        return self.postprocess(outcomes)

    def estimate(self, x: int, rng, simulator: Optional[Simulator] = None) -> QfpOutcome:
        circuit = self.circuit
        state = (simulator or Simulator()).run(circuit, {"x": x})
        return self.run(state, circuit.register("out"), rng)


def qfp(n: int, m: int, mode: str = "collapse") -> QfpProcedure:
    if m % 2:
        raise ValueError(f"qfp needs an even number of copies, got {m}")
    return QfpProcedure(n, m, mode)


def qfp_success_rate(n: int, m: int, trials: int, seed: int, mode: str = "collapse") -> float:
    """Fraction of seeded trials, cycling over all x, that decode x exactly without a flag"""
    procedure = qfp(n, m, mode)
    rng = np.random.default_rng(seed)
    sim = Simulator()
    states = {}
    hits = 0
    for trial in range(trials):
        x = trial % (1 << n)
        if x not in states:
            states[x] = sim.run(procedure.circuit, {"x": x})
        outcome = procedure.run(states[x], procedure.circuit.register("out"), rng)
        hits += outcome.estimate == x and not outcome.flagged
    return hits / trials


# Constant-depth QFT modulo 2^n

def _measurement_rotation(basis: str):
    return H @ S_DAG if basis == BIT_BASIS else H


def qft_pow2(n: int, m: int, qfp_mode: str = "coherent") -> Circuit:
    """|x>|0> -> |0> Phi_x: QFS, COPY to m registers, uncompute x by phase estimation, COPY^-1

    coherent estimates x from the rotated copies with the qfp_estimate oracle; ideal uses
    F^dagger, a CNOT layer and F on the output register instead.
    """
    if qfp_mode not in PIPELINE_MODES:
        raise ValueError(f"unknown qfp mode {qfp_mode!r}; expected one of {PIPELINE_MODES}")
    if n < 1 or m < 1:
        raise ValueError("qft_pow2 needs n >= 1 and m >= 1")
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    out = b.register("out", n, QubitRole.OUTPUT)
    copies = [b.register(f"copy{c}", n) for c in range(1, m)]
    everything = [out] + copies

    b.extend(qfs(n), dict(enumerate(x + out)))
    _copy_into(b, out, copies, 1 << n)
    if qfp_mode == "coherent":
        rotations = [OneQubit(_measurement_rotation(copy_basis(c, m)), q)
                     for c, reg in enumerate(everything) for q in reg]
        b.layer(rotations)
        b.append(permutation("qfp_estimate", tuple(everything) + (x,)))
        b.layer([g.adjoint() for g in rotations])
    else:
        b.append(unitary("fourier", (out,), q=1 << n).adjoint())
        b.layer([Fanout(o, (t,)) for o, t in zip(out, x)])
        b.append(unitary("fourier", (out,), q=1 << n))
    if copies:
        b.append(permutation("add_mod", tuple(copies) + (out,), q=1 << n))
    b.layer([OneQubit(H, q) for reg in copies for q in reg])
    circuit = b.build()
    logger.debug("qft_pow2 n=%d m=%d (%s): %d qubits", n, m, qfp_mode, circuit.qubit_count)
    return circuit


def qft_pow2_fidelity(n: int, m: int, x: int) -> float:
    """Overlap of the coherent pipeline output with |0> Phi_x: the probability the estimate is x"""
    return qfp_exact_success(n, m, x, strict=False)


def pipeline_fidelity(circuit: Circuit, x: int, q: int, simulator: Optional[Simulator] = None) -> float:
    """Register fidelity of the out register with Phi_x on basis input x"""
    state = (simulator or Simulator()).run(circuit, {"x": x})
    n = len(circuit.register("out"))
    return register_fidelity(state, circuit.register("out"), fourier_state(x, q, n))


from .modular import (  # noqa: E402
    QftParams, copy_q, estimate_distribution, majority_success, qfp_q, qfp_q_copy, qfs_q,
    qft_q, qft_q_fidelity, qft_q_ideal, qft_q_joint_fidelity, qft_q_state_fidelity, sample_majority, w_norm,
)
from .estimation import CountingPhaseOracle, PhaseEstimate, phase_estimation  # noqa: E402

__all__ = [
    "fourier_state", "qft_circuit", "qfs", "copy_fourier", "fourier_copies", "QfpSymbol",
    "qfp_decode", "decode_value", "vote", "vote_counts", "qfp", "QfpProcedure", "QfpOutcome",
    "qfp_exact_success", "qfp_success_rate", "qft_pow2", "qft_pow2_fidelity", "pipeline_fidelity",
    "BIT_BASIS", "PARITY_BASIS", "QftParams", "qfs_q", "copy_q", "qfp_q", "qfp_q_copy", "qft_q",
    "estimate_distribution", "majority_success", "sample_majority", "qft_q_fidelity", "qft_q_ideal",
    "qft_q_joint_fidelity", "qft_q_state_fidelity", "w_norm",
    "CountingPhaseOracle", "PhaseEstimate", "phase_estimation",
]
