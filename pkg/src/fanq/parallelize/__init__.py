"""
Parallelisation transforms
Fan-out/parity equivalence, controlled-unitary decomposition, commuting-gate parallelisation and rotations
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import unitary_group

from ..bits import ceil_log2
from ..circuit import (
    H, X, Circuit, CircuitBuilder, CircuitStats, ControlledOneQubit, Fanout, OneQubit,
    Parity, QubitRole, Unitary2, compose, control_circuit, inverse, rz, ry, stats,
)
from ..config import get_settings
from ..errors import DiagonalizationError, SearchExhaustedError
from ..oracles import diagonal, permutation, unitary, weight_phase

logger = logging.getLogger(__name__)

FIXED_THETA = math.asin(3 / 5)


# Fan-out and parity

def direct_parity(n: int) -> Circuit:
    """Parity of qubits 0..n-1 into qubit n"""
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    (t,) = b.register("target", 1, QubitRole.OUTPUT)
    b.append(Parity(x, t))
    return b.build()


def direct_fanout(n: int) -> Circuit:
    """Fan-out of qubit 0 into qubits 1..n"""
    b = CircuitBuilder()
    (c,) = b.register("control", 1, QubitRole.INPUT)
    targets = b.register("targets", n, QubitRole.OUTPUT)
    b.append(Fanout(c, targets))
    return b.build()


def parity_from_fanout(n: int) -> Circuit:
    """Parity as a Hadamard-conjugated fan-out from the target"""
    if n < 1:
        raise ValueError("parity_from_fanout needs n >= 1")
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    (t,) = b.register("target", 1, QubitRole.OUTPUT)
    everything = x + (t,)
    b.layer([OneQubit(H, q) for q in everything])
    b.layer([Fanout(t, x)])
    b.layer([OneQubit(H, q) for q in everything])
    return b.build()


def fanout_from_parity(n: int) -> Circuit:
    """Fan-out as a Hadamard-conjugated parity into the control"""
    if n < 1:
        raise ValueError("fanout_from_parity needs n >= 1")
    b = CircuitBuilder()
    (c,) = b.register("control", 1, QubitRole.INPUT)
    targets = b.register("targets", n, QubitRole.OUTPUT)
    everything = (c,) + targets
    b.layer([OneQubit(H, q) for q in everything])
    b.layer([Parity(targets, c)])
    b.layer([OneQubit(H, q) for q in everything])
    return b.build()


# Controlled-U

def symmetric_rz(theta: float) -> Unitary2:
    return Unitary2((cmath.exp(-0.5j * theta), 0, 0, cmath.exp(0.5j * theta)))


def zyz_angles(u: Unitary2) -> Tuple[float, float, float, float]:
    """(alpha, beta, gamma, delta) with u = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)"""
    m = u.matrix()
    alpha = cmath.phase(np.linalg.det(m)) / 2
    v = m * cmath.exp(-1j * alpha)
    gamma = 2 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    total = 2 * cmath.phase(v[1, 1]) if abs(v[1, 1]) > 1e-12 else 0.0
    difference = 2 * cmath.phase(v[1, 0]) if abs(v[1, 0]) > 1e-12 else 0.0
    return alpha, (total + difference) / 2, gamma, (total - difference) / 2


def controlled_u_decomposition(u: Unitary2) -> Tuple[Unitary2, Unitary2, Unitary2, float]:
    """A, B, C and alpha with u = e^{i alpha} A X B X C and A B C = I"""
    if not isinstance(u, Unitary2):
        u = Unitary2.from_matrix(u)
    alpha, beta, gamma, delta = zyz_angles(u)
    a = symmetric_rz(beta) @ ry(gamma / 2)
    b = ry(-gamma / 2) @ symmetric_rz(-(delta + beta) / 2)
    c = symmetric_rz((delta - beta) / 2)
    return a, b, c, alpha


def controlled_u_circuit(u: Unitary2) -> Circuit:
    """Controlled-u from one-qubit gates and two CNOTs; control is qubit 0"""
    a, bb, c, alpha = controlled_u_decomposition(u)
    b = CircuitBuilder()
    (ctrl,) = b.register("control", 1, QubitRole.INPUT)
    (tgt,) = b.register("target", 1, QubitRole.INPUT)
    for gate in (OneQubit(c, tgt), ControlledOneQubit(X, ctrl, tgt), OneQubit(bb, tgt),
                 ControlledOneQubit(X, ctrl, tgt), OneQubit(a, tgt), OneQubit(rz(alpha), ctrl)):
        b.append(gate)
    return b.build()


# Commuting gates

@dataclass
class CommutingGateSet:
    """Gates U_i on k qubits and a basis change T with T^dagger U_i T diagonal"""
    target_width: int
    gates: List[Circuit]
    basis_change: Circuit
    checked: bool = field(default=False, compare=False)

    @property
    def control_count(self) -> int:
        return len(self.gates)

    def controlled_forms(self) -> List[Circuit]:
        k = self.target_width
        return [control_circuit(g, k) for g in self.gates]

    def check_diagonal(self, tolerance: Optional[float] = None):
        """Raise DiagonalizationError unless every T^dagger U_i T is diagonal (k <= 6)"""
        from ..simulator import Simulator
        if self.target_width > 6:
            return
        tolerance = get_settings().tolerance if tolerance is None else tolerance
        sim = Simulator()
        t = sim.unitary(self.basis_change)
        for i, gate in enumerate(self.gates):
            d = t.conj().T @ sim.unitary(gate) @ t
            residual = float(np.max(np.abs(d - np.diag(np.diag(d)))))
            if residual > tolerance:
                raise DiagonalizationError(i, residual)
        self.checked = True


def _check_widths(gate_set: CommutingGateSet):
    k = gate_set.target_width
    if gate_set.basis_change.qubit_count != k:
        raise ValueError(f"basis change acts on {gate_set.basis_change.qubit_count} qubits, expected {k}")
    for i, g in enumerate(gate_set.gates):
        if g.qubit_count != k:
            raise ValueError(f"gate {i} acts on {g.qubit_count} qubits, expected {k}")
    if not gate_set.gates:
        raise ValueError("a commuting gate set needs at least one gate")


def _layout(b: CircuitBuilder, n: int, k: int):
    x = b.register("x", n, QubitRole.INPUT)
    target = b.register("target", k, QubitRole.INPUT)
    copies = [target] + [b.register(f"copy{i}", k) for i in range(1, n)]
    return x, target, copies


def _copy_block(t: Circuit, controlled: Circuit, k: int) -> Circuit:
    """T, controlled U_i, T^dagger on k target qubits plus the control (qubit k)"""
    b = CircuitBuilder()
    b.register("t", k, QubitRole.INPUT)
    b.register("c", 1, QubitRole.INPUT)
    targets = {j: j for j in range(k)}
    b.extend(t, targets)
    b.extend(controlled)
    b.extend(inverse(t), targets)
    return b.build()


def parallelize_commuting(gate_set: CommutingGateSet, check: bool = True) -> Circuit:
    """Constant-depth product of U_i^{x_i}: every control gets its own fan-out copy of the target

    Layout: controls x (0..n-1), target (n..n+k-1), then n-1 copy registers of k ancillas.
    Depth max depth(C_i) + 4 depth(T) + 2, size sum size(C_i) + (2n+2) size(T) + 2nk,
    where C_i is the controlled form of U_i and each fan-out of n-1 copies counts n qubits.
    """
    _check_widths(gate_set)
    if check:
        gate_set.check_diagonal()
    n, k, t = gate_set.control_count, gate_set.target_width, gate_set.basis_change
    b = CircuitBuilder()
    x, target, copies = _layout(b, n, k)
    fanouts = [Fanout(target[j], tuple(c[j] for c in copies[1:])) for j in range(k)]

    b.extend(inverse(t), dict(enumerate(target)))
    b.layer(fanouts)
    blocks = []
    for i, controlled in enumerate(gate_set.controlled_forms()):
        mapping = {j: copies[i][j] for j in range(k)}
        mapping[k] = x[i]
        blocks.append((_copy_block(t, controlled, k), mapping))
    b.parallel(blocks)
    b.layer(fanouts)
    b.extend(t, dict(enumerate(target)))
    circuit = b.build()
    logger.debug("parallelized %d gates on %d target qubits: %d qubits", n, k, circuit.qubit_count)
    return circuit


def sequential_product(gate_set: CommutingGateSet) -> Circuit:
    """Reference circuit applying C_1 ... C_n one after another on the parallelized layout"""
    _check_widths(gate_set)
    n, k = gate_set.control_count, gate_set.target_width
    b = CircuitBuilder()
    x, target, _ = _layout(b, n, k)
    for i, controlled in enumerate(gate_set.controlled_forms()):
        mapping = dict(enumerate(target))
        mapping[k] = x[i]
        b.extend(controlled, mapping)
    return b.build()


def expected_parallel_stats(gate_set: CommutingGateSet) -> CircuitStats:
    n, k = gate_set.control_count, gate_set.target_width
    forms = [stats(c) for c in gate_set.controlled_forms()]
    t = stats(gate_set.basis_change)
    return CircuitStats(
        depth=max(f.depth for f in forms) + 4 * t.depth + 2,
        size=sum(f.size for f in forms) + (2 * n + 2) * t.size + 2 * n * k,
        ancilla_count=(n - 1) * k,
        nominal_depth=max(f.nominal_depth for f in forms) + 4 * t.nominal_depth + 2,
    )


def random_commuting_set(n: int, k: int, seed: int) -> CommutingGateSet:
    """Seeded commuting set: T a product of Haar-random one-qubit gates, U_i = T D_i T^dagger"""
    rng = np.random.default_rng(seed)
    b = CircuitBuilder()
    qubits = b.register("r", k, QubitRole.INPUT)
    b.layer([OneQubit(Unitary2.from_matrix(unitary_group.rvs(2, random_state=rng)), q) for q in qubits])
    t = b.build()
    gates = []
    for _ in range(n):
        terms = tuple((int(mask), float(rng.uniform(-math.pi, math.pi))) for mask in range(1, 1 << k))
        d = CircuitBuilder()
        r = d.register("r", k, QubitRole.INPUT)
        d.append(diagonal("phase_polynomial", (r,), terms=terms))
        gates.append(compose(inverse(t), d.build(), t))
    return CommutingGateSet(k, gates, t)


def parallelize_diagonal(builder: CircuitBuilder, controls: Sequence[int], target: Sequence[int],
                         angles: Sequence[float]) -> int:
    """Controlled tensor-product-of-Rz gates, one per control, as one weight-phase gadget"""
    return builder.append(weight_phase(controls, target, angles, "weight"))


# Rotations

@dataclass(frozen=True)
class FixedBasisRotation:
    target: float
    repetitions: int
    error: float
    theta: float = FIXED_THETA

    @property
    def angle(self) -> float:
        return self.repetitions * self.theta


def approx_rotation_fixed_basis(phi: float, epsilon: float, bound: int = 100_000) -> FixedBasisRotation:
    """Smallest q <= bound with |q theta - phi| <= epsilon modulo 2 pi, theta = arcsin(3/5)"""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    q = np.arange(1, bound + 1, dtype=float)
    errors = np.abs(np.mod(q * FIXED_THETA - phi + math.pi, 2 * math.pi) - math.pi)
    hits = np.nonzero(errors <= epsilon)[0]
    if len(hits) == 0:
        best = int(np.argmin(errors))
        raise SearchExhaustedError(best + 1, float(errors[best]), bound)
    first = int(hits[0])
    return FixedBasisRotation(float(phi), first + 1, float(errors[first]))


def _rotation(n: int, phi: float, mode: str, fixed_basis: Optional[FixedBasisRotation]) -> Circuit:
    if n < 1:
        raise ValueError("rotation circuits need n >= 1")
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    target = b.register("target", 1, QubitRole.OUTPUT)
    if fixed_basis is None:
        b.append(weight_phase(x, target, (phi,), mode))
        return b.build()
    copies = target + b.register("copies", fixed_basis.repetitions - 1)
    b.layer([Fanout(target[0], copies[1:])])
    b.append(weight_phase(x, copies, (fixed_basis.theta,) * len(copies), mode))
    b.layer([Fanout(target[0], copies[1:])])
    return b.build()


def rotation_by_hamming_weight(n: int, phi: float, fixed_basis: Optional[FixedBasisRotation] = None) -> Circuit:
    """Rz(phi |x|) on the target"""
    return _rotation(n, phi, "weight", fixed_basis)


def rotation_by_value(n: int, phi: float, fixed_basis: Optional[FixedBasisRotation] = None) -> Circuit:
    """Rz(phi x) on the target, qubit j of x weighted 2^j"""
    return _rotation(n, phi, "value", fixed_basis)


def rotate_state(n: int, phi: float) -> Circuit:
    """Target ends in H Rz(phi |x|) H |0>"""
    if n < 1:
        raise ValueError("rotate_state needs n >= 1")
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    target = b.register("target", 1, QubitRole.OUTPUT)
    b.append(OneQubit(H, target[0]))
    b.append(weight_phase(x, target, (phi,)))
    b.append(OneQubit(H, target[0]))
    return b.build()


def rotate_state_amplitudes(phi: float, weight: int) -> np.ndarray:
    e = cmath.exp(1j * phi * weight)
    return np.array([(1 + e) / 2, (1 - e) / 2])


# Counting modulo q

def mod_q_builder(n: int, q: int, check: bool = True) -> Circuit:
    """Counter register (named target) ends in |x| mod q, via parallelized modular increments"""
    if q < 2:
        raise ValueError("mod_q_builder needs q >= 2")
    if n < 1:
        raise ValueError("mod_q_builder needs n >= 1")
    k = max(1, ceil_log2(q))
    t = CircuitBuilder()
    r = t.register("r", k, QubitRole.INPUT)
    t.append(unitary("fourier", (r,), q=q))
    u = CircuitBuilder()
    r = u.register("r", k, QubitRole.INPUT)
    u.append(permutation("increment", (r,), q=q))
    increment = u.build()
    return parallelize_commuting(CommutingGateSet(k, [increment] * n, t.build()), check=check)
