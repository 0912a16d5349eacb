"""
QFT for an arbitrary modulus
Fourier states mod q from a power-of-two transform and integer division, copying mod q,
rounding-based phase estimation with bitwise majority, the composed pipeline and an exact reference
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.stats import multinomial

from ..bits import ceil_log2
from ..circuit import Circuit, CircuitBuilder, Fanout, OneQubit, QubitRole, H, inverse
from ..oracles import permutation, unitary, weight_phase
from ..oracles.arithmetic import division_layout
from ..simulator import Simulator, StateVector, register_distribution, register_fidelity
from . import fourier_state, qft_circuit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QftParams:
    """Modulus q with working precision N = 3n, divisor u = floor(2^N / q) and leftover v = 2^N - q u"""
    q: int
    copies: int = 12

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"modulus must be at least 2, got {self.q}")
        if self.copies < 1:
            raise ValueError("at least one copy is needed")

    @classmethod
    def for_modulus(cls, q: int, epsilon: Optional[float] = None) -> "QftParams":
        n = max(1, ceil_log2(q))
        return cls(q, default_copies(n, epsilon))

    @property
    def n(self) -> int:
        return max(1, ceil_log2(self.q))

    @property
    def N(self) -> int:
        return 3 * self.n

    @property
    def u(self) -> int:
        return division_layout(self.q, self.N)[0]

    @property
    def r(self) -> int:
        return division_layout(self.q, self.N)[1]

    @property
    def v(self) -> int:
        return (1 << self.N) - self.q * self.u

    @property
    def width(self) -> int:
        return self.r + self.n

    @property
    def neglected_norm(self) -> float:
        return math.sqrt(self.v / (1 << self.N))


def default_copies(n: int, epsilon: Optional[float] = None) -> int:
    """m = ceil(4 log2(2n / eps)) rounded up to even, eps = 1/n by default"""
    epsilon = 1 / n if epsilon is None else epsilon
    m = math.ceil(4 * math.log2(2 * n / epsilon))
    return m + (m % 2)


def _prepare(b: CircuitBuilder, params: QftParams, x, dummy, quotient):
    """Fourier state mod q on quotient, garbage on dummy; x may be None for x = 0"""
    y = dummy + quotient
    low = y[: params.N]
    b.layer([OneQubit(H, q) for q in low])
    if x is not None:
        angles = tuple(2 * math.pi * (1 << j) / (1 << params.N) for j in range(params.N))
        b.append(weight_phase(x, low, angles, "value"))
    b.append(permutation("div_floor", (y,), q=params.q, N=params.N))


def qfs_q(params: QftParams) -> Circuit:
    """x -> Phi_x (mod q) on quotient, dummy(q, x) on dummy, plus a branch of norm sqrt(v/2^N)
    where quotient holds q"""
    b = CircuitBuilder()
    x = b.register("x", params.n, QubitRole.INPUT)
    dummy = b.register("dummy", params.r, QubitRole.OUTPUT)
    quotient = b.register("quotient", params.n, QubitRole.OUTPUT)
    _prepare(b, params, x, dummy, quotient)
    return b.build()


def copy_q(params: QftParams, copies: Optional[int] = None) -> Circuit:
    """Copies the Fourier state in quotient into copies-1 fresh quotient registers by inverse addition mod q"""
    copies = params.copies if copies is None else copies
    b = CircuitBuilder()
    b.register("dummy", params.r, QubitRole.INPUT)
    source = b.register("quotient", params.n, QubitRole.INPUT)
    fresh = []
    for c in range(1, copies):
        dummy = b.register(f"dummy{c}", params.r, QubitRole.OUTPUT)
        quotient = b.register(f"quotient{c}", params.n, QubitRole.OUTPUT)
        _prepare(b, params, None, dummy, quotient)
        fresh.append(quotient)
    if fresh:
        b.append(permutation("add_mod", tuple(fresh) + (source,), q=params.q).adjoint())
    return b.build()


def qfp_q(params: QftParams) -> Circuit:
    """Per-copy estimator: zero-extend quotient to N qubits, apply F^dagger_{2^N}, est ^= round(z q / 2^N)"""
    b = CircuitBuilder()
    quotient = b.register("quotient", params.n, QubitRole.INPUT)
    ext = b.register("ext", params.N - params.n)
    est = b.register("est", params.n, QubitRole.OUTPUT)
    z = quotient + ext
    b.extend(inverse(qft_circuit(params.N)), dict(enumerate(z)))
    b.append(permutation("round_div", (z, est), q=params.q, N=params.N))
    return b.build(clean_ancillas=False)


def qfp_q_copy(params: QftParams) -> Circuit:
    """qfs_q followed by qfp_q on its quotient register"""
    b = CircuitBuilder()
    b.register("x", params.n, QubitRole.INPUT)
    b.register("dummy", params.r, QubitRole.OUTPUT)
    quotient = b.register("quotient", params.n, QubitRole.OUTPUT)
    ext = b.register("ext", params.N - params.n)
    est = b.register("est", params.n, QubitRole.OUTPUT)
    b.extend(qfs_q(params))
    estimator = qfp_q(params)
    b.extend(estimator, b.bind(estimator, {"quotient": quotient, "ext": ext, "est": est}, ""))
    return b.build(clean_ancillas=False)


def w_norm(params: QftParams, x: int = 0, simulator: Optional[Simulator] = None) -> float:
    """Measured norm of the branch where quotient holds q"""
    if params.q >= 1 << params.n:
        return 0.0
    circuit = qfs_q(params)
    state = (simulator or Simulator()).run(circuit, {"x": x})
    return math.sqrt(register_distribution(state, circuit.register("quotient"))[params.q])


def qfs_q_fidelities(params: QftParams, simulator: Optional[Simulator] = None) -> np.ndarray:
    """Register fidelity of quotient with Phi_x for every x < q, from one sweep"""
    circuit = qfs_q(params)
    result = (simulator or Simulator()).sweep(circuit, "x")
    quotient = circuit.register("quotient")
    return np.array([
        register_fidelity(result.state(x), quotient, fourier_state(x, params.q, params.n))
        for x in range(params.q)
    ])


@lru_cache(maxsize=16)
def _estimate_table(q: int) -> np.ndarray:
    params = QftParams(q)
    circuit = qfp_q_copy(params)
    result = Simulator().sweep(circuit, "x")
    est = circuit.register("est")
    table = np.array([register_distribution(result.state(x), est)[:q] for x in range(q)])
    table.setflags(write=False)
    logger.debug("estimate table for q=%d from a %d-qubit sweep", q, circuit.qubit_count)
    return table


def estimate_distribution(params: QftParams) -> np.ndarray:
    """P[estimate = e | x] for a single copy, rows x, columns e"""
    return _estimate_table(params.q)


def _majority_ok(counts: np.ndarray, x: int, n: int) -> bool:
    values = np.arange(len(counts))
    for j in range(n):
        agree = counts[((values >> j) & 1) == ((x >> j) & 1)].sum()
        if 2 * agree <= counts.sum():
            return False
    return True


def majority_success(row: np.ndarray, x: int, copies: int, n: int) -> float:
    """Exact probability that the bitwise majority of copies independent estimates equals x (ties fail)"""
    row = np.asarray(row, dtype=float)
    row = row / row.sum()
    q = len(row)
    total = 0.0
    for combo in itertools.combinations_with_replacement(range(q), copies):
        counts = np.bincount(combo, minlength=q)
        if _majority_ok(counts, x, n):
            total += multinomial.pmf(counts, copies, row)
    return float(total)


def sample_majority(row: np.ndarray, x: int, copies: int, n: int, trials: int, rng) -> float:
    """Monte Carlo counterpart of majority_success"""
    row = np.asarray(row, dtype=float)
    draws = rng.choice(len(row), size=(trials, copies), p=row / row.sum())
    ok = np.ones(trials, dtype=bool)
    for j in range(n):
        agree = (((draws >> j) & 1) == ((x >> j) & 1)).sum(axis=1)
        ok &= 2 * agree > copies
    return float(ok.mean())


def qft_q_fidelity(params: QftParams, x: int, trials: Optional[int] = None, rng=None) -> float:
    """Pipeline fidelity factorized over its stages: majority-vote success of the copies times the
    fidelity of the surviving Fourier state; trials switches the vote to Monte Carlo"""
    row = estimate_distribution(params)[x]
    if trials is None:
        vote = majority_success(row, x, params.copies, params.n)
    else:
        vote = sample_majority(row, x, params.copies, params.n, trials, rng)
    return vote * float(qfs_q_fidelities(params)[x])


def qft_q(params: QftParams, copies: Optional[int] = None) -> Circuit:
    """|x> -> Phi_x on out from the QFS, COPY and QFP stages; dummy and scratch registers keep garbage

    Stages: QFS_q on x, COPY_q into copies fresh states, QFS_q^dagger to clear the first state,
    coherent QFP_q^dagger (estimate every copy, xor the bitwise majority into x, unestimate),
    COPY_q^dagger folding the copies back into out. Use an odd number of copies; a tied
    majority bit reads 0.
    """
    m = params.copies if copies is None else copies
    if m < 1:
        raise ValueError("qft_q needs at least one copy")
    n, r = params.n, params.r
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    dummy = b.register("dummy", r)
    quotient = b.register("quotient", n)
    out_dummy = b.register("out_dummy", r)
    out = b.register("out", n, QubitRole.OUTPUT)
    dummies = [out_dummy] + [b.register(f"dummy{c}", r) for c in range(2, m + 1)]
    quotients = [out] + [b.register(f"quotient{c}", n) for c in range(2, m + 1)]
    exts = [b.register(f"ext{c}", params.N - n) for c in range(1, m + 1)]
    ests = [b.register(f"est{c}", n) for c in range(1, m + 1)]

    prepare = qfs_q(params)
    prepare_map = b.bind(prepare, {"x": x, "dummy": dummy, "quotient": quotient}, "")
    b.extend(prepare, prepare_map)

    spread = copy_q(params, m + 1)
    bindings = {"dummy": dummy, "quotient": quotient}
    for c in range(1, m + 1):
        bindings[f"dummy{c}"] = dummies[c - 1]
        bindings[f"quotient{c}"] = quotients[c - 1]
    b.extend(spread, b.bind(spread, bindings, ""))

    b.extend(inverse(prepare), prepare_map)

    estimator = qfp_q(params)
    maps = [b.bind(estimator, {"quotient": z, "ext": e, "est": t}, "")
            for z, e, t in zip(quotients, exts, ests)]
    b.parallel([(estimator, mapping) for mapping in maps])
    b.append(permutation("bitwise_majority", tuple(ests) + (x,)))
    unestimate = inverse(estimator)
    b.parallel([(unestimate, mapping) for mapping in maps])

    if m > 1:
        fold = copy_q(params, m)
        bindings = {"dummy": out_dummy, "quotient": out}
        for c in range(1, m):
            bindings[f"dummy{c}"] = dummies[c]
            bindings[f"quotient{c}"] = quotients[c]
        fold_map = b.bind(fold, bindings, "")
        b.extend(inverse(fold), fold_map)
    circuit = b.build(clean_ancillas=False)
    logger.debug("qft_q q=%d copies=%d: %d qubits, depth %d", params.q, m, circuit.qubit_count, circuit.depth)
    return circuit


def qft_q_state_fidelity(circuit: Circuit, state: StateVector, x: int, q: int) -> float:
    """Fidelity of a qft_q output with x cleared, Phi_x on out and every scratch register at 0,
    with out_dummy traced out"""
    out = circuit.register("out")
    held = list(out) + list(circuit.register("out_dummy"))
    axes = [state.position(k) for k in reversed(held)]
    t = np.moveaxis(state.tensor(), axes, list(range(len(axes))))
    t = t.reshape(1 << len(circuit.register("out_dummy")), 1 << len(out), -1)[:, :, 0]
    overlap = t @ fourier_state(x, q, len(out)).conj()
    return float(np.linalg.norm(overlap))


def qft_q_joint_fidelity(params: QftParams, x: int, copies: Optional[int] = None,
                         simulator: Optional[Simulator] = None) -> float:
    """qft_q_state_fidelity of the composed circuit simulated on input x"""
    circuit = qft_q(params, copies)
    state = (simulator or Simulator()).run(circuit, {"x": x})
    return qft_q_state_fidelity(circuit, state, x, params.q)


def qft_q_ideal(params: QftParams, copies: int = 2) -> Circuit:
    """Reference pipeline |x>|0> -> |0> Phi_x with every stage an exact F_q oracle

    Stages: Fourier state, copies by inverse addition, uncompute the first state,
    uncompute x from one copy, fold the remaining copies back.
    """
    q, n = params.q, params.n
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    work = b.register("work", n)
    out = b.register("out", n, QubitRole.OUTPUT)
    rest = [b.register(f"copy{c}", n) for c in range(2, copies + 1)]
    copies_ = [out] + rest

    def fourier(reg):
        return unitary("fourier", (reg,), q=q)

    b.layer([Fanout(a, (c,)) for a, c in zip(x, work)])
    b.append(fourier(work))
    b.layer([fourier(reg) for reg in copies_])
    b.append(permutation("add_mod", tuple(copies_) + (work,), q=q).adjoint())
    b.append(fourier(work).adjoint())
    b.layer([Fanout(a, (c,)) for a, c in zip(x, work)])
    b.append(fourier(out).adjoint())
    b.layer([Fanout(o, (t,)) for o, t in zip(out, x)])
    b.append(fourier(out))
    if rest:
        b.append(permutation("add_mod", tuple(rest) + (out,), q=q))
        b.layer([fourier(reg).adjoint() for reg in rest])
    return b.build()
