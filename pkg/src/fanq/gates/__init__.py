"""
Constant-depth gate builders
Approximate Or, exact[t] and threshold[t] from rotations by Hamming weight, and counting
through the increment gate, which is diagonal in the Fourier basis
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..bits import counter_width
from ..circuit import (
    Circuit, CircuitBuilder, ControlledOneQubit, Fanout, H, OneQubit, Parity, QubitRole, X,
    compose, inverse, rz,
)
from ..oracles import permutation, weight_phase
from ..parallelize import parallelize_diagonal
from ..qft import qft_circuit, qft_pow2
from ..simulator import Simulator, reduced_density_matrix
from .analytic import (
    OrCircuitParams, PoissonBinomial, analytic_or_failure, compute_pmf, max_or_failure,
    threshold_error_bound, weight_law,
)

logger = logging.getLogger(__name__)

QFT_MODES = ("exact_small", "constant_depth_approx")
THRESHOLD_MODES = ("approx", "ideal")


# Or and exact[t]

def _rotation_block(n: int, t: int = 0) -> Circuit:
    """y_k <- Rotate(phi_k, |x| - t) for every k, then z <- Rotate(2 pi / m, |y|)"""
    params = OrCircuitParams.for_inputs(n)
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    y = b.register("y", params.m)
    z = b.register("z", 1)
    first = [OneQubit(rz(-phi * t) @ H if t else H, q) for phi, q in zip(params.angles, y)]
    b.layer(first + [OneQubit(H, z[0])])
    b.append(weight_phase(x, y, params.angles, "weight"))
    b.layer([OneQubit(H, q) for q in y])
    b.append(weight_phase(y, z, (2 * math.pi / params.m,), "weight"))
    b.append(OneQubit(H, z[0]))
    return b.build(clean_ancillas=False)


def _copy_out(block: Circuit, flip: bool) -> Circuit:
    b = CircuitBuilder()
    b.register("x", len(block.register("x")), QubitRole.INPUT)
    b.register("y", len(block.register("y")))
    z = b.register("z", 1)
    out = b.register("out", 1, QubitRole.OUTPUT)
    if flip:
        b.append(OneQubit(X, out[0]))
    b.extend(block)
    b.append(ControlledOneQubit(X, z[0], out[0]))
    b.extend(inverse(block))
    return b.build(clean_ancillas=False)


def build_or_approx(n: int) -> Circuit:
    """One-sided Or: x = 0 always gives out = 0, any other x gives out = 1 with probability 1 - O(1/n)

    The rotation block is uncomputed after the copy, so P[out = 0] = P[Z = 0] =
    analytic_or_failure(n, |x|) and the leftover entanglement shows up as impurity of out.
    """
    if n < 2:
        raise ValueError(f"build_or_approx needs n >= 2, got {n}")
    circuit = _copy_out(_rotation_block(n), flip=False)
    logger.debug("or_approx n=%d: %d qubits", n, circuit.qubit_count)
    return circuit


def build_exact_approx(n: int, t: int) -> Circuit:
    """out = 1 with certainty when |x| = t; otherwise out = 1 with probability analytic_or_failure(n, |x| - t)"""
    if not 0 <= t <= n:
        raise ValueError(f"exact[t] needs 0 <= t <= n, got t={t}, n={n}")
    if n < 1:
        raise ValueError("build_exact_approx needs n >= 1")
    return _copy_out(_rotation_block(n, t), flip=True)


def result_purity(circuit: Circuit, x: int, simulator: Simulator = None) -> float:
    """tr(rho^2) of the out qubit on basis input x"""
    state = (simulator or Simulator()).run(circuit, {"x": x})
    rho = reduced_density_matrix(state, circuit.register("out"))
    return float(np.real(np.trace(rho @ rho)))


# threshold[t]

def build_threshold_approx(n: int, t: int, mode: str = "approx") -> Circuit:
    """out = parity of exact[s](x) over s = t..n, each on its own fan-out copy of x

    approx runs the rotation circuits; ideal uses the exact_weight oracle for every exact[s].
    """
    if mode not in THRESHOLD_MODES:
        raise ValueError(f"unknown threshold mode {mode!r}; expected one of {THRESHOLD_MODES}")
    if not 0 <= t <= n:
        raise ValueError(f"threshold[t] needs 0 <= t <= n, got t={t}, n={n}")
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    out = b.register("out", 1, QubitRole.OUTPUT)
    weights = list(range(t, n + 1))
    copies = [x] + [b.register(f"copy{s}", n) for s in weights[1:]]
    flags = [b.register(f"o{s}", 1) for s in weights]
    fanout = [Fanout(q, tuple(c[i] for c in copies[1:])) for i, q in enumerate(x)] if len(copies) > 1 else []

    b.layer(fanout)
    if mode == "approx":
        blocks = []
        for s, source, flag in zip(weights, copies, flags):
            exact = build_exact_approx(n, s)
            blocks.append((exact, b.bind(exact, {"x": source, "out": flag}, f"e{s}_")))
        b.parallel(blocks)
        b.layer([Parity(tuple(f[0] for f in flags), out[0])])
        b.parallel([(inverse(c), m) for c, m in blocks])
    else:
        oracles = [permutation("exact_weight", (source, flag), weight=s)
                   for s, source, flag in zip(weights, copies, flags)]
        b.layer(oracles)
        b.layer([Parity(tuple(f[0] for f in flags), out[0])])
        b.layer(oracles)
    b.layer(fanout)
    circuit = b.build(clean_ancillas=mode == "ideal")
    logger.debug("threshold n=%d t=%d (%s): %d qubits", n, t, mode, circuit.qubit_count)
    return circuit


# Increment and counting

def _phase_layer(m: int, b: int = 1) -> Circuit:
    builder = CircuitBuilder()
    r = builder.register("r", m, QubitRole.INPUT)
    builder.layer([OneQubit(rz(2 * math.pi * b * (1 << j) / (1 << m)), q) for j, q in enumerate(r)])
    return builder.build()


def increment_diagonal(m: int) -> Tuple[Circuit, Circuit]:
    """(D, F D F^dagger as a circuit): D = Rz(pi) on the top qubit down to Rz(pi / 2^(m-1)) on qubit 0"""
    if m < 1:
        raise ValueError(f"increment_diagonal needs m >= 1, got {m}")
    d = _phase_layer(m)
    f = qft_circuit(m)
    return d, compose(f, d, inverse(f))


def constant_addition(m: int, b: int) -> Circuit:
    """r <- r + b mod 2^m as F, D^b, F^dagger"""
    if m < 1:
        raise ValueError(f"constant_addition needs m >= 1, got {m}")
    f = qft_circuit(m)
    return compose(f, _phase_layer(m, b % (1 << m)), inverse(f))


@dataclass(frozen=True)
class CountingParams:
    """Counter of m = ceil(log2(n+1)) qubits; copies only matter for the constant-depth QFT"""
    n: int
    qft_mode: str = "exact_small"
    copies: int = 8

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"counting needs n >= 1, got {self.n}")
        if self.qft_mode not in QFT_MODES:
            raise ValueError(f"unknown qft mode {self.qft_mode!r}; expected one of {QFT_MODES}")

    @property
    def m(self) -> int:
        return counter_width(self.n)


def _counter_angles(m: int) -> Tuple[float, ...]:
    return tuple(2 * math.pi * (1 << j) / (1 << m) for j in range(m))


def _count_into(b: CircuitBuilder, x, counter, offset: int = 0):
    """counter <- |x| + offset for counter starting at 0"""
    m = len(counter)
    f = qft_circuit(m)
    b.extend(f, dict(enumerate(counter)))
    if offset:
        b.extend(_phase_layer(m, offset), dict(enumerate(counter)))
    parallelize_diagonal(b, x, counter, _counter_angles(m))
    b.extend(inverse(f), dict(enumerate(counter)))


def build_counting(params: CountingParams) -> Circuit:
    """Counter register ends in ||x|>: one controlled increment per input, all parallel in the
    Fourier basis of the counter

    exact_small uses the exact QFT on the counter; constant_depth_approx prepares Phi_|x| by
    Hadamards and rotations and runs the constant-depth QFT backwards into register count.
    """
    n, m = params.n, params.m
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    if params.qft_mode == "exact_small":
        counter = b.register("counter", m, QubitRole.OUTPUT)
        _count_into(b, x, counter)
        return b.build()

    counter = b.register("counter", m)
    count = b.register("count", m, QubitRole.OUTPUT)
    b.layer([OneQubit(H, q) for q in counter])
    parallelize_diagonal(b, x, counter, _counter_angles(m))
    backwards = inverse(qft_pow2(m, params.copies, "coherent"))
    b.extend(backwards, b.bind(backwards, {"x": count, "out": counter}, "qft_"))
    return b.build(clean_ancillas=False)


def counting_threshold(n: int, t: int) -> Circuit:
    """out = [|x| >= t]: count into m+1 qubits with offset 2^m - t and copy the top counter qubit"""
    if not 0 <= t <= n:
        raise ValueError(f"threshold[t] needs 0 <= t <= n, got t={t}, n={n}")
    m = counter_width(n)
    compute = CircuitBuilder()
    x = compute.register("x", n, QubitRole.INPUT)
    counter = compute.register("counter", m + 1)
    compute.register("out", 1, QubitRole.OUTPUT)
    _count_into(compute, x, counter, (1 << m) - t)
    part = compute.build(clean_ancillas=False)

    b = CircuitBuilder()
    b.register("x", n, QubitRole.INPUT)
    counter = b.register("counter", m + 1)
    out = b.register("out", 1, QubitRole.OUTPUT)
    b.extend(part)
    b.append(ControlledOneQubit(X, counter[m], out[0]))
    b.extend(inverse(part))
    return b.build()


def counting_exact(n: int, t: int) -> Circuit:
    """out = [|x| == t]: count, compare the counter with t, uncount"""
    if not 0 <= t <= n:
        raise ValueError(f"exact[t] needs 0 <= t <= n, got t={t}, n={n}")
    m = counter_width(n)
    compute = CircuitBuilder()
    x = compute.register("x", n, QubitRole.INPUT)
    counter = compute.register("counter", m)
    compute.register("out", 1, QubitRole.OUTPUT)
    _count_into(compute, x, counter)
    part = compute.build(clean_ancillas=False)

    b = CircuitBuilder()
    b.register("x", n, QubitRole.INPUT)
    counter = b.register("counter", m)
    out = b.register("out", 1, QubitRole.OUTPUT)
    b.extend(part)
    b.append(permutation("equals", (counter, out), value=t))
    b.extend(inverse(part))
    return b.build()


__all__ = [
    "OrCircuitParams", "PoissonBinomial", "compute_pmf", "weight_law", "analytic_or_failure",
    "max_or_failure", "threshold_error_bound", "build_or_approx", "build_exact_approx",
    "result_purity", "build_threshold_approx", "increment_diagonal", "constant_addition",
    "CountingParams", "build_counting", "counting_threshold", "counting_exact",
]
