"""
Phase oracles
The weight-phase macro with its fan-out gadget, phase polynomials, phase kicks and the q-point Fourier unitary
"""

import math

import numpy as np

from ..bits import popcount
from ..circuit import ControlledOneQubit, Fanout, rz
from . import registry, require

WEIGHT_MODES = ("weight", "value")


def _check_weight_phase(widths, angles, mode="weight"):
    require(len(widths) == 2, "weight_phase needs a source and a target register")
    require(len(angles) == widths[1], f"weight_phase needs one angle per target, got {len(angles)} for {widths[1]}")
    require(mode in WEIGHT_MODES, f"weight_phase mode must be one of {WEIGHT_MODES}")


def _weight_phase_cost(widths, angles, mode="weight"):
    n, m = widths
    return 3, 6 * n * m


def expand_weight_phase(gate, allocate):
    """Fan-out gadget: copy every source and target, one parallel layer of controlled rotations, uncopy

    Source x_i is copied m-1 times and target y_k n-1 times so that pair (i, k)
    meets on its own qubits; returns the three layers.
    """
    require(not gate.controls, "weight_phase with controls has no expansion")
    params = gate.param_dict
    sources, targets = gate.registers
    n, m = len(sources), len(targets)
    sign = -1.0 if gate.inverted else 1.0
    source_copies = [(x,) + allocate(m - 1) for x in sources]
    target_copies = [(y,) + allocate(n - 1) for y in targets]
    copy = [Fanout(c[0], c[1:]) for c in source_copies] + [Fanout(c[0], c[1:]) for c in target_copies]
    rotations = []
    for i in range(n):
        scale = 1 if params.get("mode", "weight") == "weight" else 1 << i
        for k in range(m):
            angle = sign * params["angles"][k] * scale
            rotations.append(ControlledOneQubit(rz(angle), source_copies[i][k], target_copies[k][i]))
    return [copy, rotations, list(copy)]


@registry.diagonal("weight_phase", cost=_weight_phase_cost, expand=expand_weight_phase, check=_check_weight_phase)
def weight_phase(values, widths, angles, mode="weight"):
    """Phase sum_k y_k * angles[k] * w(x), w = |x| or the value of x"""
    x, y = values
    w = popcount(x) if mode == "weight" else x
    total = np.zeros(np.shape(x), dtype=float)
    for k, angle in enumerate(angles):
        total += ((y >> k) & 1) * angle * w
    return total


def _check_polynomial(widths, terms):
    require(len(widths) == 1, "phase_polynomial acts on one register")
    for term in terms:
        require(len(term) == 2, "phase_polynomial terms are (mask, angle) pairs")
        require(0 <= term[0] < 1 << widths[0], f"mask {term[0]} outside the register")


@registry.diagonal("phase_polynomial", check=_check_polynomial)
def phase_polynomial(values, widths, terms):
    """Phase sum of angle * [all bits of mask are set]"""
    (r,) = values
    total = np.zeros(np.shape(r), dtype=float)
    for mask, angle in terms:
        total += np.where((r & mask) == mask, angle, 0.0)
    return total


@registry.diagonal("phase_kick")
def phase_kick(values, widths, x, n):
    """Phase 2 pi x y / 2^n on register value y"""
    (y,) = values
    return 2 * math.pi * ((x * y) % (1 << n)) / (1 << n)


def _check_fourier(widths, q):
    require(len(widths) == 1, "fourier acts on one register")
    require(2 <= q <= 1 << widths[0], f"modulus {q} does not fit {widths[0]} qubits")


@registry.unitary("fourier", check=_check_fourier)
def fourier(widths, q):
    """F_q on register values 0..q-1, identity above"""
    dim = 1 << widths[0]
    y, x = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    m = np.eye(dim, dtype=complex)
    m[:q, :q] = np.exp(2j * np.pi * x * y / q) / math.sqrt(q)
    return m
