"""
Or-reduction
Exact reduction of n qubits to ceil(log2(n+1)) qubits that preserves "is the input zero",
its exact[t] shift, log-star exact Or and the size-reduced Or family
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..bits import counter_width, popcount
from ..circuit import Circuit, CircuitBuilder, H, OneQubit, QubitRole, X, inverse, rz
from ..gates import analytic_or_failure, build_or_approx
from ..oracles import permutation, weight_phase
from ..simulator import Simulator, register_distribution

logger = logging.getLogger(__name__)

TAILS = ("approx", "ideal")

Block = Tuple[Circuit, dict]


@dataclass(frozen=True)
class OrReductionSpec:
    """Reduction of n inputs to m = ceil(log2(n+1)) outputs with angles 2 pi / 2^k, k = 1..m"""
    n: int
    error: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"or-reduction needs n >= 1, got {self.n}")

    @property
    def m(self) -> int:
        return counter_width(self.n)

    @property
    def angles(self) -> Tuple[float, ...]:
        return tuple(2 * math.pi / (1 << k) for k in range(1, self.m + 1))


@dataclass(frozen=True)
class DyadicDecomposition:
    w: int
    a: int
    b: int

    def recompose(self) -> int:
        return (1 << self.a) * (2 * self.b + 1)


def dyadic_decompose(w: int) -> DyadicDecomposition:
    """w = 2^a (2b + 1)"""
    if w < 1:
        raise ValueError(f"dyadic decomposition needs w >= 1, got {w}")
    a = (w & -w).bit_length() - 1
    return DyadicDecomposition(w, a, ((w >> a) - 1) // 2)


def exact_reduce_shifted(n: int, t: int) -> Circuit:
    """y = 0^m iff |x| = t; otherwise qubit a of y is 1 with certainty, ||x| - t| = 2^a (2b + 1)"""
    if not 0 <= t <= n:
        raise ValueError(f"shift needs 0 <= t <= n, got t={t}, n={n}")
    spec = OrReductionSpec(n)
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    y = b.register("y", spec.m, QubitRole.OUTPUT)
    b.layer([OneQubit(rz(-phi * t) @ H if t else H, q) for phi, q in zip(spec.angles, y)])
    b.append(weight_phase(x, y, spec.angles, "weight"))
    b.layer([OneQubit(H, q) for q in y])
    return b.build()


def or_reduce(n: int) -> Circuit:
    """y = 0^m iff x = 0; for x != 0 qubit a of y is 1 with certainty, |x| = 2^a (2b + 1)"""
    return exact_reduce_shifted(n, 0)


# Iterated logarithms

def log_star(n: int) -> int:
    """How often n -> ceil(log2(n+1)) must be applied to reach at most 2"""
    count = 0
    while n > 2:
        n = counter_width(n)
        count += 1
    return count


def ilog(n: int, d: int) -> float:
    """log2 applied d times; undefined (ValueError) when the result drops below 1"""
    value = float(n)
    for _ in range(d):
        if value <= 0:
            raise ValueError(f"ilog_{d}({n}) is undefined")
        value = math.log2(value)
    if value < 1:
        raise ValueError(f"ilog_{d}({n}) = {value:.3f} is below 1")
    return value


# Exact Or in log-star depth

def _logstar_chain(n: int, t: int, flip: bool) -> Circuit:
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    out = b.register("out", 1, QubitRole.OUTPUT)
    stages: List[Block] = []
    current = x
    level = 0
    while len(current) > 2 or (t and level == 0):
        stage = exact_reduce_shifted(len(current), t if level == 0 else 0)
        mapping = b.bind(stage, {"x": current}, f"r{level}_")
        b.extend(stage, mapping)
        stages.append((stage, mapping))
        current = tuple(mapping[q] for q in stage.register("y"))
        level += 1
    if flip:
        b.append(OneQubit(X, out[0]))
    b.append(permutation("or_into", (current, out)))
    for stage, mapping in reversed(stages):
        b.extend(inverse(stage), mapping)
    circuit = b.build()
    logger.debug("log-star chain n=%d t=%d: %d reductions, %d qubits", n, t, len(stages), circuit.qubit_count)
    return circuit


def or_exact_logstar(n: int) -> Circuit:
    """Exact Or: reduce until at most 2 qubits remain, Or them into out, uncompute every reduction"""
    if n < 1:
        raise ValueError(f"or_exact_logstar needs n >= 1, got {n}")
    return _logstar_chain(n, 0, flip=False)


def exact_logstar(n: int, t: int) -> Circuit:
    """Exact exact[t]: the first reduction is shifted by t and the final Or is negated"""
    if not 0 <= t <= n:
        raise ValueError(f"exact[t] needs 0 <= t <= n, got t={t}, n={n}")
    return _logstar_chain(n, t, flip=True)


# Size-reduced family

def _split(qubits: Sequence[int], block: int) -> List[Tuple[int, ...]]:
    """Blocks of the given size; the remainder joins the last block"""
    count = max(1, len(qubits) // block)
    chunks = [tuple(qubits[i * block:(i + 1) * block]) for i in range(count)]
    chunks[-1] = tuple(qubits[(count - 1) * block:])
    return chunks


def _reduce_blocks(b: CircuitBuilder, source: Sequence[int], block: int, prefix: str):
    """or_reduce every block side by side; returns the survivor qubits and the embedded blocks"""
    blocks: List[Block] = []
    survivors: List[int] = []
    for j, chunk in enumerate(_split(source, block)):
        stage = or_reduce(len(chunk))
        mapping = b.bind(stage, {"x": chunk}, f"{prefix}{j}_")
        blocks.append((stage, mapping))
        survivors.extend(mapping[q] for q in stage.register("y"))
    b.parallel(blocks)
    return tuple(survivors), blocks


def _uncompute(b: CircuitBuilder, blocks: Sequence[Block]):
    b.parallel([(inverse(stage), mapping) for stage, mapping in blocks])


def blocked_block_size(n: int) -> int:
    return math.ceil(math.sqrt(n) * math.log2(n))


def blocked_or_reduction(n: int, tail: str = "approx", runs: int = 2) -> Circuit:
    """Or-reduce blocks of about sqrt(n) log n inputs, then approximate Or over the survivors

    The approximate Or runs `runs` times on independent ancillas and out is the Or of the runs,
    so the one-sided error is squared. ideal replaces the runs by the or_into oracle.
    """
    if n < 4:
        raise ValueError(f"blocked_or_reduction needs n >= 4, got {n}")
    if tail not in TAILS:
        raise ValueError(f"unknown tail {tail!r}; expected one of {TAILS}")
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    out = b.register("out", 1, QubitRole.OUTPUT)
    survivors, blocks = _reduce_blocks(b, x, blocked_block_size(n), "block")
    if tail == "ideal":
        b.append(permutation("or_into", (survivors, out)))
        _uncompute(b, blocks)
        return b.build()
    approx = build_or_approx(len(survivors))
    results = []
    for r in range(runs):
        mapping = b.bind(approx, {"x": survivors}, f"run{r}_")
        b.extend(approx, mapping)
        results.append(mapping[approx.register("out")[0]])
    b.append(permutation("or_into", (tuple(results), out)))
    circuit = b.build(clean_ancillas=False)
    logger.debug("blocked Or n=%d: %d blocks, %d survivors, %d qubits",
                 n, len(blocks), len(survivors), circuit.qubit_count)
    return circuit


def _blocked_reduction_only(n: int) -> Circuit:
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    survivors, _ = _reduce_blocks(b, x, blocked_block_size(n), "block")
    b.registers["survivors"] = survivors
    return b.build(clean_ancillas=False)


def blocked_or_failures(n: int, runs: int = 2, simulator: Optional[Simulator] = None) -> np.ndarray:
    """P[out = 0 | x] of blocked_or_reduction for every x, factorized over the survivor register

    Given survivors s the runs fail independently, each with analytic_or_failure(|survivors|, |s|).
    """
    circuit = _blocked_reduction_only(n)
    survivors = circuit.register("survivors")
    size = len(survivors)
    weights = popcount(np.arange(1 << size, dtype=np.int64))
    per_weight = np.array([analytic_or_failure(size, int(w)) for w in range(size + 1)])
    miss = per_weight[weights] ** runs
    result = (simulator or Simulator()).sweep(circuit, "x")
    return np.array([float(np.dot(register_distribution(result.state(x), survivors), miss))
                     for x in range(1 << n)])


def blocked_or_failure(n: int, x: int, runs: int = 2) -> float:
    return float(blocked_or_failures(n, runs)[x])


def _lower(n: int, d: int) -> Optional[int]:
    """Block size ceil(ilog_{d-1}(n)) for level d, None if it is undefined or too small to reduce"""
    try:
        block = math.ceil(ilog(n, d - 1))
    except ValueError:
        return None
    return block if block >= 3 else None


def iterated_or(n: int, d: int, tail: str = "approx") -> Circuit:
    """Or with error 1/n in depth O(d): blocks of ilog_{d-1}(n) inputs are reduced, then the
    survivors go to the (d-1)-level circuit; d = 1 is blocked_or_reduction"""
    if d < 1:
        raise ValueError(f"iterated_or needs d >= 1, got {d}")
    if n < 4:
        return or_exact_logstar(n)
    if d == 1:
        return blocked_or_reduction(n, tail)
    block = _lower(n, d)
    if block is None:
        return iterated_or(n, d - 1, tail)
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    out = b.register("out", 1, QubitRole.OUTPUT)
    survivors, _ = _reduce_blocks(b, x, block, f"d{d}b")
    inner = iterated_or(len(survivors), d - 1, tail)
    b.extend(inner, b.bind(inner, {"x": survivors, "out": out}, f"d{d}_"))
    return b.build(clean_ancillas=False)


def iterated_or_exact(n: int, d: int) -> Circuit:
    """Exact counterpart of iterated_or: the last level is or_exact_logstar and every
    reduction is uncomputed"""
    if d < 1:
        raise ValueError(f"iterated_or_exact needs d >= 1, got {d}")
    if d == 1 or n < 4:
        return or_exact_logstar(n)
    block = _lower(n, d)
    if block is None:
        return iterated_or_exact(n, d - 1)
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    out = b.register("out", 1, QubitRole.OUTPUT)
    survivors, blocks = _reduce_blocks(b, x, block, f"d{d}b")
    inner = iterated_or_exact(len(survivors), d - 1)
    b.extend(inner, b.bind(inner, {"x": survivors, "out": out}, f"d{d}_"))
    _uncompute(b, blocks)
    return b.build()


def _or_tree(b: CircuitBuilder, leaves: Sequence[int], prefix: str) -> Tuple[int, List]:
    """Balanced tree of two-input Ors; returns the root and the gates by level"""
    levels = []
    current = list(leaves)
    depth = 0
    while len(current) > 1:
        gates, nxt = [], []
        for i in range(0, len(current) - 1, 2):
            node = b.register(f"{prefix}{depth}_{i // 2}", 1)[0]
            gates.append(permutation("or_into", ((current[i], current[i + 1]), (node,))))
            nxt.append(node)
        if len(current) % 2:
            nxt.append(current[-1])
        levels.append(gates)
        current = nxt
        depth += 1
    return current[0], levels


def linear_size_or(n: int) -> Circuit:
    """Exact Or in log-star depth and linear size: Or-trees over blocks of log*(n) inputs,
    iterated_or_exact with d = log*(n) over the block results, then the trees are uncomputed"""
    if n < 1:
        raise ValueError(f"linear_size_or needs n >= 1, got {n}")
    width = max(1, log_star(n))
    b = CircuitBuilder()
    x = b.register("x", n, QubitRole.INPUT)
    out = b.register("out", 1, QubitRole.OUTPUT)
    roots, trees = [], []
    for j, chunk in enumerate(_split(x, width)):
        root, levels = _or_tree(b, chunk, f"t{j}_")
        roots.append(root)
        trees.append(levels)
    for level in range(max(len(t) for t in trees)):
        b.layer([g for t in trees if level < len(t) for g in t[level]])
    inner = iterated_or_exact(len(roots), width)
    b.extend(inner, b.bind(inner, {"x": tuple(roots), "out": out}, "inner_"))
    for level in reversed(range(max(len(t) for t in trees))):
        b.layer([g for t in trees if level < len(t) for g in t[level]])
    circuit = b.build()
    logger.debug("linear-size Or n=%d: blocks of %d, %d qubits", n, width, circuit.qubit_count)
    return circuit


__all__ = [
    "OrReductionSpec", "DyadicDecomposition", "dyadic_decompose", "or_reduce", "exact_reduce_shifted",
    "log_star", "ilog", "or_exact_logstar", "exact_logstar", "blocked_block_size",
    "blocked_or_reduction", "blocked_or_failures", "blocked_or_failure", "iterated_or",
    "iterated_or_exact", "linear_size_or",
]
