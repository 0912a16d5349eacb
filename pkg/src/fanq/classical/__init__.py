"""
Classical baselines
Layered classical circuits with bounded fan-in And/Or and unbounded parity and fan-out,
their GF(2) algebraic normal form, the degree bound 2^depth and the randomized depth-2 Or
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import ClassVar, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..bits import popcount

logger = logging.getLogger(__name__)

ANF_VARIABLE_LIMIT = 20


# GF(2) polynomials

Monomial = FrozenSet[int]


@dataclass(frozen=True)
class Gf2Polynomial:
    """Multilinear polynomial over GF(2) as its set of monomials; the empty monomial is 1"""
    monomials: FrozenSet[Monomial] = frozenset()

    @classmethod
    def constant(cls, bit: int) -> "Gf2Polynomial":
        return cls(frozenset({frozenset()})) if bit & 1 else cls()

    @classmethod
    def variable(cls, i: int) -> "Gf2Polynomial":
        return cls(frozenset({frozenset({i})}))

    def __add__(self, other: "Gf2Polynomial") -> "Gf2Polynomial":
        return Gf2Polynomial(self.monomials ^ other.monomials)

    def __mul__(self, other: "Gf2Polynomial") -> "Gf2Polynomial":
        terms = set()
        for a in self.monomials:
            for b in other.monomials:
                terms ^= {a | b}
        return Gf2Polynomial(frozenset(terms))

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial"""
        return max((len(m) for m in self.monomials), default=-1)

    @property
    def variables(self) -> FrozenSet[int]:
        return frozenset().union(*self.monomials)

    def truth_table(self, n: int) -> np.ndarray:
        """Values on every x < 2^n, variable i read from bit i of x"""
        x = np.arange(1 << n, dtype=np.int64)
        out = np.zeros(1 << n, dtype=np.int64)
        for monomial in self.monomials:
            mask = sum(1 << i for i in monomial)
            out ^= ((x & mask) == mask).astype(np.int64)
        return out

    def __str__(self):
        if not self.monomials:
            return "0"
        terms = sorted(self.monomials, key=lambda m: (len(m), sorted(m)))
        return " + ".join("*".join(f"x{i}" for i in sorted(m)) or "1" for m in terms)


def anf_from_truth_table(table: Sequence[int], n: int) -> Gf2Polynomial:
    """Moebius transform over GF(2)"""
    if n > ANF_VARIABLE_LIMIT:
        raise ValueError(f"ANF of {n} variables exceeds the limit of {ANF_VARIABLE_LIMIT}")
    coeffs = np.asarray(table, dtype=np.int64).copy() & 1
    if len(coeffs) != 1 << n:
        raise ValueError(f"truth table of {len(coeffs)} entries for {n} variables")
    for i in range(n):
        step = 1 << i
        view = coeffs.reshape(-1, 2 * step)
        view[:, step:] ^= view[:, :step]
    monomials = frozenset(
        frozenset(i for i in range(n) if (x >> i) & 1) for x in np.nonzero(coeffs)[0]
    )
    return Gf2Polynomial(monomials)


# Circuits

@dataclass(frozen=True)
class Not:
    source: int
    kind: ClassVar[str] = "not"
    outputs: ClassVar[int] = 1

    @property
    def reads(self) -> Tuple[int, ...]:
        return (self.source,)


@dataclass(frozen=True)
class And2:
    a: int
    b: int
    kind: ClassVar[str] = "and"
    outputs: ClassVar[int] = 1

    @property
    def reads(self) -> Tuple[int, ...]:
        return (self.a, self.b)


@dataclass(frozen=True)
class Or2:
    a: int
    b: int
    kind: ClassVar[str] = "or"
    outputs: ClassVar[int] = 1

    @property
    def reads(self) -> Tuple[int, ...]:
        return (self.a, self.b)


@dataclass(frozen=True)
class ParityGate:
    """Unbounded fan-in XOR; no sources gives the constant 0"""
    sources: Tuple[int, ...]
    kind: ClassVar[str] = "parity"
    outputs: ClassVar[int] = 1

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))

    @property
    def reads(self) -> Tuple[int, ...]:
        return self.sources


@dataclass(frozen=True)
class FanoutGate:
    """Unbounded fan-out: copies new wires equal to source"""
    source: int
    copies: int
    kind: ClassVar[str] = "fanout"

    @property
    def reads(self) -> Tuple[int, ...]:
        return (self.source,)

    @property
    def outputs(self) -> int:
        return self.copies


ClassicalGate = Union[Not, And2, Or2, ParityGate, FanoutGate]


@dataclass(frozen=True)
class ClassicalCircuit:
    """Wires 0..n-1 are the inputs; every gate appends its output wires in layer order.
    Gates in one layer read disjoint wires produced by earlier layers."""
    n: int
    layers: Tuple[Tuple[ClassicalGate, ...], ...] = ()
    output: Optional[int] = None
    wire_count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(tuple(layer) for layer in self.layers))
        wires = self.n
        for depth, layer in enumerate(self.layers):
            reads = [w for g in layer for w in g.reads]
            if len(set(reads)) != len(reads):
                raise ValueError(f"layer {depth}: gates read the same wire")
            if any(not 0 <= w < wires for w in reads):
                raise ValueError(f"layer {depth}: gate reads a wire that does not exist yet")
            wires += sum(g.outputs for g in layer)
        object.__setattr__(self, "wire_count", wires)
        if self.output is not None and not 0 <= self.output < wires:
            raise ValueError(f"output wire {self.output} outside 0..{wires - 1}")

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def output_wire(self) -> int:
        return self.wire_count - 1 if self.output is None else self.output

    @property
    def size(self) -> int:
        return sum(len(g.reads) + g.outputs for layer in self.layers for g in layer)


class ClassicalBuilder:
    """Appends layers and hands out the wires they produce"""

    def __init__(self, n: int):
        self.n = n
        self.layers: List[List[ClassicalGate]] = []
        self.wires = n

    def layer(self, gates: Iterable[ClassicalGate]) -> List[Tuple[int, ...]]:
        gates = list(gates)
        produced = []
        for g in gates:
            produced.append(tuple(range(self.wires, self.wires + g.outputs)))
            self.wires += g.outputs
        self.layers.append(gates)
        return produced

    def build(self, output: Optional[int] = None) -> ClassicalCircuit:
        return ClassicalCircuit(self.n, tuple(tuple(layer) for layer in self.layers), output)


def _wire_values(circuit: ClassicalCircuit, inputs: np.ndarray) -> List[np.ndarray]:
    values = [(inputs >> i) & 1 for i in range(circuit.n)]
    for layer in circuit.layers:
        for g in layer:
            if isinstance(g, Not):
                values.append(1 - values[g.source])
            elif isinstance(g, And2):
                values.append(values[g.a] & values[g.b])
            elif isinstance(g, Or2):
                values.append(values[g.a] | values[g.b])
            elif isinstance(g, ParityGate):
                acc = np.zeros_like(inputs)
                for s in g.sources:
                    acc = acc ^ values[s]
                values.append(acc)
            else:
                values.extend([values[g.source]] * g.copies)
    return values


def evaluate(circuit: ClassicalCircuit, inputs: Union[int, Iterable[int], None] = None,
             wire: Optional[int] = None) -> np.ndarray:
    """Output bit for every input value (bit i of the value is input wire i); all 2^n by default"""
    if inputs is None:
        inputs = np.arange(1 << circuit.n, dtype=np.int64)
    inputs = np.atleast_1d(np.asarray(inputs, dtype=np.int64))
    wire = circuit.output_wire if wire is None else wire
    return _wire_values(circuit, inputs)[wire]


def anf(circuit: ClassicalCircuit, wire: Optional[int] = None) -> Gf2Polynomial:
    """Exact ANF of a wire: Not is 1 + p, And is p q, Or is p + q + p q, parity is a sum"""
    if circuit.n > ANF_VARIABLE_LIMIT:
        raise ValueError(f"ANF of {circuit.n} variables exceeds the limit of {ANF_VARIABLE_LIMIT}")
    one = Gf2Polynomial.constant(1)
    polys = [Gf2Polynomial.variable(i) for i in range(circuit.n)]
    for layer in circuit.layers:
        for g in layer:
            if isinstance(g, Not):
                polys.append(one + polys[g.source])
            elif isinstance(g, And2):
                polys.append(polys[g.a] * polys[g.b])
            elif isinstance(g, Or2):
                p, q = polys[g.a], polys[g.b]
                polys.append(p + q + p * q)
            elif isinstance(g, ParityGate):
                acc = Gf2Polynomial()
                for s in g.sources:
                    acc = acc + polys[s]
                polys.append(acc)
            else:
                polys.extend([polys[g.source]] * g.copies)
    return polys[circuit.output_wire if wire is None else wire]


def degree_bound_check(circuit: ClassicalCircuit) -> bool:
    """deg(anf) <= 2^depth"""
    return anf(circuit).degree <= 2 ** circuit.depth


# Builders

def _tree(n: int, gate) -> ClassicalCircuit:
    if n < 1:
        raise ValueError(f"a tree needs n >= 1, got {n}")
    b = ClassicalBuilder(n)
    current = list(range(n))
    while len(current) > 1:
        pairs = [(current[i], current[i + 1]) for i in range(0, len(current) - 1, 2)]
        produced = b.layer(gate(a, c) for a, c in pairs)
        current = [w[0] for w in produced] + (current[-1:] if len(current) % 2 else [])
    return b.build(current[0])


def and_tree(n: int) -> ClassicalCircuit:
    """Balanced And tree of depth ceil(log2 n)"""
    return _tree(n, And2)


def or_tree(n: int) -> ClassicalCircuit:
    return _tree(n, Or2)


def and_chain(depth: int) -> ClassicalCircuit:
    """x0 x1 ... x_depth with one And per layer"""
    b = ClassicalBuilder(depth + 1)
    acc = 0
    for i in range(1, depth + 1):
        acc = b.layer([And2(acc, i)])[0][0]
    return b.build(acc)


RANDOM_GATES = ("not", "and", "or", "parity", "fanout")


def random_circuit(n: int, depth: int, rng) -> ClassicalCircuit:
    """Seeded random layered circuit; every layer reads a random disjoint selection of wires"""
    if n < 1 or depth < 0:
        raise ValueError("random_circuit needs n >= 1 and depth >= 0")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    b = ClassicalBuilder(n)
    for _ in range(depth):
        free = list(rng.permutation(b.wires))
        gates = []
        while free:
            kind = RANDOM_GATES[rng.integers(len(RANDOM_GATES))]
            if kind in ("and", "or") and len(free) >= 2:
                a, c = int(free.pop()), int(free.pop())
                gates.append(And2(a, c) if kind == "and" else Or2(a, c))
            elif kind == "parity":
                width = int(rng.integers(1, min(4, len(free)) + 1))
                gates.append(ParityGate(tuple(int(free.pop()) for _ in range(width))))
            elif kind == "fanout":
                gates.append(FanoutGate(int(free.pop()), int(rng.integers(1, 3))))
            else:
                gates.append(Not(int(free.pop())))
            if rng.random() < 0.3:
                break
        b.layer(gates)
    circuit = b.build()
    logger.debug("random circuit: n=%d depth=%d, %d wires", n, depth, circuit.wire_count)
    return circuit


# Randomized Or

@dataclass(frozen=True)
class RandomizedOr:
    """Sampled circuit: repetition j outputs the parity of x_k over k with strings[j, k] = 1"""
    circuit: ClassicalCircuit
    strings: np.ndarray
    failure_bound: Fraction


def randomized_or(n: int, repetitions: int, rng) -> RandomizedOr:
    """Fan-out layer, one parity per repetition, then an Or tree over the repetitions"""
    if n < 1 or repetitions < 1:
        raise ValueError("randomized_or needs n >= 1 and at least one repetition")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    strings = rng.integers(0, 2, size=(repetitions, n))
    b = ClassicalBuilder(n)
    copies = b.layer(FanoutGate(i, repetitions) for i in range(n))
    parities = b.layer(
        ParityGate(tuple(copies[k][j] for k in range(n) if strings[j, k])) for j in range(repetitions)
    )
    current = [p[0] for p in parities]
    while len(current) > 1:
        pairs = [(current[i], current[i + 1]) for i in range(0, len(current) - 1, 2)]
        produced = b.layer(Or2(a, c) for a, c in pairs)
        current = [w[0] for w in produced] + (current[-1:] if len(current) % 2 else [])
    return RandomizedOr(b.build(current[0]), strings, Fraction(1, 2) ** repetitions)


def per_repetition_failure(n: int, x: int) -> Fraction:
    """Fraction of all 2^n random strings r with parity(x & r) = 0"""
    r = np.arange(1 << n, dtype=np.int64)
    zeros = int(np.count_nonzero(popcount(r & x) % 2 == 0))
    return Fraction(zeros, 1 << n)


def randomized_or_failure(n: int, repetitions: int) -> Fraction:
    """Worst case over x != 0 of the probability that every repetition misses, by exhaustive count"""
    if n < 1:
        raise ValueError(f"randomized_or_failure needs n >= 1, got {n}")
    worst = max(per_repetition_failure(n, x) for x in range(1, 1 << n))
    return worst ** repetitions


def or_tree_depth(repetitions: int) -> int:
    """Depth of randomized_or: fan-out, parity and ceil(log2 r) Or layers"""
    return 2 + math.ceil(math.log2(repetitions))


__all__ = [
    "Gf2Polynomial", "anf_from_truth_table", "Not", "And2", "Or2", "ParityGate", "FanoutGate",
    "ClassicalCircuit", "ClassicalBuilder", "evaluate", "anf", "degree_bound_check", "and_tree",
    "or_tree", "and_chain", "random_circuit", "RandomizedOr", "randomized_or",
    "per_repetition_failure", "randomized_or_failure", "or_tree_depth",
]
