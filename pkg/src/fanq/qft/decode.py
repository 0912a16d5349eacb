"""
Phase-estimation decoding
Symbols, majority votes and the prefix decoder that turns copy measurements into x
"""

import math
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np
from scipy.stats import binom

from ..oracles import all_but_last, registry, require


class QfpSymbol(Enum):
    ZERO = "0"
    ONE = "1"
    P = "P"
    N = "N"
    UNKNOWN = "?"

    @property
    def is_bit(self) -> bool:
        return self in (QfpSymbol.ZERO, QfpSymbol.ONE)


BIT_BASIS = "phase_pi_over_2"
PARITY_BASIS = "hadamard"


def copy_basis(copy: int, copies: int) -> str:
    """The first half of the copies is read in the bit basis, the rest in the Hadamard basis"""
    return BIT_BASIS if copy < copies // 2 else PARITY_BASIS


def vote_counts(zeros: int, ones: int, plus: int, minus: int) -> QfpSymbol:
    """Majority symbol of one position; the basis with the larger margin wins, ties go to Hadamard"""
    bit_margin = abs(zeros - ones)
    parity_margin = abs(plus - minus)
    if bit_margin == 0 and parity_margin == 0:
        return QfpSymbol.UNKNOWN
    if parity_margin >= bit_margin:
        return QfpSymbol.P if plus > minus else QfpSymbol.N
    return QfpSymbol.ZERO if zeros > ones else QfpSymbol.ONE


def vote(bit_outcomes: Sequence[int], parity_outcomes: Sequence[int]) -> QfpSymbol:
    ones = int(sum(bit_outcomes))
    minus = int(sum(parity_outcomes))
    return vote_counts(len(bit_outcomes) - ones, ones, len(parity_outcomes) - minus, minus)


def qfp_decode(symbols: Sequence[QfpSymbol]) -> str:
    """Decode z_{n-1} .. z_0 (most significant first) into x_{n-1} .. x_0

    Bit k is the resolved bit z_l of the nearest position l <= k holding 0 or 1
    (z_{-1} = 0), flipped once per N among z_{l+1} .. z_k. UNKNOWN counts as P.
    """
    z = list(reversed([QfpSymbol(s) for s in symbols]))
    bits = []
    for k in range(len(z)):
        flips = 0
        resolved = 0
        for l in range(k, -1, -1):
            if z[l].is_bit:
                resolved = 1 if z[l] is QfpSymbol.ONE else 0
                break
            if z[l] is QfpSymbol.N:
                flips ^= 1
        bits.append(resolved ^ flips)
    return "".join(str(b) for b in reversed(bits))


def decode_value(symbols: Sequence[QfpSymbol]) -> int:
    return int(qfp_decode(symbols), 2) if symbols else 0


def postprocess(outcomes: np.ndarray) -> Tuple[int, List[QfpSymbol]]:
    """Estimate from outcomes of shape (copies, n); outcomes[c, i] belongs to symbol i of copy c"""
    outcomes = np.asarray(outcomes, dtype=np.int64)
    copies, n = outcomes.shape
    half = copies // 2
    symbols = [vote(outcomes[:half, i], outcomes[half:, i]) for i in range(n)]
    return decode_value(list(reversed(symbols))), symbols


# Exact success law

def symbol_phase(x: int, n: int, i: int) -> float:
    """Phase of the copy qubit carrying symbol i: 2 pi x / 2^(i+1)"""
    return 2 * math.pi * (x % (1 << n)) / (1 << (i + 1))


def symbol_success(x: int, n: int, i: int, copies: int, strict: bool = True) -> float:
    """Probability that the vote at position i is consistent with x"""
    alpha = symbol_phase(x, n, i)
    bit = (x >> i) & 1
    same = bit == ((x >> (i - 1)) & 1 if i > 0 else 0)
    p_zero = (1 + math.sin(alpha)) / 2
    p_plus = (1 + math.cos(alpha)) / 2
    half = copies // 2
    rest = copies - half
    zeros = binom.pmf(np.arange(half + 1), half, p_zero)
    plus = binom.pmf(np.arange(rest + 1), rest, p_plus)
    total = 0.0
    for c0 in range(half + 1):
        for cp in range(rest + 1):
            symbol = vote_counts(c0, half - c0, cp, rest - cp)
            if symbol is QfpSymbol.UNKNOWN:
                ok = same and not strict
            elif symbol.is_bit:
                ok = (symbol is QfpSymbol.ONE) == bool(bit)
            else:
                ok = (symbol is QfpSymbol.P) == same
            if ok:
                total += zeros[c0] * plus[cp]
    return float(total)


def qfp_exact_success(n: int, copies: int, x: int, strict: bool = True) -> float:
    """P[decoded estimate == x]; positions vote independently and one wrong symbol spoils the decode

    With strict, an UNKNOWN vote counts as a failure even when resolving it as P happens to work.
    """
    return float(np.prod([symbol_success(x, n, i, copies, strict) for i in range(n)]))


# Coherent estimator

def _check_estimate(widths):
    require(len(widths) >= 2, "qfp_estimate needs at least one copy and a target")
    n = widths[-1]
    require(all(w == n for w in widths[:-1]), "qfp_estimate copies must match the target width")


@registry.permutation("qfp_estimate", self_inverse=True, read_only=all_but_last, check=_check_estimate)
def qfp_estimate(values, widths):
    """target ^= decoded estimate of copies already rotated into their measurement bases"""
    *copies, target = values
    n = widths[-1]
    half = len(copies) // 2
    estimate = np.zeros_like(target)
    previous = np.zeros_like(target)
    for i in range(n):
        j = n - 1 - i
        outcomes = [(c >> j) & 1 for c in copies]
        ones = sum(outcomes[:half], np.zeros_like(target))
        minus = sum(outcomes[half:], np.zeros_like(target))
        zeros = half - ones
        plus = (len(copies) - half) - minus
        bit_margin = np.abs(zeros - ones)
        parity_margin = np.abs(plus - minus)
        use_parity = parity_margin >= bit_margin
        bit = np.where(use_parity, previous ^ (minus > plus).astype(np.int64), (ones > zeros).astype(np.int64))
        estimate |= bit << i
        previous = bit
    return list(copies) + [target ^ estimate]


def _check_majority(widths, **_):
    require(len(widths) >= 2, "bitwise_majority needs at least one estimate and a target")
    require(all(w == widths[-1] for w in widths[:-1]), "bitwise_majority estimates must match the target width")


@registry.permutation("bitwise_majority", self_inverse=True, read_only=all_but_last, check=_check_majority)
def bitwise_majority(values, widths):
    """target ^= bitwise strict majority of the estimates; a tied bit contributes 0"""
    *estimates, target = values
    majority = np.zeros_like(target)
    for j in range(widths[-1]):
        ones = sum((((e >> j) & 1) for e in estimates), np.zeros_like(target))
        majority |= (2 * ones > len(estimates)).astype(np.int64) << j
    return list(estimates) + [target ^ majority]
