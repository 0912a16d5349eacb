"""
Reversible arithmetic oracles
Modular addition, increment, division and comparison as basis-state permutations
"""

from functools import lru_cache
from typing import Tuple

import numpy as np

from ..bits import ceil_log2, popcount
from . import all_but_last, first_only, registry, require


def _check_modulus(widths, q, **_):
    require(isinstance(q, int) and q >= 1, f"modulus must be a positive integer, got {q!r}")
    require(q <= 1 << widths[-1], f"modulus {q} does not fit a {widths[-1]}-qubit register")


def _add_mod(values, q, sign):
    *addends, target = values
    total = target.copy()
    for a in addends:
        total = total + sign * a
    return list(addends) + [np.where(target < q, np.mod(total, q), target)]


def _add_mod_inverse(values, widths, q):
    return _add_mod(values, q, -1)


@registry.permutation("add_mod", inverse=_add_mod_inverse, read_only=all_but_last, check=_check_modulus)
def add_mod(values, widths, q):
    """target <- (target + sum of addends) mod q; target values >= q are left alone"""
    return _add_mod(values, q, 1)


def _check_increment(widths, q, amount=1):
    _check_modulus(widths, q)
    require(isinstance(amount, int), "increment amount must be an integer")


def _increment_inverse(values, widths, q, amount=1):
    return increment(values, widths, q, -amount)


@registry.permutation("increment", inverse=_increment_inverse, check=_check_increment)
def increment(values, widths, q, amount=1):
    (r,) = values
    return [np.where(r < q, np.mod(r + amount, q), r)]


def _check_flag(widths, **_):
    require(len(widths) == 2 and widths[1] == 1, "flag oracles need a source register and one output qubit")


@registry.permutation("exact_weight", self_inverse=True, read_only=first_only, check=_check_flag)
def exact_weight(values, widths, weight):
    """out ^= [|x| == weight]"""
    x, out = values
    return [x, out ^ (popcount(x) == weight).astype(np.int64)]


@registry.permutation("or_into", self_inverse=True, read_only=first_only, check=_check_flag)
def or_into(values, widths):
    """out ^= [x != 0]"""
    x, out = values
    return [x, out ^ (x != 0).astype(np.int64)]


@registry.permutation("equals", self_inverse=True, read_only=first_only, check=_check_flag)
def equals(values, widths, value):
    """out ^= [r == value]"""
    r, out = values
    return [r, out ^ (r == value).astype(np.int64)]


def division_layout(q: int, N: int) -> Tuple[int, int, int]:
    """(u, r, n): divisor, remainder width and quotient width for div_floor"""
    u = (1 << N) // q
    return u, max(1, ceil_log2(u)), max(1, ceil_log2(q))


@lru_cache(maxsize=32)
def _division_tables(q: int, N: int, width: int):
    u, r, n = division_layout(q, N)
    y = np.arange(1 << N, dtype=np.int64)
    image = (y // u) << r | (y % u)
    forward = np.empty(1 << width, dtype=np.int64)
    forward[: 1 << N] = image
    rest = np.setdiff1d(np.arange(1 << width, dtype=np.int64), image, assume_unique=True)
    forward[1 << N:] = rest
    backward = np.empty_like(forward)
    backward[forward] = np.arange(1 << width, dtype=np.int64)
    forward.setflags(write=False)
    backward.setflags(write=False)
    return forward, backward


def _check_division(widths, q, N):
    require(isinstance(q, int) and q >= 2, f"modulus must be an integer >= 2, got {q!r}")
    u, r, n = division_layout(q, N)
    require(widths == (r + n,), f"div_floor(q={q}, N={N}) acts on one register of {r + n} qubits")


def _div_floor_inverse(values, widths, q, N):
    (y,) = values
    return [_division_tables(q, N, widths[0])[1][y]]


@registry.permutation("div_floor", inverse=_div_floor_inverse, check=_check_division)
def div_floor(values, widths, q, N):
    """y -> floor(y/u) * 2^r + y mod u on [0, 2^N); the rest of the register is relabeled in order"""
    (y,) = values
    return [_division_tables(q, N, widths[0])[0][y]]


def _check_rounding(widths, q, N):
    require(len(widths) == 2, "round_div needs a source and an estimate register")
    require(widths[0] == N, f"round_div source must have N={N} qubits")
    require(q <= 1 << widths[1], f"estimate register too small for modulus {q}")


@registry.permutation("round_div", self_inverse=True, read_only=first_only, check=_check_rounding)
def round_div(values, widths, q, N):
    """est ^= floor(z*q/2^N + 1/2) mod q"""
    z, est = values
    estimate = np.mod((z * q + (1 << (N - 1))) >> N, q)
    return [z, est ^ estimate]
