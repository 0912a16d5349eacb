"""
Bit helpers
Integer logs, Hamming weights and register packing on numpy index arrays
"""

from typing import Sequence

import numpy as np


def ceil_log2(n: int) -> int:
    """Smallest m with 2^m >= n (0 for n <= 1)"""
    if n <= 1:
        return 0
    return (int(n) - 1).bit_length()


def counter_width(n: int) -> int:
    """m = ceil(log2(n + 1)), the width of a register holding 0..n"""
    return max(1, ceil_log2(n + 1))


def popcount(values) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64).copy()
    count = np.zeros(values.shape, dtype=np.int64)
    while np.any(values):
        count += values & 1
        values >>= 1
    return count


def bitstring(value: int, width: int) -> str:
    """Register value as a string, character j is bit j"""
    return "".join(str((value >> j) & 1) for j in range(width))


def parse_bitstring(text: str) -> int:
    """Inverse of bitstring: character j carries weight 2^j"""
    if any(c not in "01" for c in text):
        raise ValueError(f"not a bitstring: {text!r}")
    return sum(1 << j for j, c in enumerate(text) if c == "1")


def read_register(indices: np.ndarray, register: Sequence[int], qubit_count: int) -> np.ndarray:
    """Register values of flat basis indices (qubit 0 is the most significant index bit)"""
    indices = np.asarray(indices, dtype=np.int64)
    value = np.zeros(indices.shape, dtype=np.int64)
    for j, q in enumerate(register):
        value |= ((indices >> (qubit_count - 1 - q)) & 1) << j
    return value


def write_register(indices: np.ndarray, register: Sequence[int], values: np.ndarray,
                   qubit_count: int) -> np.ndarray:
    indices = np.asarray(indices, dtype=np.int64)
    values = np.asarray(values, dtype=np.int64)
    out = indices.copy()
    for j, q in enumerate(register):
        shift = qubit_count - 1 - q
        out &= ~(np.int64(1) << shift)
        out |= ((values >> j) & 1) << shift
    return out


def basis_index(bits: str) -> int:
    """Flat index of a bitstring where character i is qubit i"""
    return int(bits, 2) if bits else 0
