"""
Phase estimation against a phase oracle
Every query prepares one qubit in |+>, kicks it with the hidden phase and reads it in the basis
of its copy; the outcomes go through the same vote and decoder as the Fourier-state copies
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..circuit import CircuitBuilder, H, OneQubit, QubitRole
from ..oracles import DiagonalOracle, diagonal
from ..simulator import Simulator, measure
from .decode import QfpSymbol, copy_basis, postprocess
from .modular import default_copies

logger = logging.getLogger(__name__)


@dataclass
class CountingPhaseOracle:
    """y -> e^{2 pi i x y / 2^n} with a hidden x; counts how often it is queried"""
    x: int
    n: int
    calls: int = 0

    def gate(self, register) -> DiagonalOracle:
        self.calls += 1
        return diagonal("phase_kick", (tuple(register),), x=self.x % (1 << self.n), n=self.n)


@dataclass
class PhaseEstimate:
    estimate: int
    calls: int
    symbols: List[QfpSymbol]
    flagged: bool = field(default=False)


def phase_estimation(oracle: CountingPhaseOracle, n: int, epsilon: Optional[float] = None,
                     m: Optional[int] = None, rng=None,
                     simulator: Optional[Simulator] = None) -> PhaseEstimate:
    """Recover x with m * n oracle queries; m defaults to the copy count for failure epsilon"""
    if m is None:
        m = default_copies(n, epsilon)
    if m % 2:
        raise ValueError(f"phase estimation needs an even number of copies, got {m}")
    rng = np.random.default_rng() if rng is None else rng
    sim = simulator or Simulator()
    outcomes = np.zeros((m, n), dtype=np.int64)
    for c in range(m):
        basis = copy_basis(c, m)
        for j in range(n):
            b = CircuitBuilder()
            y = b.register("y", n, QubitRole.OUTPUT)
            b.append(OneQubit(H, y[j]))
            b.append(oracle.gate(y))
            state = sim.run(b.build(clean_ancillas=False))
            bit, _ = measure(state, [(y[j], basis)], rng)
            outcomes[c, n - 1 - j] = int(bit)
    estimate, symbols = postprocess(outcomes)
    flagged = any(s is QfpSymbol.UNKNOWN for s in symbols)
    logger.debug("phase estimation n=%d m=%d: %d queries, estimate %d%s",
                 n, m, oracle.calls, estimate, " (flagged)" if flagged else "")
    return PhaseEstimate(estimate, oracle.calls, symbols, flagged)

