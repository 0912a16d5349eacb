"""
Oracle registry
Named permutation, diagonal and dense-unitary gates, reconstructed by name and parameters
"""

import importlib
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..circuit import ORACLE_KINDS, DiagonalOracle, Oracle, PermutationOracle, UnitaryOracle, freeze_params
from ..config import get_settings
from ..errors import OracleError

logger = logging.getLogger(__name__)

BUILTIN_MODULES = ("fanq.oracles.arithmetic", "fanq.oracles.phases", "fanq.qft.decode")


def nothing_read_only(count: int) -> Tuple[int, ...]:
    return ()


def all_but_last(count: int) -> Tuple[int, ...]:
    return tuple(range(count - 1))


def first_only(count: int) -> Tuple[int, ...]:
    return (0,)


@dataclass
class OracleDefinition:
    """How to evaluate one named oracle

    forward/inverse take a list of register-value arrays and return the new values;
    phase returns per-basis angles; matrix returns the dense unitary on the register.
    """
    name: str
    kind: str
    function: Callable
    inverse: Optional[Callable] = None
    self_inverse: bool = False
    read_only: Callable[[int], Tuple[int, ...]] = nothing_read_only
    cost: Optional[Callable] = None
    expand: Optional[Callable] = None
    check: Optional[Callable] = None

    @property
    def invertible(self) -> bool:
        return self.kind != "perm" or self.self_inverse or self.inverse is not None

    @property
    def is_macro(self) -> bool:
        return self.expand is not None


class OracleRegistry:
    """Name -> definition table, filled by decorators"""

    def __init__(self):
        self.definitions: Dict[str, OracleDefinition] = {}
        self._loaded = False

    def _register(self, definition: OracleDefinition):
        if definition.name in self.definitions:
            raise OracleError(f"oracle {definition.name!r} registered twice")
        self.definitions[definition.name] = definition

    def permutation(self, name: str, inverse: Callable = None, self_inverse: bool = False,
                    read_only: Callable = nothing_read_only, cost: Callable = None, check: Callable = None):
        """Decorator registering a reversible classical map"""
        def decorator(func):
            self._register(OracleDefinition(name, "perm", func, inverse, self_inverse, read_only, cost, None, check))
            return func
        return decorator

    def diagonal(self, name: str, cost: Callable = None, expand: Callable = None, check: Callable = None):
        """Decorator registering a phase function"""
        def decorator(func):
            self._register(OracleDefinition(name, "diag", func, None, False, nothing_read_only, cost, expand, check))
            return func
        return decorator

    def unitary(self, name: str, check: Callable = None):
        """Decorator registering a dense unitary builder"""
        def decorator(func):
            self._register(OracleDefinition(name, "unitary", func, None, False, nothing_read_only, None, None, check))
            return func
        return decorator

    def load_builtins(self):
        if not self._loaded:
            self._loaded = True
            for module in BUILTIN_MODULES:
                importlib.import_module(module)

    def get(self, name: str) -> OracleDefinition:
        self.load_builtins()
        try:
            return self.definitions[name]
        except KeyError:
            raise OracleError(f"unknown oracle {name!r}") from None

    def names(self) -> List[str]:
        self.load_builtins()
        return sorted(self.definitions)

    # Evaluation

    def apply_permutation(self, gate: PermutationOracle, values: List[np.ndarray]) -> List[np.ndarray]:
        definition = self.get(gate.name)
        params = gate.param_dict
        if not gate.inverted or definition.self_inverse:
            return definition.function(values, gate.widths, **params)
        if definition.inverse is None:
            raise OracleError(f"oracle {gate.name} has no inverse")
        return definition.inverse(values, gate.widths, **params)

    def phases(self, gate: DiagonalOracle, values: List[np.ndarray]) -> np.ndarray:
        angles = np.asarray(self.get(gate.name).function(values, gate.widths, **gate.param_dict), dtype=float)
        return -angles if gate.inverted else angles

    def matrix(self, gate: UnitaryOracle) -> np.ndarray:
        m = _unitary_matrix(gate.name, gate.widths, gate.params)
        return m.conj().T if gate.inverted else m

    def check(self, gate: Oracle):
        """Raise OracleError if the gate does not match its registered definition"""
        definition = self.get(gate.name)
        if ORACLE_KINDS[definition.kind] is not type(gate):
            raise OracleError(f"oracle {gate.name} is a {definition.kind} oracle, not {gate.kind}")
        if definition.check is not None:
            definition.check(gate.widths, **gate.param_dict)
        if definition.kind == "perm" and sum(gate.widths) <= get_settings().roundtrip_limit:
            _roundtrip(gate.name, gate.widths, gate.params)


registry = OracleRegistry()


def _split(indices: np.ndarray, widths: Sequence[int]) -> List[np.ndarray]:
    values, shift = [], 0
    for w in widths:
        values.append((indices >> shift) & ((1 << w) - 1))
        shift += w
    return values


def _join(values: Sequence[np.ndarray], widths: Sequence[int]) -> np.ndarray:
    out, shift = np.zeros_like(np.asarray(values[0], dtype=np.int64)), 0
    for v, w in zip(values, widths):
        out = out | (np.asarray(v, dtype=np.int64) << shift)
        shift += w
    return out


@lru_cache(maxsize=256)
def _roundtrip(name: str, widths: Tuple[int, ...], params) -> bool:
    """Bijection check on the whole domain; cached per (name, widths, params)"""
    gate = PermutationOracle(name, tuple(tuple(range(w)) for w in widths), params)
    inverse_gate = gate.adjoint()
    total = sum(widths)
    indices = np.arange(1 << total, dtype=np.int64)
    forward = _join(registry.apply_permutation(gate, _split(indices, widths)), widths)
    if np.any(forward < 0) or np.any(forward >= (1 << total)):
        raise OracleError(f"oracle {name} maps outside its registers")
    if len(np.unique(forward)) != len(forward):
        raise OracleError(f"oracle {name} is not a bijection for widths {widths}")
    back = _join(registry.apply_permutation(inverse_gate, _split(forward, widths)), widths)
    if not np.array_equal(back, indices):
        raise OracleError(f"oracle {name} inverse does not undo the forward map")
    logger.debug("round-trip checked %s on %d qubits", name, total)
    return True


@lru_cache(maxsize=64)
def _unitary_matrix(name: str, widths: Tuple[int, ...], params) -> np.ndarray:
    definition = registry.get(name)
    m = np.asarray(definition.function(widths, **dict(params)), dtype=complex)
    dim = 1 << sum(widths)
    if m.shape != (dim, dim):
        raise OracleError(f"oracle {name} built a {m.shape} matrix for {dim} basis states")
    if np.max(np.abs(m.conj().T @ m - np.eye(dim))) > 1e-9:
        raise OracleError(f"oracle {name} is not unitary")
    m.setflags(write=False)
    return m


def make_oracle(kind: str, name: str, registers: Sequence[Sequence[int]],
                controls: Sequence[int] = (), **params) -> Oracle:
    """Build an oracle gate, filling its nominal cost from the registry"""
    definition = registry.get(name)
    if definition.kind != kind:
        raise OracleError(f"oracle {name} is a {definition.kind} oracle, not {kind}")
    registers = tuple(tuple(r) for r in registers)
    widths = tuple(len(r) for r in registers)
    frozen = freeze_params(params)
    if definition.check is not None:
        definition.check(widths, **dict(frozen))
    if definition.cost is not None:
        depth, size = definition.cost(widths, **dict(frozen))
        size += len(controls)
    else:
        depth, size = 1, sum(widths) + len(controls)
    return ORACLE_KINDS[kind](name, registers, frozen, depth, size, False, tuple(controls))


def permutation(name: str, registers, controls=(), **params) -> PermutationOracle:
    return make_oracle("perm", name, registers, controls, **params)


def diagonal(name: str, registers, controls=(), **params) -> DiagonalOracle:
    return make_oracle("diag", name, registers, controls, **params)


def unitary(name: str, registers, controls=(), **params) -> UnitaryOracle:
    return make_oracle("unitary", name, registers, controls, **params)


def weight_phase(sources: Sequence[int], targets: Sequence[int], angles: Sequence[float],
                 mode: str = "weight") -> DiagonalOracle:
    """Phase sum_k y_k * angles[k] * w(x), w the Hamming weight or the value of x"""
    return diagonal("weight_phase", (tuple(sources), tuple(targets)),
                    angles=tuple(float(a) for a in angles), mode=mode)


def require(condition: bool, message: str):
    if not condition:
        raise OracleError(message)


__all__ = [
    "OracleDefinition", "OracleRegistry", "registry", "make_oracle", "permutation",
    "diagonal", "unitary", "weight_phase", "require", "all_but_last", "first_only",
]
