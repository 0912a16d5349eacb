"""
Constructions and verification suites
Named circuit builders shared by build, simulate and bench, and one verification suite per
acceptance check, registered with decorators and loaded on first use
"""

import importlib
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence

from ..circuit import Circuit, stats
from ..errors import UnknownConstructionError
from ..reduction import ilog

logger = logging.getLogger(__name__)

BUILTIN_MODULES = ("fanq.suites.constructions", "fanq.suites.checks")
RELATIONS = ("close", "le", "ge", "eq")


@dataclass(frozen=True)
class Check:
    check_id: str
    measured: Any
    expected: Any
    tolerance: float
    relation: str
    passed: bool

    def as_row(self, suite: str) -> Dict[str, Any]:
        return {
            "suite": suite,
            "check": self.check_id,
            "measured": _plain(self.measured),
            "expected": _plain(self.expected),
            "relation": self.relation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _plain(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if hasattr(value, "item"):
        return _plain(value.item())
    return value


def check(check_id: str, measured, expected, tolerance: float = 1e-9, relation: str = "close") -> Check:
    """close: |measured - expected| <= tolerance; le/ge: one-sided with tolerance; eq: exact"""
    if relation == "close":
        passed = abs(measured - expected) <= tolerance
    elif relation == "le":
        passed = measured <= expected + tolerance
    elif relation == "ge":
        passed = measured >= expected - tolerance
    elif relation == "eq":
        passed = measured == expected
    else:
        raise ValueError(f"unknown relation {relation!r}; expected one of {RELATIONS}")
    return Check(check_id, measured, expected, tolerance, relation, bool(passed))


@dataclass
class SuiteReport:
    suite: str
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def rows(self) -> List[Dict[str, Any]]:
        return [c.as_row(self.suite) for c in sorted(self.checks, key=lambda c: c.check_id)]


@dataclass(frozen=True)
class Suite:
    name: str
    criterion: str
    function: Callable[[int], List[Check]]


@dataclass(frozen=True)
class Construction:
    """builder(**params) -> Circuit; scale(n, d) normalizes sizes in bench tables"""
    name: str
    builder: Callable[..., Circuit]
    defaults: Mapping[str, Any]
    scale: Optional[Callable[[int, int], float]] = None


@dataclass(frozen=True)
class Procedure:
    """Sampling procedure without a single circuit: run(seed, shots, simulator, **params) -> rows"""
    name: str
    run: Callable[..., List[Dict[str, Any]]]
    defaults: Mapping[str, Any]


class SuiteRegistry:
    def __init__(self):
        self.suites: Dict[str, Suite] = {}
        self.constructions: Dict[str, Construction] = {}
        self.procedures: Dict[str, Procedure] = {}
        self._loaded = False

    def suite(self, name: str, criterion: str):
        """Decorator registering a verification suite"""
        def decorator(func):
            self.suites[name] = Suite(name, criterion, func)
            return func
        return decorator

    def construction(self, name: str, scale: Callable[[int, int], float] = None, **defaults):
        """Decorator registering a circuit builder with its default parameters"""
        def decorator(func):
            self.constructions[name] = Construction(name, func, dict(defaults), scale)
            return func
        return decorator

    def procedure(self, name: str, **defaults):
        def decorator(func):
            self.procedures[name] = Procedure(name, func, dict(defaults))
            return func
        return decorator

    def load_builtins(self):
        if not self._loaded:
            self._loaded = True
            for module in BUILTIN_MODULES:
                importlib.import_module(module)

    def get_suite(self, name: str) -> Suite:
        self.load_builtins()
        try:
            return self.suites[name]
        except KeyError:
            raise UnknownConstructionError(f"unknown suite {name!r}; known: {', '.join(sorted(self.suites))}") from None

    def get_construction(self, name: str) -> Construction:
        self.load_builtins()
        try:
            return self.constructions[name]
        except KeyError:
            known = ", ".join(sorted(self.constructions))
            raise UnknownConstructionError(f"unknown construction {name!r}; known: {known}") from None

    def suite_names(self) -> List[str]:
        """In registration order"""
        self.load_builtins()
        return list(self.suites)

    def construction_names(self) -> List[str]:
        self.load_builtins()
        return sorted(self.constructions)


registry = SuiteRegistry()


def coerce_params(defaults: Mapping[str, Any], given: Mapping[str, Any]) -> Dict[str, Any]:
    """Defaults overridden by given values, converted to the type of each default"""
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise ValueError(f"unknown parameters {unknown}; expected some of {sorted(defaults)}")
    params = dict(defaults)
    for key, value in given.items():
        kind = type(defaults[key])
        params[key] = kind(value) if not isinstance(value, kind) else value
    return params


def parse_params(items: Sequence[str]) -> Dict[str, str]:
    """key=value pairs from the command line"""
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ValueError(f"parameter {item!r} is not of the form key=value")
        params[key] = value
    return params


def build_construction(name: str, params: Mapping[str, Any] = None) -> Circuit:
    construction = registry.get_construction(name)
    values = coerce_params(construction.defaults, params or {})
    logger.debug("building %s with %s", name, values)
    return construction.builder(**values)


def run_suite(name: str, seed: int = 0) -> SuiteReport:
    suite = registry.get_suite(name)
    logger.info("running suite %s (%s)", name, suite.criterion)
    report = SuiteReport(name, list(suite.function(seed)))
    logger.info("suite %s: %d checks, %s", name, len(report.checks), "passed" if report.passed else "FAILED")
    return report


def bench_rows(name: str, ns: Sequence[int], ds: Sequence[int] = (1,),
               params: Mapping[str, Any] = None) -> List[Dict[str, Any]]:
    """Stats-only scaling table; d is passed only to constructions that take it"""
    construction = registry.get_construction(name)
    rows = []
    for n in ns:
        for d in ds:
            given = dict(params or {})
            if "n" in construction.defaults:
                given["n"] = n
            if "d" in construction.defaults:
                given["d"] = d
            circuit = construction.builder(**coerce_params(construction.defaults, given))
            s = stats(circuit)
            row = {"n": n, "d": d, "qubits": circuit.qubit_count, **s.as_dict()}
            if construction.scale is not None:
                row["size_ratio"] = round(s.size / construction.scale(n, d), 6)
            rows.append(row)
            if "d" not in construction.defaults:
                break
    return rows


def n_log_n(n: int, d: int = 1) -> float:
    return n * max(1.0, math.log2(n))


def iterated_scale(n: int, d: int) -> float:
    """d n ilog_d(n), falling back to d n where the iterated logarithm is below 1"""
    try:
        return d * n * ilog(n, d)
    except ValueError:
        return d * n


__all__ = [
    "Check", "SuiteReport", "Suite", "Construction", "Procedure", "SuiteRegistry", "registry",
    "check", "coerce_params", "parse_params", "build_construction", "run_suite", "bench_rows",
    "n_log_n", "iterated_scale",
]
