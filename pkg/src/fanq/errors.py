"""
Exception hierarchy for fanq
"""

from typing import List, Optional


class FanqError(Exception):
    """Base class for all fanq errors"""
    pass


class ValidationError(FanqError, ValueError):
    """A circuit breaks one of the layer or gate invariants"""

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        head = self.violations[0] if self.violations else "invalid circuit"
        more = len(self.violations) - 1
        suffix = f" (+{more} more)" if more > 0 else ""
        super().__init__(f"{head}{suffix}")


class CircuitParseError(FanqError, ValueError):
    """Malformed circuit document; line and column are set for JSON syntax errors only"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} at line {line}, column {column}"
        super().__init__(message)


class QubitBudgetError(FanqError):
    """Simulation would need more qubits than allowed"""

    def __init__(self, required: int, allowed: int, what: str = "simulation"):
        self.required = required
        self.allowed = allowed
        super().__init__(f"{what} needs {required} qubits, budget is {allowed}")


class OracleError(FanqError, ValueError):
    """Unknown oracle, bad oracle parameters or a table that is not a bijection"""
    pass


class DiagonalizationError(FanqError, ValueError):
    """A basis change does not diagonalize one of the commuting gates"""

    def __init__(self, index: int, residual: float):
        self.index = index
        self.residual = residual
        super().__init__(f"basis change does not diagonalize gate {index} (off-diagonal {residual:.3e})")


class SearchExhaustedError(FanqError):
    """Fixed-basis rotation search ran out of repetitions"""

    def __init__(self, best_repetitions: int, best_error: float, bound: int):
        self.best_repetitions = best_repetitions
        self.best_error = best_error
        super().__init__(
            f"no repetition count up to {bound} reaches the target; best q={best_repetitions} error={best_error:.3e}"
        )


class ConfigError(FanqError, ValueError):
    """Bad configuration value"""

    def __init__(self, name: str, value: Optional[str], reason: str):
        self.name = name
        super().__init__(f"{name}={value!r}: {reason}")


class UnknownConstructionError(FanqError, KeyError):
    """The CLI was asked for a construction it does not know"""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown construction"
