"""
Runtime settings
Qubit budget, numerical tolerances and simulation batch sizes
"""

import os
from dataclasses import dataclass, replace
from typing import Mapping, Optional

from .errors import ConfigError


@dataclass(frozen=True)
class Settings:
    qubit_budget: int = 26
    tolerance: float = 1e-9
    unitary_tolerance: float = 1e-12
    roundtrip_limit: int = 20
    batch_amplitudes: int = 2 ** 22
    unitary_qubit_limit: int = 12
    log_level: str = "WARNING"

    def replace(self, **changes) -> "Settings":
        return replace(self, **changes)

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """Build settings from FANQ_* environment variables"""
        environ = os.environ if environ is None else environ
        changes = {}

        raw = environ.get("FANQ_QUBIT_BUDGET")
        if raw is not None:
            try:
                budget = int(raw)
            except ValueError:
                raise ConfigError("FANQ_QUBIT_BUDGET", raw, "expected an integer")
            if budget < 1:
                raise ConfigError("FANQ_QUBIT_BUDGET", raw, "must be positive")
            changes["qubit_budget"] = budget

        raw = environ.get("FANQ_TOLERANCE")
        if raw is not None:
            try:
                tolerance = float(raw)
            except ValueError:
                raise ConfigError("FANQ_TOLERANCE", raw, "expected a number")
            if not tolerance > 0:
                raise ConfigError("FANQ_TOLERANCE", raw, "must be positive")
            changes["tolerance"] = tolerance

        raw = environ.get("FANQ_LOG_LEVEL")
        if raw is not None:
            level = raw.upper()
            if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
                raise ConfigError("FANQ_LOG_LEVEL", raw, "unknown level")
            changes["log_level"] = level

        return cls(**changes)


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings
