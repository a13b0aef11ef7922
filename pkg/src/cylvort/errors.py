"""Shared exception types.

Exit-code mapping in the CLI: ConfigError -> 2, SingularityError and
SimulationAbort -> 1, everything healthy -> 0.
"""

from __future__ import annotations


class SingularityError(ValueError):
    """Kernel or functional evaluated exactly on an unregularized singularity."""


class ConfigError(ValueError):
    """Malformed config file, scenario spec, or CLI usage. Message names the key."""


class ResolutionError(RuntimeError):
    """Exact piecewise-polynomial arithmetic exceeded the configured degree cap."""


class SimulationAbort(RuntimeError):
    """A time step failed mid-run. Carries the diagnostics recorded so far."""

    def __init__(self, message: str, records: list | None = None):
        super().__init__(message)
        self.records = records if records is not None else []
