"""Exception types shared across the library.

The CLI maps these onto exit codes: ConfigError -> 2, SimulationError
(including singular configurations) -> 3, failed checks -> 1.
"""


class PeribondError(Exception):
    """Base class for all library errors."""


class ConfigError(PeribondError):
    """Invalid configuration text or parameter values."""


class SimulationError(PeribondError):
    """Runtime failure inside a simulation (NaN state, missing history, ...)."""


class SingularConfigurationError(SimulationError):
    """Two interacting points coincide in the deformed configuration."""
