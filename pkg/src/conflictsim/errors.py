"""Exception types shared across the simulator."""


class ConflictSimError(Exception):
    """Base class for all conflictsim errors."""


class ConfigError(ConflictSimError):
    """A scenario document is syntactically or semantically invalid."""


class DimensionMismatchError(ConflictSimError):
    """Two vectors that must share a length do not."""


class CompositionAmbiguityError(ConflictSimError):
    """Two overriding faults claim the same variable at the same instant."""


class SimulationDivergenceError(ConflictSimError):
    """The process state became non-finite during a run."""

    def __init__(self, message: str, step: int, t: float):
        super().__init__(message)
        self.step = step
        self.t = t
