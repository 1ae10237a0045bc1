"""Error types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class MonotonicityError(InvalidArgumentError):
    """A coefficient required to be nondecreasing was observed decreasing."""


class ConfigError(InvalidArgumentError):
    """A run configuration failed to parse or validate."""


class BlowUpError(RuntimeError):
    """A path exceeded the blow-up guard; carries the offending step index."""

    def __init__(self, step_index: int, time: float, max_abs: float):
        self.step_index = step_index
        self.time = time
        self.max_abs = max_abs
        super().__init__(
            f"path blew up at step {step_index} (t={time:.6g}, max|u|={max_abs:.3g})"
        )


class EstimationImpossibleError(RuntimeError):
    """Every Monte Carlo path failed; no estimate can be formed."""
