"""Exception types shared across the toolkit."""


class ContractError(ValueError):
    """A caller violated an API precondition (shape mismatch, bad index, ...)."""


class TrainingDivergenceError(RuntimeError):
    """Training produced a non-finite loss or gradient."""


class InsufficientDataError(RuntimeError):
    """A replay memory was asked for more samples than it holds."""


class ScenarioError(ValueError):
    """A scenario file failed validation (count, range, or schema)."""


class EnvironmentFailure(RuntimeError):
    """The live environment became unreachable mid-run."""
