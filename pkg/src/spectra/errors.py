"""Exception hierarchy shared by every subpackage."""


class SpectraError(Exception):
    """Base class for toolkit errors."""


class DimensionError(SpectraError, ValueError):
    pass


class ValidationError(SpectraError, ValueError):
    pass


class DomainError(SpectraError, ValueError):
    pass


class ConfigError(SpectraError, ValueError):
    """Invalid configuration; ``field`` names the offending dotted key when known."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ConvergenceError(SpectraError, ArithmeticError):
    pass


class DegenerateError(SpectraError, ValueError):
    pass


class TrainingError(SpectraError, RuntimeError):
    """Training diverged. Carries the last epoch whose state was finite."""

    def __init__(self, message, last_valid_epoch, trace=None):
        super().__init__(message)
        self.last_valid_epoch = last_valid_epoch
        self.trace = trace


class MissingArtifactsError(SpectraError, FileNotFoundError):
    """A run directory lacks files its manifest promises."""

    def __init__(self, message, missing_epochs=()):
        super().__init__(message)
        self.missing_epochs = tuple(missing_epochs)
