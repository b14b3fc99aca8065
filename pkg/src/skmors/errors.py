class SKMorsError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SKMorsError, ValueError):
    pass


class InvalidReferenceError(InvalidInputError):
    """A front point does not strictly dominate the reference point."""


class InsufficientReplicationsError(SKMorsError, ValueError):
    pass


class InvalidStateError(SKMorsError, RuntimeError):
    pass


class ModelFitError(SKMorsError, RuntimeError):
    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = params


class ConfigurationError(SKMorsError, ValueError):
    pass


class GenerationError(SKMorsError, RuntimeError):
    pass
