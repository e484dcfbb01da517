"""Exception types raised across the toolkit."""


class QleError(Exception):
    """Base class for every error raised by ``qle``."""


class NotSquareError(QleError, ValueError):
    pass


class NotHermitianError(QleError, ValueError):
    def __init__(self, max_asymmetry: float):
        self.max_asymmetry = max_asymmetry
        super().__init__(f"matrix is not Hermitian: max |G[j,k] - conj(G[k,j])| = {max_asymmetry:.3e}")


class DimensionTooSmallError(QleError, ValueError):
    pass


class EigensolverFailure(QleError, RuntimeError):
    pass


class StepTooLargeError(QleError, ValueError):
    pass


class UnphysicalStateError(QleError, RuntimeError):
    pass


class MemoryGuardError(QleError, MemoryError):
    pass


class NotPassiveError(QleError, ValueError):
    pass


class DilationVerificationFailed(QleError, RuntimeError):
    pass


class SingularClosureError(QleError, ValueError):
    pass


class StabilityGuardError(QleError, ValueError):
    pass


class NonPositiveTemperatureError(QleError, RuntimeError):
    pass


class ParseError(QleError, ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ValidationError(QleError, ValueError):
    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(message)


class ClosureCheckFailed(QleError, RuntimeError):
    pass
