"""Exception types raised across the package."""


class SynthesisError(Exception):
    """Base class for all errors raised by csdsynth."""


class NotSquareError(SynthesisError, ValueError):
    pass


class NotPowerOfTwoError(SynthesisError, ValueError):
    pass


class NotUnitaryError(SynthesisError, ValueError):
    """Raised when ``max|M^H M - I|`` exceeds the tolerance."""

    def __init__(self, deviation, tol):
        self.deviation = float(deviation)
        self.tol = float(tol)
        super().__init__(f"matrix is not unitary: max deviation {self.deviation:.3e} > tol {self.tol:.1e}")


class DimTooSmallError(SynthesisError, ValueError):
    pass


class ShapeMismatchError(SynthesisError, ValueError):
    pass


class NoConvergenceError(SynthesisError, ArithmeticError):
    def __init__(self, sweeps):
        self.sweeps = sweeps
        super().__init__(f"Jacobi SVD did not converge within {sweeps} sweeps")


class NotGrayError(SynthesisError, ValueError):
    pass


class IndexOutOfRangeError(SynthesisError, IndexError):
    pass


class ReconstructionFailure(SynthesisError, ArithmeticError):
    """A decomposition failed its own reconstruction check."""

    def __init__(self, residual, limit):
        self.residual = float(residual)
        self.limit = float(limit)
        super().__init__(f"reconstruction residual {self.residual:.3e} exceeds {self.limit:.1e}")


class PlanVerificationFailure(ReconstructionFailure):
    pass


class CircuitSyntaxError(SynthesisError, ValueError):
    def __init__(self, message, line, column=1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class UnknownGateError(CircuitSyntaxError):
    pass
