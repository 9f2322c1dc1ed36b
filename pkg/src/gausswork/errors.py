"""Exception hierarchy shared by all gausswork modules."""


class GaussWorkError(ValueError):
    """Base class for every error raised by the package."""


class NonPositiveDefinite(GaussWorkError):
    pass


class NonPositiveDeterminant(GaussWorkError):
    pass


class InvalidModeSet(GaussWorkError):
    pass


class SingularConditioning(GaussWorkError):
    pass


class Unphysical(GaussWorkError):
    """Parameters violate the uncertainty principle (symplectic eigenvalue < 1/2)."""


class InvalidTriple(GaussWorkError):
    """Local variances that admit no pure three-mode state."""


class UnsupportedModeCount(GaussWorkError):
    pass


class InvalidParams(GaussWorkError):
    pass


class QuadratureFailure(ArithmeticError):
    """Angle average did not converge within the node cap.

    ``indices`` lists the positions (within the evaluated stack) that failed,
    when known.
    """

    def __init__(self, message: str, indices=None):
        super().__init__(message)
        self.indices = None if indices is None else [int(i) for i in indices]

    def __reduce__(self):
        return type(self), (str(self), self.indices)


class LowAcceptanceWarning(RuntimeWarning):
    pass
