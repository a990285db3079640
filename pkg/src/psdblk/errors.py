"""Exception hierarchy.

Every error raised by the package derives from :class:`PsdBlkError`, which
is a ``ValueError`` so callers that only care about bad input can catch that.
"""


class PsdBlkError(ValueError):
    """Base class for all package errors."""


class InvalidMatrixError(PsdBlkError):
    """Not a finite two-dimensional array."""


class DimensionMismatchError(PsdBlkError):
    pass


class NotSquareError(DimensionMismatchError):
    pass


class UnequalBlockSizesError(DimensionMismatchError):
    pass


class NotHermitianError(PsdBlkError):
    def __init__(self, msg, defect=None):
        super().__init__(msg)
        self.defect = defect


class NotPsdError(PsdBlkError):
    """The smallest eigenvalue is below the PSD threshold.

    ``eigenvalue`` holds the offending eigenvalue and ``threshold`` the bound
    it failed.
    """

    def __init__(self, msg, eigenvalue=None, threshold=None):
        super().__init__(msg)
        self.eigenvalue = eigenvalue
        self.threshold = threshold


class ConvergenceFailureError(PsdBlkError):
    pass


class NonpositiveExponentError(PsdBlkError):
    pass


class ExponentBelowOneError(PsdBlkError):
    pass


class InvalidNormParameterError(PsdBlkError):
    pass


class EmptyInputError(PsdBlkError):
    pass


class UnknownFunctionTagError(PsdBlkError):
    pass


class DecompositionResidualExceededError(PsdBlkError):
    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class EnvelopeViolationError(PsdBlkError):
    def __init__(self, msg, gap=None):
        super().__init__(msg)
        self.gap = gap


class UnsupportedModeDimensionsError(PsdBlkError):
    pass


class NonRealInputError(PsdBlkError):
    pass
