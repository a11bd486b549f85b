"""Exception hierarchy shared by every psdkit module."""


class PsdkitError(Exception):
    """Base class for all psdkit errors."""


class DomainError(PsdkitError, ValueError):
    """Input outside the domain of an operation (wrong shape, non-Hermitian, ...)."""


class NotPSDError(PsdkitError):
    """A matrix that was required to be positive semidefinite is not.

    ``index`` is the 1-based leading index at which the failure was detected
    (Cholesky), and ``witness`` carries any extra evidence such as an
    offending eigenvalue.
    """

    def __init__(self, message, index=None, witness=None):
        super().__init__(message)
        self.index = index
        self.witness = witness


class CapacityError(PsdkitError):
    """The requested computation exceeds a documented size limit."""


class ResidualError(PsdkitError):
    """A solve left a residual larger than the tolerance allows."""


class ConsistencyError(PsdkitError):
    """Independent routes that must agree produced different answers."""
