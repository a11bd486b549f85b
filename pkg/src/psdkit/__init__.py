"""Parametrizations of positive semidefinite matrices and their quantum applications."""

from psdkit.errors import (CapacityError, ConsistencyError, DomainError, NotPSDError,
                           PsdkitError, ResidualError)
from psdkit.matcore import DEFAULT_TOL

__all__ = [
    "CapacityError",
    "ConsistencyError",
    "DEFAULT_TOL",
    "DomainError",
    "NotPSDError",
    "PsdkitError",
    "ResidualError",
]

__version__ = "0.1.0"
