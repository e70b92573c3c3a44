class WHQuantError(Exception):
    """Base class for numerical errors raised by whquant"""


class GridMismatchError(WHQuantError, ValueError):
    """Two sampled objects that must share a grid do not"""


class PreconditionError(WHQuantError, ValueError):
    """A numerical precondition of an operation is violated"""


class NotHermitianError(WHQuantError, ValueError):
    """An operation that needs a Hermitian matrix got one that is not"""


class KernelPathUnavailable(WHQuantError):
    """The requested computation has no implementation for this apodization"""


class UnsupportedOrderError(WHQuantError, ValueError):
    """Monomial order outside of the supported range"""


class OutputError(WHQuantError):
    """An artifact could not be produced"""
