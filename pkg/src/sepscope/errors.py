"""Exception hierarchy shared by all sepscope modules."""


class SepscopeError(Exception):
    """Base class for all sepscope errors."""


class ParseError(SepscopeError):
    """Malformed text input (ragged CSV rows, empty file, bad tokens)."""


class DataError(SepscopeError):
    """Numeric payload violates invariants (NaN/Inf coordinates)."""


class LabelError(SepscopeError):
    """Label vector violates invariants (gaps, unknown class ids)."""


class FormatError(SepscopeError):
    """Binary file violates the LSMX/LSMY format contract."""


class ShapeError(SepscopeError):
    """Array dimensions incompatible with the requested operation."""


class SingularError(SepscopeError):
    """Symmetric factorization broke down even after ridging."""


class ConvergenceError(SepscopeError):
    """Iterative solver exhausted its iteration budget."""


class DegenerateError(SepscopeError):
    """Quantity undefined for this input (zero sum vector, all-zero projections)."""


class UnsupportedError(SepscopeError):
    """Operation not defined for this activation kind."""


class TrainingError(SepscopeError):
    """Training diverged; carries the partial epoch series."""

    def __init__(self, message, partial_series=None):
        super().__init__(message)
        self.partial_series = partial_series
