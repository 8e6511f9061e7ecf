"""
Exceptions raised by the network_aggregation package

Every error derives from AggregationError so callers (and the CLI) can catch
package failures in one place. Errors describing bad arguments also derive
from ValueError.
"""
import warnings


class AggregationError(Exception):
    """
    Base class for all network_aggregation errors
    """


class CycleDetected(AggregationError, ValueError):
    """
    Raised when an edge list contains a directed cycle
    """


class IndexOutOfRange(AggregationError, IndexError):
    """
    Raised when an agent id or feature index is outside its valid range
    """


class InvalidGraph(AggregationError, ValueError):
    """
    Raised for malformed graphs that are not cycles, ex. duplicate edges
    """


class NotAPath(AggregationError, ValueError):
    """
    Raised when an operation that needs a simple path receives another DAG
    """


class InvalidDimension(AggregationError, ValueError):
    """
    Raised when a size, window, pass index or depth is out of range
    """


class LengthMismatch(AggregationError, ValueError):
    """
    Raised when two vectors that must be aligned have different lengths
    """


class DimensionMismatch(AggregationError, ValueError):
    """
    Raised when matrix and vector shapes do not agree
    """


class NonFinite(AggregationError, ValueError):
    """
    Raised when inputs contain nan or inf values
    """


class InvalidLabels(AggregationError, ValueError):
    """
    Raised when labels contain values other than 0 and 1
    """


class DomainError(AggregationError, ValueError):
    """
    Raised when a probability lies outside [0, 1]
    """


class MissingParent(AggregationError, KeyError):
    """
    Raised when an agent is fitted before one of its parents
    """


class QuadratureFailure(AggregationError, ArithmeticError):
    """
    Raised when a root bracket evaluated by quadrature does not change sign
    """


class InvalidConfig(AggregationError, ValueError):
    """
    Raised when an experiment configuration cannot be used
    """


class NotConvergedWarning(UserWarning):
    """
    Warning for quantities computed from fits that did not converge
    """


def warn_not_converged(message: str):
    """
    Emit a NotConvergedWarning pointing at the caller of the caller

    Args:
        message (str): description of the unconverged quantity
    """
    warnings.warn(message, NotConvergedWarning, stacklevel=3)
