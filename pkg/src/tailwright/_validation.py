"""Input validation helpers shared across modules."""

import numpy as np

from .errors import DomainError, InsufficientDataError


def as_values(data, min_n=1, positive=True, name="data"):
    """Coerce ``data`` to a 1-D float array of waiting-time values.

    Accepts a WaitingTimes instance (anything with a ``values`` attribute),
    an array, or any sequence of numbers. Continuous fitters treat integer
    waiting times as exact reals, so no integer coercion happens here.

    Parameters
    ----------
    data : WaitingTimes or array-like
    min_n : int
        Minimum required number of values.
    positive : bool
        Require every value to be strictly positive.
    name : str
        Label used in error messages.

    Returns
    -------
    numpy.ndarray of float64
    """
    values = getattr(data, "values", data)
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size < min_n:
        raise InsufficientDataError(
            f"{name} has {arr.size} values, need at least {min_n}"
        )
    if arr.size and not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    if positive and arr.size and arr.min() <= 0:
        raise DomainError(f"{name} must be strictly positive")
    return arr


def as_integer_values(data, min_n=1, name="data"):
    """Like :func:`as_values` but requires positive integers (tail fitting)."""
    arr = as_values(data, min_n=min_n, positive=True, name=name)
    rounded = np.rint(arr)
    if not np.all(np.abs(arr - rounded) < 1e-9):
        raise DomainError(f"{name} must contain integer values")
    return rounded.astype(np.int64)


def check_positive_int(value, name, minimum=1):
    if int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
