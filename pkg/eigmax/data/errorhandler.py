import logging
import warnings
from typing import Optional

from .constants import EXIT_INVALID, EXIT_SINGULAR

__all__ = [
    "EigmaxError",
    "InvalidInputError",
    "DimensionMismatchError",
    "NonpositiveError",
    "TrivialSpectrumError",
    "DegenerateError",
    "OracleSizeError",
    "SingularShiftError",
    "BreakdownError",
    "EigmaxWarning",
    "get_logger",
    "warn",
    "error_console_set_soft",
    "error_console_load_soft",
]


class EigmaxError(Exception):
    """
    base class of every error raised by eigmax
    """
    exit_code = EXIT_INVALID


class InvalidInputError(EigmaxError, ValueError):
    """
    the input violates a precondition of the operation
    """


class DimensionMismatchError(InvalidInputError):
    """
    operands have incompatible lengths or shapes
    """


class NonpositiveError(InvalidInputError):
    """
    a quantity required to be strictly positive is not
    """


class TrivialSpectrumError(InvalidInputError):
    """
    the maximal eigenpair is trivial (no killing anywhere)
    """


class DegenerateError(InvalidInputError):
    """
    a construction step has no well defined output for this input
    """


class OracleSizeError(InvalidInputError):
    """
    the matrix is larger than the desk-scale oracle accepts
    """


class SingularShiftError(EigmaxError, ArithmeticError):
    """
    ``M - zI`` is numerically singular, ``z`` is (close to) an eigenvalue

    Parameters
    ----------
        msg : str
            the message
        z : float, (optional)
            the offending shift
        step : int, (optional)
            iteration step at which the solve failed
    """
    exit_code = EXIT_SINGULAR

    def __init__(self,
                 msg: str,
                 z: Optional[float] = None,
                 step: Optional[int] = None) -> None:
        super().__init__(msg)
        self.z = z
        self.step = step


class BreakdownError(EigmaxError):
    """
    serious breakdown of the two-sided Lanczos recurrence
    """
    exit_code = EXIT_SINGULAR


class EigmaxWarning(UserWarning):
    """
    category of every warning emitted through the error handler
    """


def get_logger(name: str) -> logging.Logger:
    """
    module logger under the ``eigmax`` namespace
    """
    return logging.getLogger(f"eigmax.{name}")


_log = get_logger("errorhandler")


class ErrorHandler:
    """
    ErrorHandler
    ============
    Collects soft warnings. Eigmax uses it for non fatal diagnostics
    (pitfall-prone initials, fallbacks, ineligible tridiagonalizations).

    In soft mode each distinct message is emitted once and only counted
    afterwards, otherwise every occurrence is emitted.
    """
    def __init__(self) -> None:
        """
        new ErrorHandler instance
        """
        self.all_errors: dict[str, int] = dict()
        self.is_soft = True

    def warn(self, msg: str) -> None:
        """
        adds ``msg`` to the error log
        """
        try:
            self.all_errors[msg] += 1
        except KeyError:
            self.all_errors[msg] = 1

        if not self.is_soft or self.all_errors[msg] == 1:
            warnings.warn(msg, EigmaxWarning, stacklevel=3)

    def display_all(self) -> str:
        """
        summary of all warnings, one per line with its count
        """
        summary = "\n".join(f"{k} ({v})" for k, v in self.all_errors.items())
        if summary:
            _log.info("warnings so far:\n%s", summary)
        return summary


err: ErrorHandler  # set by error_console_load_soft


def error_console_load_soft() -> None:
    """
    initializes the error handler\\
    repeated warnings are counted instead of re-emitted
    """
    global err
    err = ErrorHandler()


def error_console_set_soft(flush: bool) -> None:
    """
    sets wether or not repeated warnings are silenced

    Parameters
    ----------
        flush : bool
            True means warnings will not turn into spam
    """
    global err
    try:
        err.is_soft = flush
    except NameError:
        _log.error(
            "ERROR [error handler] : error handler is not running, you might consider adding ``error_console_load_soft()`` in the previous line"
        )


def warn(msg: str) -> None:
    """
    warns the user\\
    does not repeat previous warnings if the error handler has been initialized

    Parameters
    ----------
        msg : str
            the string that represent the message, formatted ``WARNING [module] : text``
    """
    global err
    try:
        err.warn(msg)
    except NameError:
        warnings.warn(msg, EigmaxWarning, stacklevel=2)
