class InverseMomentsError(Exception):
    """Base class of every error raised by the library."""


class DomainError(InverseMomentsError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PreconditionError(InverseMomentsError, ValueError):
    """Arguments are valid on their own but do not fit together for this call."""


class RangeError(InverseMomentsError, IndexError):
    """An index runs past the end of a finite table or series."""


class CalibrationError(InverseMomentsError):

    def __init__(self, r: int, target: float, best_error: float, reason: str = '') -> None:
        """Raised when no cross-over profile reaches the target relative error.
        @param r: order of the inverse moment.
        @param target: requested relative error.
        @param best_error: smallest relative error any candidate achieved.
        @param reason: what went wrong.
        """
        self.r = r
        self.target = target
        self.best_error = best_error
        message = 'calibration failed for r={} at target {:.3g}: best achieved error {:.3g}'.format(
            r, target, best_error)
        if reason:
            message += ' ({})'.format(reason)
        super().__init__(message)
