"""Exception types shared across the toolkit.

Everything that amounts to "the caller handed us bad data" subclasses
ValueError so plain ``except ValueError`` keeps working; training failures
are runtime errors.
"""


class CsvParseError(ValueError):
    """A CSV row could not be parsed; the message carries the line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class SeriesValidationError(ValueError):
    """A load series violates its contract (ordering, hourly spacing, sign)."""


class InsufficientDataError(ValueError):
    """Not enough samples for the requested window, split or forecast."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss; carries the offending epoch."""

    def __init__(self, epoch: int):
        super().__init__(f"training diverged (non-finite loss) at epoch {epoch}")
        self.epoch = epoch


class TrainingFailedError(RuntimeError):
    """No usable network came out of training (e.g. every restart diverged)."""
