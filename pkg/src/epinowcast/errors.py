"""Exception types shared across the package.

Every domain error derives from :class:`EpiNowcastError` so the CLI can map
them to exit code 2 with a structured message instead of a traceback.
"""

from __future__ import annotations

import datetime as dt


class EpiNowcastError(Exception):
    """Base class for all domain errors raised by this package."""


class EmptyIntersection(EpiNowcastError):
    """No date in the window is covered by every input series."""


class AllZero(EpiNowcastError):
    """A series cannot be indexed to 100 because its maximum is 0."""


class RankDeficient(EpiNowcastError):
    """Design matrix columns are (numerically) collinear."""


class TooFewObservations(EpiNowcastError):
    """Fewer observations than regressors (n <= k)."""


class NonPositiveValue(EpiNowcastError):
    """A zero or negative value where the log transform needs > 0."""

    def __init__(self, date: dt.date, source: str, value: float):
        self.date = date
        self.source = source
        self.value = value
        super().__init__(f"{source} is {value:g} on {date.isoformat()} (must be > 0)")


class MissingValue(EpiNowcastError):
    """A required observation is absent inside the requested window."""

    def __init__(self, date: dt.date, source: str):
        self.date = date
        self.source = source
        super().__init__(f"{source} has no value for {date.isoformat()}")


class NoFeasibleLag(EpiNowcastError):
    """Every lag in a sweep failed to produce a valid design."""


class MissingDate(EpiNowcastError):
    """A reporting date is absent from the newer snapshot."""

    def __init__(self, date: dt.date, retrieved_on: dt.date):
        self.date = date
        self.retrieved_on = retrieved_on
        super().__init__(
            f"snapshot retrieved {retrieved_on.isoformat()} has no value "
            f"for reporting date {date.isoformat()}"
        )


class SnapshotNotFound(EpiNowcastError):
    """No snapshot stored under the requested retrieval date."""


class DuplicateSnapshot(EpiNowcastError):
    """A snapshot for this retrieval date is already stored."""


class EmptyGroup(EpiNowcastError):
    """Weekend/weekday split left one group without observations."""


class ParseError(EpiNowcastError):
    """Malformed input file."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class DuplicateDate(EpiNowcastError):
    """The same calendar date appears twice in one input."""

    def __init__(self, date: dt.date):
        self.date = date
        super().__init__(f"duplicate date {date.isoformat()}")


class NegativeValue(EpiNowcastError):
    """A negative value in an input that only allows counts >= 0."""

    def __init__(self, date: dt.date, value: float):
        self.date = date
        self.value = value
        super().__init__(f"negative value {value:g} on {date.isoformat()}")


class CountryNotFound(EpiNowcastError):
    """Requested country missing from a wide cumulative file."""


class CorruptFixture(EpiNowcastError):
    """Embedded dataset failed its checksum; the build is broken."""
