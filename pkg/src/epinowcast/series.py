"""Calendar-aware daily time series: storage, lagging, alignment, indexing.

Dates are plain :class:`datetime.date` values (no timezone); all sources are
assumed to share one reporting calendar. A date with no observation is
*missing*, which is distinct from an observed value of 0.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import AllZero, EmptyIntersection

ONE_DAY = dt.timedelta(days=1)


def is_weekend(d: dt.date) -> bool:
    """True iff d is a Saturday or Sunday."""
    return d.weekday() >= 5


@dataclass(frozen=True)
class DailySeries:
    """Immutable date-indexed sequence of non-negative daily values.

    ``observations`` is a tuple of (date, value) pairs with strictly
    increasing dates. Use :meth:`from_pairs` to build one from unsorted data.
    """

    source_name: str
    observations: tuple[tuple[dt.date, float], ...]
    _by_date: dict[dt.date, float] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        # Source data is non-negative by construction (parsers enforce it);
        # derived series may hold negatives (e.g. downward-revised diffs),
        # so only finiteness is checked here.
        prev = None
        index = {}
        for d, v in self.observations:
            if prev is not None and d <= prev:
                raise ValueError(f"dates not strictly increasing at {d.isoformat()}")
            if not math.isfinite(v):
                raise ValueError(f"value {v!r} on {d.isoformat()} is not finite")
            index[d] = float(v)
            prev = d
        object.__setattr__(self, "_by_date", index)

    @classmethod
    def from_pairs(
        cls, source_name: str, pairs: Iterable[tuple[dt.date, float]] | Mapping[dt.date, float]
    ) -> "DailySeries":
        if isinstance(pairs, Mapping):
            pairs = pairs.items()
        obs = tuple(sorted((d, float(v)) for d, v in pairs))
        return cls(source_name, obs)

    def get(self, d: dt.date) -> float | None:
        """Value on d, or None when the date is missing."""
        return self._by_date.get(d)

    def __contains__(self, d: dt.date) -> bool:
        return d in self._by_date

    def __len__(self) -> int:
        return len(self.observations)

    def dates(self) -> tuple[dt.date, ...]:
        return tuple(d for d, _ in self.observations)

    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.observations)

    @property
    def first_date(self) -> dt.date:
        if not self.observations:
            raise ValueError("empty series has no first date")
        return self.observations[0][0]

    @property
    def last_date(self) -> dt.date:
        if not self.observations:
            raise ValueError("empty series has no last date")
        return self.observations[-1][0]


@dataclass(frozen=True)
class DateWindow:
    """Inclusive date range; start <= end, so a window is never empty."""

    start: dt.date
    end: dt.date

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"window start {self.start} after end {self.end}")

    def __len__(self) -> int:
        return (self.end - self.start).days + 1

    def __contains__(self, d: dt.date) -> bool:
        return self.start <= d <= self.end

    def dates(self) -> Iterator[dt.date]:
        d = self.start
        while d <= self.end:
            yield d
            d += ONE_DAY


@dataclass(frozen=True)
class AlignedRow:
    date: dt.date
    values: tuple[float, ...]  # one value per input series, in input order
    weekend: bool


def lag(s: DailySeries, k: int) -> DailySeries:
    """Shift s forward by k days: the result at date d is s at date d - k.

    k = 0 returns s unchanged; otherwise the source name is annotated with
    the lag. Missing dates stay missing.
    """
    if k < 0:
        raise ValueError("lag must be >= 0")
    if k == 0:
        return s
    delta = dt.timedelta(days=k)
    return DailySeries(
        f"{s.source_name}_lag{k}",
        tuple((d + delta, v) for d, v in s.observations),
    )


def align(series_list: list[DailySeries], window: DateWindow) -> tuple[AlignedRow, ...]:
    """Rows for every window date covered by all series, sorted by date.

    Each row carries the weekend flag. Raises EmptyIntersection when no date
    qualifies.
    """
    rows = []
    for d in window.dates():
        values = []
        for s in series_list:
            v = s.get(d)
            if v is None:
                break
            values.append(v)
        else:
            rows.append(AlignedRow(d, tuple(values), is_weekend(d)))
    if not rows:
        names = ", ".join(s.source_name for s in series_list)
        raise EmptyIntersection(
            f"no date in {window.start.isoformat()}..{window.end.isoformat()} "
            f"is covered by all of: {names}"
        )
    return tuple(rows)


def _round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def index_to_100(s: DailySeries) -> DailySeries:
    """Rescale so the maximum maps to 100, rounding to integers.

    Rounding is half-away-from-zero, matching how published search-volume
    indices are quoted. Raises AllZero when max(s) = 0.
    """
    if not s.observations:
        raise ValueError("cannot index an empty series")
    mx = max(s.values())
    if mx == 0:
        raise AllZero(f"{s.source_name}: all values are 0, cannot index to 100")
    return DailySeries(
        s.source_name,
        tuple((d, float(_round_half_away(100.0 * v / mx))) for d, v in s.observations),
    )


@dataclass(frozen=True)
class NegativeDailyChange:
    """A day-over-day decrease in a cumulative series (downward revision)."""

    date: dt.date
    change: float

    def __str__(self) -> str:
        return f"cumulative series decreased by {-self.change:g} on {self.date.isoformat()}"


def cumulative_to_daily(
    s: DailySeries,
) -> tuple[DailySeries, list[NegativeDailyChange]]:
    """First differences over present dates; the first date is dropped.

    Negative differences (downward revisions in the cumulative input) are
    kept as-is and reported in the returned warning list; clamping them
    would silently distort error metrics computed against the result.
    """
    if not s.observations:
        raise ValueError("cannot difference an empty series")
    diffs = []
    warnings = []
    for (_, prev_v), (d, v) in zip(s.observations, s.observations[1:]):
        change = v - prev_v
        if change < 0:
            warnings.append(NegativeDailyChange(d, change))
        diffs.append((d, change))
    daily = DailySeries(f"{s.source_name}_daily", tuple(diffs))
    return daily, warnings
