"""Vintage analysis: how much of an official daily total was reported late.

A snapshot is the full official series as published on one retrieval date;
comparing two snapshots shows, per reporting date, the share of the newer
total that was added (or removed) after the older retrieval.
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    DuplicateSnapshot,
    EmptyGroup,
    MissingDate,
    ParseError,
    SnapshotNotFound,
)
from .series import DailySeries, DateWindow, is_weekend


@dataclass(frozen=True)
class Snapshot:
    """One vintage of the official series, keyed by reporting date."""

    retrieved_on: dt.date
    series: DailySeries

    def __post_init__(self) -> None:
        if self.series.observations and self.series.last_date > self.retrieved_on:
            raise ValueError(
                f"snapshot retrieved {self.retrieved_on.isoformat()} contains the "
                f"future reporting date {self.series.last_date.isoformat()}"
            )


class SnapshotStore:
    """Append-only collection of snapshots, at most one per retrieval date."""

    def __init__(self) -> None:
        self._snapshots: dict[dt.date, Snapshot] = {}

    def add(self, snapshot: Snapshot) -> None:
        if snapshot.retrieved_on in self._snapshots:
            raise DuplicateSnapshot(
                f"already have a snapshot retrieved {snapshot.retrieved_on.isoformat()}"
            )
        self._snapshots[snapshot.retrieved_on] = snapshot

    def get(self, retrieved_on: dt.date) -> Snapshot:
        try:
            return self._snapshots[retrieved_on]
        except KeyError:
            raise SnapshotNotFound(
                f"no snapshot retrieved {retrieved_on.isoformat()}"
            ) from None

    def retrieval_dates(self) -> tuple[dt.date, ...]:
        return tuple(sorted(self._snapshots))

    def __len__(self) -> int:
        return len(self._snapshots)


def _share(v_old: float, v_new: float) -> float | None:
    # None marks the undefined 0-denominator case; 0 or inf would corrupt plots
    if v_new == 0:
        return None
    return (v_new - v_old) / v_new


def revision_share(older: Snapshot, newer: Snapshot, reporting_date: dt.date) -> float | None:
    """Share of the newer total added since the older snapshot: (new - old) / new.

    A reporting date absent from the older snapshot counts as fully late
    (v_old = 0). Negative shares mean cases were removed. Returns None when
    the newer value is 0 (share undefined).
    """
    if older.retrieved_on >= newer.retrieved_on:
        raise ValueError(
            f"older snapshot ({older.retrieved_on.isoformat()}) must predate "
            f"newer ({newer.retrieved_on.isoformat()})"
        )
    v_new = newer.series.get(reporting_date)
    if v_new is None:
        raise MissingDate(reporting_date, newer.retrieved_on)
    if reporting_date > older.retrieved_on:
        raise ValueError(
            f"reporting date {reporting_date.isoformat()} is after the older "
            f"retrieval {older.retrieved_on.isoformat()}; nothing to revise"
        )
    v_old = older.series.get(reporting_date) or 0.0
    return _share(v_old, v_new)


def revision_profile(
    store: SnapshotStore, newer_retrieval: dt.date, older_retrieval: dt.date
) -> tuple[tuple[dt.date, float | None], ...]:
    """Per-reporting-date shares between two stored vintages.

    One row per reporting date in the newer snapshot, ordered by date; dates
    the older snapshot had not seen yet get v_old = 0 (share 1.0 unless the
    newer value is 0, which stays None).
    """
    newer = store.get(newer_retrieval)
    older = store.get(older_retrieval)
    if older.retrieved_on >= newer.retrieved_on:
        raise ValueError(
            f"older retrieval ({older_retrieval.isoformat()}) must predate "
            f"newer ({newer_retrieval.isoformat()})"
        )
    rows = []
    for d, v_new in newer.series.observations:
        v_old = older.series.get(d) or 0.0
        rows.append((d, _share(v_old, v_new)))
    return tuple(rows)


@dataclass(frozen=True)
class WeekendGap:
    weekend_mean: float
    weekday_mean: float
    ratio: float  # weekend_mean / weekday_mean - 1


def weekend_gap(series: DailySeries, window: DateWindow) -> WeekendGap:
    """Model-free weekend-vs-weekday mean comparison over a window."""
    weekend_vals, weekday_vals = [], []
    for d in window.dates():
        v = series.get(d)
        if v is None:
            continue
        (weekend_vals if is_weekend(d) else weekday_vals).append(v)
    if not weekend_vals or not weekday_vals:
        missing = "weekend" if not weekend_vals else "weekday"
        raise EmptyGroup(
            f"no {missing} observations for {series.source_name} in "
            f"{window.start.isoformat()}..{window.end.isoformat()}"
        )
    weekend_mean = sum(weekend_vals) / len(weekend_vals)
    weekday_mean = sum(weekday_vals) / len(weekday_vals)
    return WeekendGap(
        weekend_mean=weekend_mean,
        weekday_mean=weekday_mean,
        ratio=weekend_mean / weekday_mean - 1.0,
    )


_SNAPSHOT_FILE = re.compile(r"^(\d{4}-\d{2}-\d{2})\.csv$")


def load_snapshot_store(directory: str | Path) -> SnapshotStore:
    """Load a directory of YYYY-MM-DD.csv vintages (filename = retrieval date).

    Each file is a long-daily CSV (`date,value`). Snapshot invariants are
    validated on load; a repeated retrieval date raises DuplicateSnapshot.
    """
    from .ingest import parse_long_daily  # local import, avoids a cycle

    directory = Path(directory)
    if not directory.is_dir():
        raise SnapshotNotFound(f"snapshot directory {directory} does not exist")
    store = SnapshotStore()
    for path in sorted(directory.iterdir()):
        m = _SNAPSHOT_FILE.match(path.name)
        if not m:
            continue
        try:
            retrieved_on = dt.date.fromisoformat(m.group(1))
        except ValueError as err:
            raise ParseError(0, f"{path.name}: {err}") from None
        series = parse_long_daily(path, source_name=f"official@{m.group(1)}")
        try:
            snapshot = Snapshot(retrieved_on=retrieved_on, series=series)
        except ValueError as err:
            raise ParseError(0, f"{path.name}: {err}") from None
        store.add(snapshot)
    return store
