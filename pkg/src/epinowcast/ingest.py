"""Input parsing and the embedded reference dataset.

Two on-disk formats are supported:

* long daily - UTF-8 CSV, header ``date,value``, ISO dates, non-negative
  decimal values (no thousands separators), one row per date.
* wide cumulative - the world case-count layout with header
  ``Province/State,Country/Region,Lat,Long`` followed by one ``M/D/YY``
  column per date; country rows are summed, then differenced to daily new.

The bundled dataset (Germany, 2020-01-19 through 2020-04-04) carries four
daily series - official counts (rki), JHU counts (jhu), a search-volume
index (google) and a tweet-count index (twitter) - plus a weekend flag per
date. It is vendored because the live sources have been revised since and
could not reproduce the frozen analysis.
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import io
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import (
    CorruptFixture,
    CountryNotFound,
    DuplicateDate,
    NegativeValue,
    ParseError,
)
from .series import DailySeries, NegativeDailyChange, cumulative_to_daily

FIXTURE_RESOURCE = "germany_covid_daily.csv"
FIXTURE_SHA256 = "52c0d679657d83d63eeed49b32f358dcf15385a272fdaa394e0733bb5b1e160d"

_VALUE_RE = re.compile(r"^\d+(\.\d+)?$")


def _parse_value(raw: str, line_no: int, date: dt.date) -> float:
    raw = raw.strip()
    if raw.startswith("-"):
        try:
            value = float(raw)
        except ValueError:
            raise ParseError(line_no, f"bad value {raw!r}") from None
        raise NegativeValue(date, value)
    if not _VALUE_RE.match(raw):
        # catches thousands separators, exponents, blanks, stray text
        raise ParseError(line_no, f"bad value {raw!r}")
    return float(raw)


def _parse_long_daily_lines(lines: list[str], source_name: str) -> DailySeries:
    if not lines:
        raise ParseError(1, "empty file, expected header date,value")
    header = lines[0].rstrip("\r\n")
    if header != "date,value":
        raise ParseError(1, f"expected header 'date,value', got {header!r}")
    pairs: dict[dt.date, float] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        line = line.rstrip("\r\n")
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(line_no, f"expected 2 fields, got {len(parts)}")
        try:
            date = dt.date.fromisoformat(parts[0].strip())
        except ValueError:
            raise ParseError(line_no, f"bad date {parts[0]!r}") from None
        if date in pairs:
            raise DuplicateDate(date)
        pairs[date] = _parse_value(parts[1], line_no, date)
    return DailySeries.from_pairs(source_name, pairs)


def parse_long_daily(path: str | Path, source_name: str | None = None) -> DailySeries:
    """Parse a `date,value` CSV into a DailySeries (rows sorted by date)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    name = source_name if source_name is not None else path.stem
    return _parse_long_daily_lines(text.splitlines(keepends=True), name)


def emit_long_daily(series: DailySeries) -> str:
    """Long-daily CSV text for a series; inverse of parse_long_daily."""
    lines = ["date,value"]
    for d, v in series.observations:
        lines.append(f"{d.isoformat()},{_format_value(v)}")
    return "\n".join(lines) + "\n"


def _format_value(v: float) -> str:
    # integers stay integers so counts round-trip byte-identically
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


_JHU_HEADER = ["Province/State", "Country/Region", "Lat", "Long"]


def parse_jhu_wide_cumulative(
    path: str | Path, country: str
) -> tuple[DailySeries, list[NegativeDailyChange]]:
    """Daily new cases for one country from a wide cumulative CSV.

    Rows for the country (one per province, possibly just one) are summed
    before differencing; downward revisions in the cumulative input surface
    as negative daily values plus warnings.
    """
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(1, "empty file") from None
        if header[:4] != _JHU_HEADER:
            raise ParseError(1, f"expected wide cumulative header, got {header[:4]!r}")
        dates = []
        for col_no, raw in enumerate(header[4:], start=5):
            try:
                month, day, year = raw.split("/")
                dates.append(dt.date(2000 + int(year), int(month), int(day)))
            except ValueError:
                raise ParseError(1, f"bad date column {raw!r} (column {col_no})") from None
        totals = [0.0] * len(dates)
        found = False
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4 + len(dates):
                raise ParseError(line_no, f"expected {4 + len(dates)} fields, got {len(row)}")
            if row[1] != country:
                continue
            found = True
            for i, raw in enumerate(row[4:]):
                try:
                    totals[i] += float(raw)
                except ValueError:
                    raise ParseError(line_no, f"bad count {raw!r}") from None
    if not found:
        raise CountryNotFound(f"country {country!r} not present in {path.name}")
    cumulative = DailySeries.from_pairs(country.lower(), zip(dates, totals))
    return cumulative_to_daily(cumulative)


@dataclass(frozen=True)
class FixtureDataset:
    """The embedded four-series dataset plus its published weekend flags."""

    rki: DailySeries
    jhu: DailySeries
    google: DailySeries
    twitter: DailySeries
    weekend_flags: tuple[tuple[dt.date, bool], ...]

    def series(self, name: str) -> DailySeries:
        try:
            return {
                "rki": self.rki,
                "jhu": self.jhu,
                "google": self.google,
                "twitter": self.twitter,
            }[name]
        except KeyError:
            raise ValueError(f"unknown fixture series {name!r}") from None

    @staticmethod
    def series_names() -> tuple[str, ...]:
        return ("rki", "jhu", "google", "twitter")


def load_fixture() -> FixtureDataset:
    """Load the embedded dataset, verifying its checksum first."""
    data = (
        resources.files(__package__).joinpath("data").joinpath(FIXTURE_RESOURCE).read_bytes()
    )
    digest = hashlib.sha256(data).hexdigest()
    if digest != FIXTURE_SHA256:
        raise CorruptFixture(
            f"embedded dataset checksum mismatch: {digest} != {FIXTURE_SHA256}"
        )
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    header = next(reader)
    assert header == ["date", "weekend", "rki", "jhu", "google", "twitter"]
    columns: dict[str, list[tuple[dt.date, float]]] = {
        "rki": [], "jhu": [], "google": [], "twitter": []
    }
    flags = []
    for row in reader:
        d = dt.date.fromisoformat(row[0])
        flags.append((d, row[1] == "TRUE"))
        for name, raw in zip(("rki", "jhu", "google", "twitter"), row[2:]):
            if raw != "":
                columns[name].append((d, float(raw)))
    return FixtureDataset(
        rki=DailySeries("rki", tuple(columns["rki"])),
        jhu=DailySeries("jhu", tuple(columns["jhu"])),
        google=DailySeries("google", tuple(columns["google"])),
        twitter=DailySeries("twitter", tuple(columns["twitter"])),
        weekend_flags=tuple(flags),
    )
