"""Event-series ingestion.

Parses timestamped price-change event files and produces cleaned
waiting-time series per currency pair and book side. Input is a two-column
CSV ``pair_side,timestamp`` (integer seconds from session open) with an
optional third ``day`` column that partitions each pair_side per day;
waiting times are never computed across day boundaries.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    EmptyInputError,
    InsufficientDataError,
    ParseError,
)

DEFAULT_SESSION_LENGTH = 36000  # 10-hour session at one-second resolution


@dataclass
class EventSeries:
    """Ordered best-price-change timestamps for one pair/side.

    Attributes
    ----------
    pair_side : str
        Identifier such as ``"AUDUSDask"``.
    timestamps : numpy.ndarray
        Non-decreasing integer seconds from session open.
    session_length : int
        Session span in seconds, default 36000.
    day : str or None
        Optional day label when the source file partitions by day.
    """

    pair_side: str
    timestamps: np.ndarray
    session_length: int = DEFAULT_SESSION_LENGTH
    day: str = None

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=np.int64)
        if not self.pair_side:
            raise DomainError("pair_side must be non-empty")
        if self.timestamps.size:
            if self.timestamps.min() < 0:
                raise DomainError("timestamps must be non-negative")
            if np.any(np.diff(self.timestamps) < 0):
                raise DomainError("timestamps must be non-decreasing")
            if self.timestamps.max() > self.session_length:
                raise DomainError(
                    f"timestamp {self.timestamps.max()} exceeds session length "
                    f"{self.session_length}"
                )

    def __eq__(self, other):
        if not isinstance(other, EventSeries):
            return NotImplemented
        return (
            self.pair_side == other.pair_side
            and self.day == other.day
            and self.session_length == other.session_length
            and np.array_equal(self.timestamps, other.timestamps)
        )


@dataclass
class WaitingTimes:
    """Positive integer inter-event gaps derived from an EventSeries."""

    pair_side: str
    values: np.ndarray
    n_zero_collapsed: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)
        if self.values.size and self.values.min() < 1:
            raise DomainError("waiting times must be >= 1")
        if self.n_zero_collapsed < 0:
            raise DomainError("n_zero_collapsed must be >= 0")

    def __len__(self):
        return int(self.values.size)


def parse_events(path, session_length=None):
    """Parse an events CSV into one EventSeries per pair_side (and day).

    Rows are grouped by pair_side (by first appearance order), optionally
    partitioned by the day column, and sorted by timestamp within each
    series. The sort is stable, so rows sharing a timestamp keep their
    input order.

    Parameters
    ----------
    path : str or path-like
    session_length : int, optional
        Session span in seconds. When omitted, uses 36000 or the largest
        observed timestamp, whichever is bigger, so that files produced by
        long simulations re-ingest without configuration.

    Returns
    -------
    list of EventSeries

    Raises
    ------
    EmptyInputError
        The file holds no data rows.
    ParseError
        A row is malformed; the message carries the line number.
    DomainError
        A timestamp is negative.
    """
    groups = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyInputError(f"{path}: empty file")
        n_rows = 0
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) not in (2, 3):
                raise ParseError(
                    f"expected 2 or 3 columns, got {len(row)}", line=lineno
                )
            pair_side = row[0].strip()
            if not pair_side:
                raise ParseError("empty pair_side", line=lineno)
            try:
                ts = int(row[1])
            except ValueError:
                raise ParseError(
                    f"timestamp {row[1]!r} is not an integer", line=lineno
                ) from None
            if ts < 0:
                raise DomainError(f"line {lineno}: negative timestamp {ts}")
            day = row[2].strip() if len(row) == 3 else None
            groups.setdefault((pair_side, day), []).append(ts)
            n_rows += 1
    if n_rows == 0:
        raise EmptyInputError(f"{path}: no data rows")

    series = []
    for (pair_side, day), ts_list in groups.items():
        ts = np.asarray(ts_list, dtype=np.int64)
        order = np.argsort(ts, kind="stable")
        ts = ts[order]
        length = session_length
        if length is None:
            length = max(DEFAULT_SESSION_LENGTH, int(ts.max()))
        series.append(
            EventSeries(
                pair_side=pair_side, timestamps=ts, session_length=length, day=day
            )
        )
    return series


def write_events(path, series_list):
    """Write EventSeries objects to the CSV format parse_events reads.

    The day column is emitted only when some series carries a day label,
    keeping simulator output at the minimal two-column schema.
    """
    if isinstance(series_list, EventSeries):
        series_list = [series_list]
    has_day = any(s.day is not None for s in series_list)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["pair_side", "timestamp", "day"] if has_day else ["pair_side", "timestamp"])
    for s in series_list:
        for ts in s.timestamps:
            row = [s.pair_side, int(ts)]
            if has_day:
                row.append(s.day if s.day is not None else "")
            writer.writerow(row)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def waiting_times(events):
    """Compute waiting times tau_i = s_(i+1) - s_i, dropping zero gaps.

    Gaps of zero (two or more price changes in the same second) are
    excluded from ``values`` and counted in ``n_zero_collapsed``.

    Raises
    ------
    InsufficientDataError
        Fewer than 2 timestamps.
    """
    ts = events.timestamps
    if ts.size < 2:
        raise InsufficientDataError(
            f"{events.pair_side}: need at least 2 timestamps, have {ts.size}"
        )
    gaps = np.diff(ts)
    values = gaps[gaps >= 1]
    return WaitingTimes(
        pair_side=events.pair_side,
        values=values,
        n_zero_collapsed=int((gaps == 0).sum()),
    )


def mean_interval(events):
    """Average time interval: session_length / number of price changes."""
    n = events.timestamps.size
    if n == 0:
        raise InsufficientDataError(f"{events.pair_side}: no timestamps")
    return events.session_length / n
