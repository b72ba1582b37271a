"""Event log data model and CSV input/output.

An event log is a set of traces; a trace is the timestamp-ordered list of
events of one case. CSV is the interchange format: `case_id,activity,
timestamp` columns by default, with an optional lifecycle column so logs can
carry separate start and complete events.
"""

from __future__ import annotations

import csv
import io
from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from datetime import datetime
from typing import IO, Iterable, Union

from .errors import LogParseError

TIMESTAMP_FORMAT = "%Y-%m-%d %H:%M:%S"

LIFECYCLE_START = "start"
LIFECYCLE_COMPLETE = "complete"


@dataclass(frozen=True)
class Event:
    """One log entry: a lifecycle step of an activity within a case."""

    case_id: str
    activity: str
    timestamp: datetime
    lifecycle: str = LIFECYCLE_COMPLETE

    def __post_init__(self) -> None:
        if not self.activity:
            raise ValueError("activity must be non-empty")
        if not isinstance(self.timestamp, datetime):
            raise ValueError("timestamp must be a datetime")
        if self.lifecycle not in (LIFECYCLE_START, LIFECYCLE_COMPLETE):
            raise ValueError(f"unknown lifecycle {self.lifecycle!r}")


@dataclass(frozen=True)
class Trace:
    """All events of one case, sorted by timestamp (stable for ties)."""

    case_id: str
    events: tuple[Event, ...]

    def __post_init__(self) -> None:
        events = tuple(self.events)
        for event in events:
            if event.case_id != self.case_id:
                raise ValueError(
                    f"event case {event.case_id!r} does not match trace case "
                    f"{self.case_id!r}"
                )
        # Stable sort: events with equal timestamps keep their input order.
        ordered = tuple(sorted(events, key=lambda e: e.timestamp))
        object.__setattr__(self, "events", ordered)

    def activities(self) -> tuple[str, ...]:
        """Activity names of the complete events, in trace order."""
        return tuple(
            e.activity for e in self.events if e.lifecycle == LIFECYCLE_COMPLETE
        )


@dataclass(frozen=True)
class EventLog:
    """A collection of traces with unique case ids."""

    traces: tuple[Trace, ...]

    def __post_init__(self) -> None:
        traces = tuple(self.traces)
        object.__setattr__(self, "traces", traces)
        seen = set()
        for trace in traces:
            if trace.case_id in seen:
                raise ValueError(f"duplicate case id {trace.case_id!r}")
            seen.add(trace.case_id)

    @property
    def activity_alphabet(self) -> frozenset[str]:
        """Union of activity names over all events."""
        return frozenset(e.activity for t in self.traces for e in t.events)


@dataclass(frozen=True)
class ColumnMapping:
    """Names of the CSV columns to read, plus the timestamp format."""

    case: str = "case_id"
    activity: str = "activity"
    timestamp: str = "timestamp"
    lifecycle: str | None = None
    timestamp_format: str = TIMESTAMP_FORMAT


DEFAULT_MAPPING = ColumnMapping()


def parse_csv(
    source: Union[str, IO[str]], mapping: ColumnMapping = DEFAULT_MAPPING
) -> EventLog:
    """Parse CSV text (or a text stream) into an EventLog.

    The first row must be a header containing every mapped column; extra
    columns are ignored. Rows are grouped into one trace per case value,
    and each trace is sorted by timestamp. Malformed rows fail fast with
    their line number (the header is line 1) rather than being skipped,
    since silent skipping would bias anything mined from the log.

    Raises:
        LogParseError: on a missing header, a missing mapped column, or an
            unparseable row.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise LogParseError("empty log: no header row") from None

    wanted = [mapping.case, mapping.activity, mapping.timestamp]
    if mapping.lifecycle is not None:
        wanted.append(mapping.lifecycle)
    columns: dict[str, int] = {}
    for name in wanted:
        if name not in header:
            raise LogParseError(f"missing column {name!r} in header {header!r}")
        columns[name] = header.index(name)
    width = max(columns.values()) + 1

    events_by_case: dict[str, list[Event]] = {}
    for row in reader:
        if not row:
            continue
        line = reader.line_num
        if len(row) < width:
            raise LogParseError(
                f"line {line}: expected at least {width} columns, got {len(row)}"
            )
        case_id = row[columns[mapping.case]]
        if not case_id:
            raise LogParseError(f"line {line}: empty case id")
        activity = row[columns[mapping.activity]]
        raw_ts = row[columns[mapping.timestamp]]
        try:
            timestamp = datetime.strptime(raw_ts, mapping.timestamp_format)
        except ValueError:
            raise LogParseError(
                f"line {line}: cannot parse timestamp {raw_ts!r} with format "
                f"{mapping.timestamp_format!r}"
            ) from None
        lifecycle = LIFECYCLE_COMPLETE
        if mapping.lifecycle is not None:
            raw_lc = row[columns[mapping.lifecycle]]
            lifecycle = raw_lc.strip().lower()
            if lifecycle not in (LIFECYCLE_START, LIFECYCLE_COMPLETE):
                raise LogParseError(f"line {line}: unknown lifecycle {raw_lc!r}")
        try:
            event = Event(case_id, activity, timestamp, lifecycle)
        except ValueError as exc:
            raise LogParseError(f"line {line}: {exc}") from None
        events_by_case.setdefault(case_id, []).append(event)

    traces = tuple(
        Trace(case_id, tuple(events)) for case_id, events in events_by_case.items()
    )
    return EventLog(traces)


def write_csv(log: EventLog, include_start: bool = False) -> str:
    """Serialize an EventLog to CSV text.

    Emits one row per complete event, ordered by timestamp then case id,
    with timestamps formatted as YYYY-MM-DD HH:MM:SS (sub-second precision
    is dropped). With include_start, a fourth column carries the timestamp
    of the matching start event; start events are matched to completes
    per case and activity in FIFO order, and a complete without a start
    repeats its own timestamp.
    """
    rows: list[tuple[datetime, str, str, datetime]] = []
    for trace in log.traces:
        pending: dict[str, deque[datetime]] = defaultdict(deque)
        for event in trace.events:
            if event.lifecycle == LIFECYCLE_START:
                pending[event.activity].append(event.timestamp)
                continue
            queue = pending[event.activity]
            start_ts = queue.popleft() if queue else event.timestamp
            rows.append((event.timestamp, event.case_id, event.activity, start_ts))
    rows.sort(key=lambda r: (r[0], r[1]))

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["case_id", "activity", "timestamp"]
    if include_start:
        header.append("start_timestamp")
    writer.writerow(header)
    for timestamp, case_id, activity, start_ts in rows:
        record = [case_id, activity, timestamp.strftime(TIMESTAMP_FORMAT)]
        if include_start:
            record.append(start_ts.strftime(TIMESTAMP_FORMAT))
        writer.writerow(record)
    return buffer.getvalue()


def trace_variants(log: EventLog) -> dict[tuple[str, ...], int]:
    """Count how often each activity sequence occurs in the log."""
    return dict(Counter(trace.activities() for trace in log.traces))
