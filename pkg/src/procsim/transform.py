"""Turn simulation-clock records into a calendar-timestamped event log.

Clocks count business seconds from the anchor instant, so the mapping is
the exact inverse of business_seconds_between: timestamps land inside
calendar windows and clock order is preserved.
"""

from __future__ import annotations

from datetime import datetime
from typing import Sequence

from .desengine import SimEventRecord
from .errors import ConfigError
from .eventlog import (
    LIFECYCLE_COMPLETE,
    LIFECYCLE_START,
    Event,
    EventLog,
    Trace,
)
from .perfmine import (
    WINDOWS,
    BusinessCalendar,
    advance_business_seconds,
    in_business_window,
)


def to_event_log(
    records: Sequence[SimEventRecord],
    anchor: datetime,
    calendar: BusinessCalendar,
) -> EventLog:
    """Map each record to a start and a complete event at calendar time.

    Traces are grouped by case id in order of first appearance.

    Raises:
        ConfigError: when the calendar has windows and the anchor lies
            outside all of them.
    """
    if calendar.mode == WINDOWS and not in_business_window(calendar, anchor):
        raise ConfigError(
            f"anchor {anchor} lies outside every business-hours window"
        )
    events_by_case: dict[str, list[Event]] = {}
    for record in records:
        start_ts = advance_business_seconds(calendar, anchor, record.start_clock)
        complete_ts = advance_business_seconds(
            calendar, anchor, record.complete_clock
        )
        bucket = events_by_case.setdefault(record.case_id, [])
        bucket.append(
            Event(record.case_id, record.activity, start_ts, LIFECYCLE_START)
        )
        bucket.append(
            Event(record.case_id, record.activity, complete_ts, LIFECYCLE_COMPLETE)
        )
    traces = tuple(
        Trace(case_id, tuple(events)) for case_id, events in events_by_case.items()
    )
    return EventLog(traces)
