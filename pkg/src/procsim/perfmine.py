"""Performance mining: business calendars, distribution fitting, and the
performance profile consumed by the simulation engine.

All durations are plain seconds. Business time accrues only inside weekly
calendar windows; the always-on calendar makes business time equal wall
time. Duration samples pass an IQR outlier filter before fitting; arrival
gaps do not.
"""

from __future__ import annotations

import configparser
import io
import math
from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from datetime import datetime, time, timedelta
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .discovery import Dfg
from .errors import FitError, InsufficientDataError, LogParseError, ProfileError
from .eventlog import LIFECYCLE_START, EventLog

ALWAYS_ON = "always_on"
WINDOWS = "windows"

_DAY_NAMES = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
_DAY_SECONDS = 86400


@dataclass(frozen=True)
class BusinessCalendar:
    """Weekly working-time windows, or an always-on calendar.

    Windows are half-open [start, end) second offsets within a weekday
    (Monday is 0); they must not overlap within a day and must not cross
    midnight.
    """

    mode: str = ALWAYS_ON
    windows: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "windows", tuple((int(d), int(s), int(e)) for d, s, e in self.windows)
        )
        if self.mode == ALWAYS_ON:
            if self.windows:
                raise ValueError("an always-on calendar must not list windows")
            return
        if self.mode != WINDOWS:
            raise ValueError(f"unknown calendar mode {self.mode!r}")
        if not self.windows:
            raise ValueError("a windows calendar needs at least one window")
        per_day: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for day, start, end in self.windows:
            if not 0 <= day <= 6:
                raise ValueError(f"weekday out of range: {day}")
            if not 0 <= start < end <= _DAY_SECONDS:
                raise ValueError(
                    f"window must satisfy 0 <= start < end <= 24h, got "
                    f"{start}..{end}"
                )
            per_day[day].append((start, end))
        for day, spans in per_day.items():
            spans.sort()
            for (_, prev_end), (next_start, _) in zip(spans, spans[1:]):
                if next_start < prev_end:
                    raise ValueError(
                        f"overlapping windows on {_DAY_NAMES[day]}"
                    )

    def by_weekday(self) -> dict[int, list[tuple[int, int]]]:
        table: dict[int, list[tuple[int, int]]] = {d: [] for d in range(7)}
        for day, start, end in self.windows:
            table[day].append((start, end))
        for spans in table.values():
            spans.sort()
        return table


ALWAYS_ON_CALENDAR = BusinessCalendar()


def parse_calendar(text: str) -> BusinessCalendar:
    """Parse a calendar string such as "24/7" or "Mon-Fri 09:00-17:00".

    Multiple clauses are separated by semicolons; each clause names days
    (single, range, or comma list) followed by one daily time window.

    Raises:
        ProfileError: on any malformed clause.
    """
    body = text.strip()
    if body == "24/7":
        return ALWAYS_ON_CALENDAR
    windows: list[tuple[int, int, int]] = []
    for clause in body.split(";"):
        clause = clause.strip()
        if not clause:
            raise ProfileError(f"empty clause in calendar {text!r}")
        parts = clause.split()
        if len(parts) != 2:
            raise ProfileError(
                f"calendar clause must be '<days> <HH:MM-HH:MM>', got {clause!r}"
            )
        days = _parse_days(parts[0])
        start, end = _parse_span(parts[1])
        windows.extend((day, start, end) for day in days)
    try:
        return BusinessCalendar(WINDOWS, tuple(windows))
    except ValueError as exc:
        raise ProfileError(f"bad calendar {text!r}: {exc}") from None


def format_calendar(calendar: BusinessCalendar) -> str:
    """Render a calendar back to the string form parse_calendar accepts."""
    if calendar.mode == ALWAYS_ON:
        return "24/7"
    by_span: dict[tuple[int, int], list[int]] = defaultdict(list)
    for day, start, end in sorted(calendar.windows):
        by_span[(start, end)].append(day)
    clauses = []
    for (start, end), days in sorted(by_span.items(), key=lambda kv: (kv[1][0], kv[0])):
        clauses.append(f"{_format_days(days)} {_format_tod(start)}-{_format_tod(end)}")
    return "; ".join(clauses)


def _parse_days(text: str) -> list[int]:
    days: list[int] = []
    for token in text.split(","):
        if "-" in token:
            first, _, last = token.partition("-")
            lo, hi = _day_index(first), _day_index(last)
            if lo > hi:
                raise ProfileError(f"day range {token!r} must run forward")
            days.extend(range(lo, hi + 1))
        else:
            days.append(_day_index(token))
    return days


def _day_index(name: str) -> int:
    try:
        return [d.lower() for d in _DAY_NAMES].index(name.strip().lower())
    except ValueError:
        raise ProfileError(f"unknown weekday {name!r}") from None


def _format_days(days: list[int]) -> str:
    runs: list[tuple[int, int]] = []
    for day in sorted(days):
        if runs and day == runs[-1][1] + 1:
            runs[-1] = (runs[-1][0], day)
        else:
            runs.append((day, day))
    parts = [
        _DAY_NAMES[lo] if lo == hi else f"{_DAY_NAMES[lo]}-{_DAY_NAMES[hi]}"
        for lo, hi in runs
    ]
    return ",".join(parts)


def _parse_span(text: str) -> tuple[int, int]:
    first, sep, last = text.partition("-")
    if not sep:
        raise ProfileError(f"time span must be HH:MM-HH:MM, got {text!r}")
    return _parse_tod(first), _parse_tod(last)


def _parse_tod(text: str) -> int:
    pieces = text.strip().split(":")
    if len(pieces) not in (2, 3) or not all(p.isdigit() for p in pieces):
        raise ProfileError(f"bad time of day {text!r}")
    hours, minutes = int(pieces[0]), int(pieces[1])
    seconds = int(pieces[2]) if len(pieces) == 3 else 0
    total = hours * 3600 + minutes * 60 + seconds
    if hours > 24 or minutes > 59 or seconds > 59 or total > _DAY_SECONDS:
        raise ProfileError(f"bad time of day {text!r}")
    return total


def _format_tod(offset: int) -> str:
    hours, rest = divmod(offset, 3600)
    minutes, seconds = divmod(rest, 60)
    if seconds:
        return f"{hours:02d}:{minutes:02d}:{seconds:02d}"
    return f"{hours:02d}:{minutes:02d}"


def _window_bounds(day: datetime, start: int, end: int) -> tuple[datetime, datetime]:
    midnight = datetime.combine(day.date(), time())
    return midnight + timedelta(seconds=start), midnight + timedelta(seconds=end)


def business_seconds_between(
    calendar: BusinessCalendar, t0: datetime, t1: datetime
) -> float:
    """Seconds of [t0, t1] that fall inside calendar windows.

    Raises:
        ValueError: if t0 > t1.
    """
    if t0 > t1:
        raise ValueError(f"t0 {t0} is after t1 {t1}")
    if calendar.mode == ALWAYS_ON:
        return (t1 - t0).total_seconds()
    table = calendar.by_weekday()
    total = 0.0
    day = t0
    while day.date() <= t1.date():
        for start, end in table[day.weekday()]:
            w0, w1 = _window_bounds(day, start, end)
            lo = max(w0, t0)
            hi = min(w1, t1)
            if lo < hi:
                total += (hi - lo).total_seconds()
        day += timedelta(days=1)
    return total


def advance_business_seconds(
    calendar: BusinessCalendar, t0: datetime, seconds: float
) -> datetime:
    """The instant after `seconds` of business time have passed since t0.

    Exact inverse of business_seconds_between for non-negative amounts:
    advancing by the full remainder of a window lands on the start of the
    next window, so results always lie inside a window (or on its start).

    Raises:
        ValueError: on negative seconds.
    """
    if seconds < 0:
        raise ValueError(f"cannot advance by negative seconds: {seconds}")
    if calendar.mode == ALWAYS_ON:
        return t0 + timedelta(seconds=seconds)
    table = calendar.by_weekday()
    remaining = float(seconds)
    day = t0
    while True:
        for start, end in table[day.weekday()]:
            w0, w1 = _window_bounds(day, start, end)
            if w1 <= t0:
                continue
            position = max(w0, t0)
            available = (w1 - position).total_seconds()
            if remaining < available:
                return position + timedelta(seconds=remaining)
            remaining -= available
        day += timedelta(days=1)


def in_business_window(calendar: BusinessCalendar, t: datetime) -> bool:
    """True if t lies inside some window (always true when always-on)."""
    if calendar.mode == ALWAYS_ON:
        return True
    for start, end in calendar.by_weekday()[t.weekday()]:
        w0, w1 = _window_bounds(t, start, end)
        if w0 <= t < w1:
            return True
    return False


EXPONENTIAL = "exponential"
NORMAL = "normal"
LOGNORMAL = "lognormal"
UNIFORM = "uniform"
FIXED = "fixed"

_PARAM_ORDER = {
    EXPONENTIAL: ("rate",),
    NORMAL: ("mean", "sd"),
    LOGNORMAL: ("log_mean", "log_sd"),
    UNIFORM: ("low", "high"),
    FIXED: ("value",),
}


@dataclass(frozen=True)
class Distribution:
    """A parametric distribution over non-negative seconds."""

    kind: str
    params: Mapping[str, float]

    def __post_init__(self) -> None:
        if self.kind not in _PARAM_ORDER:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        expected = _PARAM_ORDER[self.kind]
        params = {name: float(value) for name, value in self.params.items()}
        if set(params) != set(expected):
            raise ValueError(
                f"{self.kind} needs parameters {expected}, got {sorted(params)}"
            )
        object.__setattr__(self, "params", params)
        if self.kind == EXPONENTIAL and params["rate"] <= 0:
            raise ValueError("exponential rate must be positive")
        if self.kind == NORMAL and params["sd"] < 0:
            raise ValueError("normal sd must be non-negative")
        if self.kind == LOGNORMAL and params["log_sd"] < 0:
            raise ValueError("lognormal log_sd must be non-negative")
        if self.kind == UNIFORM and params["low"] > params["high"]:
            raise ValueError("uniform low must not exceed high")
        if self.kind == FIXED and params["value"] < 0:
            raise ValueError("fixed value must be non-negative")

    @classmethod
    def exponential(cls, rate: float) -> "Distribution":
        return cls(EXPONENTIAL, {"rate": rate})

    @classmethod
    def normal(cls, mean: float, sd: float) -> "Distribution":
        return cls(NORMAL, {"mean": mean, "sd": sd})

    @classmethod
    def lognormal(cls, log_mean: float, log_sd: float) -> "Distribution":
        return cls(LOGNORMAL, {"log_mean": log_mean, "log_sd": log_sd})

    @classmethod
    def uniform(cls, low: float, high: float) -> "Distribution":
        return cls(UNIFORM, {"low": low, "high": high})

    @classmethod
    def fixed(cls, value: float) -> "Distribution":
        return cls(FIXED, {"value": value})

    def mean(self) -> float:
        p = self.params
        if self.kind == EXPONENTIAL:
            return 1.0 / p["rate"]
        if self.kind == NORMAL:
            return p["mean"]
        if self.kind == LOGNORMAL:
            return math.exp(p["log_mean"] + p["log_sd"] ** 2 / 2.0)
        if self.kind == UNIFORM:
            return (p["low"] + p["high"]) / 2.0
        return p["value"]


def format_distribution(dist: Distribution) -> str:
    """Render a distribution as `kind key=value ...` with exact floats."""
    parts = [dist.kind]
    parts.extend(f"{name}={dist.params[name]!r}" for name in _PARAM_ORDER[dist.kind])
    return " ".join(parts)


def parse_distribution(text: str) -> Distribution:
    """Parse the `kind key=value ...` form written by format_distribution."""
    tokens = text.split()
    if not tokens:
        raise ProfileError("empty distribution")
    kind = tokens[0]
    params: dict[str, float] = {}
    for token in tokens[1:]:
        name, sep, value = token.partition("=")
        if not sep:
            raise ProfileError(f"bad distribution parameter {token!r}")
        try:
            params[name] = float(value)
        except ValueError:
            raise ProfileError(f"bad numeric value in {token!r}") from None
    try:
        return Distribution(kind, params)
    except ValueError as exc:
        raise ProfileError(f"bad distribution {text!r}: {exc}") from None


def remove_outliers(samples: Sequence[float]) -> list[float]:
    """Drop values outside the Tukey fences Q1 - 1.5 IQR .. Q3 + 1.5 IQR.

    Quartiles use linear interpolation on the sorted sample. If the fences
    would drop everything, the original samples are returned instead, so the
    result is never empty.
    """
    values = list(samples)
    if not values:
        raise ValueError("samples must be non-empty")
    q1, q3 = np.percentile(np.asarray(values, dtype=float), [25.0, 75.0])
    spread = q3 - q1
    low, high = q1 - 1.5 * spread, q3 + 1.5 * spread
    kept = [x for x in values if low <= x <= high]
    return kept if kept else values


def _candidate_cdf(dist: Distribution):
    p = dist.params
    if dist.kind == EXPONENTIAL:
        return stats.expon(scale=1.0 / p["rate"]).cdf
    if dist.kind == NORMAL:
        return stats.norm(p["mean"], p["sd"]).cdf
    if dist.kind == LOGNORMAL:
        return stats.lognorm(s=p["log_sd"], scale=math.exp(p["log_mean"])).cdf
    if dist.kind == UNIFORM:
        return stats.uniform(p["low"], p["high"] - p["low"]).cdf
    raise ValueError(f"no CDF for kind {dist.kind!r}")


def fit_distribution(samples: Sequence[float]) -> Distribution:
    """Fit the best of {exponential, normal, lognormal, uniform, fixed}.

    All-equal samples short-circuit to fixed. Otherwise each family is fit
    by maximum likelihood (moments for uniform) and the family with the
    smallest Kolmogorov-Smirnov statistic against the empirical CDF wins;
    ties resolve in the candidate order above, so the result is
    deterministic for a given sample list.

    Raises:
        InsufficientDataError: on an empty sample list.
        FitError: if any sample is negative.
    """
    values = np.asarray(list(samples), dtype=float)
    if values.size == 0:
        raise InsufficientDataError("no samples to fit")
    if np.any(values < 0):
        raise FitError("samples must be non-negative")
    if np.all(values == values[0]):
        return Distribution.fixed(float(values[0]))

    mean = float(values.mean())
    sd = float(values.std())
    candidates = [
        Distribution.exponential(1.0 / mean),
        Distribution.normal(mean, sd),
    ]
    if np.all(values > 0):
        logs = np.log(values)
        candidates.append(
            Distribution.lognormal(float(logs.mean()), float(logs.std()))
        )
    candidates.append(Distribution.uniform(float(values.min()), float(values.max())))

    best: Distribution | None = None
    best_stat = math.inf
    for candidate in candidates:
        statistic = float(stats.kstest(values, _candidate_cdf(candidate)).statistic)
        if statistic < best_stat:
            best, best_stat = candidate, statistic
    assert best is not None
    return best


def mine_inter_arrival(log: EventLog, calendar: BusinessCalendar) -> Distribution:
    """Fit the distribution of business-time gaps between case arrivals.

    A case arrives at the timestamp of its first event. Gaps are measured
    between consecutive arrivals in arrival order; outliers are kept, since
    rare long gaps are part of the arrival process.

    Raises:
        InsufficientDataError: with fewer than two traces.
    """
    if len(log.traces) < 2:
        raise InsufficientDataError(
            f"need at least 2 traces to mine inter-arrival times, got "
            f"{len(log.traces)}"
        )
    arrivals = sorted(trace.events[0].timestamp for trace in log.traces)
    gaps = [
        business_seconds_between(calendar, first, second)
        for first, second in zip(arrivals, arrivals[1:])
    ]
    return fit_distribution(gaps)


def mine_activity_durations(log: EventLog) -> dict[str, Distribution]:
    """Fit a duration distribution per activity from start/complete pairs.

    Starts are matched to completes per case and activity in FIFO order.
    Each activity's samples pass remove_outliers before fitting. Activities
    without any matched pair (in particular in complete-only logs) fall back
    to fixed(0).

    Raises:
        LogParseError: if a matched pair has a negative duration.
    """
    samples: dict[str, list[float]] = defaultdict(list)
    for trace in log.traces:
        pending: dict[str, deque[datetime]] = defaultdict(deque)
        for event in trace.events:
            if event.lifecycle == LIFECYCLE_START:
                pending[event.activity].append(event.timestamp)
                continue
            queue = pending[event.activity]
            if not queue:
                continue
            started = queue.popleft()
            duration = (event.timestamp - started).total_seconds()
            if duration < 0:
                raise LogParseError(
                    f"negative duration for activity {event.activity!r} in "
                    f"case {trace.case_id!r}"
                )
            samples[event.activity].append(duration)
    durations: dict[str, Distribution] = {}
    for activity in sorted(log.activity_alphabet):
        if samples.get(activity):
            durations[activity] = fit_distribution(
                remove_outliers(samples[activity])
            )
        else:
            durations[activity] = Distribution.fixed(0.0)
    return durations


def mine_transition_weights(dfg: Dfg) -> dict[str, float]:
    """Weight of an activity = its total occurrence count in the log."""
    occurrences: Counter[str] = Counter()
    for activity, count in dfg.start_counts.items():
        occurrences[activity] += count
    for (_, target), count in dfg.edge_counts.items():
        occurrences[target] += count
    return {activity: float(occurrences[activity]) for activity in sorted(occurrences)}


@dataclass(frozen=True)
class PerfProfile:
    """Everything the simulation needs besides the net itself."""

    inter_arrival: Distribution
    activity_durations: Mapping[str, Distribution]
    transition_weights: Mapping[str, float]
    max_len: int
    calendar: BusinessCalendar = ALWAYS_ON_CALENDAR

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "activity_durations", dict(self.activity_durations)
        )
        weights = {name: float(w) for name, w in self.transition_weights.items()}
        object.__setattr__(self, "transition_weights", weights)
        if self.max_len < 1:
            raise ValueError(f"max_len must be at least 1, got {self.max_len}")
        for name, weight in weights.items():
            if weight <= 0:
                raise ValueError(f"weight for {name!r} must be positive")


def serialize_profile(profile: PerfProfile) -> str:
    """Write a profile as an editable INI-style text document."""
    parser = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    parser.optionxform = str
    parser["arrival"] = {"distribution": format_distribution(profile.inter_arrival)}
    parser["durations"] = {
        activity: format_distribution(dist)
        for activity, dist in sorted(profile.activity_durations.items())
    }
    parser["weights"] = {
        activity: repr(weight)
        for activity, weight in sorted(profile.transition_weights.items())
    }
    parser["limits"] = {"max_len": str(profile.max_len)}
    parser["calendar"] = {"hours": format_calendar(profile.calendar)}
    buffer = io.StringIO()
    parser.write(buffer)
    return buffer.getvalue()


def parse_profile(text: str) -> PerfProfile:
    """Parse the document format written by serialize_profile.

    Raises:
        ProfileError: on missing sections/keys or malformed values.
    """
    parser = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ProfileError(f"bad profile: {exc}") from None
    for section in ("arrival", "durations", "weights", "limits", "calendar"):
        if not parser.has_section(section):
            raise ProfileError(f"profile is missing section [{section}]")
    if "distribution" not in parser["arrival"]:
        raise ProfileError("profile [arrival] needs a 'distribution' key")
    if "max_len" not in parser["limits"]:
        raise ProfileError("profile [limits] needs a 'max_len' key")
    if "hours" not in parser["calendar"]:
        raise ProfileError("profile [calendar] needs an 'hours' key")
    inter_arrival = parse_distribution(parser["arrival"]["distribution"])
    durations = {
        activity: parse_distribution(value)
        for activity, value in parser["durations"].items()
    }
    weights: dict[str, float] = {}
    for activity, value in parser["weights"].items():
        try:
            weights[activity] = float(value)
        except ValueError:
            raise ProfileError(
                f"bad weight for {activity!r}: {value!r}"
            ) from None
    try:
        max_len = int(parser["limits"]["max_len"])
    except ValueError:
        raise ProfileError(
            f"bad max_len: {parser['limits']['max_len']!r}"
        ) from None
    calendar = parse_calendar(parser["calendar"]["hours"])
    try:
        return PerfProfile(inter_arrival, durations, weights, max_len, calendar)
    except ValueError as exc:
        raise ProfileError(str(exc)) from None
