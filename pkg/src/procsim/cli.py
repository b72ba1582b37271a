"""Command-line pipeline: discover a model from a log, simulate it back.

Two-phase use writes the net (PNML) and profile (editable text) to disk so
they can be inspected or hand-tuned between discovery and simulation; the
one-shot form runs both phases in memory and produces byte-identical output
for the same flags and seed.

Exit codes: 0 success, 1 usage error, 2 data or simulation error.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime
from typing import Sequence

from . import __version__
from .desengine import (
    DEFAULT_ANCHOR,
    SimConfig,
    SimEventRecord,
    normal_arrival,
    simulate,
)
from .discovery import build_dfg, discover_alpha, max_trace_length
from .errors import ProcsimError, ProfileError
from .eventlog import TIMESTAMP_FORMAT, EventLog, parse_csv, write_csv
from .perfmine import (
    ALWAYS_ON_CALENDAR,
    BusinessCalendar,
    Distribution,
    PerfProfile,
    advance_business_seconds,
    format_distribution,
    mine_activity_durations,
    mine_inter_arrival,
    mine_transition_weights,
    parse_calendar,
    parse_profile,
    serialize_profile,
)
from .petrinet import export_pnml, import_pnml
from .transform import to_event_log


class _UsageError(Exception):
    """Raised for malformed flags or flag combinations (exit code 1)."""


_DISCOVER_KEYS = ("in", "pnml", "profile", "arrival", "business-hours")
_SIMULATE_KEYS = (
    "in",
    "pnml",
    "profile",
    "out",
    "cases",
    "seed",
    "arrival",
    "duration",
    "capacity",
    "anchor",
    "business-hours",
    "no-start-column",
)
_LIST_KEYS = ("duration", "capacity")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="procsim",
        description=(
            "Mine a workflow net and performance profile from an event log "
            "and simulate a statistically similar log."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    discover = commands.add_parser(
        "discover", help="mine a PNML net and a performance profile from a log"
    )
    discover.add_argument("--in", dest="in_log", metavar="CSV")
    discover.add_argument("--pnml", metavar="FILE", help="output net path")
    discover.add_argument("--profile", metavar="FILE", help="output profile path")
    discover.add_argument(
        "--arrival",
        metavar="SECONDS",
        help="skip arrival mining and store a normal arrival with this mean",
    )
    discover.add_argument("--business-hours", dest="business_hours", metavar="CALENDAR")
    discover.add_argument("--config", metavar="FILE")

    sim = commands.add_parser(
        "simulate", help="simulate a log from --in, or from --pnml plus --profile"
    )
    sim.add_argument("--in", dest="in_log", metavar="CSV")
    sim.add_argument("--pnml", metavar="FILE", help="input net path")
    sim.add_argument("--profile", metavar="FILE", help="input profile path")
    sim.add_argument("--out", metavar="CSV")
    sim.add_argument("--cases", metavar="N")
    sim.add_argument("--seed", metavar="S")
    sim.add_argument("--arrival", metavar="SECONDS")
    sim.add_argument(
        "--duration",
        action="append",
        default=[],
        metavar="ACT=SECONDS",
        help="fixed service time override, repeatable",
    )
    sim.add_argument(
        "--capacity",
        action="append",
        default=[],
        metavar="ACT=K",
        help="station capacity override, repeatable",
    )
    sim.add_argument("--anchor", metavar=f'"{TIMESTAMP_FORMAT}"')
    sim.add_argument("--business-hours", dest="business_hours", metavar="CALENDAR")
    sim.add_argument(
        "--no-start-column",
        dest="no_start_column",
        action="store_const",
        const=True,
        help="write only case_id,activity,timestamp",
    )
    sim.add_argument("--config", metavar="FILE")
    return parser


def _read_config_file(path: str, allowed: Sequence[str]) -> dict[str, list[str]]:
    values: dict[str, list[str]] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise _UsageError(
                    f"{path}:{number}: expected 'key = value', got {line!r}"
                )
            key = key.strip()
            if key not in allowed:
                raise _UsageError(f"{path}:{number}: unknown option {key!r}")
            values.setdefault(key, []).append(value.strip())
    return values


def _merge_options(ns: argparse.Namespace, allowed: Sequence[str]) -> dict:
    """Overlay command-line flags on config-file values; flags win."""
    from_file: dict[str, list[str]] = {}
    if ns.config:
        from_file = _read_config_file(ns.config, allowed)
    merged: dict[str, object] = {}
    for key in allowed:
        attr = {"in": "in_log", "business-hours": "business_hours",
                "no-start-column": "no_start_column"}.get(key, key)
        flag_value = getattr(ns, attr, None)
        if key in _LIST_KEYS:
            merged[key] = flag_value if flag_value else from_file.get(key, [])
        elif flag_value is not None:
            merged[key] = flag_value
        elif key in from_file:
            merged[key] = from_file[key][-1]
        else:
            merged[key] = None
    return merged


def _parse_int(name: str, raw: object, minimum: int) -> int:
    try:
        value = int(str(raw))
    except ValueError:
        raise _UsageError(f"--{name} expects an integer, got {raw!r}") from None
    if value < minimum:
        raise _UsageError(f"--{name} must be >= {minimum}, got {value}")
    return value


def _parse_bool(name: str, raw: object) -> bool:
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in ("true", "1", "yes"):
        return True
    if text in ("false", "0", "no"):
        return False
    raise _UsageError(f"--{name} expects true or false, got {raw!r}")


def _parse_arrival(raw: object) -> Distribution:
    try:
        mean = float(str(raw))
    except ValueError:
        raise _UsageError(f"--arrival expects seconds, got {raw!r}") from None
    try:
        return normal_arrival(mean)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def _parse_assignments(
    name: str, raw_items: Sequence[str]
) -> list[tuple[str, str]]:
    pairs = []
    for item in raw_items:
        activity, sep, value = item.partition("=")
        if not sep or not activity:
            raise _UsageError(f"--{name} expects ACT=VALUE, got {item!r}")
        pairs.append((activity, value))
    return pairs


def _parse_durations(raw_items: Sequence[str]) -> dict[str, Distribution]:
    overrides: dict[str, Distribution] = {}
    for activity, value in _parse_assignments("duration", raw_items):
        try:
            seconds = float(value)
            overrides[activity] = Distribution.fixed(seconds)
        except ValueError as exc:
            raise _UsageError(f"--duration {activity}={value!r}: {exc}") from None
    return overrides


def _parse_capacities(raw_items: Sequence[str]) -> dict[str, int]:
    capacities: dict[str, int] = {}
    for activity, value in _parse_assignments("capacity", raw_items):
        try:
            capacities[activity] = int(value)
        except ValueError:
            raise _UsageError(
                f"--capacity expects an integer, got {activity}={value!r}"
            ) from None
        if capacities[activity] < 1:
            raise _UsageError(f"--capacity {activity} must be >= 1")
    return capacities


def _parse_anchor(raw: object) -> datetime:
    try:
        return datetime.strptime(str(raw), TIMESTAMP_FORMAT)
    except ValueError:
        raise _UsageError(
            f"--anchor expects {TIMESTAMP_FORMAT!r}, got {raw!r}"
        ) from None


def _parse_business_hours(raw: object) -> BusinessCalendar:
    try:
        return parse_calendar(str(raw))
    except ProfileError as exc:
        raise _UsageError(str(exc)) from None


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def _mine_profile(
    log: EventLog,
    calendar: BusinessCalendar,
    arrival: Distribution | None,
) -> PerfProfile:
    dfg = build_dfg(log)
    return PerfProfile(
        inter_arrival=arrival or mine_inter_arrival(log, calendar),
        activity_durations=mine_activity_durations(log),
        transition_weights=mine_transition_weights(dfg),
        max_len=max_trace_length(log),
        calendar=calendar,
    )


def _cmd_discover(opts: dict) -> int:
    for key in ("in", "pnml", "profile"):
        if not opts[key]:
            raise _UsageError(f"discover requires --{key}")
    calendar = (
        _parse_business_hours(opts["business-hours"])
        if opts["business-hours"]
        else ALWAYS_ON_CALENDAR
    )
    arrival = _parse_arrival(opts["arrival"]) if opts["arrival"] else None

    log = parse_csv(_read_text(str(opts["in"])))
    net = discover_alpha(log)
    profile = _mine_profile(log, calendar, arrival)
    _write_text(str(opts["pnml"]), export_pnml(net))
    _write_text(str(opts["profile"]), serialize_profile(profile))

    print(f"activities: {len(log.activity_alphabet)}")
    print(f"traces: {len(log.traces)}")
    print(f"max trace length: {profile.max_len}")
    print(
        f"inter-arrival: {format_distribution(profile.inter_arrival)} "
        f"(mean {profile.inter_arrival.mean():.1f}s)"
    )
    print(f"wrote {opts['pnml']} and {opts['profile']}")
    return 0


def _case_arrivals(records: Sequence[SimEventRecord]) -> list[float]:
    arrival_by_case: dict[str, float] = {}
    for record in records:
        enqueued = record.start_clock - record.wait
        known = arrival_by_case.get(record.case_id)
        if known is None or enqueued < known:
            arrival_by_case[record.case_id] = enqueued
    return sorted(arrival_by_case.values())


def _print_run_stats(records: Sequence[SimEventRecord], retries: int) -> None:
    arrivals = _case_arrivals(records)
    if len(arrivals) >= 2:
        gaps = [b - a for a, b in zip(arrivals, arrivals[1:])]
        print(f"mean inter-arrival: {sum(gaps) / len(gaps):.1f}s")
    by_activity: dict[str, list[SimEventRecord]] = {}
    for record in records:
        by_activity.setdefault(record.activity, []).append(record)
    for activity in sorted(by_activity):
        group = by_activity[activity]
        wait = sum(r.wait for r in group) / len(group)
        service = sum(r.complete_clock - r.start_clock for r in group) / len(group)
        print(
            f"activity {activity}: mean wait {wait:.1f}s, "
            f"mean service {service:.1f}s"
        )
    print(f"case retries: {retries}")


def _cmd_simulate(opts: dict) -> int:
    if not opts["out"]:
        raise _UsageError("simulate requires --out")
    one_shot = opts["in"] is not None
    two_phase = opts["pnml"] is not None or opts["profile"] is not None
    if one_shot == two_phase:
        raise _UsageError("pass either --in, or both --pnml and --profile")
    if two_phase and (opts["pnml"] is None or opts["profile"] is None):
        raise _UsageError("two-phase simulation needs both --pnml and --profile")

    num_cases = _parse_int("cases", opts["cases"], 0) if opts["cases"] is not None else 1000
    seed = _parse_int("seed", opts["seed"], 0) if opts["seed"] is not None else 0
    arrival = _parse_arrival(opts["arrival"]) if opts["arrival"] else None
    durations = _parse_durations(opts["duration"])
    capacities = _parse_capacities(opts["capacity"])
    flag_calendar = (
        _parse_business_hours(opts["business-hours"])
        if opts["business-hours"]
        else None
    )

    if one_shot:
        log = parse_csv(_read_text(str(opts["in"])))
        net = discover_alpha(log)
        calendar = flag_calendar or ALWAYS_ON_CALENDAR
        profile = _mine_profile(log, calendar, arrival)
    else:
        net = import_pnml(_read_text(str(opts["pnml"])))
        profile = parse_profile(_read_text(str(opts["profile"])))
        calendar = flag_calendar or profile.calendar

    if opts["anchor"] is not None:
        anchor = _parse_anchor(opts["anchor"])
    else:
        # Land the default on a window start so windowed runs work unchanged.
        anchor = advance_business_seconds(calendar, DEFAULT_ANCHOR, 0)

    config = SimConfig(
        num_cases=num_cases,
        seed=seed,
        arrival_override=arrival,
        duration_overrides=durations,
        capacities=capacities,
        anchor=anchor,
    )
    result = simulate(net, profile, config)
    sim_log = to_event_log(result.records, anchor, calendar)
    include_start = not _parse_bool(
        "no-start-column", opts["no-start-column"] or False
    )
    _write_text(str(opts["out"]), write_csv(sim_log, include_start=include_start))

    print(f"simulated cases: {num_cases}")
    _print_run_stats(result.records, result.retries)
    print(f"wrote {opts['out']}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        return 0 if code == 0 else 1
    try:
        if ns.command == "discover":
            return _cmd_discover(_merge_options(ns, _DISCOVER_KEYS))
        return _cmd_simulate(_merge_options(ns, _SIMULATE_KEYS))
    except _UsageError as exc:
        print(f"procsim: {exc}", file=sys.stderr)
        return 1
    except ProcsimError as exc:
        print(f"procsim: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"procsim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
