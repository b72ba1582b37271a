"""Log-to-log process simulation: mine a workflow net and a performance
profile from an event log, simulate the net, and emit a synthetic log."""

from .errors import (
    ConfigError,
    FitError,
    InsufficientDataError,
    LogParseError,
    MarkingError,
    NotAWorkflowNetError,
    NotEnabledError,
    PnmlError,
    ProcsimError,
    ProfileError,
    SimulationError,
)
from .eventlog import (
    DEFAULT_MAPPING,
    LIFECYCLE_COMPLETE,
    LIFECYCLE_START,
    TIMESTAMP_FORMAT,
    ColumnMapping,
    Event,
    EventLog,
    Trace,
    parse_csv,
    trace_variants,
    write_csv,
)
from .petrinet import (
    Marking,
    PetriNet,
    can_replay,
    enabled,
    export_pnml,
    fire,
    import_pnml,
    is_final,
)
from .discovery import (
    Dfg,
    Footprint,
    build_dfg,
    build_footprint,
    discover_alpha,
    max_trace_length,
)
from .perfmine import (
    ALWAYS_ON_CALENDAR,
    BusinessCalendar,
    Distribution,
    PerfProfile,
    advance_business_seconds,
    business_seconds_between,
    fit_distribution,
    format_calendar,
    format_distribution,
    in_business_window,
    mine_activity_durations,
    mine_inter_arrival,
    mine_transition_weights,
    parse_calendar,
    parse_distribution,
    parse_profile,
    remove_outliers,
    serialize_profile,
)
from .desengine import (
    DEFAULT_ANCHOR,
    SimConfig,
    SimEventRecord,
    SimResult,
    normal_arrival,
    run_simulation,
    sample,
    select_transition,
    simulate,
)
from .transform import to_event_log

__version__ = "0.1.0"

__all__ = [
    "ProcsimError",
    "LogParseError",
    "PnmlError",
    "NotAWorkflowNetError",
    "MarkingError",
    "NotEnabledError",
    "InsufficientDataError",
    "FitError",
    "ProfileError",
    "ConfigError",
    "SimulationError",
    "Event",
    "Trace",
    "EventLog",
    "ColumnMapping",
    "DEFAULT_MAPPING",
    "LIFECYCLE_START",
    "LIFECYCLE_COMPLETE",
    "TIMESTAMP_FORMAT",
    "parse_csv",
    "write_csv",
    "trace_variants",
    "PetriNet",
    "Marking",
    "enabled",
    "fire",
    "is_final",
    "can_replay",
    "import_pnml",
    "export_pnml",
    "Dfg",
    "Footprint",
    "build_dfg",
    "build_footprint",
    "discover_alpha",
    "max_trace_length",
    "BusinessCalendar",
    "ALWAYS_ON_CALENDAR",
    "Distribution",
    "PerfProfile",
    "business_seconds_between",
    "advance_business_seconds",
    "in_business_window",
    "parse_calendar",
    "format_calendar",
    "format_distribution",
    "parse_distribution",
    "remove_outliers",
    "fit_distribution",
    "mine_inter_arrival",
    "mine_activity_durations",
    "mine_transition_weights",
    "serialize_profile",
    "parse_profile",
    "DEFAULT_ANCHOR",
    "SimConfig",
    "SimEventRecord",
    "SimResult",
    "simulate",
    "run_simulation",
    "select_transition",
    "sample",
    "normal_arrival",
    "to_event_log",
    "__version__",
]
