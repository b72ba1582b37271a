"""Exception types shared across the toolkit.

Everything raised on bad user input or bad data derives from ProcsimError,
so callers (and the CLI) can distinguish domain failures from plain bugs.
"""


class ProcsimError(Exception):
    """Base class for all toolkit errors."""


class LogParseError(ProcsimError):
    """A CSV event log could not be parsed or violates the log schema."""


class PnmlError(ProcsimError):
    """A PNML document is malformed or does not describe a single net."""


class NotAWorkflowNetError(ProcsimError):
    """A net violates the workflow-net shape (unique source/sink, all
    nodes on a source-to-sink path)."""


class MarkingError(ProcsimError):
    """A marking is invalid for the net it is used with."""


class NotEnabledError(ProcsimError):
    """A transition was fired without being enabled."""


class InsufficientDataError(ProcsimError):
    """A mining operation was given too little data to work with."""


class FitError(ProcsimError):
    """Distribution fitting was given samples outside its domain."""


class ProfileError(ProcsimError):
    """A serialized performance profile or calendar string is malformed."""


class ConfigError(ProcsimError):
    """A simulation run was configured inconsistently."""


class SimulationError(ProcsimError):
    """The simulation could not complete a case within its retry budget."""
