"""Shared fixtures: a synthetic workflow log and small hand-built nets."""

from __future__ import annotations

import random
from datetime import datetime, timedelta

import pytest

from procsim import (
    Event,
    EventLog,
    LIFECYCLE_COMPLETE,
    LIFECYCLE_START,
    PetriNet,
    Trace,
)

# Mean service time per activity in the synthetic log, seconds.
WORKFLOW_MEANS = {
    "a": 120.0,
    "b": 240.0,
    "c": 180.0,
    "d": 300.0,
    "e": 280.0,
    "f": 90.0,
    "g": 210.0,
    "h": 60.0,
}


def make_workflow_log(
    num_traces: int = 200,
    seed: int = 1234,
    arrival_gap_mean: float = 900.0,
    start: datetime = datetime(2024, 3, 4, 0, 0, 0),
) -> EventLog:
    """Eight activities: a, then b XOR c, then d AND e, then f, g, h.

    Every activity gets a start and a complete event so duration mining has
    real intervals to work with.
    """
    rng = random.Random(seed)
    traces = []
    arrival = start
    for case_number in range(1, num_traces + 1):
        case_id = str(case_number)
        events = []
        clock = arrival

        def execute(activity: str, at: datetime) -> datetime:
            duration = max(1.0, rng.gauss(WORKFLOW_MEANS[activity], WORKFLOW_MEANS[activity] / 10.0))
            done = at + timedelta(seconds=round(duration))
            events.append(Event(case_id, activity, at, LIFECYCLE_START))
            events.append(Event(case_id, activity, done, LIFECYCLE_COMPLETE))
            return done

        clock = execute("a", clock)
        clock = execute("b" if rng.random() < 0.6 else "c", clock)
        done_d = execute("d", clock)
        done_e = execute("e", clock)
        clock = max(done_d, done_e)
        clock = execute("f", clock)
        clock = execute("g", clock)
        execute("h", clock)

        traces.append(Trace(case_id, tuple(events)))
        arrival += timedelta(seconds=round(max(1.0, rng.gauss(arrival_gap_mean, arrival_gap_mean / 10.0))))
    return EventLog(tuple(traces))


@pytest.fixture(scope="session")
def workflow_log() -> EventLog:
    return make_workflow_log()


def tandem_net() -> PetriNet:
    """source -> A -> middle -> B -> sink."""
    return PetriNet(
        places=frozenset({"source", "middle", "sink"}),
        transitions={"t_A": "A", "t_B": "B"},
        arcs=frozenset(
            {
                ("source", "t_A"),
                ("t_A", "middle"),
                ("middle", "t_B"),
                ("t_B", "sink"),
            }
        ),
        source="source",
        sink="sink",
    )


def parallel_net() -> PetriNet:
    """split into d and e running concurrently, then join."""
    return PetriNet(
        places=frozenset({"source", "p1", "p2", "p3", "p4", "sink"}),
        transitions={"t_a": "a", "t_d": "d", "t_e": "e", "t_f": "f"},
        arcs=frozenset(
            {
                ("source", "t_a"),
                ("t_a", "p1"),
                ("t_a", "p2"),
                ("p1", "t_d"),
                ("p2", "t_e"),
                ("t_d", "p3"),
                ("t_e", "p4"),
                ("p3", "t_f"),
                ("p4", "t_f"),
                ("t_f", "sink"),
            }
        ),
        source="source",
        sink="sink",
    )


def loop_net() -> PetriNet:
    """a, then b repeated any number of times, then c."""
    return PetriNet(
        places=frozenset({"source", "body", "sink"}),
        transitions={"t_a": "a", "t_b": "b", "t_c": "c"},
        arcs=frozenset(
            {
                ("source", "t_a"),
                ("t_a", "body"),
                ("body", "t_b"),
                ("t_b", "body"),
                ("body", "t_c"),
                ("t_c", "sink"),
            }
        ),
        source="source",
        sink="sink",
    )


def xor_net() -> PetriNet:
    """a, then b or c, then d."""
    return PetriNet(
        places=frozenset({"source", "split", "join", "sink"}),
        transitions={"t_a": "a", "t_b": "b", "t_c": "c", "t_d": "d"},
        arcs=frozenset(
            {
                ("source", "t_a"),
                ("t_a", "split"),
                ("split", "t_b"),
                ("split", "t_c"),
                ("t_b", "join"),
                ("t_c", "join"),
                ("join", "t_d"),
                ("t_d", "sink"),
            }
        ),
        source="source",
        sink="sink",
    )
