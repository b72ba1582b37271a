"""Discrete-event simulation of a workflow net under a performance profile.

Cases arrive on a seeded inter-arrival process and replay the token game.
Labeled transitions are dispatched to per-activity stations with bounded
capacity and FIFO waiting; silent transitions fire instantly. The clock is
advanced by a priority queue of pending events, tie-broken by scheduling
order, which makes every run a pure function of (net, profile, config).

Randomness comes from numpy's PCG64. The run seed is split into three
independent substreams (arrival gaps, transition routing, service
durations) so overriding one knob never shifts the draws of another.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, SimulationError
from .perfmine import FIXED, Distribution, PerfProfile
from .petrinet import Marking, PetriNet, fire, is_final

DEFAULT_ANCHOR = datetime(2024, 1, 1, 0, 0, 0)

_ARRIVAL = 0
_COMPLETE = 1


@dataclass(frozen=True)
class SimConfig:
    """User-facing run parameters and overrides."""

    num_cases: int
    seed: int = 0
    arrival_override: Distribution | None = None
    duration_overrides: Mapping[str, Distribution] = field(default_factory=dict)
    capacities: Mapping[str, int] = field(default_factory=dict)
    anchor: datetime = DEFAULT_ANCHOR
    max_len_override: int | None = None
    max_case_retries: int = 25

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "duration_overrides", dict(self.duration_overrides)
        )
        object.__setattr__(self, "capacities", dict(self.capacities))
        if self.num_cases < 0:
            raise ConfigError(f"num_cases must be >= 0, got {self.num_cases}")
        if self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed}")
        for activity, capacity in self.capacities.items():
            if capacity < 1:
                raise ConfigError(
                    f"capacity for {activity!r} must be >= 1, got {capacity}"
                )
        if self.max_len_override is not None and self.max_len_override < 1:
            raise ConfigError(
                f"max_len_override must be >= 1, got {self.max_len_override}"
            )
        if self.max_case_retries < 1:
            raise ConfigError(
                f"max_case_retries must be >= 1, got {self.max_case_retries}"
            )


@dataclass(frozen=True)
class SimEventRecord:
    """One executed activity: clocks are seconds of simulation time."""

    case_id: str
    activity: str
    start_clock: float
    complete_clock: float
    wait: float


@dataclass(frozen=True)
class SimResult:
    """Records in completion order plus the number of aborted attempts."""

    records: tuple[SimEventRecord, ...]
    retries: int


def normal_arrival(mean_seconds: float) -> Distribution:
    """The arrival shape used for user-supplied rates: sd pinned to mean/10."""
    if mean_seconds <= 0:
        raise ValueError(f"arrival mean must be positive, got {mean_seconds}")
    return Distribution.normal(mean_seconds, mean_seconds / 10.0)


def sample(dist: Distribution, rng: np.random.Generator) -> float:
    """Draw one non-negative value.

    Negative draws are rejected and redrawn up to 100 times, then clamped
    to zero. fixed distributions return their value without consuming rng
    state.
    """
    if dist.kind == FIXED:
        return dist.params["value"]
    for _ in range(100):
        value = _draw(dist, rng)
        if value >= 0:
            return float(value)
    return 0.0


def _draw(dist: Distribution, rng: np.random.Generator) -> float:
    p = dist.params
    if dist.kind == "exponential":
        return rng.exponential(1.0 / p["rate"])
    if dist.kind == "normal":
        return rng.normal(p["mean"], p["sd"])
    if dist.kind == "lognormal":
        return rng.lognormal(p["log_mean"], p["log_sd"])
    if dist.kind == "uniform":
        return rng.uniform(p["low"], p["high"])
    raise ValueError(f"cannot sample kind {dist.kind!r}")


def select_transition(
    net: PetriNet,
    enabled: Sequence[str],
    weights: Mapping[str, float],
    rng_draw: float,
) -> str:
    """Pick one enabled transition by cumulative-sum inversion.

    Labeled transitions weigh in proportion to their activity weight; a
    silent transition carries the mean of all known activity weights. The
    walk runs over transition ids in sorted order, so the choice is a pure
    function of the draw.
    """
    ids = sorted(enabled)
    if not ids:
        raise ValueError("enabled must be non-empty")
    silent_weight = (
        sum(weights.values()) / len(weights) if weights else 1.0
    )
    spans = [
        weights[net.transitions[t]] if net.transitions[t] is not None else silent_weight
        for t in ids
    ]
    target = rng_draw * sum(spans)
    cumulative = 0.0
    for transition, span in zip(ids, spans):
        cumulative += span
        if target < cumulative:
            return transition
    return ids[-1]


class _Station:
    """Capacity-bounded server for one activity with a FIFO wait queue."""

    __slots__ = ("activity", "capacity", "busy", "queue")

    def __init__(self, activity: str, capacity: int) -> None:
        self.activity = activity
        self.capacity = capacity
        self.busy = 0
        self.queue: deque[tuple[str, str, float]] = deque()


class _Case:
    """Execution state of one case: its pre-generated transition path."""

    __slots__ = ("case_id", "path", "next_idx", "available", "inflight")

    def __init__(self, case_id: str, path: list[str], source: str) -> None:
        self.case_id = case_id
        self.path = path
        self.next_idx = 0
        self.available = Marking({source: 1})
        self.inflight = 0


class _Engine:
    def __init__(self, net: PetriNet, profile: PerfProfile, config: SimConfig):
        self.net = net
        self.config = config
        self.weights = profile.transition_weights
        self.durations = dict(profile.activity_durations)
        self.durations.update(config.duration_overrides)
        self.arrival = config.arrival_override or profile.inter_arrival
        self.max_len = config.max_len_override or profile.max_len
        self._validate_coverage()

        streams = np.random.SeedSequence(config.seed).spawn(3)
        self.arrival_rng = np.random.Generator(np.random.PCG64(streams[0]))
        self.routing_rng = np.random.Generator(np.random.PCG64(streams[1]))
        self.duration_rng = np.random.Generator(np.random.PCG64(streams[2]))

        self.heap: list[tuple[float, int, int, tuple]] = []
        self.sequence = itertools.count()
        self.stations: dict[str, _Station] = {}
        self.cases: dict[str, _Case] = {}
        self.records: list[SimEventRecord] = []
        self.retries = 0

    def _validate_coverage(self) -> None:
        labels = {l for l in self.net.transitions.values() if l is not None}
        missing = sorted(labels - set(self.durations))
        if missing:
            raise ConfigError(f"no duration distribution for activities: {missing}")
        missing = sorted(labels - set(self.weights))
        if missing:
            raise ConfigError(f"no transition weight for activities: {missing}")
        for bag_name, bag in (
            ("capacity", self.config.capacities),
            ("duration override", self.config.duration_overrides),
        ):
            unknown = sorted(set(bag) - labels)
            if unknown:
                raise ConfigError(
                    f"{bag_name} given for activities not in the net: {unknown}"
                )

    def run(self) -> SimResult:
        if self.config.num_cases >= 1:
            self._push(0.0, _ARRIVAL, (1,))
        while self.heap:
            fire_at, _, kind, payload = heapq.heappop(self.heap)
            if kind == _ARRIVAL:
                self._on_arrival(fire_at, payload[0])
            else:
                self._on_complete(fire_at, payload)
        return SimResult(tuple(self.records), self.retries)

    def _push(self, fire_at: float, kind: int, payload: tuple) -> None:
        heapq.heappush(self.heap, (fire_at, next(self.sequence), kind, payload))

    def _on_arrival(self, clock: float, number: int) -> None:
        # Chain the next arrival first so arrival draws stay in case order.
        if number < self.config.num_cases:
            gap = sample(self.arrival, self.arrival_rng)
            self._push(clock + gap, _ARRIVAL, (number + 1,))
        case_id = str(number)
        path = self._generate_path(case_id)
        case = _Case(case_id, path, self.net.source)
        self.cases[case_id] = case
        self._dispatch(case, clock)

    def _generate_path(self, case_id: str) -> list[str]:
        """Walk the token game to a final marking, retrying on dead ends.

        A candidate path is rejected when it deadlocks, exceeds max_len
        labeled firings, or loops through silent transitions too long. No
        station state exists yet at this point, so a rejected candidate
        leaves no trace in the run.
        """
        step_budget = 10 * self.max_len + 1000
        last_marking = Marking({self.net.source: 1})
        for attempt in range(self.config.max_case_retries + 1):
            if attempt:
                self.retries += 1
            marking = Marking({self.net.source: 1})
            path: list[str] = []
            labeled = 0
            failed = False
            while not is_final(self.net, marking):
                candidates = [
                    t
                    for t in self.net.transitions
                    if all(marking.count(p) >= 1 for p in self.net.preset[t])
                ]
                if not candidates or len(path) >= step_budget:
                    failed = True
                    break
                chosen = select_transition(
                    self.net, candidates, self.weights, self.routing_rng.random()
                )
                if self.net.transitions[chosen] is not None:
                    labeled += 1
                    if labeled > self.max_len:
                        failed = True
                        break
                path.append(chosen)
                marking = fire(self.net, marking, chosen)
            if not failed:
                return path
            last_marking = marking
        raise SimulationError(
            f"case {case_id}: no legal trace within "
            f"{self.config.max_case_retries} retries; last marking {last_marking}"
        )

    def _dispatch(self, case: _Case, clock: float) -> None:
        """Reserve tokens for consecutive path steps as they become enabled."""
        while case.next_idx < len(case.path):
            transition = case.path[case.next_idx]
            inputs = self.net.preset[transition]
            if not all(case.available.count(p) >= 1 for p in inputs):
                break
            counts = dict(case.available.items())
            for place in inputs:
                counts[place] -= 1
            case.next_idx += 1
            label = self.net.transitions[transition]
            if label is None:
                for place in self.net.postset[transition]:
                    counts[place] = counts.get(place, 0) + 1
                case.available = Marking(counts)
                continue
            case.available = Marking(counts)
            case.inflight += 1
            self._enqueue(case.case_id, transition, label, clock)

    def _enqueue(
        self, case_id: str, transition: str, label: str, clock: float
    ) -> None:
        station = self.stations.get(label)
        if station is None:
            station = _Station(label, self.config.capacities.get(label, 1))
            self.stations[label] = station
        if station.busy < station.capacity and not station.queue:
            self._start_service(station, case_id, transition, clock, clock)
        else:
            station.queue.append((case_id, transition, clock))

    def _start_service(
        self,
        station: _Station,
        case_id: str,
        transition: str,
        enqueued_at: float,
        clock: float,
    ) -> None:
        station.busy += 1
        duration = sample(self.durations[station.activity], self.duration_rng)
        self._push(
            clock + duration,
            _COMPLETE,
            (case_id, transition, enqueued_at, clock),
        )

    def _on_complete(self, clock: float, payload: tuple) -> None:
        case_id, transition, enqueued_at, started_at = payload
        label = self.net.transitions[transition]
        station = self.stations[label]
        station.busy -= 1
        self.records.append(
            SimEventRecord(
                case_id=case_id,
                activity=label,
                start_clock=started_at,
                complete_clock=clock,
                wait=started_at - enqueued_at,
            )
        )
        if station.queue:
            next_case, next_transition, waiting_since = station.queue.popleft()
            self._start_service(
                station, next_case, next_transition, waiting_since, clock
            )
        case = self.cases[case_id]
        case.inflight -= 1
        counts = dict(case.available.items())
        for place in self.net.postset[transition]:
            counts[place] = counts.get(place, 0) + 1
        case.available = Marking(counts)
        self._dispatch(case, clock)
        if case.next_idx == len(case.path) and case.inflight == 0:
            assert is_final(self.net, case.available), (
                f"case {case_id} finished its path off the final marking: "
                f"{case.available}"
            )


def simulate(net: PetriNet, profile: PerfProfile, config: SimConfig) -> SimResult:
    """Run the simulation and return records plus retry statistics."""
    return _Engine(net, profile, config).run()


def run_simulation(
    net: PetriNet, profile: PerfProfile, config: SimConfig
) -> list[SimEventRecord]:
    """Run the simulation and return the records in completion order."""
    return list(simulate(net, profile, config).records)
