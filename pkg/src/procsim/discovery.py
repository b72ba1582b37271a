"""Control-flow discovery: directly-follows statistics and the Alpha miner.

The Alpha miner is deliberate scope: it is deterministic and fully defined,
which keeps discovery testable against a brute-force oracle. Its known blind
spots (length-1/length-2 loops, non-free-choice constructs) are not patched
here; nets for such logs can be supplied externally via PNML import.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Mapping

from .errors import InsufficientDataError, NotAWorkflowNetError
from .eventlog import EventLog
from .petrinet import PetriNet

CAUSAL = "->"
REVERSE = "<-"
PARALLEL = "||"
UNRELATED = "#"


@dataclass(frozen=True)
class Dfg:
    """Directly-follows counts plus trace start/end activity counts."""

    edge_counts: Mapping[tuple[str, str], int]
    start_counts: Mapping[str, int]
    end_counts: Mapping[str, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "edge_counts", dict(self.edge_counts))
        object.__setattr__(self, "start_counts", dict(self.start_counts))
        object.__setattr__(self, "end_counts", dict(self.end_counts))

    @property
    def activities(self) -> frozenset[str]:
        names = set(self.start_counts) | set(self.end_counts)
        for a, b in self.edge_counts:
            names.add(a)
            names.add(b)
        return frozenset(names)


def build_dfg(log: EventLog) -> Dfg:
    """Count adjacent complete-event pairs and trace start/end activities.

    Raises:
        InsufficientDataError: on an empty log or a trace without complete
            events.
    """
    if not log.traces:
        raise InsufficientDataError("empty log: nothing to mine")
    edges: Counter[tuple[str, str]] = Counter()
    starts: Counter[str] = Counter()
    ends: Counter[str] = Counter()
    for trace in log.traces:
        activities = trace.activities()
        if not activities:
            raise InsufficientDataError(
                f"trace {trace.case_id!r} has no complete events"
            )
        starts[activities[0]] += 1
        ends[activities[-1]] += 1
        for left, right in zip(activities, activities[1:]):
            edges[(left, right)] += 1
    return Dfg(dict(edges), dict(starts), dict(ends))


@dataclass(frozen=True)
class Footprint:
    """The Alpha relation matrix over the activity alphabet."""

    activities: tuple[str, ...]
    relations: Mapping[tuple[str, str], str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "activities", tuple(self.activities))
        object.__setattr__(self, "relations", dict(self.relations))

    def relation(self, a: str, b: str) -> str:
        return self.relations[(a, b)]


def build_footprint(dfg: Dfg) -> Footprint:
    """Derive causal/parallel/unrelated relations from the DFG."""
    activities = tuple(sorted(dfg.activities))
    follows = set(dfg.edge_counts)
    relations: dict[tuple[str, str], str] = {}
    for a in activities:
        for b in activities:
            forward = (a, b) in follows
            backward = (b, a) in follows
            if forward and backward:
                relations[(a, b)] = PARALLEL
            elif forward:
                relations[(a, b)] = CAUSAL
            elif backward:
                relations[(a, b)] = REVERSE
            else:
                relations[(a, b)] = UNRELATED
    return Footprint(activities, relations)


def _maximal_pairs(
    footprint: Footprint,
) -> list[tuple[frozenset[str], frozenset[str]]]:
    """All maximal (A, B) pairs with A x B causal and A, B internally unrelated.

    Pairs are grown one activity at a time from causal seed pairs; any valid
    pair is reachable this way because validity is closed under taking
    non-empty subsets.
    """
    rel = footprint.relation
    acts = footprint.activities

    def self_unrelated(x: str) -> bool:
        return rel(x, x) == UNRELATED

    seeds = [
        (frozenset([a]), frozenset([b]))
        for a in acts
        for b in acts
        if rel(a, b) == CAUSAL and self_unrelated(a) and self_unrelated(b)
    ]
    seen = set(seeds)
    queue = deque(seeds)
    while queue:
        left, right = queue.popleft()
        for x in acts:
            if (
                x not in left
                and self_unrelated(x)
                and all(rel(x, a) == UNRELATED for a in left)
                and all(rel(x, b) == CAUSAL for b in right)
            ):
                grown = (left | {x}, right)
                if grown not in seen:
                    seen.add(grown)
                    queue.append(grown)
            if (
                x not in right
                and self_unrelated(x)
                and all(rel(x, b) == UNRELATED for b in right)
                and all(rel(a, x) == CAUSAL for a in left)
            ):
                grown = (left, right | {x})
                if grown not in seen:
                    seen.add(grown)
                    queue.append(grown)

    maximal = [
        (left, right)
        for left, right in seen
        if not any(
            (left, right) != (bigger_l, bigger_r)
            and left <= bigger_l
            and right <= bigger_r
            for bigger_l, bigger_r in seen
        )
    ]
    maximal.sort(key=lambda pair: (sorted(pair[0]), sorted(pair[1])))
    return maximal


def _pair_place_id(left: frozenset[str], right: frozenset[str]) -> str:
    return "p_{}__{}".format(".".join(sorted(left)), ".".join(sorted(right)))


def discover_alpha(log: EventLog) -> PetriNet:
    """Mine a workflow net with the classic Alpha algorithm.

    One place is created per maximal causal pair, plus a source place wired
    to every trace-start activity and a sink place fed by every trace-end
    activity. Transition ids are `t_<activity>`, place ids are derived from
    the sorted pair members, so identical logs yield identical nets.

    Raises:
        NotAWorkflowNetError: when the mined structure is degenerate (for
            example on logs with short loops the Alpha miner cannot express).
    """
    dfg = build_dfg(log)
    footprint = build_footprint(dfg)
    pairs = _maximal_pairs(footprint)

    transitions = {f"t_{a}": a for a in footprint.activities}
    places = {"source", "sink"}
    arcs: set[tuple[str, str]] = set()
    for left, right in pairs:
        place = _pair_place_id(left, right)
        places.add(place)
        for a in left:
            arcs.add((f"t_{a}", place))
        for b in right:
            arcs.add((place, f"t_{b}"))
    for a in dfg.start_counts:
        arcs.add(("source", f"t_{a}"))
    for a in dfg.end_counts:
        arcs.add((f"t_{a}", "sink"))

    try:
        return PetriNet(
            places=frozenset(places),
            transitions=transitions,
            arcs=frozenset(arcs),
            source="source",
            sink="sink",
        )
    except NotAWorkflowNetError as exc:
        raise NotAWorkflowNetError(
            f"discovered net is degenerate for this log: {exc}"
        ) from exc


def max_trace_length(log: EventLog) -> int:
    """Maximum number of complete events over all traces."""
    if not log.traces:
        raise InsufficientDataError("empty log: nothing to mine")
    return max(len(trace.activities()) for trace in log.traces)
