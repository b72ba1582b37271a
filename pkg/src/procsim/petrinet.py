"""Workflow Petri net structure, token-game semantics, and PNML I/O.

Nets are ordinary (all arc weights 1) labeled Petri nets restricted to the
workflow shape: one source place without inputs, one sink place without
outputs, and every node on some path from source to sink. Markings are
general token multisets, so AND-splits replay correctly without a safety
assumption.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    MarkingError,
    NotAWorkflowNetError,
    NotEnabledError,
    PnmlError,
)

PNML_NAMESPACE = "http://www.pnml.org/version-2009/grammar/pnml"
PTNET_TYPE = "http://www.pnml.org/version-2009/grammar/ptnet"


class Marking:
    """Immutable multiset of tokens over place ids.

    Zero counts are dropped on construction; negative counts are rejected.
    """

    __slots__ = ("_counts",)

    def __init__(self, counts: Mapping[str, int] | None = None) -> None:
        kept: dict[str, int] = {}
        for place, number in (counts or {}).items():
            if number < 0:
                raise MarkingError(
                    f"negative token count {number} for place {place!r}"
                )
            if number > 0:
                kept[place] = number
        object.__setattr__(self, "_counts", kept)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Marking is immutable")

    def count(self, place: str) -> int:
        return self._counts.get(place, 0)

    def places(self) -> frozenset[str]:
        return frozenset(self._counts)

    def items(self) -> Iterable[tuple[str, int]]:
        return self._counts.items()

    def total(self) -> int:
        return sum(self._counts.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Marking):
            return NotImplemented
        return self._counts == other._counts

    def __hash__(self) -> int:
        return hash(frozenset(self._counts.items()))

    def __bool__(self) -> bool:
        return bool(self._counts)

    def __repr__(self) -> str:
        inner = ", ".join(f"{p!r}: {n}" for p, n in sorted(self._counts.items()))
        return "Marking({" + inner + "})"


@dataclass(frozen=True)
class PetriNet:
    """A labeled workflow net.

    transitions maps transition id to its activity label; a None label
    marks a silent transition. Arcs run between places and transitions
    only, in either direction.
    """

    places: frozenset[str]
    transitions: Mapping[str, str | None]
    arcs: frozenset[tuple[str, str]]
    source: str
    sink: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "places", frozenset(self.places))
        object.__setattr__(self, "transitions", dict(self.transitions))
        object.__setattr__(
            self, "arcs", frozenset((str(a), str(b)) for a, b in self.arcs)
        )
        self._validate()

    def _validate(self) -> None:
        overlap = self.places & self.transitions.keys()
        if overlap:
            raise NotAWorkflowNetError(
                f"place and transition ids overlap: {sorted(overlap)}"
            )
        if self.source not in self.places:
            raise NotAWorkflowNetError(f"source {self.source!r} is not a place")
        if self.sink not in self.places:
            raise NotAWorkflowNetError(f"sink {self.sink!r} is not a place")
        for src, tgt in self.arcs:
            place_to_transition = src in self.places and tgt in self.transitions
            transition_to_place = src in self.transitions and tgt in self.places
            if not (place_to_transition or transition_to_place):
                raise NotAWorkflowNetError(
                    f"arc {src!r}->{tgt!r} must connect a place and a transition"
                )
            if tgt == self.source:
                raise NotAWorkflowNetError(
                    f"source place must have no incoming arcs, found {src!r}"
                )
            if src == self.sink:
                raise NotAWorkflowNetError(
                    f"sink place must have no outgoing arcs, found arc to {tgt!r}"
                )
        nodes = self.places | self.transitions.keys()
        forward = self._reach(self.source, forward=True)
        backward = self._reach(self.sink, forward=False)
        stranded = nodes - (forward & backward)
        if stranded:
            raise NotAWorkflowNetError(
                f"nodes not on a source-to-sink path: {sorted(stranded)}"
            )

    def _reach(self, start: str, forward: bool) -> set[str]:
        step: dict[str, list[str]] = {}
        for src, tgt in self.arcs:
            a, b = (src, tgt) if forward else (tgt, src)
            step.setdefault(a, []).append(b)
        seen = {start}
        frontier = deque([start])
        while frontier:
            node = frontier.popleft()
            for nxt in step.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen

    @cached_property
    def preset(self) -> dict[str, tuple[str, ...]]:
        """Input places of each transition, in a stable order."""
        pre: dict[str, list[str]] = {t: [] for t in self.transitions}
        for src, tgt in sorted(self.arcs):
            if tgt in self.transitions:
                pre[tgt].append(src)
        return {t: tuple(v) for t, v in pre.items()}

    @cached_property
    def postset(self) -> dict[str, tuple[str, ...]]:
        """Output places of each transition, in a stable order."""
        post: dict[str, list[str]] = {t: [] for t in self.transitions}
        for src, tgt in sorted(self.arcs):
            if src in self.transitions:
                post[src].append(tgt)
        return {t: tuple(v) for t, v in post.items()}

    def label(self, transition: str) -> str | None:
        return self.transitions[transition]


def _check_marking(net: PetriNet, marking: Marking) -> None:
    unknown = marking.places() - net.places
    if unknown:
        raise MarkingError(f"marking references unknown places: {sorted(unknown)}")


def enabled(net: PetriNet, marking: Marking) -> frozenset[str]:
    """Transitions whose every input place holds at least one token."""
    _check_marking(net, marking)
    return frozenset(
        t
        for t in net.transitions
        if all(marking.count(p) >= 1 for p in net.preset[t])
    )


def fire(net: PetriNet, marking: Marking, transition: str) -> Marking:
    """Fire a transition: consume one token per input, produce one per output.

    Raises:
        NotEnabledError: if the transition is unknown or not enabled.
    """
    if transition not in net.transitions:
        raise NotEnabledError(f"unknown transition {transition!r}")
    _check_marking(net, marking)
    counts = dict(marking.items())
    for place in net.preset[transition]:
        if counts.get(place, 0) < 1:
            raise NotEnabledError(
                f"transition {transition!r} is not enabled in {marking}"
            )
        counts[place] -= 1
    for place in net.postset[transition]:
        counts[place] = counts.get(place, 0) + 1
    return Marking(counts)


def is_final(net: PetriNet, marking: Marking) -> bool:
    """True iff the marking is exactly one token on the sink place."""
    return marking == Marking({net.sink: 1})


def can_replay(net: PetriNet, activities: Sequence[str]) -> bool:
    """Check whether an activity sequence is a firing sequence of the net.

    Searches the token game from {source: 1} to {sink: 1}, consuming the
    given labels in order; silent transitions may fire anywhere in between.
    """
    by_label: dict[str | None, list[str]] = {}
    for t in sorted(net.transitions):
        by_label.setdefault(net.transitions[t], []).append(t)

    start = (Marking({net.source: 1}), 0)
    seen = {start}
    frontier = deque([start])
    while frontier:
        marking, index = frontier.popleft()
        if index == len(activities) and is_final(net, marking):
            return True
        candidates = list(by_label.get(None, ()))
        if index < len(activities):
            candidates.extend(by_label.get(activities[index], ()))
        for transition in candidates:
            if not all(marking.count(p) >= 1 for p in net.preset[transition]):
                continue
            nxt = (
                fire(net, marking, transition),
                index if net.transitions[transition] is None else index + 1,
            )
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
                if len(seen) > 100_000:
                    raise RuntimeError("replay state space too large")
    return False


def export_pnml(net: PetriNet) -> str:
    """Serialize a net as a PNML (ptnet) document.

    Node ids and labels are written verbatim, so import_pnml(export_pnml(n))
    reconstructs an equal net. Graphics are omitted; the source place gets
    an initial marking of one token for interoperability.
    """
    root = ET.Element("pnml", {"xmlns": PNML_NAMESPACE})
    net_el = ET.SubElement(root, "net", {"id": "net1", "type": PTNET_TYPE})
    page = ET.SubElement(net_el, "page", {"id": "page1"})
    for place in sorted(net.places):
        place_el = ET.SubElement(page, "place", {"id": place})
        name = ET.SubElement(place_el, "name")
        ET.SubElement(name, "text").text = place
        if place == net.source:
            marking_el = ET.SubElement(place_el, "initialMarking")
            ET.SubElement(marking_el, "text").text = "1"
    for transition in sorted(net.transitions):
        transition_el = ET.SubElement(page, "transition", {"id": transition})
        label = net.transitions[transition]
        if label is not None:
            name = ET.SubElement(transition_el, "name")
            ET.SubElement(name, "text").text = label
    for index, (src, tgt) in enumerate(sorted(net.arcs)):
        ET.SubElement(
            page, "arc", {"id": f"arc{index}", "source": src, "target": tgt}
        )
    ET.indent(root)
    body = ET.tostring(root, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


def _local(tag: str) -> str:
    return tag.rpartition("}")[2]


def import_pnml(source: str | bytes) -> PetriNet:
    """Parse a PNML document into a PetriNet.

    Accepts exactly one net (one page allowed, nested elements tolerated)
    and ignores graphics and tool-specific annotations. A transition with
    no name text is silent. The source and sink are inferred structurally
    as the unique place without incoming respectively outgoing arcs.

    Raises:
        PnmlError: on malformed XML or a document without exactly one net.
        NotAWorkflowNetError: if source or sink cannot be inferred uniquely,
            or the net violates the workflow shape.
    """
    try:
        root = ET.fromstring(source)
    except ET.ParseError as exc:
        raise PnmlError(f"malformed PNML: {exc}") from None

    nets = [el for el in root.iter() if _local(el.tag) == "net"]
    if len(nets) != 1:
        raise PnmlError(f"expected exactly one net, found {len(nets)}")
    net_el = nets[0]

    places: set[str] = set()
    transitions: dict[str, str | None] = {}
    arcs: set[tuple[str, str]] = set()
    for el in net_el.iter():
        kind = _local(el.tag)
        if kind == "place":
            place_id = el.get("id")
            if place_id is None:
                raise PnmlError("place without id")
            if place_id in places:
                raise PnmlError(f"duplicate place id {place_id!r}")
            places.add(place_id)
        elif kind == "transition":
            transition_id = el.get("id")
            if transition_id is None:
                raise PnmlError("transition without id")
            if transition_id in transitions:
                raise PnmlError(f"duplicate transition id {transition_id!r}")
            transitions[transition_id] = _transition_label(el)
        elif kind == "arc":
            src, tgt = el.get("source"), el.get("target")
            if src is None or tgt is None:
                raise PnmlError("arc without source or target")
            arcs.add((src, tgt))

    sources = sorted(p for p in places if p not in {t for _, t in arcs})
    sinks = sorted(p for p in places if p not in {s for s, _ in arcs})
    if len(sources) != 1:
        raise NotAWorkflowNetError(
            f"expected one source place, candidates: {sources}"
        )
    if len(sinks) != 1:
        raise NotAWorkflowNetError(f"expected one sink place, candidates: {sinks}")
    return PetriNet(
        places=frozenset(places),
        transitions=transitions,
        arcs=frozenset(arcs),
        source=sources[0],
        sink=sinks[0],
    )


def _transition_label(el: ET.Element) -> str | None:
    for child in el:
        if _local(child.tag) != "name":
            continue
        for sub in child.iter():
            if _local(sub.tag) == "text":
                text = (sub.text or "").strip()
                return text or None
    return None
