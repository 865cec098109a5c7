"""Petri nets as connectors: places become primitives, transitions become nodes.

A place automaton has the markings ``0..capacity`` as states.  Any set
of adjacent transitions may fire together from marking ``m`` when the
place can pay for all of them and the final marking stays within
capacity; only the final marking is checked, never an intermediate one.

:func:`marking_graph` explores the global markings of the net directly
and serves as an oracle for the connector encoding.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

from .automaton import PortAutomaton
from .connector import Connector
from .errors import InvalidInputError, SizeGuardError

MARKING_CAP = 10**6


@dataclass(frozen=True)
class PetriNet:
    """Places with weighted arcs.

    ``inputs[p]`` maps each transition that puts tokens *into* ``p`` to
    its arc weight, ``outputs[p]`` each transition that takes tokens
    *from* ``p``.
    """

    places: frozenset
    transitions: frozenset
    inputs: Mapping[str, Mapping[str, int]] = field(default_factory=dict)
    outputs: Mapping[str, Mapping[str, int]] = field(default_factory=dict)
    initial: Mapping[str, int] = field(default_factory=dict)
    capacity: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        places = frozenset(self.places)
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        for name in ("inputs", "outputs"):
            arcs = getattr(self, name)
            object.__setattr__(self, name, {p: dict(arcs.get(p, {})) for p in places})
        object.__setattr__(self, "initial", {p: self.initial.get(p, 0) for p in places})
        object.__setattr__(self, "capacity", {p: self.capacity.get(p, 1) for p in places})

    __hash__ = None

    def adjacent(self, p) -> frozenset:
        return frozenset(self.inputs[p]) | frozenset(self.outputs[p])


def validate_net(net: PetriNet) -> list[str]:
    problems = []
    for p in sorted(net.places):
        cap = net.capacity[p]
        if not isinstance(cap, int) or cap < 1:
            problems.append(f"place {p}: capacity must be a positive integer, got {cap!r}")
        m = net.initial[p]
        if not isinstance(m, int) or m < 0 or m > cap:
            problems.append(f"place {p}: initial marking {m!r} outside 0..{cap}")
        for kind, arcs in (("in", net.inputs[p]), ("out", net.outputs[p])):
            for t, w in sorted(arcs.items()):
                if t not in net.transitions:
                    problems.append(f"place {p}: {kind}-arc to undeclared transition {t}")
                if not isinstance(w, int) or w < 1:
                    problems.append(f"place {p}: {kind}-arc weight for {t} must be positive, got {w!r}")
    return problems


def _subsets(items):
    items = sorted(items)
    for r in range(len(items) + 1):
        yield from combinations(items, r)


def encode_place(net: PetriNet, p) -> PortAutomaton:
    if p not in net.places:
        raise InvalidInputError(f"undeclared place {p}")
    cap = net.capacity[p]
    take, give = net.outputs[p], net.inputs[p]
    ports = net.adjacent(p)
    transitions = []
    for fired in _subsets(ports):
        cost = sum(take.get(t, 0) for t in fired)
        gain = sum(give.get(t, 0) for t in fired)
        for m in range(cap + 1):
            after = m - cost + gain
            if m - cost >= 0 and after <= cap:
                transitions.append((m, fired, after))
    return PortAutomaton(range(cap + 1), ports, transitions, net.initial[p])


def encode_net(net: PetriNet) -> Connector:
    problems = validate_net(net)
    if problems:
        raise InvalidInputError("invalid Petri net", problems)
    return Connector({p: encode_place(net, p) for p in net.places}, net.transitions)


def marking_graph(net: PetriNet, cap: int = MARKING_CAP) -> PortAutomaton:
    """Reachable global markings with concurrent-step transitions.

    Markings are tuples in sorted place order.  From each marking every
    set of transitions that every place can jointly pay for and absorb is
    a step, the empty set included.
    """
    problems = validate_net(net)
    if problems:
        raise InvalidInputError("invalid Petri net", problems)
    places = sorted(net.places)
    steps = []
    for fired in _subsets(net.transitions):
        cost = tuple(sum(net.outputs[p].get(t, 0) for t in fired) for p in places)
        gain = tuple(sum(net.inputs[p].get(t, 0) for t in fired) for p in places)
        steps.append((frozenset(fired), cost, gain))
    caps = tuple(net.capacity[p] for p in places)

    start = tuple(net.initial[p] for p in places)
    seen = {start}
    queue = deque([start])
    transitions = set()
    while queue:
        m = queue.popleft()
        for fired, cost, gain in steps:
            after = []
            for mi, ci, gi, ki in zip(m, cost, gain, caps):
                if mi - ci < 0 or mi - ci + gi > ki:
                    break
                after.append(mi - ci + gi)
            else:
                after = tuple(after)
                transitions.add((m, fired, after))
                if after not in seen:
                    seen.add(after)
                    if len(seen) > cap:
                        raise SizeGuardError(f"more than {cap} reachable markings", len(seen))
                    queue.append(after)
    return PortAutomaton(seen, net.transitions, transitions, start)
