"""Seeded generators of small automata, morphisms, connectors and nets.

Every generator takes a :class:`random.Random` and builds its morphisms
by construction, so they are valid without searching.  Callers still
validate everything they receive.
"""
from __future__ import annotations

import random
from typing import Mapping, Optional

from .automaton import PortAutMorphism, PortAutomaton, compose_morphisms, terminal_morphism
from .compose import Cospan, pullback
from .connector import Connector, ConnectorMorphism, ConnectorSpan
from .petri import PetriNet

PORT_POOL = ("a", "b", "c", "d", "e")


def _subset(rng, items, lo=0, hi=None):
    items = sorted(items)
    hi = len(items) if hi is None else min(hi, len(items))
    k = rng.randint(min(lo, hi), hi)
    return frozenset(rng.sample(items, k))


def random_automaton(
    rng: random.Random,
    ports=None,
    max_states: int = 3,
    max_ports: int = 3,
    tau: float = 0.7,
    density: float = 0.35,
) -> PortAutomaton:
    """A small automaton; each state gets a tau loop with probability ``tau``."""
    if ports is None:
        ports = _subset(rng, PORT_POOL, 0, max_ports)
    ports = frozenset(ports)
    states = [f"s{i}" for i in range(rng.randint(1, max_states))]
    transitions = set()
    for q in states:
        if rng.random() < tau:
            transitions.add((q, frozenset(), q))
        for p in states:
            if rng.random() < density:
                transitions.add((q, _subset(rng, ports), p))
    return PortAutomaton(states, ports, transitions, states[0])


def random_morphism_into(
    rng: random.Random,
    target: PortAutomaton,
    port_map: Optional[Mapping[str, str]] = None,
    extra_ports=(),
    max_states: int = 3,
    keep: float = 0.6,
) -> PortAutMorphism:
    """A random automaton with a morphism into ``target``.

    ``port_map`` (target port -> source port) defaults to an injective
    renaming onto fresh names; ``extra_ports`` are private to the source.  Every
    source step is built above a target step, so the result validates.
    """
    if port_map is None:
        # injective: composites of morphisms that merge ports need not be morphisms
        names = [f"x{i}" for i in range(len(target.ports))]
        rng.shuffle(names)
        port_map = dict(zip(target.sorted_ports(), names))
    visible = frozenset(port_map.values())
    extra = frozenset(extra_ports) - visible
    ports = visible | extra
    states = [f"t{i}" for i in range(rng.randint(1, max_states))]
    targets = target.sorted_states()
    state_map = {states[0]: target.initial}
    for q in states[1:]:
        state_map[q] = rng.choice(targets)
    transitions = set()
    for q in states:
        for p in states:
            for t in target.outgoing[state_map[q]]:
                if t.target != state_map[p] or rng.random() > keep:
                    continue
                label = frozenset(port_map[n] for n in t.label) | _subset(rng, extra)
                transitions.add((q, label, p))
    source = PortAutomaton(states, ports, transitions, states[0])
    return PortAutMorphism(source, target, state_map, port_map)


def random_morphism_from(
    rng: random.Random,
    source: PortAutomaton,
    kept: Optional[Mapping[str, str]] = None,
    max_states: int = 3,
    extra: float = 0.2,
) -> PortAutMorphism:
    """A random coarsening of ``source`` with the morphism onto it.

    ``kept`` maps the source ports that stay visible to their names in
    the new automaton; it must be injective.
    """
    if kept is None:
        kept = {n: n for n in _subset(rng, source.ports)}
    inverse = {v: k for k, v in kept.items()}
    states = [f"u{i}" for i in range(rng.randint(1, max_states))]
    state_map = {source.initial: states[0]}
    for q in source.sorted_states():
        if q != source.initial:
            state_map[q] = rng.choice(states)
    transitions = {
        (state_map[t.source], frozenset(kept[n] for n in t.label if n in kept), state_map[t.target])
        for t in source.transitions
    }
    ports = frozenset(inverse)
    for q in states:
        for p in states:
            if rng.random() < extra:
                transitions.add((q, _subset(rng, ports), p))
    target = PortAutomaton(states, ports, transitions, states[0])
    return PortAutMorphism(source, target, state_map, inverse)


def random_cospan(rng: random.Random, max_states: int = 3, merge: bool = True) -> Cospan:
    """Two random automata over a common one.

    With ``merge`` the legs may send several interface ports to one name.
    """
    a0 = random_automaton(rng, max_states=max_states)
    left = random_morphism_into(
        rng, a0, port_map=_name_map(rng, a0.ports, "l", merge), extra_ports=_fresh(rng, "l")
    )
    right = random_morphism_into(
        rng, a0, port_map=_name_map(rng, a0.ports, "r", merge), extra_ports=_fresh(rng, "r")
    )
    return Cospan(left, right)


def _name_map(rng, ports, prefix, merge=True):
    # keep the interface name with probability 1/2, otherwise rename or merge
    out = {}
    for n in sorted(ports):
        roll = rng.random()
        if roll < 0.5:
            out[n] = n
        elif roll < 0.8 or not merge:
            out[n] = f"{prefix}{n}"
        else:
            out[n] = f"{prefix}m"
    return out


def _fresh(rng, prefix):
    return frozenset(f"{prefix}{i}" for i in range(rng.randint(0, 2)))


def random_square(rng: random.Random, pb, max_states: int = 3):
    """A random ``X`` with ``h1, h2`` commuting over the pullback's cospan."""
    h = random_morphism_into(rng, pb.apex, max_states=max_states)
    return compose_morphisms(h, pb.proj_left), compose_morphisms(h, pb.proj_right)


def random_cube(rng: random.Random, final_base: bool = False):
    """Two cospans with ``h0, h1, h2`` making the top and back faces commute.

    Returns ``(cospan_a, cospan_b, h0, h1, h2)``.  With ``final_base`` the
    lower cospan is a product cospan over the final automaton.  Port
    maps are injective throughout, since composites of port-merging
    morphisms can fail to be morphisms.
    """
    if final_base:
        cospan_a = random_cospan(rng, merge=False)
        h1 = random_morphism_from(rng, cospan_a.left.source)
        h2 = random_morphism_from(rng, cospan_a.right.source)
        b = Cospan(terminal_morphism(h1.target), terminal_morphism(h2.target))
        return cospan_a, b, terminal_morphism(cospan_a.left.target), h1, h2

    cospan_b = random_cospan(rng, max_states=2, merge=False)
    h0 = random_morphism_into(rng, cospan_b.left.target, max_states=2)
    legs, hs = [], []
    for leg in (cospan_b.left, cospan_b.right):
        corner = pullback(Cospan(h0, leg))
        k = random_morphism_into(rng, corner.apex, max_states=2)
        legs.append(compose_morphisms(k, corner.proj_left))
        hs.append(compose_morphisms(k, corner.proj_right))
    return Cospan(legs[0], legs[1]), cospan_b, h0, hs[0], hs[1]


def random_connector(
    rng: random.Random,
    max_prims: int = 3,
    max_states: int = 3,
    nodes=("n1", "n2", "n3", "n4"),
    prefix: str = "p",
    min_prims: int = 0,
) -> Connector:
    """A connector whose nodes are exactly the ports its primitives use."""
    prims = {}
    for i in range(rng.randint(min_prims, max_prims)):
        ports = _subset(rng, nodes, 1, 3)
        prims[f"{prefix}{i}"] = random_automaton(rng, ports=ports, max_states=max_states)
    used = set()
    for a in prims.values():
        used |= a.ports
    return Connector(prims, used)


def random_extension(
    rng: random.Random,
    base: Connector,
    tag: str,
    max_prims: int = 3,
    max_states: int = 3,
) -> ConnectorMorphism:
    """A monic connector morphism out of ``base``.

    Nodes are renamed injectively (sometimes keeping their names),
    primitives are refined by random simulations, and new primitives on
    old and fresh nodes are added up to ``max_prims`` in total.
    """
    node_map = {n: (n if rng.random() < 0.6 else f"{n}{tag}") for n in sorted(base.nodes)}
    fresh = [f"{tag}{i}" for i in range(rng.randint(0, 2))]
    prim_map, witnesses, prims = {}, {}, {}
    for pid in base.primitive_order():
        a0 = base.primitives[pid]
        new_id = pid if rng.random() < 0.6 else f"{pid}{tag}"
        w = random_morphism_into(
            rng,
            a0,
            port_map={n: node_map[n] for n in a0.ports},
            extra_ports=_subset(rng, fresh, 0, 1),
            max_states=max_states,
        )
        prim_map[pid] = new_id
        prims[new_id] = w.source
        witnesses[pid] = w
    pool = sorted(set(node_map.values()) | set(fresh))
    for i in range(rng.randint(0, max(0, max_prims - len(prims)))):
        ports = _subset(rng, pool, 1, 3)
        prims[f"{tag}p{i}"] = random_automaton(rng, ports=ports, max_states=max_states)
    nodes = set(node_map.values())
    for a in prims.values():
        nodes |= a.ports
    target = Connector(prims, nodes)
    # witnesses were built against the refined automata stored in prims
    return ConnectorMorphism(base, target, prim_map, node_map, witnesses)


def random_monic_span(rng: random.Random, max_prims: int = 3, max_states: int = 3) -> ConnectorSpan:
    c0 = random_connector(rng, max_prims=min(2, max_prims), max_states=max_states, prefix="k")
    return ConnectorSpan(
        random_extension(rng, c0, "L", max_prims, max_states),
        random_extension(rng, c0, "R", max_prims, max_states),
    )


def random_restriction(rng: random.Random, target: Connector, injective: bool = True) -> ConnectorMorphism:
    """A connector with a morphism into ``target``.

    Chosen target primitives are coarsened onto a subset of their ports;
    nodes keep their names and every node of the source is used.
    """
    ids = target.primitive_order()
    if injective:
        chosen = [p for p in ids if rng.random() < 0.7]
    else:
        chosen = [rng.choice(ids) for _ in range(rng.randint(0, len(ids)))] if ids else []
    prims, prim_map, witnesses = {}, {}, {}
    for i, pid in enumerate(chosen):
        b = target.primitives[pid]
        kept = {n: n for n in _subset(rng, b.ports)}
        w = random_morphism_from(rng, b, kept=kept, max_states=2)
        new_id = f"{pid}_{i}"
        prims[new_id] = w.target
        prim_map[new_id] = pid
        witnesses[new_id] = w
    nodes = set()
    for a in prims.values():
        nodes |= a.ports
    source = Connector(prims, nodes)
    return ConnectorMorphism(source, target, prim_map, {n: n for n in nodes}, witnesses)


def random_net(
    rng: random.Random, max_places: int = 4, max_transitions: int = 5, max_capacity: int = 2
) -> PetriNet:
    """A small net in which every transition touches at least one place."""
    places = [f"p{i}" for i in range(rng.randint(1, max_places))]
    transitions = [f"t{i}" for i in range(rng.randint(1, max_transitions))]
    inputs = {p: {} for p in places}
    outputs = {p: {} for p in places}
    capacity = {p: rng.randint(1, max_capacity) for p in places}
    for t in transitions:
        touched = False
        for p in places:
            roll = rng.random()
            if roll < 0.3:
                inputs[p][t] = rng.randint(1, min(2, capacity[p]))
                touched = True
            elif roll < 0.6:
                outputs[p][t] = rng.randint(1, min(2, capacity[p]))
                touched = True
        if not touched:
            p = rng.choice(places)
            side = inputs if rng.random() < 0.5 else outputs
            side[p][t] = 1
    initial = {p: rng.randint(0, capacity[p]) for p in places}
    return PetriNet(places, transitions, inputs, outputs, initial, capacity)
