"""Pullbacks of port automata and the constructions around them.

The pullback of a cospan ``A1 -> A0 <- A2`` joins ``A1`` and ``A2``
along the shared interface ``A0``: states are the pairs that agree in
``A0``, port names are glued by a pushout of name sets, and two steps
synchronise when they agree on every port both sides can see.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .automaton import (
    PortAutMorphism,
    PortAutomaton,
    compose_morphisms,
    render_state,
    terminal_morphism,
    validate_morphism,
)
from .errors import InvalidInputError, MismatchError, NonCommutingError


@dataclass(frozen=True)
class SetPushout:
    """Pushout of finite sets ``L <- B -> R`` with chosen representatives.

    ``left`` and ``right`` are the injections into ``elements``.
    """

    elements: frozenset
    left: dict
    right: dict

    __hash__ = None


def set_pushout(base, left, right, f_left: Mapping, f_right: Mapping) -> SetPushout:
    """Glue ``left`` and ``right`` along ``base``.

    Each class of the quotiented disjoint union is named by its bare
    element text when all members share that text and no other class
    claims the same text; otherwise by its least qualified name
    ``"L:x"``/``"R:x"``.
    """
    parent = {}
    members = [("L", x) for x in sorted(left)] + [("R", y) for y in sorted(right)]
    for m in members:
        parent[m] = m

    def find(m):
        while parent[m] != m:
            parent[m] = parent[parent[m]]
            m = parent[m]
        return m

    for b in sorted(base):
        x, y = find(("L", f_left[b])), find(("R", f_right[b]))
        if x != y:
            parent[max(x, y)] = min(x, y)

    classes = {}
    for m in members:
        classes.setdefault(find(m), []).append(m)

    qualified = {root: min(f"{side}:{x}" for side, x in ms) for root, ms in classes.items()}
    bare = {}
    for root, ms in classes.items():
        texts = {x for _, x in ms}
        if len(texts) == 1:
            bare[root] = next(iter(texts))
    claims = {}
    for root, text in bare.items():
        claims.setdefault(text, []).append(root)
    taken_qualified = {
        qualified[root] for root in classes if root not in bare or len(claims[bare[root]]) > 1
    }
    rep = {}
    for root in classes:
        text = bare.get(root)
        if text is not None and len(claims[text]) == 1 and text not in taken_qualified:
            rep[root] = text
        else:
            rep[root] = qualified[root]
    if len(set(rep.values())) != len(rep):
        rep = dict(qualified)

    return SetPushout(
        frozenset(rep.values()),
        {x: rep[find(("L", x))] for x in left},
        {y: rep[find(("R", y))] for y in right},
    )


@dataclass(frozen=True)
class Cospan:
    left: PortAutMorphism
    right: PortAutMorphism

    __hash__ = None

    def validate(self) -> list[str]:
        problems = []
        if self.left.target != self.right.target:
            problems.append("cospan legs have different targets")
        problems += [f"left leg: {p}" for p in validate_morphism(self.left)]
        problems += [f"right leg: {p}" for p in validate_morphism(self.right)]
        return problems


@dataclass(frozen=True)
class PullbackResult:
    apex: PortAutomaton
    proj_left: PortAutMorphism
    proj_right: PortAutMorphism
    cospan: Cospan
    names: SetPushout

    __hash__ = None


def pullback(cospan: Cospan) -> PullbackResult:
    """Construct ``A1 x_A0 A2`` with its two projections.

    Every pair of states with equal interface image is kept, reachable
    or not.  Steps ``q1 -S1-> p1`` and ``q2 -S2-> p2`` synchronise when
    ``g1(S1) & g2(N2) == g2(S2) & g1(N1)`` and the target pair is again
    a state of the apex; the joint label is ``g1(S1) | g2(S2)``.
    """
    problems = cospan.validate()
    if problems:
        raise InvalidInputError("invalid cospan", problems)
    f1, f2 = cospan.left, cospan.right
    a1, a2, a0 = f1.source, f2.source, f1.target

    names = set_pushout(a0.ports, a1.ports, a2.ports, f1.port_map, f2.port_map)
    g1n, g2n = names.left, names.right
    shared1 = frozenset(g1n.values())
    shared2 = frozenset(g2n.values())

    over = {}
    for q2 in a2.states:
        over.setdefault(f2.state_map[q2], []).append(q2)
    states = {(q1, q2) for q1 in a1.states for q2 in over.get(f1.state_map[q1], ())}

    transitions = set()
    for q1, q2 in states:
        for t1 in a1.outgoing[q1]:
            s1 = frozenset(g1n[n] for n in t1.label)
            for t2 in a2.outgoing[q2]:
                if f1.state_map[t1.target] != f2.state_map[t2.target]:
                    continue
                s2 = frozenset(g2n[n] for n in t2.label)
                if s1 & shared2 == s2 & shared1:
                    transitions.add(((q1, q2), s1 | s2, (t1.target, t2.target)))

    apex = PortAutomaton(states, names.elements, transitions, (a1.initial, a2.initial))
    proj_left = PortAutMorphism(apex, a1, {s: s[0] for s in states}, dict(g1n))
    proj_right = PortAutMorphism(apex, a2, {s: s[1] for s in states}, dict(g2n))
    return PullbackResult(apex, proj_left, proj_right, cospan, names)


def product(a: PortAutomaton, b: PortAutomaton) -> PullbackResult:
    """Pullback over the final automaton: the unconstrained parallel composition."""
    return pullback(Cospan(terminal_morphism(a), terminal_morphism(b)))


def _same_arrow(f: PortAutMorphism, g: PortAutMorphism) -> bool:
    return f.state_map == g.state_map and f.port_map == g.port_map


def mediating_morphism(pb: PullbackResult, h1: PortAutMorphism, h2: PortAutMorphism) -> PortAutMorphism:
    """The unique ``h: X -> apex`` with ``proj_left . h = h1`` and ``proj_right . h = h2``."""
    f1, f2 = pb.cospan.left, pb.cospan.right
    if h1.source != h2.source:
        raise MismatchError("h1 and h2 must share their source")
    if h1.target != f1.source or h2.target != f2.source:
        raise MismatchError("h1/h2 do not land in the cospan's legs")
    if not _same_arrow(compose_morphisms(h1, f1), compose_morphisms(h2, f2)):
        raise NonCommutingError("f1 . h1 != f2 . h2")
    x = h1.source
    state_map = {q: (h1.state_map[q], h2.state_map[q]) for q in x.states}
    port_map = {}
    for side, inj, h in (("left", pb.names.left, h1), ("right", pb.names.right, h2)):
        for n, rep in inj.items():
            value = h.port_map[n]
            if port_map.setdefault(rep, value) != value:
                raise NonCommutingError(f"port {rep} has no consistent image ({side} leg)")
    return PortAutMorphism(x, pb.apex, state_map, port_map)


def induced_pullback_morphism(
    pb_a: PullbackResult,
    pb_b: PullbackResult,
    h0: PortAutMorphism,
    h1: PortAutMorphism,
    h2: PortAutMorphism,
) -> PortAutMorphism:
    """Morphism between pullback apexes induced by a map of cospans.

    Requires ``h0 . f1 = g1 . h1`` and ``h0 . f2 = g2 . h2`` where
    ``f`` are the legs of ``pb_a``'s cospan and ``g`` those of ``pb_b``.
    """
    fa1, fa2 = pb_a.cospan.left, pb_a.cospan.right
    gb1, gb2 = pb_b.cospan.left, pb_b.cospan.right
    if not _same_arrow(compose_morphisms(fa1, h0), compose_morphisms(h1, gb1)):
        raise NonCommutingError("h0 . f1 != g1 . h1")
    if not _same_arrow(compose_morphisms(fa2, h0), compose_morphisms(h2, gb2)):
        raise NonCommutingError("h0 . f2 != g2 . h2")
    return mediating_morphism(
        pb_b, compose_morphisms(pb_a.proj_left, h1), compose_morphisms(pb_a.proj_right, h2)
    )


def describe_pullback(pb: PullbackResult, apex: Optional[PortAutomaton] = None) -> str:
    """One-line summary; ``apex`` overrides the full apex, e.g. with its reachable part."""
    apex = pb.apex if apex is None else apex
    return (
        f"pullback: {len(apex.states)} states, {len(apex.transitions)} transitions, "
        f"initial {render_state(apex.initial)}, ports {sorted(apex.ports)}"
    )

