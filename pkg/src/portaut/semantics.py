"""Port automata semantics of connectors, on objects and on morphisms.

``Sem(C)`` runs all primitives of ``C`` in lock step: a global step picks
one local step per primitive such that any two primitives agree on the
nodes they share (``S_j & N_k == S_k & N_j``), and is labelled by the
union of the local labels.  A connector morphism ``C1 -> C2`` yields a
morphism ``Sem(C2) -> Sem(C1)`` in the opposite direction.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from math import prod
from typing import Optional

from .automaton import PortAutMorphism, PortAutomaton, reachable, validate_morphism
from .compose import Cospan, PullbackResult, mediating_morphism, pullback
from .connector import (
    Connector,
    ConnectorMorphism,
    ConnectorSpan,
    PushoutResult,
    pushout,
    validate_connector,
    validate_connector_morphism,
)
from .errors import InvalidInputError, SizeGuardError

DEFAULT_STATE_CAP = 10**6
STATE_CAP_ENV = "PORTAUT_STATE_CAP"


def state_cap(cap: Optional[int] = None) -> int:
    if cap is not None:
        return cap
    return int(os.environ.get(STATE_CAP_ENV, DEFAULT_STATE_CAP))


@dataclass(frozen=True)
class SemanticsResult:
    automaton: PortAutomaton
    primitive_order: tuple

    __hash__ = None


def _global_steps(prims, state):
    """Yield ``(label, target tuple)`` for every compatible choice of local steps."""
    n = len(prims)
    chosen = []

    def go(j):
        if j == n:
            label = frozenset().union(*(t.label for t in chosen))
            yield label, tuple(t.target for t in chosen)
            return
        a = prims[j]
        for t in a.outgoing[state[j]]:
            if all(t.label & prims[k].ports == chosen[k].label & a.ports for k in range(j)):
                chosen.append(t)
                yield from go(j + 1)
                chosen.pop()

    yield from go(0)


def sem_connector(c: Connector, prune: bool = False, cap: Optional[int] = None) -> SemanticsResult:
    """Compute ``Sem(c)``; with ``prune`` only states reachable from the initial tuple are built."""
    problems = validate_connector(c)
    if problems:
        raise InvalidInputError("invalid connector", problems)
    limit = state_cap(cap)
    order = tuple(c.primitive_order())
    prims = [c.primitives[p] for p in order]
    initial = tuple(a.initial for a in prims)

    if prune:
        states = {initial}
        frontier = [initial]
        transitions = set()
        while frontier:
            q = frontier.pop()
            for label, p in _global_steps(prims, q):
                transitions.add((q, label, p))
                if p not in states:
                    states.add(p)
                    if len(states) > limit:
                        raise SizeGuardError(
                            f"reachable state space exceeds the cap of {limit}", len(states)
                        )
                    frontier.append(p)
    else:
        estimate = prod(len(a.states) for a in prims)
        if estimate > limit:
            raise SizeGuardError(
                f"semantics would have {estimate} states, above the cap of {limit}", estimate
            )
        states = _tuples(prims)
        transitions = {(q, label, p) for q in states for label, p in _global_steps(prims, q)}
    return SemanticsResult(PortAutomaton(states, c.nodes, transitions, initial), order)


def _tuples(prims):
    out = [()]
    for a in prims:
        out = [t + (q,) for t in out for q in a.sorted_states()]
    return set(out)


def _sem_morphism(f: ConnectorMorphism, sem_source: SemanticsResult, sem_target: SemanticsResult):
    position = {pid: i for i, pid in enumerate(sem_target.primitive_order)}
    picks = [(position[f.prim_map[pid]], f.witnesses[pid]) for pid in sem_source.primitive_order]
    state_map = {
        q: tuple(w.state_map[q[i]] for i, w in picks) for q in sem_target.automaton.states
    }
    return PortAutMorphism(sem_target.automaton, sem_source.automaton, state_map, f.node_map)


def sem_morphism(f: ConnectorMorphism, cap: Optional[int] = None) -> PortAutMorphism:
    """``Sem(f): Sem(f.target) -> Sem(f.source)``.

    A target state tuple is projected onto the coordinates of the
    primitives hit by ``f`` and pushed through the witness state maps, in
    the source's primitive order.  The port map is ``f``'s node map.
    """
    problems = validate_connector_morphism(f)
    if problems:
        raise InvalidInputError("invalid connector morphism", problems)
    return _sem_morphism(f, sem_connector(f.source, cap=cap), sem_connector(f.target, cap=cap))


@dataclass(frozen=True)
class CompositionalityReport:
    passed: bool
    lhs: PortAutomaton
    rhs: Optional[PullbackResult]
    pushout: PushoutResult
    iso: Optional[tuple]
    problems: list

    __hash__ = None

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def check_compositionality(span: ConnectorSpan, cap: Optional[int] = None) -> CompositionalityReport:
    """Compare ``Sem(C1 +_C0 C2)`` with ``Sem(C1) x_Sem(C0) Sem(C2)``.

    Both sides are built in full (no pruning).  The comparison map is
    the mediating morphism of the cone ``(Sem(g1), Sem(g2))`` into the
    pullback, i.e. the regrouping of state tuples; it passes when that
    map and its inverse are both valid morphisms.  If a leg's semantic
    image is not a valid morphism there is no cospan to pull back; the
    report then fails with ``rhs`` set to ``None``.
    """
    po = pushout(span)
    s0 = sem_connector(span.left.source, cap=cap)
    s1 = sem_connector(span.left.target, cap=cap)
    s2 = sem_connector(span.right.target, cap=cap)
    s3 = sem_connector(po.connector, cap=cap)

    sem_f1 = _sem_morphism(span.left, s0, s1)
    sem_f2 = _sem_morphism(span.right, s0, s2)
    problems = [f"Sem(left leg): {p}" for p in validate_morphism(sem_f1)]
    problems += [f"Sem(right leg): {p}" for p in validate_morphism(sem_f2)]
    lhs = s3.automaton
    if problems:
        return CompositionalityReport(False, lhs, None, po, None, problems)
    rhs = pullback(Cospan(sem_f1, sem_f2))
    sem_g1 = _sem_morphism(po.left, s1, s3)
    sem_g2 = _sem_morphism(po.right, s2, s3)
    phi = mediating_morphism(rhs, sem_g1, sem_g2)

    target = rhs.apex
    if len(set(phi.state_map.values())) != len(lhs.states) or len(lhs.states) != len(target.states):
        problems.append(
            f"state regrouping is not a bijection ({len(lhs.states)} vs {len(target.states)} states)"
        )
    if len(set(phi.port_map.values())) != len(target.ports) or len(lhs.ports) != len(target.ports):
        problems.append("port names are not in bijection")
    iso = None
    if not problems:
        inverse = PortAutMorphism(
            target,
            lhs,
            {v: k for k, v in phi.state_map.items()},
            {v: k for k, v in phi.port_map.items()},
        )
        problems += [f"regrouping: {p}" for p in validate_morphism(phi)]
        problems += [f"inverse regrouping: {p}" for p in validate_morphism(inverse)]
        if not problems:
            iso = (phi, inverse)
    return CompositionalityReport(not problems, lhs, rhs, po, iso, problems)


__all__ = [
    "CompositionalityReport",
    "SemanticsResult",
    "check_compositionality",
    "reachable",
    "sem_connector",
    "sem_morphism",
    "state_cap",
]
