"""Port automata, their morphisms, and morphism search.

A port automaton is a finite transition system whose labels are sets of
port names that fire together; the empty label is a silent (tau) step.
A morphism ``A1 -> A2`` maps states forward and port names backward and
acts as a simulation of ``A1`` by ``A2``.

States are arbitrary hashable values.  Plain strings are used for
hand-written automata, tuples for composites (pullbacks, connector
semantics) and integers for Petri place markings.  :func:`render_state`
gives the canonical text form used for ordering and output.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple, Optional

from .errors import MismatchError, SearchBudgetExceeded, UnknownStateError

State = Hashable

DEFAULT_BUDGET = 10**7


def render_state(state) -> str:
    if isinstance(state, tuple):
        return "(" + ",".join(render_state(s) for s in state) + ")"
    return str(state)


def state_key(state):
    return render_state(state)


def render_label(label) -> str:
    if not label:
        return "∅"
    return "{" + ",".join(sorted(label)) + "}"


class Transition(NamedTuple):
    source: State
    label: frozenset
    target: State

    def sort_key(self):
        return (state_key(self.source), sorted(self.label), state_key(self.target))


@dataclass(frozen=True)
class PortAutomaton:
    """A port automaton ``(states, ports, transitions, initial)``.

    Collections are normalised to frozensets on construction, so two
    automata are equal exactly when they are structurally identical.
    Construction does not validate; see :func:`validate_automaton`.
    """

    states: frozenset
    ports: frozenset
    transitions: frozenset
    initial: State

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "ports", frozenset(self.ports))
        object.__setattr__(
            self,
            "transitions",
            frozenset(Transition(s, frozenset(l), t) for s, l, t in self.transitions),
        )

    @cached_property
    def outgoing(self) -> dict:
        out = {q: [] for q in self.states}
        for t in sorted(self.transitions, key=Transition.sort_key):
            out.setdefault(t.source, []).append(t)
        return out

    @cached_property
    def incoming(self) -> dict:
        inc = {q: [] for q in self.states}
        for t in sorted(self.transitions, key=Transition.sort_key):
            inc.setdefault(t.target, []).append(t)
        return inc

    def sorted_states(self) -> list:
        return sorted(self.states, key=state_key)

    def sorted_ports(self) -> list:
        return sorted(self.ports)

    def sorted_transitions(self) -> list:
        return sorted(self.transitions, key=Transition.sort_key)

    def __repr__(self):
        return (
            f"PortAutomaton(states={len(self.states)}, ports={self.sorted_ports()}, "
            f"transitions={len(self.transitions)}, initial={render_state(self.initial)})"
        )


FINAL = PortAutomaton(states={"*"}, ports=(), transitions={("*", (), "*")}, initial="*")


@dataclass(frozen=True)
class PortAutMorphism:
    """A morphism ``source -> target``.

    ``state_map`` sends source states to target states; ``port_map``
    sends *target* ports to *source* ports.
    """

    source: PortAutomaton
    target: PortAutomaton
    state_map: Mapping = field(default_factory=dict)
    port_map: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "state_map", dict(self.state_map))
        object.__setattr__(self, "port_map", dict(self.port_map))

    __hash__ = None

    def __repr__(self):
        smap = {render_state(k): render_state(v) for k, v in self.state_map.items()}
        return f"PortAutMorphism(state_map={smap}, port_map={self.port_map})"


def validate_automaton(a: PortAutomaton) -> list[str]:
    """Return the list of invariant violations of ``a`` (empty when valid)."""
    problems = []
    if a.initial not in a.states:
        problems.append(f"initial not in states: {render_state(a.initial)}")
    for p in sorted(a.ports, key=str):
        if not isinstance(p, str) or not p:
            problems.append(f"port name must be a non-empty string: {p!r}")
    for t in a.sorted_transitions():
        where = f"{render_state(t.source)} -{render_label(t.label)}-> {render_state(t.target)}"
        if t.source not in a.states:
            problems.append(f"transition source not in states: {where}")
        if t.target not in a.states:
            problems.append(f"transition target not in states: {where}")
        extra = t.label - a.ports
        if extra:
            problems.append(f"label not subset of ports: {where} (unknown {sorted(extra)})")
    return problems


def _image(mapping, names):
    return frozenset(mapping[n] for n in names)


def validate_morphism(f: PortAutMorphism) -> list[str]:
    """Check totality, initial-state preservation and the simulation condition.

    For every source transition ``q -S1-> p`` some target transition
    ``f(q) -S2-> f(p)`` must satisfy ``f(N2) & S1 == f(S2)``, where the
    port map is applied to the target-side sets.
    """
    a1, a2 = f.source, f.target
    problems = []
    for q in a1.sorted_states():
        if q not in f.state_map:
            problems.append(f"state map undefined on {render_state(q)}")
        elif f.state_map[q] not in a2.states:
            problems.append(
                f"state map sends {render_state(q)} outside target: {render_state(f.state_map[q])}"
            )
    for n in a2.sorted_ports():
        if n not in f.port_map:
            problems.append(f"port map undefined on {n}")
        elif f.port_map[n] not in a1.ports:
            problems.append(f"port map sends {n} outside source ports: {f.port_map[n]}")
    extra_states = set(f.state_map) - a1.states
    if extra_states:
        problems.append(f"state map defined outside source: {sorted(map(render_state, extra_states))}")
    extra_ports = set(f.port_map) - a2.ports
    if extra_ports:
        problems.append(f"port map defined outside target: {sorted(extra_ports)}")
    if problems:
        return problems

    if f.state_map[a1.initial] != a2.initial:
        problems.append(
            f"initial state not preserved: {render_state(a1.initial)} -> "
            f"{render_state(f.state_map[a1.initial])}, expected {render_state(a2.initial)}"
        )
    visible = _image(f.port_map, a2.ports)
    for t in a1.sorted_transitions():
        required = visible & t.label
        fq, fp = f.state_map[t.source], f.state_map[t.target]
        if not any(
            u.target == fp and _image(f.port_map, u.label) == required for u in a2.outgoing[fq]
        ):
            problems.append(
                f"no target transition {render_state(fq)} -> {render_state(fp)} matches "
                f"{render_state(t.source)} -{render_label(t.label)}-> {render_state(t.target)} "
                f"(needs image {render_label(required)})"
            )
    return problems


def identity(a: PortAutomaton) -> PortAutMorphism:
    return PortAutMorphism(a, a, {q: q for q in a.states}, {n: n for n in a.ports})


def compose_morphisms(f: PortAutMorphism, g: PortAutMorphism) -> PortAutMorphism:
    """Return ``g . f`` for ``f: A1 -> A2`` and ``g: A2 -> A3``.

    Composition is componentwise.  When ``f`` sends two ports of ``A2``
    to the same port of ``A1`` the result can fail :func:`validate_morphism`
    even though ``f`` and ``g`` pass; with injective port maps it cannot.
    """
    if f.target != g.source:
        raise MismatchError("cannot compose: target of the first morphism is not the source of the second")
    return PortAutMorphism(
        f.source,
        g.target,
        {q: g.state_map[f.state_map[q]] for q in f.source.states},
        {n: f.port_map[g.port_map[n]] for n in g.target.ports},
    )


def terminal_morphism(a: PortAutomaton) -> PortAutMorphism:
    """The unique morphism from ``a`` into :data:`FINAL`."""
    return PortAutMorphism(a, FINAL, {q: "*" for q in a.states}, {})


def _preferred(value, pool):
    """Candidate order: the equally named value first, then the rest sorted."""
    rest = [v for v in pool if v != value]
    return [value] + rest if value in pool else list(pool)


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.spent = 0

    def charge(self, n=1):
        self.spent += n
        if self.limit is not None and self.spent > self.limit:
            raise SearchBudgetExceeded(f"morphism search exceeded its budget of {self.limit} candidates")


def iter_simulations(
    a0: PortAutomaton, a1: PortAutomaton, budget: Optional[int] = DEFAULT_BUDGET
) -> Iterator[PortAutMorphism]:
    """Yield every morphism ``a0 -> a1`` in a fixed, reproducible order.

    Port maps are enumerated outermost, states are then assigned by
    backtracking in sorted order.  Each candidate value prefers the
    equally named element, so ``iter_simulations(a, a)`` starts with the
    identity.  ``budget`` caps the number of tentative assignments.
    """
    meter = _Budget(budget)
    src_states = a0.sorted_states()
    tgt_states = a1.sorted_states()
    tgt_ports = a1.sorted_ports()
    src_ports = a0.sorted_ports()
    if a0.initial not in a0.states or a1.initial not in a1.states:
        return
    order = [a0.initial] + [q for q in src_states if q != a0.initial]
    position = {q: i for i, q in enumerate(order)}
    # each transition is checked once its later endpoint gets assigned
    checks = {q: [] for q in order}
    for t in a0.transitions:
        later = t.source if position[t.source] >= position[t.target] else t.target
        checks[later].append(t)

    port_choices = [_preferred(n, src_ports) for n in tgt_ports]
    for images in itertools.product(*port_choices):
        meter.charge()
        port_map = dict(zip(tgt_ports, images))
        visible = frozenset(images)
        by_image = {}
        for u in a1.transitions:
            by_image.setdefault(_image(port_map, u.label), set()).add((u.source, u.target))
        allowed = {}
        for t in a0.transitions:
            allowed[t] = by_image.get(visible & t.label, set())
        if any(not pairs for pairs in allowed.values()):
            continue

        state_map = {}

        def assign(i):
            if i == len(order):
                yield PortAutMorphism(a0, a1, dict(state_map), port_map)
                return
            q = order[i]
            candidates = [a1.initial] if i == 0 else _preferred(q, tgt_states)
            for v in candidates:
                meter.charge()
                state_map[q] = v
                if all((state_map[t.source], state_map[t.target]) in allowed[t] for t in checks[q]):
                    yield from assign(i + 1)
                del state_map[q]

        yield from assign(0)


def find_simulation(
    a0: PortAutomaton, a1: PortAutomaton, budget: Optional[int] = DEFAULT_BUDGET
) -> Optional[PortAutMorphism]:
    """Return the first morphism ``a0 -> a1`` found, or ``None`` if none exists.

    Raises :class:`SearchBudgetExceeded` when the search is cut short.
    """
    return next(iter_simulations(a0, a1, budget), None)


def _port_profile(a, port):
    return sorted((len(t.label), t.source == t.target) for t in a.transitions if port in t.label)


def iter_isomorphisms(
    a: PortAutomaton,
    b: PortAutomaton,
    fixed_ports: Optional[Mapping] = None,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> Iterator[tuple[dict, dict]]:
    """Yield ``(state_bijection a->b, port_bijection b->a)`` pairs.

    ``fixed_ports`` optionally pins part of the port bijection, given in
    the ``a -> b`` direction.
    """
    meter = _Budget(budget)
    if (len(a.states), len(a.ports), len(a.transitions)) != (
        len(b.states),
        len(b.ports),
        len(b.transitions),
    ):
        return
    if sorted(len(t.label) for t in a.transitions) != sorted(len(t.label) for t in b.transitions):
        return
    fixed_ports = dict(fixed_ports or {})
    a_ports = a.sorted_ports()
    b_ports = b.sorted_ports()
    a_prof = {n: _port_profile(a, n) for n in a_ports}
    b_prof = {n: _port_profile(b, n) for n in b_ports}

    port_ab = {}

    def ports(i):
        if i == len(a_ports):
            yield dict(port_ab)
            return
        n = a_ports[i]
        if n in fixed_ports:
            pool = [fixed_ports[n]] if fixed_ports[n] in b_prof else []
        else:
            pool = _preferred(n, b_ports)
        used = set(port_ab.values())
        for m in pool:
            if m in used or b_prof[m] != a_prof[n]:
                continue
            meter.charge()
            port_ab[n] = m
            yield from ports(i + 1)
            del port_ab[n]

    b_trans = b.transitions
    b_states = b.sorted_states()
    for pmap in ports(0):
        translated = {
            Transition(t.source, frozenset(pmap[n] for n in t.label), t.target) for t in a.transitions
        }

        def signature(trans, q):
            out = sorted(sorted(t.label) for t in trans if t.source == q)
            inc = sorted(sorted(t.label) for t in trans if t.target == q)
            return out, inc

        a_sig = {q: signature(translated, q) for q in a.states}
        b_sig = {q: signature(b_trans, q) for q in b.states}
        if sorted(map(repr, a_sig.values())) != sorted(map(repr, b_sig.values())):
            continue
        order = _bfs_order(a)
        position = {q: i for i, q in enumerate(order)}
        checks = {q: [] for q in order}
        for t in translated:
            later = t.source if position[t.source] >= position[t.target] else t.target
            checks[later].append(t)
        smap = {}
        taken = set()

        def states(i):
            if i == len(order):
                yield dict(smap)
                return
            q = order[i]
            pool = [b.initial] if i == 0 else _preferred(q, b_states)
            for v in pool:
                if v in taken or b_sig[v] != a_sig[q]:
                    continue
                meter.charge()
                smap[q] = v
                if all(
                    Transition(smap[t.source], t.label, smap[t.target]) in b_trans for t in checks[q]
                ):
                    taken.add(v)
                    yield from states(i + 1)
                    taken.discard(v)
                del smap[q]

        for smap_done in states(0):
            yield smap_done, {m: n for n, m in pmap.items()}


def _bfs_order(a):
    seen = [a.initial]
    marked = {a.initial}
    queue = deque([a.initial])
    while queue:
        q = queue.popleft()
        for t in a.outgoing.get(q, ()):
            for r in (t.target,):
                if r not in marked:
                    marked.add(r)
                    seen.append(r)
                    queue.append(r)
        for t in a.incoming.get(q, ()):
            if t.source not in marked:
                marked.add(t.source)
                seen.append(t.source)
                queue.append(t.source)
    seen.extend(q for q in a.sorted_states() if q not in marked)
    return seen


def check_isomorphic(
    a: PortAutomaton, b: PortAutomaton, budget: Optional[int] = DEFAULT_BUDGET
) -> Optional[tuple[PortAutMorphism, PortAutMorphism]]:
    """Return mutually inverse morphisms ``(a -> b, b -> a)`` or ``None``."""
    for smap, pmap in iter_isomorphisms(a, b, budget=budget):
        f = PortAutMorphism(a, b, smap, pmap)
        g = PortAutMorphism(b, a, {v: k for k, v in smap.items()}, {v: k for k, v in pmap.items()})
        return f, g
    return None


def reachable(a: PortAutomaton) -> PortAutomaton:
    """Restrict ``a`` to the states reachable from its initial state."""
    seen = {a.initial}
    queue = deque([a.initial])
    while queue:
        q = queue.popleft()
        for t in a.outgoing.get(q, ()):
            if t.target not in seen:
                seen.add(t.target)
                queue.append(t.target)
    return PortAutomaton(
        seen, a.ports, (t for t in a.transitions if t.source in seen), a.initial
    )


def hide_ports(a: PortAutomaton, hidden: Iterable[str]) -> PortAutomaton:
    """Visible view of ``a``: drop ``hidden`` ports from the port set and every label."""
    hidden = frozenset(hidden)
    return PortAutomaton(
        a.states,
        a.ports - hidden,
        ((t.source, t.label - hidden, t.target) for t in a.transitions),
        a.initial,
    )


def rename_ports(a: PortAutomaton, mapping: Mapping[str, str]) -> tuple[PortAutomaton, PortAutMorphism]:
    """Rename ports of ``a``; returns the renamed automaton and its morphism back to ``a``."""
    renamed = PortAutomaton(
        a.states,
        (mapping[n] for n in a.ports),
        ((t.source, (mapping[n] for n in t.label), t.target) for t in a.transitions),
        a.initial,
    )
    back = PortAutMorphism(renamed, a, {q: q for q in a.states}, {n: mapping[n] for n in a.ports})
    return renamed, back


def rename_states(a: PortAutomaton, mapping: Mapping) -> PortAutomaton:
    return PortAutomaton(
        (mapping[q] for q in a.states),
        a.ports,
        ((mapping[t.source], t.label, mapping[t.target]) for t in a.transitions),
        mapping[a.initial],
    )


def lookup_state(a: PortAutomaton, state) -> State:
    """Resolve ``state`` (a value or its rendered text) to a state of ``a``."""
    if state in a.states:
        return state
    text = render_state(state)
    matches = [q for q in a.states if render_state(q) == text]
    if len(matches) != 1:
        raise UnknownStateError(f"unknown state {text}")
    return matches[0]


def state_after(a: PortAutomaton, steps: Iterable[Iterable[str]], hidden: Iterable[str] = ()) -> State:
    """Follow ``steps`` from the initial state.

    A step matches a transition whose label, minus ``hidden`` ports, is
    exactly the given port set.  Each step must have a unique successor.
    """
    hidden = frozenset(hidden)
    q = a.initial
    for i, step in enumerate(steps):
        step = frozenset(step)
        targets = {t.target for t in a.outgoing.get(q, ()) if t.label - hidden == step}
        if len(targets) != 1:
            what = "not enabled" if not targets else "ambiguous"
            raise UnknownStateError(
                f"step {i + 1} {render_label(step)} is {what} in state {render_state(q)}"
            )
        (q,) = targets
    return q
