"""Seeded property suites for the composition laws.

Each suite returns a :class:`SuiteResult`.  Failures keep the offending
objects so the CLI can dump them for inspection.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

from .automaton import (
    PortAutMorphism,
    compose_morphisms,
    identity,
    iter_isomorphisms,
    reachable,
    validate_morphism,
)
from .compose import induced_pullback_morphism, mediating_morphism, pullback
from .connector import compose_connector_morphisms, connector_identity, validate_connector_morphism
from .errors import PortAutError
from .petri import encode_net, marking_graph
from .randgen import (
    random_connector,
    random_cospan,
    random_cube,
    random_extension,
    random_monic_span,
    random_net,
    random_restriction,
    random_square,
)
from .semantics import check_compositionality, sem_connector, sem_morphism


@dataclass
class Failure:
    case: int
    message: str
    objects: dict = field(default_factory=dict)


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"{self.name}: {status} ({self.cases} cases, {len(self.failures)} failures)"


def _same(f: PortAutMorphism, g: PortAutMorphism) -> bool:
    return (
        f.source == g.source
        and f.target == g.target
        and f.state_map == g.state_map
        and f.port_map == g.port_map
    )


# -- pullbacks -------------------------------------------------------------


def expected_pullback_transitions(pb) -> set:
    """Recompute the pullback's steps from all pairs of component steps."""
    f1, f2 = pb.cospan.left, pb.cospan.right
    g1, g2 = pb.names.left, pb.names.right
    n1 = frozenset(g1.values())
    n2 = frozenset(g2.values())
    out = set()
    for t1, t2 in itertools.product(f1.source.transitions, f2.source.transitions):
        if f1.state_map[t1.source] != f2.state_map[t2.source]:
            continue
        if f1.state_map[t1.target] != f2.state_map[t2.target]:
            continue
        s1 = frozenset(g1[n] for n in t1.label)
        s2 = frozenset(g2[n] for n in t2.label)
        if s1 & n2 == s2 & n1:
            out.add(((t1.source, t2.source), s1 | s2, (t1.target, t2.target)))
    return out


def commuting_cones(pb, h1: PortAutMorphism, h2: PortAutMorphism) -> list:
    """Every morphism ``X -> apex`` whose projections are ``h1`` and ``h2``.

    Brute force: the commuting conditions constrain each state and each
    apex port separately, so all combinations of pointwise candidates are
    enumerated and validated.
    """
    x, apex = h1.source, pb.apex
    p1, p2 = pb.proj_left, pb.proj_right
    state_choices = []
    for q in x.sorted_states():
        state_choices.append(
            [
                s
                for s in apex.sorted_states()
                if p1.state_map[s] == h1.state_map[q] and p2.state_map[s] == h2.state_map[q]
            ]
        )
    apex_ports = apex.sorted_ports()
    port_choices = []
    for p in apex_ports:
        port_choices.append(
            [
                v
                for v in x.sorted_ports()
                if all(h1.port_map[n] == v for n, m in p1.port_map.items() if m == p)
                and all(h2.port_map[n] == v for n, m in p2.port_map.items() if m == p)
            ]
        )
    found = []
    for states in itertools.product(*state_choices):
        smap = dict(zip(x.sorted_states(), states))
        for ports in itertools.product(*port_choices):
            h = PortAutMorphism(x, apex, smap, dict(zip(apex_ports, ports)))
            if not validate_morphism(h):
                found.append(h)
    return found


def suite_pullback(seed: int = 0, cospans: int = 100, squares: int = 20) -> SuiteResult:
    rng = random.Random(seed)
    result = SuiteResult("pullback")
    for i in range(cospans):
        cospan = random_cospan(rng)
        pb = pullback(cospan)
        result.cases += 1
        for side, proj in (("left", pb.proj_left), ("right", pb.proj_right)):
            problems = validate_morphism(proj)
            if problems:
                result.failures.append(
                    Failure(i, f"{side} projection invalid: {problems[0]}", {"cospan_left": cospan.left, "cospan_right": cospan.right})
                )
        expected = expected_pullback_transitions(pb)
        expected = {t for t in expected if t[0] in pb.apex.states and t[2] in pb.apex.states}
        if expected != set(pb.apex.transitions):
            result.failures.append(
                Failure(i, "apex steps differ from the pairwise synchronisation rule",
                        {"cospan_left": cospan.left, "cospan_right": cospan.right})
            )
        if i < squares:
            h1, h2 = random_square(rng, pb)
            if validate_morphism(h1) or validate_morphism(h2):
                result.failures.append(Failure(i, "generated square has an invalid leg", {"h1": h1, "h2": h2}))
                continue
            try:
                h = mediating_morphism(pb, h1, h2)
            except PortAutError as exc:
                result.failures.append(Failure(i, f"no mediating morphism: {exc}", {"h1": h1, "h2": h2}))
                continue
            if validate_morphism(h):
                result.failures.append(Failure(i, "mediating morphism invalid", {"h1": h1, "h2": h2}))
            cones = commuting_cones(pb, h1, h2)
            if len(cones) != 1 or not _same(cones[0], h):
                result.failures.append(
                    Failure(i, f"{len(cones)} commuting morphisms instead of exactly the mediating one",
                            {"h1": h1, "h2": h2})
                )
    return result


def suite_pullback_functoriality(seed: int = 0, cubes: int = 50) -> SuiteResult:
    """Maps of cospans induce valid maps of pullbacks that commute with the projections."""
    rng = random.Random(seed)
    result = SuiteResult("pullback-functoriality")
    for i in range(cubes):
        cospan_a, cospan_b, h0, h1, h2 = random_cube(rng, final_base=(i % 2 == 0))
        result.cases += 1
        pb_a, pb_b = pullback(cospan_a), pullback(cospan_b)
        objects = {"a_left": cospan_a.left, "a_right": cospan_a.right, "b_left": cospan_b.left,
                   "b_right": cospan_b.right, "h0": h0, "h1": h1, "h2": h2}
        try:
            h = induced_pullback_morphism(pb_a, pb_b, h0, h1, h2)
        except PortAutError as exc:
            result.failures.append(Failure(i, f"no induced morphism: {exc}", objects))
            continue
        problems = validate_morphism(h)
        if problems:
            result.failures.append(Failure(i, f"induced morphism invalid: {problems[0]}", objects))
        elif not (
            _same(compose_morphisms(h, pb_b.proj_left), compose_morphisms(pb_a.proj_left, h1))
            and _same(compose_morphisms(h, pb_b.proj_right), compose_morphisms(pb_a.proj_right, h2))
        ):
            result.failures.append(Failure(i, "induced morphism does not commute with projections", objects))
    return result


# -- semantics ---------------------------------------------------------------


def suite_functor(seed: int = 0, cases: int = 50) -> SuiteResult:
    """``Sem(g . f) = Sem(f) . Sem(g)`` and ``Sem(id) = id``."""
    rng = random.Random(seed)
    result = SuiteResult("functor")
    for i in range(cases):
        c = random_connector(rng, max_prims=3, min_prims=1)
        f = random_restriction(rng, c)
        g = random_extension(rng, c, "G")
        result.cases += 1
        objects = {"f": f, "g": g}
        problems = validate_connector_morphism(f) + validate_connector_morphism(g)
        if problems:
            result.failures.append(Failure(i, f"generated morphism invalid: {problems[0]}", objects))
            continue
        sf, sg = sem_morphism(f), sem_morphism(g)
        sgf = sem_morphism(compose_connector_morphisms(f, g))
        for name, m in (("Sem(f)", sf), ("Sem(g)", sg), ("Sem(g.f)", sgf)):
            problems = validate_morphism(m)
            if problems:
                result.failures.append(Failure(i, f"{name} invalid: {problems[0]}", objects))
        if not _same(sgf, compose_morphisms(sg, sf)):
            result.failures.append(Failure(i, "Sem(g.f) != Sem(f).Sem(g)", objects))
        for conn in (f.source, c):
            sid = sem_morphism(connector_identity(conn))
            if not _same(sid, identity(sem_connector(conn).automaton)):
                result.failures.append(Failure(i, "Sem(id) is not the identity", {"connector": conn}))
    return result


def suite_compositionality(seed: int = 0, cases: int = 100) -> SuiteResult:
    rng = random.Random(seed)
    result = SuiteResult("compositionality")
    for i in range(cases):
        span = random_monic_span(rng)
        result.cases += 1
        report = check_compositionality(span)
        if not report.passed:
            result.failures.append(
                Failure(i, "; ".join(report.problems[:3]), {"left": span.left, "right": span.right})
            )
    return result


def petri_matches(net) -> bool:
    """Reachable semantics of the encoding is isomorphic to the marking graph, ports fixed."""
    sem = reachable(sem_connector(encode_net(net), prune=True).automaton)
    graph = marking_graph(net)
    fixed = {t: t for t in net.transitions}
    return next(iter_isomorphisms(sem, graph, fixed_ports=fixed), None) is not None


def suite_petri(seed: int = 0, cases: int = 20, include_figure: bool = True) -> SuiteResult:
    from .reo import build_example_figures

    rng = random.Random(seed)
    result = SuiteResult("petri")
    nets = [build_example_figures().fig1b] if include_figure else []
    nets += [random_net(rng, 4, 5, 2) for _ in range(cases)]
    for i, net in enumerate(nets):
        result.cases += 1
        if not petri_matches(net):
            result.failures.append(Failure(i, "semantics of the encoding differs from the marking graph", {"net": net}))
    return result


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "pullback": lambda seed, n: suite_pullback(seed, cospans=n, squares=min(20, n)),
    "cube": lambda seed, n: suite_pullback_functoriality(seed, cubes=n),
    "functor": lambda seed, n: suite_functor(seed, cases=n),
    "compositionality": lambda seed, n: suite_compositionality(seed, cases=n),
    "petri": lambda seed, n: suite_petri(seed, cases=n),
}


def run_suites(names, seed: int, n: int) -> list[SuiteResult]:
    return [SUITES[name](seed, n) for name in names]
