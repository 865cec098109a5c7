import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import isomorphic, product_semantics
from portaut.automaton import (
    PortAutMorphism,
    compose_morphisms,
    hide_ports,
    identity,
    reachable,
    rename_states,
    validate_morphism,
)
from portaut.compose import product, pullback
from portaut.connector import (
    Connector,
    ConnectorMorphism,
    ConnectorSpan,
    compose_connector_morphisms,
    connector_identity,
    pushout,
    validate_connector_morphism,
)
from portaut.errors import InvalidInputError, SizeGuardError
from portaut.randgen import random_connector, random_extension, random_monic_span, random_restriction
from portaut.reo import HIDDEN_NODES, build_example_figures, make_primitive
from portaut.semantics import STATE_CAP_ENV, check_compositionality, sem_connector, sem_morphism


@pytest.fixture(scope="module")
def figs():
    return build_example_figures()


def visible(a):
    return hide_ports(reachable(a), HIDDEN_NODES)


def test_fig1a_semantics(figs):
    sem = sem_connector(figs.fig1a, prune=True).automaton
    assert len(sem.states) == 3
    assert isomorphic(visible(sem), figs.fig1c)
    # pruning only drops unreachable states
    full = sem_connector(figs.fig1a).automaton
    assert len(full.states) == 2 * 2 * 2
    assert reachable(full) == reachable(sem)


def test_single_primitive():
    fifo = make_primitive("EmptyFIFO", ("A", "B"))
    sem = sem_connector(Connector({"f": fifo}, {"A", "B"})).automaton
    assert sem == rename_states(fifo, {q: (q,) for q in fifo.states})


def test_empty_connector():
    sem = sem_connector(Connector({}, {"A"})).automaton
    assert sem.states == {()}
    assert sem.ports == {"A"}
    assert set(sem.transitions) == {((), frozenset(), ())}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_semantics_matches_brute_force(seed):
    c = random_connector(random.Random(seed), max_prims=3)
    states, transitions, initial = product_semantics(c.primitives, c.nodes)
    sem = sem_connector(c).automaton
    assert sem.states == states
    assert set(sem.transitions) == transitions
    assert sem.initial == initial
    assert sem.ports == c.nodes


def test_size_guard(figs, monkeypatch):
    with pytest.raises(SizeGuardError) as info:
        sem_connector(figs.fig1a, cap=5)
    assert info.value.estimate == 8
    monkeypatch.setenv(STATE_CAP_ENV, "2")
    with pytest.raises(SizeGuardError):
        sem_connector(figs.fig1a, prune=True)
    monkeypatch.setenv(STATE_CAP_ENV, "3")
    assert len(sem_connector(figs.fig1a, prune=True).automaton.states) == 3


def test_glued_states_project_to_host(figs):
    po = pushout(figs.fig4_span)
    phi = sem_morphism(po.right)
    assert validate_morphism(phi) == []
    host = sem_connector(figs.fig4_host).automaton
    glued = sem_connector(po.connector).automaton
    assert phi.source == glued and phi.target == host
    assert phi.port_map == {n: n for n in host.ports}
    assert phi.state_map[glued.initial] == host.initial


def test_fig4_compositionality(figs):
    report = check_compositionality(figs.fig4_span)
    assert report.passed, report.problems
    phi, inverse = report.iso
    assert validate_morphism(phi) == [] and validate_morphism(inverse) == []
    # the semantic pullback is the drawn one once hidden nodes are hidden
    fig3 = pullback(figs.fig3).apex
    assert isomorphic(visible(report.rhs.apex), reachable(fig3))
    assert isomorphic(visible(report.rhs.cospan.left.source), figs.fig3.left.source)
    assert isomorphic(visible(report.rhs.cospan.right.source), figs.fig3.right.source)
    assert isomorphic(visible(report.rhs.cospan.left.target), figs.fig3.left.target)


def test_empty_interface_is_product():
    rng = random.Random(6)
    c1 = random_connector(rng, prefix="a", nodes=("x1", "x2"), min_prims=1)
    c2 = random_connector(rng, prefix="b", nodes=("y1", "y2"), min_prims=1)
    empty = Connector({}, set())
    span = ConnectorSpan(ConnectorMorphism(empty, c1, {}, {}, {}), ConnectorMorphism(empty, c2, {}, {}, {}))
    assert check_compositionality(span).passed
    glued = sem_connector(pushout(span).connector).automaton
    prod = product(sem_connector(c1).automaton, sem_connector(c2).automaton).apex
    assert len(glued.states) == len(prod.states)
    assert len(glued.transitions) == len(prod.transitions)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_random_compositionality(seed):
    report = check_compositionality(random_monic_span(random.Random(seed)))
    assert report.passed, report.problems


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_functor_laws(seed):
    rng = random.Random(seed)
    c = random_connector(rng, min_prims=1)
    f = random_restriction(rng, c)
    g = random_extension(rng, c, "G")
    sf, sg = sem_morphism(f), sem_morphism(g)
    assert validate_morphism(sf) == [] and validate_morphism(sg) == []
    sgf = sem_morphism(compose_connector_morphisms(f, g))
    expected = compose_morphisms(sg, sf)
    assert sgf.state_map == expected.state_map and sgf.port_map == expected.port_map
    sid = sem_morphism(connector_identity(c))
    assert sid.state_map == identity(sid.source).state_map


def test_dangling_node_breaks_semantic_image():
    # a node with no primitive in the source may be attached in the target;
    # the target's {A,B} step then has no counterpart in Sem of the source
    c1 = Connector({}, {"A"})
    c2 = Connector({"s": make_primitive("Sync", ("A", "B"))}, {"A", "B"})
    f = ConnectorMorphism(c1, c2, {}, {"A": "A"}, {})
    assert validate_connector_morphism(f) == []
    assert validate_morphism(sem_morphism(f)) != []


def test_dangling_node_reported_by_check():
    c0 = Connector({}, {"A"})
    c1 = Connector({"s": make_primitive("Sync", ("A", "B"))}, {"A", "B"})
    f = ConnectorMorphism(c0, c1, {}, {"A": "A"}, {})
    report = check_compositionality(ConnectorSpan(f, connector_identity(c0)))
    assert not report.passed and report.rhs is None
    assert any("Sem(left leg)" in p for p in report.problems)


def test_corrupted_witness_rejected(figs):
    f = figs.fig4_rule
    w = f.witnesses["buffer"]
    bad = PortAutMorphism(w.source, w.target, {"q0": "q1", "q1": "q0"}, w.port_map)
    corrupted = ConnectorMorphism(f.source, f.target, f.prim_map, f.node_map, {**f.witnesses, "buffer": bad})
    with pytest.raises(InvalidInputError) as info:
        check_compositionality(ConnectorSpan(corrupted, figs.fig4_match))
    assert any("buffer" in v for v in info.value.violations)
