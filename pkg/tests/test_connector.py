import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import isomorphic
from portaut.automaton import PortAutMorphism, check_isomorphic, find_simulation, iter_simulations, validate_morphism
from portaut.connector import (
    Connector,
    ConnectorMorphism,
    ConnectorSpan,
    check_connector_isomorphic,
    compose_connector_morphisms,
    connector_identity,
    pushout,
    pushout_mediating,
    same_connector_morphism,
    synthesize_morphism,
    validate_connector,
    validate_connector_morphism,
)
from portaut.errors import InvalidInputError, UnsupportedError
from portaut.randgen import random_connector, random_monic_span
from portaut.reo import build_example_figures, make_primitive


@pytest.fixture(scope="module")
def figs():
    return build_example_figures()


def test_fig1a_valid(figs):
    assert validate_connector(figs.fig1a) == []
    assert len(figs.fig1a.primitives) == 5 and len(figs.fig1a.nodes) == 6


def test_undeclared_port():
    c = Connector({"s": make_primitive("Sync", ("A", "X"))}, {"A"})
    problems = validate_connector(c)
    assert problems and "X" in problems[0]


def test_empty_connector_valid():
    assert validate_connector(Connector({}, {"A"})) == []


def test_identity_and_fig4_legs_valid(figs):
    assert validate_connector_morphism(connector_identity(figs.fig1a)) == []
    assert validate_connector_morphism(figs.fig4_match) == []
    assert validate_connector_morphism(figs.fig4_rule) == []


def test_fifo_to_sync_has_no_witness():
    fifo = make_primitive("EmptyFIFO", ("A", "B"))
    sync = make_primitive("Sync", ("A", "B"))
    src = Connector({"f": fifo}, {"A", "B"})
    tgt = Connector({"s": sync}, {"A", "B"})
    assert find_simulation(sync, fifo) is None
    with pytest.raises(InvalidInputError):
        synthesize_morphism(src, tgt, {"f": "s"}, {"A": "A", "B": "B"})
    # a hand-made attempt fails validation
    attempt = PortAutMorphism(sync, fifo, {"q0": "q0"}, {"A": "A", "B": "B"})
    f = ConnectorMorphism(src, tgt, {"f": "s"}, {"A": "A", "B": "B"}, {"f": attempt})
    assert validate_connector_morphism(f) != []


def test_witness_port_map_must_follow_node_map(figs):
    f = figs.fig4_match
    router = f.witnesses["router"]
    wrong = PortAutMorphism(router.source, router.target, router.state_map, {"A": "C", "C": "A", "_h2": "_h2"})
    broken = ConnectorMorphism(f.source, f.target, f.prim_map, f.node_map, {**f.witnesses, "router": wrong})
    assert any("node map" in p for p in validate_connector_morphism(broken))


def test_fig4_pushout_is_fig1a(figs):
    po = pushout(figs.fig4_span)
    assert len(po.connector.primitives) == 5 and len(po.connector.nodes) == 6
    assert validate_connector_morphism(po.left) == []
    assert validate_connector_morphism(po.right) == []
    assert check_connector_isomorphic(po.connector, figs.fig1a) is not None
    # the span commutes through the pushout
    assert same_connector_morphism(
        compose_connector_morphisms(figs.fig4_rule, po.left),
        compose_connector_morphisms(figs.fig4_match, po.right),
    )


def test_empty_interface_gives_disjoint_union():
    rng = random.Random(4)
    c1 = random_connector(rng, prefix="a", nodes=("x1", "x2"), min_prims=1)
    c2 = random_connector(rng, prefix="b", nodes=("y1", "y2"), min_prims=1)
    empty = Connector({}, set())
    po = pushout(ConnectorSpan(ConnectorMorphism(empty, c1, {}, {}, {}), ConnectorMorphism(empty, c2, {}, {}, {})))
    assert set(po.connector.primitives) == set(c1.primitives) | set(c2.primitives)
    assert po.connector.nodes == c1.nodes | c2.nodes
    for pid, a in c1.primitives.items():
        assert po.connector.primitives[pid] == a


def test_identity_span_pushout():
    rng = random.Random(8)
    for _ in range(10):
        c0 = random_connector(rng, min_prims=1)
        po = pushout(ConnectorSpan(connector_identity(c0), connector_identity(c0)))
        assert check_connector_isomorphic(po.connector, c0) is not None
        for pid, a in c0.primitives.items():
            assert isomorphic(po.connector.primitives[pid], a)


def test_non_injective_prim_map_rejected():
    sync = make_primitive("Sync", ("A", "B"))
    c0 = Connector({"s": sync, "t": sync}, {"A", "B"})
    c1 = Connector({"u": sync}, {"A", "B"})
    ident = {n: n for n in "AB"}
    f = synthesize_morphism(c0, c1, {"s": "u", "t": "u"}, ident)
    assert validate_connector_morphism(f) == []
    with pytest.raises(UnsupportedError):
        pushout(ConnectorSpan(f, connector_identity(c0)))


def test_synthesize_prefers_identity(figs):
    f = synthesize_morphism(figs.fig4_interface, figs.fig4_host, {p: p for p in figs.fig4_interface.primitives},
                            {n: n for n in figs.fig4_interface.nodes})
    assert same_connector_morphism(f, figs.fig4_match)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_random_pushouts_are_valid_and_universal(seed):
    span = random_monic_span(random.Random(seed))
    po = pushout(span)
    assert validate_connector(po.connector) == []
    assert validate_connector_morphism(po.left) == []
    assert validate_connector_morphism(po.right) == []
    assert same_connector_morphism(
        compose_connector_morphisms(span.left, po.left),
        compose_connector_morphisms(span.right, po.right),
    )
    # mediating out of the pushout towards itself is the identity
    h = pushout_mediating(po, po.left, po.right)
    assert validate_connector_morphism(h) == []
    assert same_connector_morphism(h, connector_identity(po.connector))


def test_composition_identity_laws(figs):
    f = figs.fig4_match
    assert same_connector_morphism(compose_connector_morphisms(connector_identity(f.source), f), f)
    assert same_connector_morphism(compose_connector_morphisms(f, connector_identity(f.target)), f)


def test_connector_iso_detects_difference(figs):
    assert check_connector_isomorphic(figs.fig4_host, figs.fig4_rule_rhs) is not None  # swap A<->C, B<->D
    assert check_connector_isomorphic(figs.fig4_host, figs.fig1a) is None


def test_witness_search_respects_pins():
    a = make_primitive("Sync", ("A", "B"))
    pinned = {"A": "A", "B": "B"}
    ws = [w for w in iter_simulations(a, a) if w.port_map == pinned]
    assert ws and all(validate_morphism(w) == [] for w in ws)
    assert check_isomorphic(a, a) is not None
