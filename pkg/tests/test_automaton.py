import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_morphisms, is_morphism, isomorphic
from portaut.automaton import (
    FINAL,
    PortAutMorphism,
    PortAutomaton,
    check_isomorphic,
    compose_morphisms,
    find_simulation,
    hide_ports,
    identity,
    iter_isomorphisms,
    iter_simulations,
    reachable,
    rename_ports,
    rename_states,
    render_label,
    render_state,
    state_after,
    terminal_morphism,
    validate_automaton,
    validate_morphism,
)
from portaut.errors import SearchBudgetExceeded, UnknownStateError
from portaut.randgen import random_automaton, random_morphism_into
from portaut.reo import build_example_figures, make_primitive


@pytest.fixture(scope="module")
def fig2():
    return build_example_figures().fig2


def test_sync_is_valid():
    sync = make_primitive("Sync", ("A", "B"))
    assert validate_automaton(sync) == []
    assert len(sync.states) == 1
    assert {t.label for t in sync.transitions} == {frozenset({"A", "B"}), frozenset()}


def test_initial_must_be_a_state():
    a = PortAutomaton({"q0"}, {"A"}, [], "q9")
    assert any("initial not in states" in p for p in validate_automaton(a))


def test_label_outside_ports():
    a = PortAutomaton({"q0"}, {"A", "B"}, [("q0", {"C"}, "q0")], "q0")
    assert any("label not subset of ports" in p for p in validate_automaton(a))


def test_rendering():
    assert render_label(frozenset({"B", "A"})) == "{A,B}"
    assert render_label(frozenset()) == "∅"
    assert render_state(("q0", ("q1", "q2"))) == "(q0,(q1,q2))"


def test_fig2_morphism_valid(fig2):
    assert validate_morphism(fig2) == []
    assert is_morphism(fig2.source, fig2.target, fig2.state_map, fig2.port_map)


def test_fig2_matching_transitions(fig2):
    # {B,C} is matched by the {B} step and {C} by the tau loop
    outgoing = {(t.label, t.target) for t in fig2.target.outgoing["p1"]}
    assert (frozenset({"B"}), "p0") in outgoing
    assert ("p0", frozenset(), "p0") in fig2.target.transitions


def test_fig2_without_tau_loop_invalid(fig2):
    tgt = fig2.target
    no_loop = PortAutomaton(tgt.states, tgt.ports, [t for t in tgt.transitions if t.label], tgt.initial)
    broken = PortAutMorphism(fig2.source, no_loop, fig2.state_map, fig2.port_map)
    problems = validate_morphism(broken)
    assert len(problems) == 1 and "q2 -{C}-> q0" in problems[0]
    assert not is_morphism(fig2.source, no_loop, fig2.state_map, fig2.port_map)


def test_identity_valid():
    rng = random.Random(3)
    for _ in range(20):
        a = random_automaton(rng)
        assert validate_morphism(identity(a)) == []


def test_compose_with_terminal_is_terminal(fig2):
    composed = compose_morphisms(fig2, terminal_morphism(fig2.target))
    expected = terminal_morphism(fig2.source)
    assert composed.state_map == expected.state_map and composed.port_map == expected.port_map
    # finality: exactly one morphism into FINAL
    assert len(all_morphisms(fig2.source, FINAL)) == 1


def test_terminal_cases():
    f = terminal_morphism(FINAL)
    assert f.state_map == {"*": "*"} and f.port_map == {}
    sync = make_primitive("Sync", ("A", "B"))
    assert validate_morphism(terminal_morphism(sync)) == []
    only_a = PortAutomaton({"q"}, {"A"}, [("q", {"A"}, "q")], "q")
    assert validate_morphism(terminal_morphism(only_a)) == []


def test_composition_not_closed_when_ports_merge():
    # f merges v and w; g only sees v, so the composite loses the {x} step
    c = PortAutomaton({"c"}, {"u"}, [("c", (), "c")], "c")
    b = PortAutomaton({"b"}, {"v", "w"}, [("b", {"w"}, "b"), ("b", (), "b")], "b")
    a = PortAutomaton({"a"}, {"x"}, [("a", {"x"}, "a")], "a")
    f = PortAutMorphism(a, b, {"a": "b"}, {"v": "x", "w": "x"})
    g = PortAutMorphism(b, c, {"b": "c"}, {"u": "v"})
    assert validate_morphism(f) == [] and validate_morphism(g) == []
    assert validate_morphism(compose_morphisms(f, g)) != []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_composition_closed_for_injective_ports(seed):
    rng = random.Random(seed)
    c = random_automaton(rng)
    g = random_morphism_into(rng, c)
    f = random_morphism_into(rng, g.source)
    assert validate_morphism(f) == [] and validate_morphism(g) == []
    assert validate_morphism(compose_morphisms(f, g)) == []


def test_find_simulation_identity_first():
    rng = random.Random(5)
    for _ in range(20):
        a = random_automaton(rng)
        f = find_simulation(a, a)
        assert f.state_map == {q: q for q in a.states}
        assert f.port_map == {n: n for n in a.ports}


def test_find_simulation_fig2(fig2):
    f = find_simulation(fig2.source, fig2.target)
    assert f is not None and validate_morphism(f) == []


def test_fifo_into_sync_loop_has_no_morphism():
    fifo = make_primitive("EmptyFIFO", ("A", "B"))
    loop = PortAutomaton({"s"}, {"A", "B"}, [("s", {"A", "B"}, "s")], "s")
    assert find_simulation(fifo, loop) is None
    assert all_morphisms(fifo, loop) == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_iter_simulations_matches_brute_force(seed):
    rng = random.Random(seed)
    a = random_automaton(rng, max_states=3, max_ports=2)
    b = random_automaton(rng, max_states=2, max_ports=2)
    found = {
        (tuple(sorted(f.state_map.items())), tuple(sorted(f.port_map.items())))
        for f in iter_simulations(a, b)
    }
    expected = {
        (tuple(sorted(s.items())), tuple(sorted(p.items()))) for s, p in all_morphisms(a, b)
    }
    assert found == expected


def test_search_budget():
    a = random_automaton(random.Random(1), max_states=3)
    with pytest.raises(SearchBudgetExceeded):
        list(iter_simulations(a, a, budget=1))


def test_renamed_states_isomorphic():
    rng = random.Random(9)
    for _ in range(20):
        a = random_automaton(rng)
        b = rename_states(a, {q: f"x_{q}" for q in a.states})
        f, g = check_isomorphic(a, b)
        assert validate_morphism(f) == [] and validate_morphism(g) == []


def test_fifo_orientation():
    empty = make_primitive("EmptyFIFO", ("A", "B"))
    full = make_primitive("FullFIFO", ("A", "B"))
    # same machine up to swapping the two ports
    assert check_isomorphic(empty, full) is not None
    assert check_isomorphic(full, empty) is not None
    (_, pmap), *_ = iter_isomorphisms(empty, full)
    assert pmap == {"A": "B", "B": "A"}
    # with the port names held fixed they differ
    assert next(iter_isomorphisms(empty, full, fixed_ports={"A": "A", "B": "B"}), None) is None
    assert isomorphic(empty, full)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_isomorphism_matches_brute_force(seed):
    rng = random.Random(seed)
    a = random_automaton(rng, max_states=3, max_ports=3)
    b = random_automaton(rng, max_states=3, max_ports=3) if seed % 2 else rename_states(
        a, {q: q + "'" for q in a.states}
    )
    assert (check_isomorphic(a, b) is not None) == isomorphic(a, b)


def test_reachable_drops_isolated_state():
    a = PortAutomaton({"q0", "q1", "z"}, {"A"}, [("q0", {"A"}, "q1"), ("z", {"A"}, "q0")], "q0")
    r = reachable(a)
    assert r.states == {"q0", "q1"}
    assert len(r.transitions) == 1


def test_hide_ports():
    a = PortAutomaton({"q"}, {"A", "_h"}, [("q", {"A", "_h"}, "q"), ("q", {"_h"}, "q")], "q")
    h = hide_ports(a, {"_h"})
    assert h.ports == {"A"}
    assert {t.label for t in h.transitions} == {frozenset({"A"}), frozenset()}


def test_rename_ports_back_morphism():
    a = make_primitive("EmptyFIFO", ("A", "B"))
    renamed, back = rename_ports(a, {"A": "X", "B": "Y"})
    assert renamed.ports == {"X", "Y"}
    assert validate_morphism(back) == []


def test_state_after():
    fifo = make_primitive("EmptyFIFO", ("A", "B"))
    assert state_after(fifo, [["A"]]) == "q1"
    assert state_after(fifo, [["A"], ["B"]]) == "q0"
    with pytest.raises(UnknownStateError, match="not enabled"):
        state_after(fifo, [["B"]])
