"""Reo primitives as port automata, and the worked examples as fixtures."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .automaton import PortAutMorphism, PortAutomaton, identity
from .compose import Cospan
from .connector import Connector, ConnectorMorphism, ConnectorSpan
from .errors import InvalidInputError
from .petri import PetriNet


class PrimitiveKind(Enum):
    SYNC = "Sync"
    EMPTY_FIFO = "EmptyFIFO"
    FULL_FIFO = "FullFIFO"
    MERGER = "Merger"
    ROUTER = "Router"

    @property
    def arity(self) -> int:
        return 3 if self in (PrimitiveKind.MERGER, PrimitiveKind.ROUTER) else 2


def make_primitive(kind, ports) -> PortAutomaton:
    """Port automaton of a Reo primitive.

    Every state carries an explicit tau loop so other parts of a
    connector can move while this primitive idles.

    * ``Sync(a, b)``: one state, steps ``{a, b}``.
    * ``EmptyFIFO(a, b)``: ``q0 -{a}-> q1 -{b}-> q0``, starting empty.
    * ``FullFIFO(a, b)``: the same machine as ``EmptyFIFO(b, a)``; its
      initial state holds the token, so it first emits on ``b``.
    * ``Router(a, b, c)``: one state, steps ``{a, b}`` and ``{a, c}``.
    * ``Merger(b, c, a)``: identical to ``Router(a, b, c)``.
    """
    kind = PrimitiveKind(kind)
    ports = list(ports)
    if len(ports) != kind.arity:
        raise InvalidInputError(f"{kind.value} takes {kind.arity} ports, got {len(ports)}")
    if len(set(ports)) != len(ports):
        raise InvalidInputError(f"{kind.value} needs distinct ports, got {ports}")

    if kind is PrimitiveKind.SYNC:
        a, b = ports
        return PortAutomaton({"q0"}, ports, [("q0", {a, b}, "q0"), ("q0", (), "q0")], "q0")
    if kind is PrimitiveKind.EMPTY_FIFO:
        a, b = ports
        return PortAutomaton(
            {"q0", "q1"},
            ports,
            [("q0", {a}, "q1"), ("q1", {b}, "q0"), ("q0", (), "q0"), ("q1", (), "q1")],
            "q0",
        )
    if kind is PrimitiveKind.FULL_FIFO:
        a, b = ports
        return make_primitive(PrimitiveKind.EMPTY_FIFO, (b, a))
    if kind is PrimitiveKind.ROUTER:
        a, b, c = ports
        return PortAutomaton(
            {"q0"}, ports, [("q0", {a, b}, "q0"), ("q0", {a, c}, "q0"), ("q0", (), "q0")], "q0"
        )
    b, c, a = ports
    return make_primitive(PrimitiveKind.ROUTER, (a, b, c))


HIDDEN_NODES = frozenset({"_h1", "_h2"})


def _token_ring():
    return {
        "router": make_primitive("Router", ("_h2", "A", "C")),
        "buffer": make_primitive("FullFIFO", ("_h1", "_h2")),
        "merger": make_primitive("Merger", ("B", "D", "_h1")),
    }


NODES = frozenset({"A", "B", "C", "D"}) | HIDDEN_NODES


def _inclusion(c0: Connector, c: Connector) -> ConnectorMorphism:
    return ConnectorMorphism(
        c0,
        c,
        {p: p for p in c0.primitives},
        {n: n for n in c0.nodes},
        {p: identity(a) for p, a in c0.primitives.items()},
    )


def _with_tau(states, ports, steps, initial):
    loops = [(q, (), q) for q in states]
    return PortAutomaton(states, ports, list(steps) + loops, initial)


@dataclass(frozen=True)
class ExampleFigures:
    """The worked examples, pinned as data.

    ``fig1a`` is the Reo connector for the ``(AB+CD)*`` protocol: a
    token ring (Router, FullFIFO between the hidden nodes, Merger) plus
    an EmptyFIFO on each of the ``A``-``B`` and ``C``-``D`` paths.
    ``fig4_*`` is the gluing that inserts the ``A``-``B`` FIFO into the
    host; ``fig3_*`` the corresponding automata cospan as drawn, with
    the tau loops every drawn automaton omits.
    """

    fig1a: Connector
    fig1b: PetriNet
    fig1c: PortAutomaton
    fig2: PortAutMorphism
    fig3: Cospan
    fig4_interface: Connector
    fig4_rule_rhs: Connector
    fig4_host: Connector
    fig4_rule: ConnectorMorphism
    fig4_match: ConnectorMorphism
    hidden: frozenset = HIDDEN_NODES

    __hash__ = None

    @property
    def fig4_span(self) -> ConnectorSpan:
        return ConnectorSpan(self.fig4_rule, self.fig4_match)


def build_example_figures() -> ExampleFigures:
    ports = {"A", "B", "C", "D"}
    fig1c = _with_tau(
        {"q0", "q1", "q2"},
        ports,
        [("q0", {"A"}, "q1"), ("q1", {"B"}, "q0"), ("q0", {"C"}, "q2"), ("q2", {"D"}, "q0")],
        "q0",
    )

    fig1b = PetriNet(
        places={"w1", "c1", "s"},
        transitions={"A", "B", "C", "D"},
        inputs={"w1": {"A": 1}, "c1": {"B": 1, "D": 1}, "s": {"C": 1}},
        outputs={"w1": {"B": 1}, "c1": {"A": 1, "C": 1}, "s": {"D": 1}},
        initial={"c1": 1},
        capacity={"w1": 1, "c1": 1, "s": 1},
    )

    fig2_src = PortAutomaton(
        {"q0", "q1", "q2"},
        {"A", "B", "C"},
        [("q0", {"A"}, "q1"), ("q1", {"B", "C"}, "q2"), ("q2", {"C"}, "q0")],
        "q0",
    )
    fig2_tgt = PortAutomaton(
        {"p0", "p1"}, {"A", "B"}, [("p0", {"A"}, "p1"), ("p1", {"B"}, "p0"), ("p0", (), "p0")], "p0"
    )
    fig2 = PortAutMorphism(
        fig2_src, fig2_tgt, {"q0": "p0", "q2": "p0", "q1": "p1"}, {"A": "A", "B": "B"}
    )

    interface = _with_tau(
        {"q0", "q12"},
        ports,
        [("q0", {"A"}, "q12"), ("q0", {"C"}, "q12"), ("q12", {"D"}, "q0"), ("q12", {"B"}, "q0")],
        "q0",
    )
    rule_side = _with_tau(
        {"p0", "p1", "p2", "p0'"},
        ports,
        [
            ("p0", {"A"}, "p2"),
            ("p2", {"B"}, "p0"),
            ("p0", {"C"}, "p1"),
            ("p1", {"D"}, "p0"),
            ("p2", {"D"}, "p0'"),
            ("p0'", {"C"}, "p2"),
        ],
        "p0",
    )
    host_side = _with_tau(
        {"r0", "r1", "r2", "r0'"},
        ports,
        [
            ("r0", {"C"}, "r1"),
            ("r1", {"D"}, "r0"),
            ("r0", {"A"}, "r2"),
            ("r2", {"B"}, "r0"),
            ("r1", {"B"}, "r0'"),
            ("r0'", {"A"}, "r1"),
        ],
        "r0",
    )
    same_ports = {n: n for n in ports}
    fig3 = Cospan(
        PortAutMorphism(
            rule_side, interface, {"p0": "q0", "p0'": "q0", "p1": "q12", "p2": "q12"}, same_ports
        ),
        PortAutMorphism(
            host_side, interface, {"r0": "q0", "r0'": "q0", "r1": "q12", "r2": "q12"}, same_ports
        ),
    )

    ring = _token_ring()
    fifo_ab = make_primitive("EmptyFIFO", ("A", "B"))
    fifo_cd = make_primitive("EmptyFIFO", ("C", "D"))
    c0 = Connector(ring, NODES)
    c1 = Connector({**ring, "fifo_ab": fifo_ab}, NODES)
    c2 = Connector({**ring, "fifo_cd": fifo_cd}, NODES)
    fig1a = Connector({**ring, "fifo_ab": fifo_ab, "fifo_cd": fifo_cd}, NODES)

    return ExampleFigures(
        fig1a=fig1a,
        fig1b=fig1b,
        fig1c=fig1c,
        fig2=fig2,
        fig3=fig3,
        fig4_interface=c0,
        fig4_rule_rhs=c1,
        fig4_host=c2,
        fig4_rule=_inclusion(c0, c1),
        fig4_match=_inclusion(c0, c2),
    )
