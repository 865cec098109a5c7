"""Text, JSON and DOT formats.

Text format, one or more blocks per file::

    automaton fifo {
      states q0 q1; ports A B; initial q0;
      q0 -{A}-> q1;  q1 -{B}-> q0;  q0 -{}-> q0;
    }
    connector c {
      nodes A B C;
      primitive s : Sync(A, B);
      primitive f : fifo;            # an automaton block of the same file
    }
    net n {
      transitions A B;
      place p { in: A; out: B*2; tokens: 0; cap: 2 }
    }
    morphism m : src -> tgt {
      state q0 -> p0;                # automaton morphisms
      port A -> A;                   # key is a target port, value a source port
      prim s -> s2; node A -> A;     # connector morphisms
      witness s { state q0 -> q0; port A -> A; }
    }

Connector morphism witnesses that are left out are searched for.
Identifiers may be quoted (``"(q0,q1)"``).  ``#`` and ``//`` start
comments.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .automaton import (
    PortAutMorphism,
    PortAutomaton,
    render_label,
    render_state,
    state_key,
    validate_automaton,
    validate_morphism,
)
from .connector import (
    Connector,
    ConnectorMorphism,
    synthesize_morphism,
    validate_connector,
    validate_connector_morphism,
)
from .errors import InvalidInputError, ParseError, PortAutError
from .petri import PetriNet, validate_net
from .reo import PrimitiveKind, make_primitive

Loaded = Union[PortAutomaton, Connector, PetriNet, PortAutMorphism, ConnectorMorphism]

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>(?:\#|//)[^\n]*)
  | (?P<arrow_open>-\{)
  | (?P<arrow_close>\}->)
  | (?P<arrow>->)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z0-9_'.]+(?::[A-Za-z0-9_'.]+)*)
  | (?P<punct>[{}();,:*])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                if kind == "string":
                    kind, text = "ident", json.loads(text)
                elif kind == "punct":
                    kind = text
                tokens.append(Token(kind, text, line, col))
            col += len(m.group())
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


@dataclass
class Workspace:
    """Named objects loaded from one or more files.

    ``invalid`` lists the violations of morphisms kept by a non-strict load.
    """

    objects: dict = field(default_factory=dict)
    invalid: dict = field(default_factory=dict)

    def get(self, name, kind=None):
        if name not in self.objects:
            raise InvalidInputError(f"no object named {name!r}")
        obj = self.objects[name]
        if kind is not None and not isinstance(obj, kind):
            raise InvalidInputError(f"{name!r} is a {type(obj).__name__}, not a {_kind_name(kind)}")
        return obj

    def names(self):
        return list(self.objects)


def _kind_name(kind):
    if isinstance(kind, tuple):
        return " or ".join(k.__name__ for k in kind)
    return kind.__name__


class _Parser:
    def __init__(self, source, strict=True):
        self.strict = strict
        self.tokens = tokenize(source)
        self.i = 0
        self.ws = Workspace()

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind, what=None):
        tok = self.tok
        if tok.kind != kind:
            shown = tok.text or "end of file"
            raise self.error(f"expected {what or kind!r}, found {shown!r}")
        return self.next()

    def ident(self, what="identifier"):
        return self.expect("ident", what).text

    def keyword(self, *words):
        tok = self.tok
        if tok.kind == "ident" and tok.text in words:
            return self.next().text
        raise self.error(f"expected one of {', '.join(words)}, found {tok.text or 'end of file'!r}")

    def at(self, kind, text=None):
        return self.tok.kind == kind and (text is None or self.tok.text == text)

    def idents_until_semicolon(self):
        out = []
        while not self.at(";"):
            out.append(self.ident())
        self.expect(";")
        return out

    def parse(self) -> Workspace:
        if self.at("eof"):
            raise self.error("empty input: expected a block")
        while not self.at("eof"):
            start = self.tok
            kind = self.keyword("automaton", "connector", "net", "morphism")
            name = self.ident("block name")
            if name in self.ws.objects:
                raise self.error(f"duplicate name {name!r}", start)
            obj = getattr(self, f"parse_{kind}")(name, start)
            self.ws.objects[name] = obj
        return self.ws

    def _check(self, problems, what, tok):
        if problems:
            raise ParseError(f"invalid {what}: " + "; ".join(problems), tok.line, tok.column)

    def _check_morphism(self, problems, name, tok):
        if problems and not self.strict:
            self.ws.invalid[name] = problems
            return
        self._check(problems, f"morphism {name}", tok)

    def parse_automaton(self, name, start):
        self.expect("{")
        states, ports, transitions, initial = [], [], [], None
        while not self.at("}"):
            if self.at("ident", "states"):
                self.next()
                states += self.idents_until_semicolon()
            elif self.at("ident", "ports"):
                self.next()
                ports += self.idents_until_semicolon()
            elif self.at("ident", "initial"):
                self.next()
                initial = self.ident("initial state")
                self.expect(";")
            else:
                src = self.ident("transition source")
                self.expect("arrow_open", "-{")
                label = []
                while not self.at("arrow_close"):
                    label.append(self.ident("port"))
                    if not self.at("arrow_close"):
                        self.expect(",")
                self.expect("arrow_close", "}->")
                tgt = self.ident("transition target")
                self.expect(";")
                transitions.append((src, label, tgt))
        self.expect("}")
        if initial is None:
            raise self.error(f"automaton {name} has no initial state", start)
        a = PortAutomaton(states, ports, transitions, initial)
        self._check(validate_automaton(a), f"automaton {name}", start)
        return a

    def parse_connector(self, name, start):
        self.expect("{")
        nodes, prims = [], {}
        while not self.at("}"):
            word = self.keyword("nodes", "primitive")
            if word == "nodes":
                nodes += self.idents_until_semicolon()
                continue
            ptok = self.tok
            pid = self.ident("primitive id")
            if pid in prims:
                raise self.error(f"duplicate primitive {pid!r}", ptok)
            self.expect(":")
            ref_tok = self.tok
            ref = self.ident("primitive kind or automaton name")
            if self.at("("):
                self.next()
                args = []
                while not self.at(")"):
                    args.append(self.ident("port"))
                    if not self.at(")"):
                        self.expect(",")
                self.expect(")")
                try:
                    kind = PrimitiveKind(ref)
                except ValueError:
                    raise self.error(f"unknown primitive kind {ref!r}", ref_tok) from None
                try:
                    prims[pid] = make_primitive(kind, args)
                except PortAutError as exc:
                    raise self.error(str(exc), ref_tok) from None
            else:
                obj = self.ws.objects.get(ref)
                if not isinstance(obj, PortAutomaton):
                    raise self.error(f"{ref!r} is not an automaton defined earlier", ref_tok)
                prims[pid] = obj
            self.expect(";")
        self.expect("}")
        c = Connector(prims, nodes)
        self._check(validate_connector(c), f"connector {name}", start)
        return c

    def parse_net(self, name, start):
        self.expect("{")
        transitions, places = [], []
        inputs, outputs, tokens, caps = {}, {}, {}, {}
        while not self.at("}"):
            word = self.keyword("transitions", "place")
            if word == "transitions":
                transitions += self.idents_until_semicolon()
                continue
            p = self.ident("place name")
            places.append(p)
            inputs[p], outputs[p] = {}, {}
            self.expect("{")
            while not self.at("}"):
                ftok = self.tok
                key = self.keyword("in", "out", "tokens", "cap")
                self.expect(":")
                if key in ("in", "out"):
                    arcs = inputs[p] if key == "in" else outputs[p]
                    while not (self.at(";") or self.at("}")):
                        t = self.ident("transition")
                        w = 1
                        if self.at("*"):
                            self.next()
                            w = self._int()
                        arcs[t] = arcs.get(t, 0) + w
                else:
                    (tokens if key == "tokens" else caps)[p] = self._int()
                if self.at(";"):
                    self.next()
                elif not self.at("}"):
                    raise self.error(f"expected ';' after {key}", ftok)
            self.expect("}")
            if self.at(";"):
                self.next()
        self.expect("}")
        net = PetriNet(places, transitions, inputs, outputs, tokens, caps)
        self._check(validate_net(net), f"net {name}", start)
        return net

    def _int(self):
        tok = self.expect("ident", "integer")
        if not tok.text.isdigit():
            raise self.error(f"expected an integer, found {tok.text!r}", tok)
        return int(tok.text)

    def _pair(self):
        left = self.ident()
        self.expect("arrow", "->")
        right = self.ident()
        self.expect(";")
        return left, right

    def parse_morphism(self, name, start):
        self.expect(":")
        src_tok = self.tok
        src = self.ident("source name")
        self.expect("arrow", "->")
        tgt = self.ident("target name")
        source, target = self.ws.objects.get(src), self.ws.objects.get(tgt)
        if source is None or target is None:
            raise self.error(f"morphism {name} refers to undefined objects", src_tok)
        if type(source) is not type(target) or not isinstance(source, (PortAutomaton, Connector)):
            raise self.error("morphisms relate two automata or two connectors", src_tok)
        self.expect("{")
        smap, pmap, prim_map, node_map, witnesses = {}, {}, {}, {}, {}
        while not self.at("}"):
            word = self.keyword("state", "port", "prim", "node", "witness")
            if word == "witness":
                pid = self.ident("primitive id")
                ws, wp = {}, {}
                self.expect("{")
                while not self.at("}"):
                    inner = self.keyword("state", "port")
                    k, v = self._pair()
                    (ws if inner == "state" else wp)[k] = v
                self.expect("}")
                witnesses[pid] = (ws, wp)
            else:
                k, v = self._pair()
                {"state": smap, "port": pmap, "prim": prim_map, "node": node_map}[word][k] = v
        self.expect("}")

        if isinstance(source, PortAutomaton):
            f = PortAutMorphism(
                source, target, {_state(source, k): _state(target, v) for k, v in smap.items()}, pmap
            )
            self._check_morphism(validate_morphism(f), name, start)
            return f
        explicit = {}
        for pid, (ws, wp) in witnesses.items():
            if pid not in source.primitives or pid not in prim_map:
                raise self.error(f"witness for unknown or unmapped primitive {pid!r}", start)
            b, a = target.primitives[prim_map[pid]], source.primitives[pid]
            explicit[pid] = PortAutMorphism(
                b, a, {_state(b, k): _state(a, v) for k, v in ws.items()}, wp
            )
        missing = [p for p in source.primitives if p not in explicit]
        try:
            if missing:
                auto = synthesize_morphism(
                    Connector({p: source.primitives[p] for p in missing}, source.nodes),
                    target,
                    {p: prim_map[p] for p in missing if p in prim_map},
                    node_map,
                )
                explicit.update(auto.witnesses)
        except (KeyError, PortAutError) as exc:
            raise ParseError(f"morphism {name}: cannot build witnesses ({exc})", start.line, start.column)
        f = ConnectorMorphism(source, target, prim_map, node_map, explicit)
        self._check_morphism(validate_connector_morphism(f), name, start)
        return f


def _state(a: PortAutomaton, text):
    if text in a.states:
        return text
    for q in a.states:
        if render_state(q) == text:
            return q
    return text


def parse_text(source: str, strict: bool = True) -> Workspace:
    """Parse a text file.  With ``strict=False`` invalid morphisms are kept
    and their violations recorded in ``Workspace.invalid``."""
    return _Parser(source, strict).parse()


def load(path, strict: bool = True) -> Workspace:
    """Load a text file, or a JSON automaton/connector/net named after the file stem."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        return Workspace({path.stem: from_json(data)})
    return parse_text(text, strict)


# -- text output -----------------------------------------------------------


def _q(name) -> str:
    text = render_state(name)
    if re.fullmatch(r"[A-Za-z0-9_'.]+(?::[A-Za-z0-9_'.]+)*", text) and text not in _KEYWORDS:
        return text
    return json.dumps(text)


_KEYWORDS = {"states", "ports", "initial", "nodes", "primitive", "transitions", "place", "in", "out",
             "tokens", "cap", "state", "port", "prim", "node", "witness", "automaton", "connector",
             "net", "morphism"}


def automaton_text(name, a: PortAutomaton) -> str:
    lines = [f"automaton {_q(name)} {{"]
    lines.append("  states " + " ".join(_q(q) for q in a.sorted_states()) + ";")
    if a.ports:
        lines.append("  ports " + " ".join(_q(n) for n in a.sorted_ports()) + ";")
    lines.append(f"  initial {_q(a.initial)};")
    for t in a.sorted_transitions():
        label = ", ".join(_q(n) for n in sorted(t.label))
        lines.append(f"  {_q(t.source)} -{{{label}}}-> {_q(t.target)};")
    lines.append("}")
    return "\n".join(lines)


def connector_text(name, c: Connector, automaton_names: dict) -> str:
    lines = [f"connector {_q(name)} {{", "  nodes " + " ".join(_q(n) for n in sorted(c.nodes)) + ";"]
    for pid in c.primitive_order():
        lines.append(f"  primitive {_q(pid)} : {_q(automaton_names[pid])};")
    lines.append("}")
    return "\n".join(lines)


def net_text(name, net: PetriNet) -> str:
    lines = [f"net {_q(name)} {{", "  transitions " + " ".join(_q(t) for t in sorted(net.transitions)) + ";"]

    def arcs(d):
        return " ".join(_q(t) if w == 1 else f"{_q(t)}*{w}" for t, w in sorted(d.items()))

    for p in sorted(net.places):
        lines.append(
            f"  place {_q(p)} {{ in: {arcs(net.inputs[p])}; out: {arcs(net.outputs[p])}; "
            f"tokens: {net.initial[p]}; cap: {net.capacity[p]} }}"
        )
    lines.append("}")
    return "\n".join(lines)


def _pairs(keyword, mapping, indent="  "):
    return [
        f"{indent}{keyword} {_q(k)} -> {_q(v)};"
        for k, v in sorted(mapping.items(), key=lambda kv: state_key(kv[0]))
    ]


def morphism_text(name, src_name, tgt_name, f) -> str:
    lines = [f"morphism {_q(name)} : {_q(src_name)} -> {_q(tgt_name)} {{"]
    if isinstance(f, PortAutMorphism):
        lines += _pairs("state", f.state_map) + _pairs("port", f.port_map)
    else:
        lines += _pairs("prim", f.prim_map) + _pairs("node", f.node_map)
        for pid in sorted(f.witnesses):
            w = f.witnesses[pid]
            lines.append(f"  witness {_q(pid)} {{")
            lines += _pairs("state", w.state_map, "    ") + _pairs("port", w.port_map, "    ")
            lines.append("  }")
    lines.append("}")
    return "\n".join(lines)


def dump_text(ws: Workspace) -> str:
    """Serialize a workspace so that :func:`parse_text` gives back equal objects.

    Connector primitives are emitted as automaton blocks named
    ``<connector>.<primitive>`` unless the very same automaton was
    already written as a block of its own.
    """
    blocks = []
    names = {}
    for name, obj in ws.objects.items():
        names.setdefault(id(obj), name)
    emitted = set()

    def ensure(obj):
        if id(obj) in emitted:
            return names[id(obj)]
        raise InvalidInputError(f"object referenced before it is defined: {obj!r}")

    for name, obj in ws.objects.items():
        if isinstance(obj, PortAutomaton):
            blocks.append(automaton_text(name, obj))
        elif isinstance(obj, Connector):
            prim_names = {}
            for pid in obj.primitive_order():
                a = obj.primitives[pid]
                if id(a) in emitted and isinstance(ws.objects.get(names[id(a)]), PortAutomaton):
                    prim_names[pid] = names[id(a)]
                    continue
                pname = f"{name}.{pid}"
                blocks.append(automaton_text(pname, a))
                prim_names[pid] = pname
            blocks.append(connector_text(name, obj, prim_names))
        elif isinstance(obj, PetriNet):
            blocks.append(net_text(name, obj))
        else:
            blocks.append(morphism_text(name, ensure(obj.source), ensure(obj.target), obj))
        emitted.add(id(obj))
    return "\n\n".join(blocks) + "\n"


# -- JSON ------------------------------------------------------------------


def automaton_json(a: PortAutomaton) -> dict:
    return {
        "states": [render_state(q) for q in a.sorted_states()],
        "ports": a.sorted_ports(),
        "initial": render_state(a.initial),
        "transitions": [
            {"from": render_state(t.source), "label": sorted(t.label), "to": render_state(t.target)}
            for t in a.sorted_transitions()
        ],
    }


def connector_json(c: Connector) -> dict:
    return {
        "nodes": sorted(c.nodes),
        "primitives": {pid: automaton_json(c.primitives[pid]) for pid in c.primitive_order()},
    }


def net_json(net: PetriNet) -> dict:
    return {
        "transitions": sorted(net.transitions),
        "places": {
            p: {
                "in": dict(sorted(net.inputs[p].items())),
                "out": dict(sorted(net.outputs[p].items())),
                "tokens": net.initial[p],
                "cap": net.capacity[p],
            }
            for p in sorted(net.places)
        },
    }


def _map_json(mapping):
    return {render_state(k): render_state(v) for k, v in sorted(mapping.items(), key=lambda kv: state_key(kv[0]))}


def morphism_json(f) -> dict:
    if isinstance(f, PortAutMorphism):
        return {
            "source": automaton_json(f.source),
            "target": automaton_json(f.target),
            "state_map": _map_json(f.state_map),
            "port_map": _map_json(f.port_map),
        }
    return {
        "source": connector_json(f.source),
        "target": connector_json(f.target),
        "prim_map": _map_json(f.prim_map),
        "node_map": _map_json(f.node_map),
        "witnesses": {
            pid: {"state_map": _map_json(w.state_map), "port_map": _map_json(w.port_map)}
            for pid, w in sorted(f.witnesses.items())
        },
    }


def to_json(obj) -> dict:
    if isinstance(obj, PortAutomaton):
        return automaton_json(obj)
    if isinstance(obj, Connector):
        return connector_json(obj)
    if isinstance(obj, PetriNet):
        return net_json(obj)
    return morphism_json(obj)


def dumps_json(obj) -> str:
    return json.dumps(to_json(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def automaton_from_json(data) -> PortAutomaton:
    try:
        a = PortAutomaton(
            data["states"],
            data.get("ports", []),
            [(t["from"], t.get("label", []), t["to"]) for t in data.get("transitions", [])],
            data["initial"],
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed automaton JSON: missing {exc}") from None
    problems = validate_automaton(a)
    if problems:
        raise InvalidInputError("invalid automaton", problems)
    return a


def connector_from_json(data) -> Connector:
    prims = {}
    for pid, spec in data.get("primitives", {}).items():
        if "kind" in spec:
            prims[pid] = make_primitive(spec["kind"], spec["ports"])
        else:
            prims[pid] = automaton_from_json(spec)
    c = Connector(prims, data.get("nodes", []))
    problems = validate_connector(c)
    if problems:
        raise InvalidInputError("invalid connector", problems)
    return c


def net_from_json(data) -> PetriNet:
    places = data.get("places", {})
    net = PetriNet(
        places,
        data.get("transitions", []),
        {p: v.get("in", {}) for p, v in places.items()},
        {p: v.get("out", {}) for p, v in places.items()},
        {p: v.get("tokens", 0) for p, v in places.items()},
        {p: v.get("cap", 1) for p, v in places.items()},
    )
    problems = validate_net(net)
    if problems:
        raise InvalidInputError("invalid net", problems)
    return net


def from_json(data) -> Loaded:
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object")
    if "places" in data:
        return net_from_json(data)
    if "primitives" in data or "nodes" in data:
        return connector_from_json(data)
    if "states" in data:
        return automaton_from_json(data)
    raise ParseError("unrecognised JSON document")


# -- DOT -------------------------------------------------------------------


def _dq(text) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def automaton_dot(a: PortAutomaton, name="automaton", hidden=()) -> str:
    """Render an automaton; ``hidden`` ports are left out of labels."""
    hidden = frozenset(hidden)
    lines = [f"digraph {_dq(name)} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for q in a.sorted_states():
        lines.append(f"  {_dq(render_state(q))} [shape=circle];")
    lines.append(f"  __start -> {_dq(render_state(a.initial))};")
    for t in a.sorted_transitions():
        lines.append(
            f"  {_dq(render_state(t.source))} -> {_dq(render_state(t.target))} "
            f"[label={_dq(render_label(t.label - hidden))}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def connector_dot(c: Connector, name="connector", hide_hidden=False) -> str:
    """Bipartite view: boxes for primitives, points for nodes.

    With ``hide_hidden`` nodes whose name starts with ``_`` are not drawn.
    """
    def shown(n):
        return not (hide_hidden and n.startswith("_"))

    lines = [f"graph {_dq(name)} {{"]
    for n in sorted(c.nodes):
        if shown(n):
            lines.append(f"  {_dq('node:' + n)} [shape=point, xlabel={_dq(n)}];")
    for pid in c.primitive_order():
        lines.append(f"  {_dq('prim:' + pid)} [shape=box, label={_dq(pid)}];")
        for n in c.primitives[pid].sorted_ports():
            if shown(n):
                lines.append(f"  {_dq('prim:' + pid)} -- {_dq('node:' + n)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
