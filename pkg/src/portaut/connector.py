"""Connectors: named primitive port automata over a shared node set.

A connector morphism ``C1 -> C2`` maps primitives and nodes forward and
carries, for every primitive ``A`` of ``C1``, an explicit witness
simulation ``f_A: f(A) -> A`` whose port map agrees with the node map on
``A``'s ports.  Gluing of connectors is the pushout of a span whose
primitive maps are injective.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .automaton import (
    PortAutMorphism,
    PortAutomaton,
    compose_morphisms,
    identity,
    iter_isomorphisms,
    iter_simulations,
    rename_ports,
    validate_automaton,
    validate_morphism,
)
from .compose import Cospan, PullbackResult, SetPushout, mediating_morphism, pullback, set_pushout
from .errors import InvalidInputError, MismatchError, NonCommutingError, UnsupportedError


@dataclass(frozen=True)
class Connector:
    primitives: Mapping[str, PortAutomaton] = field(default_factory=dict)
    nodes: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "primitives", dict(self.primitives))
        object.__setattr__(self, "nodes", frozenset(self.nodes))

    __hash__ = None

    def primitive_order(self) -> list[str]:
        return sorted(self.primitives)

    def __repr__(self):
        return f"Connector(primitives={self.primitive_order()}, nodes={sorted(self.nodes)})"


@dataclass(frozen=True)
class ConnectorMorphism:
    source: Connector
    target: Connector
    prim_map: Mapping[str, str] = field(default_factory=dict)
    node_map: Mapping[str, str] = field(default_factory=dict)
    witnesses: Mapping[str, PortAutMorphism] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("prim_map", "node_map", "witnesses"):
            object.__setattr__(self, name, dict(getattr(self, name)))

    __hash__ = None

    def __repr__(self):
        return f"ConnectorMorphism(prim_map={self.prim_map}, node_map={self.node_map})"


@dataclass(frozen=True)
class ConnectorSpan:
    left: ConnectorMorphism
    right: ConnectorMorphism

    __hash__ = None


def validate_connector(c: Connector) -> list[str]:
    problems = []
    for pid in c.primitive_order():
        a = c.primitives[pid]
        problems += [f"primitive {pid}: {p}" for p in validate_automaton(a)]
        for n in sorted(a.ports - c.nodes):
            problems.append(f"primitive {pid}: port {n} is not a node of the connector")
    return problems


def validate_connector_morphism(f: ConnectorMorphism) -> list[str]:
    src, tgt = f.source, f.target
    problems = []
    for pid in src.primitive_order():
        if pid not in f.prim_map:
            problems.append(f"primitive map undefined on {pid}")
        elif f.prim_map[pid] not in tgt.primitives:
            problems.append(f"primitive map sends {pid} to unknown {f.prim_map[pid]}")
    for n in sorted(src.nodes):
        if n not in f.node_map:
            problems.append(f"node map undefined on {n}")
        elif f.node_map[n] not in tgt.nodes:
            problems.append(f"node map sends {n} to unknown {f.node_map[n]}")
    if problems:
        return problems
    for pid in src.primitive_order():
        a = src.primitives[pid]
        w = f.witnesses.get(pid)
        if w is None:
            problems.append(f"missing witness for primitive {pid}")
            continue
        if w.source != tgt.primitives[f.prim_map[pid]]:
            problems.append(f"witness for {pid} does not start at primitive {f.prim_map[pid]}")
            continue
        if w.target != a:
            problems.append(f"witness for {pid} does not end at primitive {pid}")
            continue
        problems += [f"witness for {pid}: {p}" for p in validate_morphism(w)]
        for n in sorted(a.ports):
            if w.port_map.get(n) != f.node_map[n]:
                problems.append(
                    f"witness for {pid} maps port {n} to {w.port_map.get(n)}, node map gives {f.node_map[n]}"
                )
    return problems


def connector_identity(c: Connector) -> ConnectorMorphism:
    return ConnectorMorphism(
        c,
        c,
        {p: p for p in c.primitives},
        {n: n for n in c.nodes},
        {p: identity(a) for p, a in c.primitives.items()},
    )


def compose_connector_morphisms(f: ConnectorMorphism, g: ConnectorMorphism) -> ConnectorMorphism:
    """Return ``g . f``; witnesses compose as ``f_A . g_f(A)``."""
    if f.target != g.source:
        raise MismatchError("cannot compose connector morphisms: target/source differ")
    return ConnectorMorphism(
        f.source,
        g.target,
        {p: g.prim_map[f.prim_map[p]] for p in f.source.primitives},
        {n: g.node_map[f.node_map[n]] for n in f.source.nodes},
        {
            p: compose_morphisms(g.witnesses[f.prim_map[p]], f.witnesses[p])
            for p in f.source.primitives
        },
    )


def same_connector_morphism(f: ConnectorMorphism, g: ConnectorMorphism) -> bool:
    """Componentwise equality, witnesses included."""
    if f.prim_map != g.prim_map or f.node_map != g.node_map:
        return False
    if set(f.witnesses) != set(g.witnesses):
        return False
    return all(
        f.witnesses[p].state_map == g.witnesses[p].state_map
        and f.witnesses[p].port_map == g.witnesses[p].port_map
        for p in f.witnesses
    )


def synthesize_morphism(
    source: Connector, target: Connector, prim_map: Mapping[str, str], node_map: Mapping[str, str]
) -> ConnectorMorphism:
    """Build a connector morphism, searching each witness by simulation search.

    Raises :class:`InvalidInputError` if some primitive has no witness
    compatible with ``node_map``.
    """
    witnesses = {}
    for pid, a in source.primitives.items():
        b = target.primitives[prim_map[pid]]
        # the witness port map is pinned by the node map
        pinned = {n: node_map[n] for n in a.ports}
        found = None
        if set(pinned.values()) <= b.ports:
            found = next((w for w in iter_simulations(b, a) if w.port_map == pinned), None)
        if found is None:
            raise InvalidInputError(f"no witness simulation for primitive {pid}")
        witnesses[pid] = found
    return ConnectorMorphism(source, target, prim_map, node_map, witnesses)


def _check_span(span: ConnectorSpan):
    f1, f2 = span.left, span.right
    if f1.source != f2.source:
        raise InvalidInputError("span legs have different sources")
    problems = [f"left leg: {p}" for p in validate_connector_morphism(f1)]
    problems += [f"right leg: {p}" for p in validate_connector_morphism(f2)]
    problems += [f"base: {p}" for p in validate_connector(f1.source)]
    if problems:
        raise InvalidInputError("invalid connector span", problems)
    for side, f in (("left", f1), ("right", f2)):
        if len(set(f.prim_map.values())) != len(f.prim_map):
            raise UnsupportedError(f"{side} leg identifies primitives; pushouts need injective primitive maps")


@dataclass(frozen=True)
class PushoutResult:
    connector: Connector
    left: ConnectorMorphism
    right: ConnectorMorphism
    span: ConnectorSpan
    node_names: SetPushout
    prim_names: SetPushout
    # glued primitive id -> pullback of its shared pair, for the shared ones
    pullbacks: Mapping[str, PullbackResult] = field(default_factory=dict)

    __hash__ = None


def pushout(span: ConnectorSpan) -> PushoutResult:
    """Glue ``C1 <- C0 -> C2``.

    Shared primitives are replaced by the pullback of their witness
    cospan, unshared ones are carried over with ports renamed into the
    glued node set.  The returned legs carry the pullback projections
    (shared case) or renaming morphisms (unshared case) as witnesses.
    """
    _check_span(span)
    f1, f2 = span.left, span.right
    c0, c1, c2 = f1.source, f1.target, f2.target
    nodes = set_pushout(c0.nodes, c1.nodes, c2.nodes, f1.node_map, f2.node_map)
    prims = set_pushout(c0.primitives, c1.primitives, c2.primitives, f1.prim_map, f2.prim_map)

    primitives = {}
    w1, w2 = {}, {}
    pullbacks = {}
    for a0 in sorted(c0.primitives):
        p1, p2 = f1.prim_map[a0], f2.prim_map[a0]
        pid = prims.left[p1]
        pb = pullback(Cospan(f1.witnesses[a0], f2.witnesses[a0]))
        # pullback port classes -> glued node names
        rename = {}
        for n, rep in pb.names.left.items():
            rename[rep] = nodes.left[n]
        for n, rep in pb.names.right.items():
            if rename.setdefault(rep, nodes.right[n]) != nodes.right[n]:
                raise NonCommutingError(f"witness port maps disagree with node maps on {n}")
        glued, back = rename_ports(pb.apex, rename)
        primitives[pid] = glued
        w1[p1] = compose_morphisms(back, pb.proj_left)
        w2[p2] = compose_morphisms(back, pb.proj_right)
        pullbacks[pid] = pb

    for side, c, inj_p, inj_n, w in (
        ("L", c1, prims.left, nodes.left, w1),
        ("R", c2, prims.right, nodes.right, w2),
    ):
        for pid in sorted(c.primitives):
            if pid in w:
                continue
            a = c.primitives[pid]
            glued, back = rename_ports(a, {n: inj_n[n] for n in a.ports})
            primitives[inj_p[pid]] = glued
            w[pid] = back

    c3 = Connector(primitives, nodes.elements)
    g1 = ConnectorMorphism(c1, c3, dict(prims.left), dict(nodes.left), w1)
    g2 = ConnectorMorphism(c2, c3, dict(prims.right), dict(nodes.right), w2)
    return PushoutResult(c3, g1, g2, span, nodes, prims, pullbacks)


def pushout_mediating(po: PushoutResult, h1: ConnectorMorphism, h2: ConnectorMorphism) -> ConnectorMorphism:
    """The unique ``h: C3 -> X`` with ``h . g1 = h1`` and ``h . g2 = h2``."""
    f1, f2 = po.span.left, po.span.right
    if h1.target != h2.target:
        raise MismatchError("h1 and h2 must share their target")
    if h1.source != f1.target or h2.source != f2.target:
        raise MismatchError("h1/h2 do not start at the span's legs")
    if not same_connector_morphism(
        compose_connector_morphisms(f1, h1), compose_connector_morphisms(f2, h2)
    ):
        raise NonCommutingError("h1 . f1 != h2 . f2")
    x = h1.target
    prim_map, node_map = {}, {}
    for inj, h in ((po.prim_names.left, h1), (po.prim_names.right, h2)):
        for p, rep in inj.items():
            prim_map[rep] = h.prim_map[p]
    for inj, h in ((po.node_names.left, h1), (po.node_names.right, h2)):
        for n, rep in inj.items():
            node_map[rep] = h.node_map[n]

    witnesses = {}
    c3 = po.connector
    for pid, a3 in c3.primitives.items():
        xp = x.primitives[prim_map[pid]]
        if pid in po.pullbacks:
            pb = po.pullbacks[pid]
            (p1,) = [p for p, r in po.prim_names.left.items() if r == pid]
            (p2,) = [p for p, r in po.prim_names.right.items() if r == pid]
            into_apex = mediating_morphism(pb, h1.witnesses[p1], h2.witnesses[p2])
            witnesses[pid] = PortAutMorphism(
                xp,
                a3,
                into_apex.state_map,
                {n: node_map[n] for n in a3.ports},
            )
        else:
            left = [p for p, r in po.prim_names.left.items() if r == pid]
            p, h = (left[0], h1) if left else (
                [p for p, r in po.prim_names.right.items() if r == pid][0],
                h2,
            )
            witnesses[pid] = PortAutMorphism(
                xp, a3, h.witnesses[p].state_map, {n: node_map[n] for n in a3.ports}
            )
    return ConnectorMorphism(c3, x, prim_map, node_map, witnesses)


def iter_connector_isomorphisms(c: Connector, d: Connector):
    """Yield ``(prim bijection c->d, node bijection c->d, {pid: iso d-prim -> c-prim})``."""
    if len(c.primitives) != len(d.primitives) or len(c.nodes) != len(d.nodes):
        return
    c_ids, d_ids = c.primitive_order(), d.primitive_order()
    prim_map, node_map, isos = {}, {}, {}

    def attached(conn):
        out = set()
        for a in conn.primitives.values():
            out |= a.ports
        return out

    c_free = sorted(c.nodes - attached(c))
    d_free = sorted(d.nodes - attached(d))
    if len(c_free) != len(d_free):
        return

    def go(i):
        if i == len(c_ids):
            full = dict(node_map)
            full.update(zip(c_free, d_free))
            yield dict(prim_map), full, dict(isos)
            return
        pid = c_ids[i]
        a = c.primitives[pid]
        used = set(prim_map.values())
        taken_nodes = set(node_map.values())
        for qid in ([pid] if pid in d.primitives else []) + [q for q in d_ids if q != pid]:
            if qid in used:
                continue
            b = d.primitives[qid]
            fixed = {n: node_map[n] for n in a.ports if n in node_map}
            for smap, pmap_ba in iter_isomorphisms(a, b, fixed_ports=fixed):
                new = {n: m for m, n in pmap_ba.items() if n not in node_map}
                if any(m in taken_nodes for m in new.values()):
                    continue
                prim_map[pid] = qid
                node_map.update(new)
                isos[pid] = PortAutMorphism(
                    b, a, {v: k for k, v in smap.items()}, {n: m for m, n in pmap_ba.items()}
                )
                yield from go(i + 1)
                del prim_map[pid]
                del isos[pid]
                for n in new:
                    del node_map[n]

    yield from go(0)


def check_connector_isomorphic(
    c: Connector, d: Connector
) -> Optional[tuple[ConnectorMorphism, ConnectorMorphism]]:
    """Return mutually inverse connector morphisms ``(c -> d, d -> c)`` or ``None``."""
    for prim_map, node_map, isos in iter_connector_isomorphisms(c, d):
        f = ConnectorMorphism(c, d, prim_map, node_map, isos)
        inv_p = {v: k for k, v in prim_map.items()}
        g = ConnectorMorphism(
            d,
            c,
            inv_p,
            {v: k for k, v in node_map.items()},
            {
                q: PortAutMorphism(
                    isos[inv_p[q]].target,
                    isos[inv_p[q]].source,
                    {v: k for k, v in isos[inv_p[q]].state_map.items()},
                    {v: k for k, v in isos[inv_p[q]].port_map.items()},
                )
                for q in d.primitives
            },
        )
        return f, g
    return None
