"""Command-line front end.

Exit codes: 0 pass, 1 fail or invalid input, 2 usage, 3 resource guard.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .automaton import (
    PortAutMorphism,
    PortAutomaton,
    check_isomorphic,
    find_simulation,
    hide_ports,
    reachable,
    render_state,
    state_after,
)
from .checks import SUITES, Failure
from .compose import Cospan, describe_pullback, product, pullback
from .connector import (
    Connector,
    ConnectorMorphism,
    ConnectorSpan,
    check_connector_isomorphic,
    pushout,
    validate_connector_morphism,
)
from .errors import PortAutError, ResourceError
from .formats import (
    Workspace,
    automaton_dot,
    connector_dot,
    dump_text,
    dumps_json,
    load,
)
from .petri import PetriNet, encode_net, marking_graph
from .reconfig import Match, ReconfigRule, apply_rule, render_report
from .semantics import check_compositionality, sem_connector

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def _hidden(obj, hide: bool):
    if not hide:
        return frozenset()
    return frozenset(n for n in obj.ports if n.startswith("_"))


def _emit_automaton(a: PortAutomaton, fmt: str, name: str, hide: bool = False) -> str:
    if fmt == "dot":
        return automaton_dot(a, name, hidden=_hidden(a, hide))
    if hide:
        a = hide_ports(a, _hidden(a, hide))
    if fmt == "text":
        return dump_text(Workspace({name: a}))
    return dumps_json(a)


def _emit_connector(c: Connector, fmt: str, name: str, hide: bool = False) -> str:
    if fmt == "dot":
        return connector_dot(c, name, hide_hidden=hide)
    if fmt == "text":
        return dump_text(Workspace({name: c}))
    return dumps_json(c)


def _emit(obj, fmt, name, hide=False) -> str:
    if isinstance(obj, PortAutomaton):
        return _emit_automaton(obj, fmt, name, hide)
    if isinstance(obj, Connector):
        return _emit_connector(obj, fmt, name, hide)
    if fmt == "dot":
        raise PortAutError(f"no DOT rendering for a {type(obj).__name__}")
    if fmt == "text":
        if isinstance(obj, PetriNet):
            return dump_text(Workspace({name: obj}))
        raise PortAutError("morphisms are exported as JSON")
    return dumps_json(obj)


def cmd_parse(args, out):
    ws = load(args.file)
    if args.emit:
        out.write(dump_text(ws))
        return EXIT_PASS
    for name, obj in ws.objects.items():
        out.write(f"{name}: {_describe(obj)}\n")
    return EXIT_PASS


def _describe(obj) -> str:
    if isinstance(obj, PortAutomaton):
        return f"automaton, {len(obj.states)} states, {len(obj.ports)} ports, {len(obj.transitions)} transitions"
    if isinstance(obj, Connector):
        return f"connector, {len(obj.primitives)} primitives, {len(obj.nodes)} nodes"
    if isinstance(obj, PetriNet):
        return f"net, {len(obj.places)} places, {len(obj.transitions)} transitions"
    kind = "connector morphism" if isinstance(obj, ConnectorMorphism) else "automaton morphism"
    return f"{kind}, valid"


def cmd_sem(args, out):
    c = load(args.file).get(args.name, Connector)
    a = sem_connector(c, prune=args.prune).automaton
    if args.prune:
        a = reachable(a)
    out.write(_emit_automaton(a, args.format, f"Sem({args.name})", args.hide_hidden))
    return EXIT_PASS


def cmd_pullback(args, out):
    ws = load(args.file)
    pb = pullback(Cospan(ws.get(args.left, PortAutMorphism), ws.get(args.right, PortAutMorphism)))
    return _write_pullback(pb, args, out)


def cmd_product(args, out):
    ws = load(args.file)
    pb = product(ws.get(args.left, PortAutomaton), ws.get(args.right, PortAutomaton))
    return _write_pullback(pb, args, out)


def _write_pullback(pb, args, out):
    apex = reachable(pb.apex) if args.reachable else pb.apex
    if args.format == "summary":
        out.write(describe_pullback(pb, apex) + "\n")
    else:
        out.write(_emit_automaton(apex, args.format, "pullback"))
    return EXIT_PASS


def cmd_pushout(args, out):
    ws = load(args.file)
    po = pushout(ConnectorSpan(ws.get(args.left, ConnectorMorphism), ws.get(args.right, ConnectorMorphism)))
    out.write(_emit_connector(po.connector, args.format, "pushout", args.hide_hidden))
    return EXIT_PASS


def cmd_simulate_search(args, out):
    ws = load(args.file)
    f = find_simulation(ws.get(args.source, PortAutomaton), ws.get(args.target, PortAutomaton), budget=args.budget)
    if f is None:
        out.write(f"no morphism {args.source} -> {args.target}\n")
        return EXIT_FAIL
    out.write(dumps_json(f))
    return EXIT_PASS


def _as_automaton(obj, args):
    if isinstance(obj, Connector) and args.sem:
        obj = reachable(sem_connector(obj, prune=True).automaton)
    if isinstance(obj, PortAutomaton):
        if args.reachable:
            obj = reachable(obj)
        if args.hide_hidden:
            obj = hide_ports(obj, _hidden(obj, True))
    return obj


def cmd_iso(args, out):
    ws = load(args.file)
    a = _as_automaton(ws.get(args.left, (PortAutomaton, Connector)), args)
    b = _as_automaton(ws.get(args.right, (PortAutomaton, Connector)), args)
    if type(a) is not type(b):
        raise PortAutError("iso compares two automata or two connectors (use --sem for a connector's semantics)")
    found = check_isomorphic(a, b) if isinstance(a, PortAutomaton) else check_connector_isomorphic(a, b)
    if found is None:
        out.write("not isomorphic\n")
        return EXIT_FAIL
    f = found[0]
    out.write("isomorphic\n")
    if isinstance(f, PortAutMorphism):
        for q in sorted(f.state_map, key=render_state):
            out.write(f"  state {render_state(q)} -> {render_state(f.state_map[q])}\n")
        for n in sorted(f.port_map):
            out.write(f"  port {f.port_map[n]} -> {n}\n")
    else:
        for p in sorted(f.prim_map):
            out.write(f"  prim {p} -> {f.prim_map[p]}\n")
        for n in sorted(f.node_map):
            out.write(f"  node {n} -> {f.node_map[n]}\n")
    return EXIT_PASS


def _dump_failure(outdir: Path, label: str, failure: Failure):
    outdir.mkdir(parents=True, exist_ok=True)
    stem = f"{label}-{failure.case}"
    (outdir / f"{stem}.txt").write_text(failure.message + "\n")
    for name, obj in failure.objects.items():
        (outdir / f"{stem}-{name}.json").write_text(dumps_json(obj))


def cmd_check(args, out):
    outdir = Path(args.out)
    if args.suite or args.random is not None:
        if args.file:
            raise PortAutError("give either a file with a span or a random suite, not both")
        names = [args.suite] if args.suite and args.suite != "all" else list(SUITES)
        n = args.random if args.random is not None else 20
        ok = True
        for name in names:
            result = SUITES[name](args.seed, n)
            out.write(result.summary() + "\n")
            for failure in result.failures:
                out.write(f"  case {failure.case}: {failure.message}\n")
                _dump_failure(outdir, result.name, failure)
            ok = ok and result.passed
        return EXIT_PASS if ok else EXIT_FAIL

    if not (args.file and args.left and args.right):
        raise _Usage("check needs FILE LEFT RIGHT, or --suite/--random")
    # invalid legs are reported as counterexamples rather than load errors
    ws = load(args.file, strict=False)
    left = ws.get(args.left, ConnectorMorphism)
    right = ws.get(args.right, ConnectorMorphism)
    return _check_span(ConnectorSpan(left, right), outdir, out)


def _check_span(span, outdir, out):
    problems = [f"left: {p}" for p in validate_connector_morphism(span.left)]
    problems += [f"right: {p}" for p in validate_connector_morphism(span.right)]
    if not problems:
        report = check_compositionality(span)
        problems = report.problems
    if not problems:
        out.write("compositionality: pass\n")
        return EXIT_PASS
    out.write("compositionality: FAIL\n")
    for p in problems:
        out.write(f"  {p}\n")
    _dump_failure(outdir, "span", Failure(0, "\n".join(problems), {"left": span.left, "right": span.right}))
    out.write(f"counterexample written to {outdir}\n")
    return EXIT_FAIL


def cmd_encode_petri(args, out):
    net = load(args.file).get(args.name, PetriNet)
    out.write(_emit_connector(encode_net(net), args.format, args.name))
    return EXIT_PASS


def cmd_marking_graph(args, out):
    net = load(args.file).get(args.name, PetriNet)
    out.write(_emit_automaton(marking_graph(net), args.format, args.name))
    return EXIT_PASS


def cmd_reconfigure(args, out):
    ws = load(args.file)
    rule = ws.get(args.rule, ConnectorMorphism)
    match = ws.get(args.match, ConnectorMorphism)
    if args.after is not None:
        host = reachable(sem_connector(match.target, prune=True).automaton)
        steps = [s.split("+") for s in args.after.split(",") if s]
        hidden = frozenset(n for n in host.ports if n.startswith("_"))
        state = state_after(host, steps, hidden=hidden)
    elif args.state is not None:
        state = args.state
    else:
        state = sem_connector(match.target, prune=True).automaton.initial
    report = apply_rule(ReconfigRule(rule), Match(match), state)
    out.write(render_report(report) + "\n")
    out.write(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    return EXIT_PASS if report.verdict.value == "VALID" else EXIT_FAIL


def cmd_export(args, out):
    ws = load(args.file)
    out.write(_emit(ws.get(args.name), args.format, args.name, args.hide_hidden))
    return EXIT_PASS


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="portaut", description="Port automata and connector composition.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("parse", cmd_parse, "load and validate a file")
    p.add_argument("file")
    p.add_argument("--emit", action="store_true", help="print the objects back in text form")

    p = add("sem", cmd_sem, "semantics of a connector")
    p.add_argument("file")
    p.add_argument("name")
    p.add_argument("--prune", action="store_true", help="keep reachable states only")
    p.add_argument("--format", choices=("json", "dot", "text"), default="json")
    p.add_argument("--hide-hidden", action="store_true", help="leave ports starting with _ out of DOT labels")

    for name, func, what in (("pullback", cmd_pullback, "morphisms"), ("product", cmd_product, "automata")):
        p = add(name, func, f"{name} of two {what}")
        p.add_argument("file")
        p.add_argument("left")
        p.add_argument("right")
        p.add_argument("--reachable", action="store_true")
        p.add_argument("--format", choices=("json", "dot", "text", "summary"), default="json")

    p = add("pushout", cmd_pushout, "glue two connector morphisms with a common source")
    p.add_argument("file")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--format", choices=("json", "dot", "text"), default="text")
    p.add_argument("--hide-hidden", action="store_true")

    p = add("simulate-search", cmd_simulate_search, "search a morphism between two automata")
    p.add_argument("file")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--budget", type=int, default=10**7)

    p = add("iso", cmd_iso, "decide isomorphism of two automata or connectors")
    p.add_argument("file")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--sem", action="store_true", help="compare the reachable semantics of connectors")
    p.add_argument("--reachable", action="store_true")
    p.add_argument("--hide-hidden", action="store_true", help="drop ports starting with _ before comparing")

    p = add("check", cmd_check, "check compositionality of a span, or run a seeded suite")
    p.add_argument("file", nargs="?")
    p.add_argument("left", nargs="?")
    p.add_argument("right", nargs="?")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"])
    p.add_argument("--random", type=int, metavar="N", help="number of random cases per suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="counterexamples", help="directory for counterexample files")

    for name, func in (("encode-petri", cmd_encode_petri), ("marking-graph", cmd_marking_graph)):
        p = add(name, func, "connector encoding of a net" if name == "encode-petri" else "reachable markings of a net")
        p.add_argument("file")
        p.add_argument("name")
        p.add_argument("--format", choices=("json", "dot", "text"), default="json")

    p = add("reconfigure", cmd_reconfigure, "apply a rule and transfer the host state")
    p.add_argument("file")
    p.add_argument("rule")
    p.add_argument("match")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--state", help="host state, e.g. (q0,q0,q1,q0)")
    group.add_argument("--after", help="comma separated steps fired from the initial state, e.g. C,B (use + for joint steps)")

    p = add("export", cmd_export, "print an object as JSON, DOT or text")
    p.add_argument("file")
    p.add_argument("name")
    p.add_argument("--format", choices=("json", "dot", "text"), default="json")
    p.add_argument("--hide-hidden", action="store_true")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        return args.func(args, out)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"portaut: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        estimate = getattr(exc, "estimate", None)
        extra = f" (estimate {estimate})" if estimate is not None else ""
        print(f"portaut: resource guard: {exc}{extra}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"portaut: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except PortAutError as exc:
        print(f"portaut: {_explain(exc)}", file=sys.stderr)
        return EXIT_FAIL


def _explain(exc) -> str:
    text = str(exc)
    violations = getattr(exc, "violations", None)
    if violations:
        text += "".join(f"\n  {v}" for v in violations)
    return text


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
