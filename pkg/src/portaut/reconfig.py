"""Rule-based reconfiguration by connector gluing, with state transfer.

A rule ``C0 -> C1`` is applied to a host ``C2`` through a match
``C0 -> C2``; the result is the pushout ``C3``.  The semantic image of
the host leg, ``Sem(C3) -> Sem(C2)``, tells which new states refine the
host's current state.  If none of them is reachable in ``Sem(C3)`` the
reconfiguration would leave the system in an invalid state.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .automaton import PortAutMorphism, lookup_state, reachable, render_state
from .connector import (
    Connector,
    ConnectorMorphism,
    ConnectorSpan,
    PushoutResult,
    connector_identity,
    pushout,
    validate_connector_morphism,
)
from .errors import InvalidInputError, MismatchError, UnknownStateError
from .semantics import _sem_morphism, sem_connector


class Verdict(Enum):
    VALID = "VALID"
    INVALID_STATE = "INVALID-STATE"


@dataclass(frozen=True)
class ReconfigRule:
    rule: ConnectorMorphism

    __hash__ = None


@dataclass(frozen=True)
class Match:
    match: ConnectorMorphism

    __hash__ = None


@dataclass(frozen=True)
class TransferReport:
    new_connector: Connector
    sem_morphism: PortAutMorphism
    current_state: object
    # (state of Sem(C3), reachable?) in rendered-state order
    preimages: tuple
    verdict: Verdict
    pushout: PushoutResult

    __hash__ = None

    @property
    def reachable_preimages(self) -> list:
        return [s for s, ok in self.preimages if ok]

    @property
    def ambiguous(self) -> bool:
        return len(self.reachable_preimages) > 1

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "ambiguous": self.ambiguous,
            "current_state": render_state(self.current_state),
            "preimages": [
                {"state": render_state(s), "reachable": ok} for s, ok in self.preimages
            ],
            "primitives": sorted(self.new_connector.primitives),
            "nodes": sorted(self.new_connector.nodes),
        }


def identity_rule(interface: Connector) -> ReconfigRule:
    return ReconfigRule(connector_identity(interface))


def apply_rule(
    rule: ReconfigRule, match: Match, current_state, cap: Optional[int] = None
) -> TransferReport:
    """Glue the rule into the host and transfer ``current_state``.

    ``current_state`` must be a reachable state of the host semantics,
    given as a value or in rendered form such as ``"(q1,q0)"``.
    """
    f1, f2 = rule.rule, match.match
    if f1.source != f2.source:
        raise MismatchError("rule and match do not share their interface connector")
    for what, f in (("rule", f1), ("match", f2)):
        problems = validate_connector_morphism(f)
        if problems:
            raise InvalidInputError(f"invalid {what}", problems)

    host_sem = sem_connector(f2.target, cap=cap)
    host_reach = reachable(host_sem.automaton)
    try:
        current = lookup_state(host_reach, current_state)
    except UnknownStateError:
        raise UnknownStateError(
            f"{render_state(current_state)} is not a reachable state of the host"
        ) from None

    po = pushout(ConnectorSpan(f1, f2))
    new_sem = sem_connector(po.connector, cap=cap)
    phi = _sem_morphism(po.right, host_sem, new_sem)
    live = reachable(new_sem.automaton).states
    pre = sorted(
        (s for s, image in phi.state_map.items() if image == current), key=render_state
    )
    preimages = tuple((s, s in live) for s in pre)
    verdict = Verdict.VALID if any(ok for _, ok in preimages) else Verdict.INVALID_STATE
    return TransferReport(po.connector, phi, current, preimages, verdict, po)


def render_report(report: TransferReport) -> str:
    lines = [f"verdict: {report.verdict.value}"]
    if report.ambiguous:
        lines.append("warning: several reachable states refine the current state")
    lines.append(f"current host state: {render_state(report.current_state)}")
    if not report.preimages:
        lines.append("no state of the new connector maps to the current state")
    for s, ok in report.preimages:
        lines.append(f"  {render_state(s)}  {'reachable' if ok else 'unreachable'}")
    return "\n".join(lines)
