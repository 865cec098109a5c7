"""Port automata, connectors and their composition.

Automata compose by pullback, connectors by pushout, and the semantics
functor relates the two.  Reo primitives and Petri nets are encoded as
connectors; rewriting a connector by a rule carries its state along.
"""
from .automaton import (
    FINAL,
    PortAutMorphism,
    PortAutomaton,
    Transition,
    check_isomorphic,
    compose_morphisms,
    find_simulation,
    hide_ports,
    identity,
    iter_isomorphisms,
    iter_simulations,
    reachable,
    state_after,
    terminal_morphism,
    validate_automaton,
    validate_morphism,
)
from .compose import (
    Cospan,
    PullbackResult,
    induced_pullback_morphism,
    mediating_morphism,
    product,
    pullback,
)
from .connector import (
    Connector,
    ConnectorMorphism,
    ConnectorSpan,
    PushoutResult,
    check_connector_isomorphic,
    compose_connector_morphisms,
    connector_identity,
    pushout,
    pushout_mediating,
    synthesize_morphism,
    validate_connector,
    validate_connector_morphism,
)
from .errors import (
    InvalidInputError,
    MismatchError,
    NonCommutingError,
    ParseError,
    PortAutError,
    ResourceError,
    SearchBudgetExceeded,
    SizeGuardError,
    UnknownStateError,
    UnsupportedError,
)
from .petri import PetriNet, encode_net, encode_place, marking_graph, validate_net
from .reconfig import Match, ReconfigRule, TransferReport, Verdict, apply_rule, identity_rule
from .reo import HIDDEN_NODES, PrimitiveKind, build_example_figures, make_primitive
from .semantics import CompositionalityReport, check_compositionality, sem_connector, sem_morphism

__version__ = "0.1.0"
