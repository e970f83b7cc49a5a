"""Two execution models for security protocols — strand spaces with
bundles and chains, and run-based strand systems — plus the translations
between them, checked by bounded exhaustive enumeration."""

from .bundles import (
    Bundle,
    ConflictRelation,
    bundle_height,
    enumerate_bundles,
    message_equivalent,
    strand_height,
    validate_bundle,
)
from .chains import (
    ChainPrefix,
    StepWitness,
    check_step,
    enumerate_chain_prefixes,
    hist,
    run_from_chain,
    translate,
)
from .constructions import (
    ExtendedSpace,
    extended_space_from_system,
    space_from_monotone,
)
from .core import (
    Event,
    GlobalState,
    Node,
    SignedTerm,
    Strand,
    StrandSpace,
    event_term_bijection,
    negative,
    positive,
    recv,
    sent,
    term_of,
    validate_space,
)
from .errors import BudgetExceededError, InputError, SchemaError, StrandlabError
from .protocols import (
    NOOP,
    Action,
    JointProtocol,
    MonotoneSpec,
    TableSpec,
    UnionSpec,
    eval_protocol,
    generate_runs,
    is_monotone_realization,
    send,
    tau_step,
)
from .systems import (
    HistorySet,
    RunPrefix,
    check_history_preserving,
    check_mp,
    extract_histories,
    generate_system,
    systems_equal,
)

__all__ = [
    "Action",
    "Bundle",
    "BudgetExceededError",
    "ChainPrefix",
    "ConflictRelation",
    "Event",
    "ExtendedSpace",
    "GlobalState",
    "HistorySet",
    "InputError",
    "JointProtocol",
    "MonotoneSpec",
    "NOOP",
    "Node",
    "RunPrefix",
    "SchemaError",
    "SignedTerm",
    "StepWitness",
    "Strand",
    "StrandSpace",
    "StrandlabError",
    "TableSpec",
    "UnionSpec",
    "bundle_height",
    "check_history_preserving",
    "check_mp",
    "check_step",
    "enumerate_bundles",
    "enumerate_chain_prefixes",
    "eval_protocol",
    "event_term_bijection",
    "extended_space_from_system",
    "extract_histories",
    "generate_runs",
    "generate_system",
    "hist",
    "is_monotone_realization",
    "message_equivalent",
    "negative",
    "positive",
    "recv",
    "run_from_chain",
    "send",
    "sent",
    "space_from_monotone",
    "strand_height",
    "systems_equal",
    "tau_step",
    "term_of",
    "translate",
    "validate_bundle",
    "validate_space",
]
