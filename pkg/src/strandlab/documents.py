"""Model-file parsing and serialization.

One JSON schema family with a top-level "kind" covers every document the
tools read or write:

  space / extended-space
      {"kind", "messages": [...], "agents": [...],
       "strands": [{"id", "agent", "trace": ["+u", ...]}],
       "conflicts": [["s1", "s2"], ...]}        (conflicts optional)
  system
      {"kind", "agents": [...], "histories": {agent: [["sent u", ...], ...]}}
  protocol
      {"kind", "messages": [...], "agents": {agent: spec}}
      spec ::= {"monotone": ["sent u", ...]}
             | {"union": [spec, ...]}
             | {"table": [{"history": [...], "actions": ["send u", ...]}],
                "default": ["no-op"]}
  runs
      {"kind", "agents": [...], "horizon": T,
       "runs": [[{agent: ["sent u", ...]}, ...], ...]}
  bundles
      {"kind", "bundles": [{"heights": {sid: h},
                            "edges": [[[sid, i], [sid, j]], ...]}]}
  chains
      {"kind", "agents": [...],
       "chains": [{"bundles": [...],
                   "steps": [{"f": {s: t},
                              "extensions": [{"agent", "strand", "event"}]}]}]}

Signed terms render as "+u"/"-u", events as "sent u"/"recv u", actions as
"send u"/"no-op".  Serialization is deterministic (sorted keys and
collections), so identical values always produce identical bytes, and
every emitted document parses back to the value it came from.

Parsing raises SchemaError only for structural problems (bad JSON, wrong
shapes, unparseable tokens).  Semantic well-formedness — duplicate ids,
undeclared references, cross-agent conflict pairs — is left to the
validators, which report rather than throw.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .bundles import Bundle, ConflictRelation
from .chains import ChainPrefix, StepWitness
from .core import Event, GlobalState, Node, SignedTerm, Strand, StrandSpace
from .errors import InputError, SchemaError
from .protocols import (
    NOOP,
    Action,
    JointProtocol,
    MonotoneSpec,
    ProtocolSpec,
    TableSpec,
    UnionSpec,
    send,
)
from .systems import HistorySet, RunPrefix

KINDS = ("space", "extended-space", "system", "protocol", "runs", "bundles", "chains")


# --- token-level renderers and parsers ---------------------------------


def render_term(t: SignedTerm) -> str:
    return str(t)


def parse_term(s: Any) -> SignedTerm:
    if not isinstance(s, str) or len(s) < 2 or s[0] not in "+-":
        raise SchemaError(f"expected a signed term like '+u' or '-u', got {s!r}")
    return SignedTerm(s[0], s[1:])


def render_event(e: Event) -> str:
    return str(e)


def parse_event(s: Any) -> Event:
    if isinstance(s, str):
        parts = s.split(" ")
        if len(parts) == 2 and parts[0] in ("sent", "recv"):
            return Event(parts[0], parts[1])
    raise SchemaError(f"expected an event like 'sent u' or 'recv u', got {s!r}")


def render_action(a: Action) -> str:
    return str(a)


def parse_action(s: Any) -> Action:
    if s == "no-op":
        return NOOP
    if isinstance(s, str):
        parts = s.split(" ")
        if len(parts) == 2 and parts[0] == "send":
            return send(parts[1])
    raise SchemaError(f"expected an action like 'send u' or 'no-op', got {s!r}")


# --- typed documents ----------------------------------------------------


@dataclass(frozen=True)
class SpaceDocument:
    space: StrandSpace
    conf: ConflictRelation | None
    messages: tuple[str, ...]

    @property
    def kind(self) -> str:
        return "space" if self.conf is None else "extended-space"


@dataclass(frozen=True)
class SystemDocument:
    histories: HistorySet


@dataclass(frozen=True)
class ProtocolDocument:
    protocol: JointProtocol


@dataclass(frozen=True)
class RunsDocument:
    agents: tuple[str, ...]
    horizon: int
    runs: frozenset[RunPrefix]


@dataclass(frozen=True)
class BundlesDocument:
    bundles: tuple[Bundle, ...]


@dataclass(frozen=True)
class ChainsDocument:
    agents: tuple[str, ...]
    chains: tuple[ChainPrefix, ...]


Document = (
    SpaceDocument
    | SystemDocument
    | ProtocolDocument
    | RunsDocument
    | BundlesDocument
    | ChainsDocument
)


# --- helpers ------------------------------------------------------------


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaError(message)


def _str_list(value: Any, what: str) -> list[str]:
    _expect(
        isinstance(value, list) and all(isinstance(x, str) for x in value),
        f"{what} must be a list of strings",
    )
    return value


def _obj(value: Any, what: str) -> dict:
    _expect(isinstance(value, dict), f"{what} must be an object")
    return value


# --- parsers ------------------------------------------------------------


def parse_document(text: str) -> Document:
    try:
        body = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    body = _obj(body, "document")
    kind = body.get("kind")
    _expect(kind in KINDS, f"kind must be one of {KINDS}, got {kind!r}")
    try:
        if kind in ("space", "extended-space"):
            return _parse_space(body, kind)
        if kind == "system":
            return _parse_system(body)
        if kind == "protocol":
            return _parse_protocol(body)
        if kind == "runs":
            return _parse_runs(body)
        if kind == "bundles":
            return _parse_bundles(body)
        return _parse_chains(body)
    except InputError as exc:
        # Constructor preconditions double as schema constraints here.
        raise SchemaError(str(exc)) from exc


def load_document(path) -> Document:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_document(fh.read())
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc


def _parse_space(body: dict, kind: str) -> SpaceDocument:
    messages = _str_list(body.get("messages", []), "messages")
    agents = _str_list(body.get("agents", []), "agents")
    strands = []
    assignment = {}
    for raw in body.get("strands", []):
        raw = _obj(raw, "strand entry")
        _expect(isinstance(raw.get("id"), str), "strand id must be a string")
        _expect(isinstance(raw.get("agent"), str), "strand agent must be a string")
        trace = tuple(parse_term(t) for t in raw.get("trace", []))
        strands.append(Strand(raw["id"], trace))
        assignment[raw["id"]] = raw["agent"]
    conf = None
    if "conflicts" in body or kind == "extended-space":
        pairs = []
        for pair in body.get("conflicts", []):
            _expect(
                isinstance(pair, list)
                and len(pair) == 2
                and all(isinstance(x, str) for x in pair),
                "each conflict entry must be a pair of strand ids",
            )
            pairs.append((pair[0], pair[1]))
        conf = ConflictRelation(pairs)
    space = StrandSpace.of(strands, agents, assignment)
    return SpaceDocument(space=space, conf=conf, messages=tuple(sorted(set(messages))))


def _parse_system(body: dict) -> SystemDocument:
    agents = _str_list(body.get("agents", []), "agents")
    histories = _obj(body.get("histories", {}), "histories")
    mapping = {a: [()] for a in agents}
    for agent, entries in histories.items():
        _expect(isinstance(entries, list), f"histories for {agent} must be a list")
        mapping.setdefault(agent, [])
        mapping[agent] = [tuple(parse_event(e) for e in h) for h in entries]
    return SystemDocument(histories=HistorySet.of(mapping))


def _parse_spec(raw: Any) -> ProtocolSpec:
    raw = _obj(raw, "protocol spec")
    if "monotone" in raw:
        return MonotoneSpec(tuple(parse_event(e) for e in raw["monotone"]))
    if "union" in raw:
        members = raw["union"]
        _expect(isinstance(members, list) and members, "union must be a nonempty list")
        return UnionSpec(tuple(_parse_spec(m) for m in members))
    if "table" in raw:
        entries = {}
        for entry in raw["table"]:
            entry = _obj(entry, "table entry")
            history = tuple(parse_event(e) for e in entry.get("history", []))
            actions = [parse_action(a) for a in entry.get("actions", [])]
            _expect(bool(actions), "table entry needs at least one action")
            entries[history] = actions
        default = [parse_action(a) for a in raw.get("default", ["no-op"])]
        return TableSpec.of(entries, default)
    raise SchemaError("protocol spec needs one of: monotone, union, table")


def _parse_protocol(body: dict) -> ProtocolDocument:
    messages = _str_list(body.get("messages", []), "messages")
    agents = _obj(body.get("agents", {}), "agents")
    mapping = {agent: _parse_spec(spec) for agent, spec in agents.items()}
    return ProtocolDocument(protocol=JointProtocol.of(mapping, messages))


def _parse_state(raw: Any, agents: tuple[str, ...]) -> GlobalState:
    raw = _obj(raw, "global state")
    _expect(
        set(raw) == set(agents), f"global state agents {sorted(raw)} != {list(agents)}"
    )
    return GlobalState.of(
        {a: tuple(parse_event(e) for e in raw[a]) for a in agents}
    )


def _parse_runs(body: dict) -> RunsDocument:
    agents = tuple(sorted(_str_list(body.get("agents", []), "agents")))
    horizon = body.get("horizon")
    _expect(isinstance(horizon, int) and horizon >= 0, "horizon must be an integer >= 0")
    runs = set()
    for raw_run in body.get("runs", []):
        _expect(isinstance(raw_run, list), "each run must be a list of states")
        _expect(
            len(raw_run) == horizon + 1,
            f"each run must contain horizon+1 = {horizon + 1} states",
        )
        runs.add(RunPrefix.of(_parse_state(s, agents) for s in raw_run))
    return RunsDocument(agents=agents, horizon=horizon, runs=frozenset(runs))


def _parse_node(raw: Any) -> Node:
    _expect(
        isinstance(raw, list)
        and len(raw) == 2
        and isinstance(raw[0], str)
        and isinstance(raw[1], int),
        f"a node must be a [strand, index] pair, got {raw!r}",
    )
    return Node(raw[0], raw[1])


def _parse_bundle(raw: Any) -> Bundle:
    raw = _obj(raw, "bundle")
    heights = _obj(raw.get("heights", {}), "heights")
    for sid, h in heights.items():
        _expect(isinstance(h, int) and h >= 0, f"height of {sid} must be an integer >= 0")
    edges = []
    for pair in raw.get("edges", []):
        _expect(
            isinstance(pair, list) and len(pair) == 2,
            "each edge must be a [sender, receiver] pair",
        )
        edges.append((_parse_node(pair[0]), _parse_node(pair[1])))
    return Bundle.of(heights, edges)


def _parse_bundles(body: dict) -> BundlesDocument:
    raw = body.get("bundles", [])
    _expect(isinstance(raw, list), "bundles must be a list")
    return BundlesDocument(bundles=tuple(_parse_bundle(b) for b in raw))


def _parse_chains(body: dict) -> ChainsDocument:
    agents = tuple(sorted(_str_list(body.get("agents", []), "agents")))
    chains = []
    for raw in body.get("chains", []):
        raw = _obj(raw, "chain")
        bundles = tuple(_parse_bundle(b) for b in raw.get("bundles", []))
        witnesses = []
        for step in raw.get("steps", []):
            step = _obj(step, "chain step")
            f = _obj(step.get("f", {}), "witness mapping")
            extensions = []
            for ext in step.get("extensions", []):
                ext = _obj(ext, "extension")
                extensions.append(
                    (ext["agent"], ext["strand"], parse_event(ext["event"]))
                )
            witnesses.append(
                StepWitness(
                    f=tuple(sorted(f.items())), extensions=tuple(sorted(extensions))
                )
            )
        chains.append(
            ChainPrefix(agents=agents, bundles=bundles, witnesses=tuple(witnesses))
        )
    return ChainsDocument(agents=agents, chains=tuple(chains))


# --- serializers --------------------------------------------------------


def _dumps(body: dict) -> str:
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def dump_space(doc: SpaceDocument) -> str:
    body: dict = {
        "kind": doc.kind,
        "messages": sorted(doc.messages),
        "agents": list(doc.space.agents),
        "strands": [
            {
                "id": s.id,
                "agent": doc.space.agent_of(s.id),
                "trace": [render_term(t) for t in s.trace],
            }
            for s in doc.space.strands
        ],
    }
    if doc.conf is not None:
        body["conflicts"] = sorted([a, b] for a, b in doc.conf)
    return _dumps(body)


def dump_system(doc: SystemDocument) -> str:
    return _dumps(
        {
            "kind": "system",
            "agents": list(doc.histories.agents),
            "histories": {
                a: [[render_event(e) for e in h] for h in doc.histories.histories(a)]
                for a in doc.histories.agents
            },
        }
    )


def _spec_body(p: ProtocolSpec) -> dict:
    if isinstance(p, MonotoneSpec):
        return {"monotone": [render_event(e) for e in p.events]}
    if isinstance(p, UnionSpec):
        return {"union": [_spec_body(m) for m in p.members]}
    return {
        "table": [
            {
                "history": [render_event(e) for e in h],
                "actions": sorted(render_action(a) for a in actions),
            }
            for h, actions in p.entries
        ],
        "default": sorted(render_action(a) for a in p.default),
    }


def dump_protocol(doc: ProtocolDocument) -> str:
    jp = doc.protocol
    return _dumps(
        {
            "kind": "protocol",
            "messages": list(jp.messages),
            "agents": {a: _spec_body(jp.spec(a)) for a in jp.agents},
        }
    )


def _state_body(g: GlobalState) -> dict:
    return {a: [render_event(e) for e in h] for a, h in g.items()}


def dump_runs(doc: RunsDocument) -> str:
    return _dumps(
        {
            "kind": "runs",
            "agents": list(doc.agents),
            "horizon": doc.horizon,
            "runs": [
                [_state_body(g) for g in run.states] for run in sorted(doc.runs)
            ],
        }
    )


def _bundle_body(b: Bundle) -> dict:
    return {
        "heights": {sid: h for sid, h in b.heights},
        "edges": [
            [[n1.strand, n1.index], [n2.strand, n2.index]]
            for n1, n2 in sorted(b.edges)
        ],
    }


def dump_bundles(doc: BundlesDocument) -> str:
    return _dumps(
        {"kind": "bundles", "bundles": [_bundle_body(b) for b in doc.bundles]}
    )


def dump_chains(doc: ChainsDocument) -> str:
    return _dumps(
        {
            "kind": "chains",
            "agents": list(doc.agents),
            "chains": [
                {
                    "bundles": [_bundle_body(b) for b in chain.bundles],
                    "steps": [
                        {
                            "f": dict(w.f),
                            "extensions": [
                                {
                                    "agent": agent,
                                    "strand": strand,
                                    "event": render_event(event),
                                }
                                for agent, strand, event in w.extensions
                            ],
                        }
                        for w in chain.witnesses
                    ],
                }
                for chain in doc.chains
            ],
        }
    )


def dump_document(doc: Document) -> str:
    if isinstance(doc, SpaceDocument):
        return dump_space(doc)
    if isinstance(doc, SystemDocument):
        return dump_system(doc)
    if isinstance(doc, ProtocolDocument):
        return dump_protocol(doc)
    if isinstance(doc, RunsDocument):
        return dump_runs(doc)
    if isinstance(doc, BundlesDocument):
        return dump_bundles(doc)
    return dump_chains(doc)
