"""Chains of bundles and the translation from strand spaces to runs.

A chain starts at the empty bundle and grows one bundle at a time.  A
single step B1 -> B2 is witnessed by a bijection f on strands that
respects the agent assignment and satisfies:

  1. every node <s,i> of B1 appears as <f(s),i> in B2 with the same term;
  2. every communication edge of B1 is (under f) an edge of B2;
  3. per agent, the total height grows by at most one node.

When an agent's total grows by exactly one, the step performs that
agent's event: the send or receive written at the one new node.  Reading
off these events along a chain yields a run prefix; the translation of a
space is the set of run prefixes of all its chains.

The bijection search treats each agent independently (f preserves
agents) and is exhaustive over the active strands; the inactive
remainder can always be completed to a bijection and is never recorded.
A useful consequence of clause 1 is that the per-agent multiset of node
terms of B1 reappears in B2, so the event of a step does not depend on
which witness f is found.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .budget import StateBudget, ensure
from .bundles import (
    EMPTY_BUNDLE,
    Bundle,
    ConflictRelation,
    enumerate_bundles,
)
from .core import Event, GlobalState, History, Node, StrandSpace, term_to_event
from .errors import InputError
from .systems import RunPrefix


@dataclass(frozen=True)
class StepWitness:
    """Certificate that one bundle steps to another.

    ``f`` is the witnessing bijection restricted to strands active in the
    source bundle; ``extensions`` lists, per extending agent, the strand
    that grew and the event performed.
    """

    f: tuple[tuple[str, str], ...]
    extensions: tuple[tuple[str, str, Event], ...]  # (agent, strand, event)

    def event_map(self) -> dict[str, Event]:
        return {agent: event for agent, _, event in self.extensions}


@dataclass(frozen=True)
class ChainPrefix:
    """Bundles B_0, ..., B_T from the empty bundle, with step witnesses."""

    agents: tuple[str, ...]
    bundles: tuple[Bundle, ...]
    witnesses: tuple[StepWitness, ...]

    def __post_init__(self):
        if not self.bundles or not self.bundles[0].is_empty():
            raise InputError("a chain starts at the empty bundle")
        if len(self.witnesses) != len(self.bundles) - 1:
            raise InputError("one witness is required per consecutive bundle pair")

    @property
    def length(self) -> int:
        return len(self.bundles) - 1

    def final(self) -> Bundle:
        return self.bundles[-1]


def _agent_node_counts(space: StrandSpace, bundle: Bundle) -> dict[str, int]:
    counts = {a: 0 for a in space.agents}
    for sid, h in bundle.heights:
        counts[space.agent_of(sid)] += h
    return counts


def _injections(sources: list, targets_per_source: list[list]) -> list[dict]:
    """All injective choices of a distinct target for each source."""
    out: list[dict] = []

    def rec(i: int, acc: dict, used: set):
        if i == len(sources):
            out.append(dict(acc))
            return
        for t in targets_per_source[i]:
            if t not in used:
                acc[sources[i]] = t
                used.add(t)
                rec(i + 1, acc, used)
                used.discard(t)
                del acc[sources[i]]

    rec(0, {}, set())
    return out


def check_step(
    space: StrandSpace,
    b1: Bundle,
    b2: Bundle,
    force_identity: bool = False,
) -> StepWitness | None:
    """Search for a witness that b1 steps to b2; None when there is none.

    ``force_identity`` restricts the search to f = identity, for spaces
    where moving a prefix between strands is not wanted.
    """
    h1, h2 = b1.height_map, b2.height_map
    counts1 = _agent_node_counts(space, b1)
    counts2 = _agent_node_counts(space, b2)
    diffs = {a: counts2[a] - counts1[a] for a in space.agents}
    if any(d < 0 or d > 1 for d in diffs.values()):
        return None

    by_agent: dict[str, list[str]] = {}
    for sid in b1.active_strands():
        by_agent.setdefault(space.agent_of(sid), []).append(sid)

    per_agent_choices: list[list[dict]] = []
    for agent in sorted(by_agent):
        sources = by_agent[agent]
        targets: list[list[str]] = []
        for sid in sources:
            prefix = space.strand(sid).trace[: h1[sid]]
            if force_identity:
                pool = [space.strand(sid)]
            else:
                pool = space.strands_of(agent)
            targets.append(
                [
                    t.id
                    for t in pool
                    if h2.get(t.id, 0) >= h1[sid] and t.trace[: h1[sid]] == prefix
                ]
            )
        choices = _injections(sources, targets)
        if not choices:
            return None
        per_agent_choices.append(choices)

    for combo in itertools.product(*per_agent_choices):
        f: dict[str, str] = {}
        for part in combo:
            f.update(part)
        if all(
            (Node(f[n1.strand], n1.index), Node(f[n2.strand], n2.index)) in b2.edges
            for n1, n2 in b1.edges
        ):
            extensions = []
            covered = {f[s]: h1[s] for s in f}
            for agent, d in sorted(diffs.items()):
                if d != 1:
                    continue
                for t in space.strands_of(agent):
                    height = h2.get(t.id, 0)
                    if height > covered.get(t.id, 0):
                        node = Node(t.id, height)
                        event = term_to_event(t.trace[height - 1])
                        extensions.append((agent, t.id, event))
                        break
            return StepWitness(
                f=tuple(sorted(f.items())), extensions=tuple(extensions)
            )
    return None


def _identity_successors(
    space: StrandSpace,
    conf: ConflictRelation | None,
    b: Bundle,
    max_nodes: int,
) -> list[tuple[Bundle, StepWitness]]:
    """Constructive successor generation for identity-assigned spaces.

    With each strand its own agent, the witnessing bijection is forced to
    be the identity, so every successor extends the bundle in place: a
    subset of strands each grows by one node, and each new receive node is
    matched to a previously unmatched (or same-round new) send.
    """
    heights = b.height_map
    active = set(b.active_strands())
    used_senders = {sender for sender, _ in b.edges}
    growable = [s for s in space.strands if heights.get(s.id, 0) < len(s)]
    out: list[tuple[Bundle, StepWitness]] = []

    f = tuple((sid, sid) for sid in b.active_strands())
    for k in range(len(growable) + 1):
        for subset in itertools.combinations(growable, k):
            if b.node_count() + k > max_nodes:
                continue
            newly_active = [s.id for s in subset if s.id not in active]
            if conf is not None:
                pool = active | set(newly_active)
                if any(
                    conf.conflicts(s1, s2)
                    for s1 in newly_active
                    for s2 in pool
                    if s1 != s2
                ):
                    continue
            new_heights = dict(heights)
            new_nodes: list[tuple[Node, str, bool]] = []  # node, message, is_send
            for s in subset:
                i = heights.get(s.id, 0) + 1
                new_heights[s.id] = i
                term = s.trace[i - 1]
                new_nodes.append((Node(s.id, i), term.message, term.positive))

            free_sends: dict[str, list[Node]] = {}
            for sid, h in new_heights.items():
                for i in range(1, h + 1):
                    node = Node(sid, i)
                    term = space.strand(sid).trace[i - 1]
                    if term.positive and node not in used_senders:
                        free_sends.setdefault(term.message, []).append(node)
            recvs_by_msg: dict[str, list[Node]] = {}
            for node, msg, is_send in new_nodes:
                if not is_send:
                    recvs_by_msg.setdefault(msg, []).append(node)

            per_message = []
            feasible = True
            for msg in sorted(recvs_by_msg):
                receivers = recvs_by_msg[msg]
                senders = sorted(free_sends.get(msg, []))
                if len(senders) < len(receivers):
                    feasible = False
                    break
                per_message.append(
                    [
                        tuple(zip(chosen, receivers))
                        for chosen in itertools.permutations(senders, len(receivers))
                    ]
                )
            if not feasible:
                continue

            extensions = tuple(
                sorted(
                    (s.id, s.id, term_to_event(s.trace[new_heights[s.id] - 1]))
                    for s in subset
                )
            )
            witness = StepWitness(f=f, extensions=extensions)
            for combo in itertools.product(*per_message):
                edges = b.edges | {e for group in combo for e in group}
                out.append((Bundle.of(new_heights, edges), witness))
    return out


@dataclass(frozen=True)
class StepGraph:
    """All bundles of a space within a node budget, with step successors."""

    bundles: tuple[Bundle, ...]
    successors: dict

    def succ(self, b: Bundle) -> tuple:
        return self.successors[b]


_GRAPH_CACHE: dict = {}


def step_graph(
    space: StrandSpace,
    conf: ConflictRelation | None = None,
    max_nodes: int = 8,
    budget: StateBudget | None = None,
) -> StepGraph:
    key = (space, conf, max_nodes)
    if key in _GRAPH_CACHE:
        return _GRAPH_CACHE[key]
    budget = ensure(budget)
    bundles = enumerate_bundles(space, conf, max_nodes, budget=budget)
    successors: dict[Bundle, tuple] = {}
    if space.is_identity_assigned():
        for b in bundles:
            succ = _identity_successors(space, conf, b, max_nodes)
            budget.tick(len(succ) or 1)
            succ.sort(key=lambda pair: pair[0].sort_key())
            successors[b] = tuple(succ)
    else:
        for b1 in bundles:
            succ = []
            for b2 in bundles:
                budget.tick()
                witness = check_step(space, b1, b2)
                if witness is not None:
                    succ.append((b2, witness))
            successors[b1] = tuple(succ)
    graph = StepGraph(bundles=bundles, successors=successors)
    _GRAPH_CACHE[key] = graph
    return graph


def bundle_distances(
    space: StrandSpace,
    conf: ConflictRelation | None = None,
    max_nodes: int = 8,
    budget: StateBudget | None = None,
) -> dict[Bundle, int]:
    """Fewest chain steps needed to reach each reachable bundle."""
    graph = step_graph(space, conf, max_nodes, budget)
    dist = {EMPTY_BUNDLE: 0}
    queue = deque([EMPTY_BUNDLE])
    while queue:
        b = queue.popleft()
        for b2, _ in graph.succ(b):
            if b2 not in dist:
                dist[b2] = dist[b] + 1
                queue.append(b2)
    return dist


def enumerate_chain_prefixes(
    space: StrandSpace,
    conf: ConflictRelation | None = None,
    horizon: int = 0,
    max_nodes: int = 8,
    budget: StateBudget | None = None,
) -> tuple[ChainPrefix, ...]:
    """All chain prefixes of exactly the given length, in a fixed order."""
    if horizon < 0:
        raise InputError("horizon must be non-negative")
    budget = ensure(budget)
    graph = step_graph(space, conf, max_nodes, budget)
    agents = space.agents
    prefixes: list[tuple[tuple[Bundle, ...], tuple[StepWitness, ...]]] = [
        ((EMPTY_BUNDLE,), ())
    ]
    for _ in range(horizon):
        extended = []
        for bundles, witnesses in prefixes:
            for b2, w in graph.succ(bundles[-1]):
                budget.tick()
                extended.append((bundles + (b2,), witnesses + (w,)))
        prefixes = extended
    return tuple(
        ChainPrefix(agents=agents, bundles=bs, witnesses=ws) for bs, ws in prefixes
    )


def hist(chain: ChainPrefix, agent: str, m: int) -> History:
    """The history agent has accumulated after the first m steps."""
    if agent not in chain.agents:
        raise InputError(f"unknown agent: {agent!r}")
    if not 0 <= m <= chain.length:
        raise InputError(f"step index {m} out of range 0..{chain.length}")
    events: list[Event] = []
    for witness in chain.witnesses[:m]:
        event = witness.event_map().get(agent)
        if event is not None:
            events.append(event)
    return tuple(events)


def run_from_chain(chain: ChainPrefix) -> RunPrefix:
    """The run prefix reading off each agent's events along the chain."""
    states = [GlobalState.empty(chain.agents)]
    for witness in chain.witnesses:
        states.append(states[-1].extend(witness.event_map()))
    return RunPrefix.of(states)


def translate(
    space: StrandSpace,
    conf: ConflictRelation | None = None,
    horizon: int = 0,
    max_nodes: int = 8,
    budget: StateBudget | None = None,
) -> frozenset[RunPrefix]:
    """The run prefixes of all chains of the space, at the given horizon.

    Rather than materializing every chain, the search tracks, per distinct
    run prefix, the set of bundles its chains can currently be at; each
    run prefix is therefore produced exactly once.
    """
    if horizon < 0:
        raise InputError("horizon must be non-negative")
    budget = ensure(budget)
    graph = step_graph(space, conf, max_nodes, budget)
    start = (GlobalState.empty(space.agents),)
    level: dict[tuple[GlobalState, ...], frozenset[Bundle]] = {
        start: frozenset({EMPTY_BUNDLE})
    }
    for _ in range(horizon):
        nxt: dict[tuple[GlobalState, ...], set[Bundle]] = {}
        for states, bundle_set in level.items():
            groups: dict[tuple[tuple[str, Event], ...], set[Bundle]] = {}
            for b in bundle_set:
                for b2, witness in graph.succ(b):
                    key = tuple(sorted(witness.event_map().items()))
                    groups.setdefault(key, set()).add(b2)
            for key, targets in groups.items():
                budget.tick()
                g2 = states[-1].extend(dict(key))
                nxt.setdefault(states + (g2,), set()).update(targets)
        level = {states: frozenset(bs) for states, bs in nxt.items()}
    return frozenset(RunPrefix.of(states) for states in level)
