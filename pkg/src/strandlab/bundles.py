"""Bundles: causally consistent finite snapshots of strand-space executions.

A bundle is encoded as per-strand prefix heights plus an explicit matching
of send nodes to receive nodes.  Encoding prefixes by heights makes
downward closure along the strand-successor relation structural, so the
axiom checks that remain are:

  * structural edge sanity (terms match, nodes in height, each send feeds
    at most one receive — the matching is injective);
  * B2: every in-height receive node has exactly one incoming edge;
  * B4: the causal graph (communication edges plus strand successors) is
    acyclic;
  * B5 (extended spaces only): no two conflicting strands both appear.

B1 (finiteness) and B3 (downward closure) hold by construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .budget import StateBudget, ensure
from .core import GlobalState, Node, StrandSpace, event_to_term, term_of
from .errors import InputError

CommEdge = tuple[Node, Node]


@dataclass(frozen=True)
class Bundle:
    """Per-strand prefix heights plus a send-to-receive edge matching.

    ``heights`` stores only nonzero entries, sorted by strand id; a strand
    absent from it has height 0 (no node present).
    """

    heights: tuple[tuple[str, int], ...]
    edges: frozenset[CommEdge]

    @classmethod
    def of(
        cls, heights: Mapping[str, int], edges: Iterable[CommEdge] = ()
    ) -> "Bundle":
        return cls(
            heights=tuple(sorted((s, h) for s, h in heights.items() if h > 0)),
            edges=frozenset(edges),
        )

    @property
    def height_map(self) -> dict[str, int]:
        return dict(self.heights)

    def height(self, sid: str) -> int:
        return self.height_map.get(sid, 0)

    def node_count(self) -> int:
        return sum(h for _, h in self.heights)

    def active_strands(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.heights)

    def is_empty(self) -> bool:
        return not self.heights

    def nodes(self) -> Iterator[Node]:
        for s, h in self.heights:
            for i in range(1, h + 1):
                yield Node(s, i)

    def sort_key(self):
        return (self.heights, tuple(sorted(self.edges)))


EMPTY_BUNDLE = Bundle.of({})

# Axiom report keys, in reporting order.  "edges" covers the structural
# requirements of the matching encoding (term agreement, in-height
# endpoints, injectivity of the send side); it is kept apart from B2 so
# that axiom attribution stays exact.
AXIOM_KEYS = ("edges", "B1", "B2", "B3", "B4", "B5")


@dataclass(frozen=True)
class BundleReport:
    """Per-axiom pass/fail with human-readable problem descriptions."""

    problems: tuple[tuple[str, str], ...]  # (axiom key, description)
    checked_b5: bool

    @property
    def ok(self) -> bool:
        return not self.problems

    def failed_axioms(self) -> tuple[str, ...]:
        seen: list[str] = []
        for key, _ in self.problems:
            if key not in seen:
                seen.append(key)
        return tuple(seen)

    def passes(self, key: str) -> bool:
        return all(k != key for k, _ in self.problems)


class ConflictRelation(frozenset):
    """A symmetric set of same-agent strand pairs that may not co-occur.

    Stored as a frozenset of sorted 2-tuples of strand ids.
    """

    def __new__(cls, pairs: Iterable[tuple[str, str]] = ()):
        normalized = set()
        for a, b in pairs:
            if a == b:
                raise InputError(f"conflict pair relates strand {a!r} to itself")
            normalized.add((min(a, b), max(a, b)))
        return super().__new__(cls, normalized)

    def conflicts(self, s1: str, s2: str) -> bool:
        return (min(s1, s2), max(s1, s2)) in self


def validate_conflicts(space: StrandSpace, conf: ConflictRelation) -> list[str]:
    """Problems with a conflict relation: unknown strands, cross-agent pairs."""
    problems = []
    for a, b in sorted(conf):
        for sid in (a, b):
            if sid not in space.assignment_map:
                problems.append(f"conflict pair references unknown strand {sid!r}")
                break
        else:
            if space.agent_of(a) != space.agent_of(b):
                problems.append(f"conflict pair spans agents: ({a}, {b})")
    return problems


def _successor_edges(bundle: Bundle) -> Iterator[CommEdge]:
    for s, h in bundle.heights:
        for i in range(1, h):
            yield (Node(s, i), Node(s, i + 1))


def causal_edges(bundle: Bundle) -> list[CommEdge]:
    """All edges of the causal graph: communication plus strand successors."""
    return sorted(bundle.edges) + list(_successor_edges(bundle))


def _toposort(nodes: list[Node], edges: list[CommEdge]) -> list[Node] | None:
    """Kahn's algorithm; None when the graph has a cycle."""
    indeg = {n: 0 for n in nodes}
    out: dict[Node, list[Node]] = {n: [] for n in nodes}
    for a, b in edges:
        out[a].append(b)
        indeg[b] += 1
    frontier = [n for n in nodes if indeg[n] == 0]
    order: list[Node] = []
    while frontier:
        n = frontier.pop()
        order.append(n)
        for m in out[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                frontier.append(m)
    return order if len(order) == len(nodes) else None


def validate_bundle(
    space: StrandSpace, bundle: Bundle, conf: ConflictRelation | None = None
) -> BundleReport:
    """Check the bundle axioms over the given space.

    B5 is checked only when a conflict relation is supplied.  Unknown
    strand ids raise an input error rather than being reported: a bundle
    over the wrong space is a caller mistake, not an axiom failure.
    """
    problems: list[tuple[str, str]] = []
    for sid, h in bundle.heights:
        strand = space.strand(sid)  # raises InputError on unknown ids
        if h > len(strand):
            problems.append(
                ("edges", f"height {h} exceeds trace length of strand {sid}")
            )

    in_height = set(bundle.nodes())

    def term_str(node: Node) -> str:
        return f"{term_of(space, node)}@<{node.strand},{node.index}>"

    senders_used: dict[Node, int] = {}
    for sender, receiver in sorted(bundle.edges):
        for node in (sender, receiver):
            space.strand(node.strand)
        if sender not in in_height or receiver not in in_height:
            problems.append(
                ("edges", f"edge endpoint outside bundle: {sender} -> {receiver}")
            )
            continue
        t1, t2 = term_of(space, sender), term_of(space, receiver)
        if not t1.positive or t2.positive or t1.message != t2.message:
            problems.append(
                ("edges", f"edge terms do not match: {term_str(sender)} -> {term_str(receiver)}")
            )
        senders_used[sender] = senders_used.get(sender, 0) + 1
    for sender, count in sorted(senders_used.items()):
        if count > 1:
            problems.append(
                ("edges", f"send node {sender} matched to {count} receives")
            )

    receivers = {receiver for _, receiver in bundle.edges}
    for node in sorted(in_height):
        if not term_of(space, node).positive and node not in receivers:
            problems.append(
                ("B2", f"receive node <{node.strand},{node.index}> has no sender")
            )
    # A receive with two incoming edges also violates uniqueness.
    incoming: dict[Node, int] = {}
    for _, receiver in bundle.edges:
        incoming[receiver] = incoming.get(receiver, 0) + 1
    for receiver, count in sorted(incoming.items()):
        if count > 1:
            problems.append(
                ("B2", f"receive node <{receiver.strand},{receiver.index}> has {count} senders")
            )

    if _toposort(sorted(in_height), causal_edges(bundle)) is None:
        problems.append(("B4", "causal graph has a cycle"))

    if conf is not None:
        for msg in validate_conflicts(space, conf):
            problems.append(("B5", msg))
        active = set(bundle.active_strands())
        for a, b in sorted(conf):
            if a in active and b in active:
                problems.append(("B5", f"conflicting strands both present: ({a}, {b})"))

    return BundleReport(tuple(problems), checked_b5=conf is not None)


def bundle_height(space: StrandSpace, bundle: Bundle) -> int:
    """Edge count of the longest causal path through the bundle."""
    report = validate_bundle(space, bundle)
    if not report.ok:
        raise InputError(f"invalid bundle: {report.problems[0][1]}")
    nodes = sorted(bundle.nodes())
    edges = causal_edges(bundle)
    order = _toposort(nodes, edges)
    assert order is not None
    out: dict[Node, list[Node]] = {n: [] for n in nodes}
    for a, b in edges:
        out[a].append(b)
    longest = {n: 0 for n in nodes}
    for n in reversed(order):
        for m in out[n]:
            longest[n] = max(longest[n], longest[m] + 1)
    return max(longest.values(), default=0)


def strand_height(space: StrandSpace, bundle: Bundle, sid: str) -> int:
    """The bundle's prefix height for one strand (0 when absent)."""
    space.strand(sid)
    return bundle.height(sid)


def _height_vectors(
    space: StrandSpace, conf: ConflictRelation | None, max_nodes: int
) -> Iterator[dict[str, int]]:
    strands = list(space.strands)

    def rec(i: int, remaining: int, acc: dict[str, int]):
        if i == len(strands):
            yield dict(acc)
            return
        s = strands[i]
        limit = min(len(s), remaining)
        for h in range(0, limit + 1):
            if h > 0 and conf is not None:
                if any(
                    conf.conflicts(s.id, other) for other, hh in acc.items() if hh > 0
                ):
                    continue
            acc[s.id] = h
            yield from rec(i + 1, remaining - h, acc)
        del acc[s.id]

    yield from rec(0, max_nodes, {})


def _matchings(
    receives: list[Node], sends: list[Node]
) -> Iterator[tuple[CommEdge, ...]]:
    """All injective assignments of distinct send nodes to the receives."""
    if len(sends) < len(receives):
        return
    for chosen in itertools.permutations(sends, len(receives)):
        yield tuple(zip(chosen, receives))


def enumerate_bundles(
    space: StrandSpace,
    conf: ConflictRelation | None = None,
    max_nodes: int = 8,
    budget: StateBudget | None = None,
) -> tuple[Bundle, ...]:
    """All valid bundles with at most ``max_nodes`` nodes, in a fixed order.

    Bundles that differ only in their edge matching are distinct results.
    """
    if max_nodes < 0:
        raise InputError("max_nodes must be non-negative")
    budget = ensure(budget)
    found: list[Bundle] = []
    for heights in _height_vectors(space, conf, max_nodes):
        base = Bundle.of(heights)
        sends: dict[str, list[Node]] = {}
        recvs: dict[str, list[Node]] = {}
        for node in base.nodes():
            term = term_of(space, node)
            (sends if term.positive else recvs).setdefault(term.message, []).append(
                node
            )
        per_message = []
        feasible = True
        for msg in sorted(set(sends) | set(recvs)):
            options = list(_matchings(recvs.get(msg, []), sends.get(msg, [])))
            if not options:
                feasible = False
                break
            per_message.append(options)
        if not feasible:
            continue
        for combo in itertools.product(*per_message):
            budget.tick()
            edges = frozenset(e for group in combo for e in group)
            candidate = Bundle(base.heights, edges)
            if _toposort(sorted(candidate.nodes()), causal_edges(candidate)) is not None:
                found.append(candidate)
    found.sort(key=Bundle.sort_key)
    return tuple(found)


def message_equivalent(space: StrandSpace, g: GlobalState, bundle: Bundle) -> bool:
    """Whether a global state and a bundle agree on per-strand event prefixes.

    Only meaningful when each strand is its own agent, so that an agent's
    history and a strand's prefix describe the same locus.
    """
    if not space.is_identity_assigned():
        raise InputError("message_equivalent requires the identity agent assignment")
    if set(g.agents) != {s.id for s in space.strands}:
        raise InputError("global state agents do not match the space's strands")
    for sid, history in g.items():
        if bundle.height(sid) != len(history):
            return False
        for i, event in enumerate(history, start=1):
            if event_to_term(event) != term_of(space, Node(sid, i)):
                return False
    return True
