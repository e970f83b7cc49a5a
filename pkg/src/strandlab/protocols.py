"""Protocols over histories and the round semantics that runs them.

A protocol maps each local history to a nonempty set of actions (send a
message, or do nothing).  Three spec forms are supported:

  * monotone — a fixed event sequence e_1, ..., e_k: find the largest i
    such that e_1, ..., e_i have all occurred (counted with multiplicity)
    and send the next listed message if position i+1 is a send, else do
    nothing;
  * union — the pointwise union of member protocols;
  * table — explicit history-to-actions entries, with a default for
    histories not listed.

The round semantics is nondeterministic: each agent picks an action from
its protocol and then either stutters, records its send, or records a
receive that the round's cumulative send counts can justify.  Receives
are available in every round regardless of the chosen action — delivery
is the environment's move, not the agent's.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

from .budget import StateBudget, ensure
from .core import Event, GlobalState, History, recv, sent
from .errors import InputError
from .systems import MP2_STRONG, RunPrefix, mp2_problem


@dataclass(frozen=True, order=True)
class Action:
    """Send a specific message, or do nothing."""

    kind: str  # "send" or "no-op"
    message: str | None = None

    def __post_init__(self):
        if self.kind == "send":
            if not self.message:
                raise InputError("a send action carries exactly one message")
        elif self.kind == "no-op":
            if self.message is not None:
                raise InputError("no-op carries no message")
        else:
            raise InputError(f"unknown action kind: {self.kind!r}")

    def __str__(self) -> str:
        return "no-op" if self.kind == "no-op" else f"send {self.message}"


NOOP = Action("no-op")


def send(message: str) -> Action:
    return Action("send", message)


@dataclass(frozen=True)
class MonotoneSpec:
    """A protocol fully described by one fixed event sequence."""

    events: tuple[Event, ...]


@dataclass(frozen=True)
class UnionSpec:
    """The pointwise union of member protocols."""

    members: tuple

    def __post_init__(self):
        if not self.members:
            raise InputError("a union protocol needs at least one member")


@dataclass(frozen=True)
class TableSpec:
    """Explicit history-to-actions entries with a default action set."""

    entries: tuple[tuple[History, frozenset[Action]], ...]
    default: frozenset[Action] = frozenset({NOOP})

    def __post_init__(self):
        if not self.default:
            raise InputError("the default action set must be nonempty")
        for history, actions in self.entries:
            if not actions:
                raise InputError(
                    f"empty action set for history {[str(e) for e in history]}"
                )

    @classmethod
    def of(
        cls,
        entries: Mapping[History, Iterable[Action]],
        default: Iterable[Action] = (NOOP,),
    ) -> "TableSpec":
        return cls(
            entries=tuple(
                sorted((tuple(h), frozenset(acts)) for h, acts in entries.items())
            ),
            default=frozenset(default),
        )


ProtocolSpec = MonotoneSpec | UnionSpec | TableSpec


def _monotone_progress(events: tuple[Event, ...], h: History) -> int:
    """Largest i such that e_1, ..., e_i all occur in h, with multiplicity."""
    have = Counter(h)
    need: Counter = Counter()
    best = 0
    for i, e in enumerate(events, start=1):
        need[e] += 1
        if all(have[k] >= n for k, n in need.items()):
            best = i
    return best


def eval_protocol(p: ProtocolSpec, h: History) -> frozenset[Action]:
    """The nonempty set of actions the protocol allows at a history."""
    h = tuple(h)
    if isinstance(p, MonotoneSpec):
        i = _monotone_progress(p.events, h)
        if i < len(p.events) and p.events[i].kind == "sent":
            return frozenset({send(p.events[i].message)})
        return frozenset({NOOP})
    if isinstance(p, UnionSpec):
        out: set[Action] = set()
        for member in p.members:
            out |= eval_protocol(member, h)
        return frozenset(out)
    if isinstance(p, TableSpec):
        for history, actions in p.entries:
            if history == h:
                return actions
        return p.default
    raise InputError(f"unknown protocol spec: {type(p).__name__}")


@dataclass(frozen=True)
class JointProtocol:
    """One protocol per agent, over an explicit message universe."""

    per_agent: tuple[tuple[str, ProtocolSpec], ...]
    messages: tuple[str, ...]

    @classmethod
    def of(
        cls, mapping: Mapping[str, ProtocolSpec], messages: Iterable[str]
    ) -> "JointProtocol":
        return cls(
            per_agent=tuple(sorted(mapping.items())),
            messages=tuple(sorted(set(messages))),
        )

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.per_agent)

    def spec(self, agent: str) -> ProtocolSpec:
        for a, p in self.per_agent:
            if a == agent:
                return p
        raise InputError(f"unknown agent: {agent!r}")


def tau_step(
    jp: JointProtocol, g: GlobalState, mp2: str = MP2_STRONG
) -> frozenset[GlobalState]:
    """All global states one protocol round can produce.

    Per agent: keep the history, append sent(u) when the chosen action is
    send(u), or append recv(u); the joint outcome stands only if its
    receives remain justified by its sends (same-round sends count).
    """
    choices = []
    for a, h in g.items():
        actions = eval_protocol(jp.spec(a), h)
        opts: list[tuple[str, Event] | None] = [None]
        for action in sorted(actions):
            if action.kind == "send":
                opts.append((a, sent(action.message)))
        for u in jp.messages:
            opts.append((a, recv(u)))
        choices.append(opts)
    out = set()
    for combo in product(*choices):
        g2 = g.extend({a: e for pick in combo if pick for a, e in [pick]})
        if mp2_problem(g2, mp2) is None:
            out.add(g2)
    return frozenset(out)


def generate_runs(
    jp: JointProtocol,
    horizon: int,
    mp2: str = MP2_STRONG,
    budget: StateBudget | None = None,
) -> frozenset[RunPrefix]:
    """All run prefixes the joint protocol can generate from empty start."""
    if horizon < 0:
        raise InputError("horizon must be non-negative")
    budget = ensure(budget)
    start = RunPrefix.of([GlobalState.empty(jp.agents)])
    frontier = [start]
    budget.tick()
    for _ in range(horizon):
        nxt = []
        for run in frontier:
            for g2 in tau_step(jp, run.final(), mp2):
                budget.tick()
                nxt.append(RunPrefix(run.states + (g2,)))
        frontier = nxt
    return frozenset(frontier)


def all_histories(messages: Iterable[str], bound: int) -> Iterable[History]:
    """Every event sequence over the message alphabet, up to a length."""
    alphabet = [e for u in sorted(set(messages)) for e in (sent(u), recv(u))]
    for n in range(bound + 1):
        for combo in product(alphabet, repeat=n):
            yield combo


def is_monotone_realization(
    candidate: Iterable[Event],
    p: TableSpec,
    bound: int,
    messages: Iterable[str] | None = None,
) -> bool:
    """Whether a table protocol behaves like the candidate monotone one
    on every history up to the length bound."""
    if bound < 0:
        raise InputError("bound must be non-negative")
    candidate = MonotoneSpec(tuple(candidate))
    if messages is None:
        pool = {e.message for e in candidate.events}
        pool |= {e.message for h, _ in p.entries for e in h}
        pool |= {
            a.message
            for _, acts in p.entries
            for a in acts
            if a.message is not None
        }
        pool |= {a.message for a in p.default if a.message is not None}
        messages = pool
    return all(
        eval_protocol(p, h) == eval_protocol(candidate, h)
        for h in all_histories(messages, bound)
    )
