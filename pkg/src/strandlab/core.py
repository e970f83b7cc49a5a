"""Shared value model: messages, signed terms, events, strands, spaces,
histories and global states.

All values are immutable; nothing here has behavior beyond construction,
equality, rendering and well-formedness checks.  Messages are opaque
atoms: the internal structure of a message is irrelevant to the execution
models, so a message is just its name.

Conventions:
  * strand positions are 1-based;
  * a signed term ``+u`` is the sending of message ``u``, ``-u`` its
    reception;
  * the corresponding run-level events are ``sent(u)`` and ``recv(u)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import InputError

POSITIVE = "+"
NEGATIVE = "-"
SENT = "sent"
RECV = "recv"


def _check_token(value: str, what: str) -> None:
    if not value or any(c.isspace() for c in value):
        raise InputError(f"{what} must be a nonempty token without whitespace: {value!r}")


@dataclass(frozen=True, order=True)
class SignedTerm:
    """A send (+u) or receive (-u) of a message."""

    sign: str
    message: str

    def __post_init__(self):
        if self.sign not in (POSITIVE, NEGATIVE):
            raise InputError(f"sign must be '+' or '-', got {self.sign!r}")
        _check_token(self.message, "message")

    @property
    def positive(self) -> bool:
        return self.sign == POSITIVE

    def __str__(self) -> str:
        return f"{self.sign}{self.message}"


def positive(message: str) -> SignedTerm:
    return SignedTerm(POSITIVE, message)


def negative(message: str) -> SignedTerm:
    return SignedTerm(NEGATIVE, message)


@dataclass(frozen=True, order=True)
class Event:
    """A local event: message sent or message received."""

    kind: str
    message: str

    def __post_init__(self):
        if self.kind not in (SENT, RECV):
            raise InputError(f"event kind must be 'sent' or 'recv', got {self.kind!r}")
        _check_token(self.message, "message")

    def __str__(self) -> str:
        return f"{self.kind} {self.message}"


def sent(message: str) -> Event:
    return Event(SENT, message)


def recv(message: str) -> Event:
    return Event(RECV, message)


# ``sent(u) <-> +u`` and ``recv(u) <-> -u``; applying the map twice is the
# identity on both carriers.

def event_to_term(event: Event) -> SignedTerm:
    return SignedTerm(POSITIVE if event.kind == SENT else NEGATIVE, event.message)


def term_to_event(term: SignedTerm) -> Event:
    return Event(SENT if term.positive else RECV, term.message)


def event_term_bijection(x: Event | SignedTerm) -> SignedTerm | Event:
    """Map an event to its signed term, or a signed term to its event."""
    if isinstance(x, Event):
        return event_to_term(x)
    if isinstance(x, SignedTerm):
        return term_to_event(x)
    raise InputError(f"expected Event or SignedTerm, got {type(x).__name__}")


History = tuple[Event, ...]
EMPTY_HISTORY: History = ()


@dataclass(frozen=True, order=True)
class Strand:
    """A named, nonempty trace of signed terms."""

    id: str
    trace: tuple[SignedTerm, ...]

    def __post_init__(self):
        _check_token(self.id, "strand id")
        object.__setattr__(self, "trace", tuple(self.trace))

    def __len__(self) -> int:
        return len(self.trace)


@dataclass(frozen=True, order=True)
class Node:
    """A position within a strand's trace (1-based)."""

    strand: str
    index: int


@dataclass(frozen=True)
class StrandSpace:
    """A finite set of strands together with an agent assignment.

    A plain (agent-free) space is represented with the identity
    assignment: each strand is its own agent.
    """

    strands: tuple[Strand, ...]
    agents: tuple[str, ...]
    assignment: tuple[tuple[str, str], ...]  # (strand id, agent), sorted

    _by_id: Mapping[str, Strand] = field(
        init=False, repr=False, compare=False, hash=False, default=None
    )

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {s.id: s for s in self.strands})

    @classmethod
    def of(
        cls,
        strands: Iterable[Strand],
        agents: Iterable[str],
        assignment: Mapping[str, str],
    ) -> "StrandSpace":
        return cls(
            strands=tuple(sorted(strands, key=lambda s: s.id)),
            agents=tuple(sorted(set(agents))),
            assignment=tuple(sorted(assignment.items())),
        )

    @classmethod
    def identity(cls, strands: Iterable[Strand]) -> "StrandSpace":
        """A plain space: every strand executed by its own agent."""
        strands = list(strands)
        return cls.of(strands, (s.id for s in strands), {s.id: s.id for s in strands})

    def with_identity_assignment(self) -> "StrandSpace":
        return StrandSpace.identity(self.strands)

    @property
    def assignment_map(self) -> dict[str, str]:
        return dict(self.assignment)

    def is_identity_assigned(self) -> bool:
        return all(sid == agent for sid, agent in self.assignment) and set(
            self.agents
        ) == {s.id for s in self.strands}

    def strand(self, sid: str) -> Strand:
        try:
            return self._by_id[sid]
        except KeyError:
            raise InputError(f"unknown strand id: {sid!r}") from None

    def agent_of(self, sid: str) -> str:
        self.strand(sid)
        return self.assignment_map[sid]

    def strands_of(self, agent: str) -> list[Strand]:
        amap = self.assignment_map
        return [s for s in self.strands if amap.get(s.id) == agent]

    def messages(self) -> frozenset[str]:
        return frozenset(t.message for s in self.strands for t in s.trace)

    def nodes(self) -> Iterator[Node]:
        for s in self.strands:
            for i in range(1, len(s) + 1):
                yield Node(s.id, i)

    def node_count(self) -> int:
        return sum(len(s) for s in self.strands)


def term_of(space: StrandSpace, node: Node) -> SignedTerm:
    """The signed term at a node of the space."""
    strand = space.strand(node.strand)
    if not 1 <= node.index <= len(strand):
        raise InputError(
            f"node index {node.index} out of range for strand {node.strand!r} "
            f"(trace length {len(strand)})"
        )
    return strand.trace[node.index - 1]


@dataclass(frozen=True)
class SpaceReport:
    """Well-formedness report for a strand space; never raised."""

    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems


def validate_space(space: StrandSpace) -> SpaceReport:
    """Report duplicate strand ids, empty traces and assignment gaps."""
    problems: list[str] = []
    seen: set[str] = set()
    for s in space.strands:
        if s.id in seen:
            problems.append(f"duplicate strand id: {s.id}")
        seen.add(s.id)
        if len(s.trace) == 0:
            problems.append(f"empty trace on strand {s.id}")
    amap = space.assignment_map
    for s in space.strands:
        if s.id not in amap:
            problems.append(f"unassigned strand: {s.id}")
        elif amap[s.id] not in space.agents:
            problems.append(f"strand {s.id} assigned to undeclared agent {amap[s.id]}")
    for sid in amap:
        if sid not in seen:
            problems.append(f"assignment references unknown strand: {sid}")
    return SpaceReport(tuple(problems))


@dataclass(frozen=True, order=True)
class GlobalState:
    """A tuple of per-agent local histories."""

    locals: tuple[tuple[str, History], ...]  # sorted by agent

    @classmethod
    def of(cls, mapping: Mapping[str, Iterable[Event]]) -> "GlobalState":
        return cls(tuple(sorted((a, tuple(h)) for a, h in mapping.items())))

    @classmethod
    def empty(cls, agents: Iterable[str]) -> "GlobalState":
        return cls.of({a: () for a in agents})

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.locals)

    def history(self, agent: str) -> History:
        for a, h in self.locals:
            if a == agent:
                return h
        raise InputError(f"unknown agent: {agent!r}")

    def items(self) -> tuple[tuple[str, History], ...]:
        return self.locals

    def extend(self, events: Mapping[str, Event]) -> "GlobalState":
        """Append one event to each listed agent's history."""
        return GlobalState(
            tuple(
                (a, h + (events[a],) if a in events else h) for a, h in self.locals
            )
        )
