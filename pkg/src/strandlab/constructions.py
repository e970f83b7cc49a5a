"""Builders that realize run-based systems as strand spaces.

Two constructions:

  * from a history set: one strand per agent and nonempty admissible
    history, with same-agent strands pairwise conflicting so that a
    bundle commits each agent to a single history;
  * from a joint protocol whose every per-agent spec is monotone (or a
    union of monotone specs): one send-side strand per monotone
    component carrying that component's full event sequence, plus one
    single-node receive strand per agent and message.

For the protocol construction, earlier stages of a component are covered
by bundles that cut the full strand short, so no per-prefix strands are
materialized.  Materializing every prefix as its own strand would let
one bundle pick up two prefixes of the same component and replay a send
the protocol performs only once, producing runs the protocol cannot.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .bundles import ConflictRelation
from .core import History, Strand, StrandSpace, event_to_term, negative
from .errors import InputError
from .protocols import JointProtocol, MonotoneSpec, ProtocolSpec, UnionSpec
from .systems import HistorySet


@dataclass(frozen=True)
class ExtendedSpace:
    """A strand space together with its conflict relation."""

    space: StrandSpace
    conf: ConflictRelation


def _history_slug(h: History) -> str:
    return "_".join(f"{e.kind}-{e.message}" for e in h)


def extended_space_from_system(hs: HistorySet) -> ExtendedSpace:
    """One strand per nonempty admissible history, same-agent strands
    pairwise conflicting."""
    problems = hs.problems()
    if problems:
        raise InputError(problems[0])
    strands: list[Strand] = []
    assignment: dict[str, str] = {}
    pairs: list[tuple[str, str]] = []
    for agent in hs.agents:
        ids = []
        for h in hs.histories(agent):
            if not h:
                continue
            sid = f"{agent}__{_history_slug(h)}"
            strands.append(Strand(sid, tuple(event_to_term(e) for e in h)))
            assignment[sid] = agent
            ids.append(sid)
        pairs.extend(combinations(sorted(ids), 2))
    space = StrandSpace.of(strands, hs.agents, assignment)
    return ExtendedSpace(space=space, conf=ConflictRelation(pairs))


def monotone_components(p: ProtocolSpec) -> list[MonotoneSpec]:
    """The monotone components of a spec; input error if it has others."""
    if isinstance(p, MonotoneSpec):
        return [p]
    if isinstance(p, UnionSpec):
        out: list[MonotoneSpec] = []
        for member in p.members:
            out.extend(monotone_components(member))
        return out
    raise InputError(
        f"protocol spec of kind {type(p).__name__} is not a union of monotone specs"
    )


def space_from_monotone(
    jp: JointProtocol, universe: Iterable[str] | None = None
) -> StrandSpace:
    """The strand space whose chains replay a monotone joint protocol."""
    if universe is None:
        universe = jp.messages
    universe = sorted(set(universe))
    strands: list[Strand] = []
    assignment: dict[str, str] = {}
    for agent in jp.agents:
        for i, component in enumerate(monotone_components(jp.spec(agent)), start=1):
            if not component.events:
                continue
            sid = f"{agent}__seq{i}"
            strands.append(
                Strand(sid, tuple(event_to_term(e) for e in component.events))
            )
            assignment[sid] = agent
        for u in universe:
            sid = f"{agent}__recv-{u}"
            strands.append(Strand(sid, (negative(u),)))
            assignment[sid] = agent
    return StrandSpace.of(strands, jp.agents, assignment)
