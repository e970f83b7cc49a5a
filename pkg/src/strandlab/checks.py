"""Bounded exhaustive checks tying the two execution models together.

Each function machine-checks one of the correspondence results at desk
scale and returns a result object with a verdict and human-readable
detail lines.  The numbered entry points (used by the command line) are:

  theorem 1  translating a strand space yields a strand system;
  theorem 2  identity-assigned spaces: occurring global states and
             bundles are message-equivalent, both directions;
  theorem 3  the natural relay space is not history-preserving for the
             relay system, and its translation is a strict superset;
  theorem 4  like theorem 1, for spaces with a conflict relation;
  theorem 5  a history set's conflict-space translation reproduces the
             generated system exactly;
  theorem 6  a joint protocol's runs form a strand system;
  theorem 7  a monotone joint protocol's derived space translates to
             exactly the protocol's runs;
  lemma 1    bundle height grows at most two per chain step;
  lemma 2    identity assignment: every bundle is reached by a chain of
             at most its node count.
"""

from __future__ import annotations

from dataclasses import dataclass

from .budget import StateBudget, ensure
from .bundles import ConflictRelation, bundle_height, enumerate_bundles, message_equivalent
from .chains import bundle_distances, translate
from .constructions import extended_space_from_system, space_from_monotone
from .core import StrandSpace
from .protocols import JointProtocol, generate_runs
from .systems import (
    HistorySet,
    RunPrefix,
    check_history_preserving,
    check_mp,
    extract_histories,
    generate_system,
    systems_equal,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    lines: tuple[str, ...]

    def render(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        body = "".join(f"\n  {line}" for line in self.lines)
        return f"{verdict} {self.name}{body}"


def _describe_run(run: RunPrefix) -> str:
    final = run.final()
    parts = [f"{a}: {[str(e) for e in h]}" for a, h in final.items()]
    return "; ".join(parts)


def strand_system_property(
    space: StrandSpace,
    conf: ConflictRelation | None,
    horizon: int,
    max_nodes: int,
    name: str,
    budget: StateBudget | None = None,
) -> CheckResult:
    """Runs of the space's chains pass MP1-MP3 and are regenerated exactly
    by the system of their own extracted histories."""
    budget = ensure(budget)
    runs = translate(space, conf, horizon, max_nodes, budget=budget)
    lines = [f"{len(runs)} run prefixes at horizon {horizon}"]
    universe = space.messages()
    bad = [r for r in runs if not check_mp(universe, space.agents, r).ok]
    if bad:
        lines.append(f"{len(bad)} runs violate MP1-MP3, e.g. {_describe_run(bad[0])}")
        return CheckResult(name, False, tuple(lines))
    lines.append("all runs satisfy MP1-MP3")
    regen = generate_system(extract_histories(runs), horizon, budget=budget)
    eq = systems_equal(runs, regen)
    if eq.equal:
        lines.append("regeneration from extracted histories is exact")
    else:
        witness = eq.witness()
        lines.append(f"regeneration differs, e.g. {_describe_run(witness)}")
    return CheckResult(name, eq.equal, tuple(lines))


def theorem_1(
    space: StrandSpace,
    horizon: int = 6,
    max_nodes: int = 8,
    budget: StateBudget | None = None,
) -> CheckResult:
    return strand_system_property(
        space, None, horizon, max_nodes, "translation is a strand system", budget
    )


def theorem_2(
    space: StrandSpace,
    horizon: int = 4,
    max_nodes: int = 8,
    budget: StateBudget | None = None,
) -> CheckResult:
    """Occurring global states and enumerated bundles correspond exactly
    under message-equivalence (identity assignment)."""
    name = "global states and bundles are message-equivalent"
    ident = space.with_identity_assignment()
    budget = ensure(budget)
    runs = translate(ident, None, horizon, max_nodes, budget=budget)
    states = {g for run in runs for g in run.states}
    bundles = enumerate_bundles(ident, None, max_nodes, budget=budget)
    lines = [f"{len(states)} occurring states, {len(bundles)} bundles"]
    orphan_states = [
        g for g in sorted(states)
        if not any(message_equivalent(ident, g, b) for b in bundles)
    ]
    orphan_bundles = [
        b for b in bundles
        if not any(message_equivalent(ident, g, b) for g in states)
    ]
    if orphan_states:
        g = orphan_states[0]
        lines.append(
            f"{len(orphan_states)} states match no bundle, e.g. "
            + "; ".join(f"{a}: {[str(e) for e in h]}" for a, h in g.items())
        )
    if orphan_bundles:
        lines.append(f"{len(orphan_bundles)} bundles match no state, e.g. {orphan_bundles[0].heights}")
    ok = not orphan_states and not orphan_bundles
    if ok:
        lines.append("exact correspondence in both directions")
    return CheckResult(name, ok, tuple(lines))


def theorem_3(
    space: StrandSpace,
    hs: HistorySet,
    max_nodes: int = 8,
    budget: StateBudget | None = None,
) -> CheckResult:
    """The natural relay space fails history preservation for the relay
    system, and its translation strictly exceeds the system."""
    name = "no space preserves the relay system's histories"
    budget = ensure(budget)
    lines = []
    ok = True

    system_runs = generate_system(hs, 6, budget=budget)
    hp = check_history_preserving(space, system_runs, max_nodes, budget=budget)
    if hp.clause1_failures:
        ok = False
        lines.append("clause 1 unexpectedly fails")
    else:
        lines.append("clause 1 holds: every run history appears in some bundle")
    four = [
        (agent, events)
        for agent, _, events in hp.clause2_failures
        if len(events) == 4
    ]
    if four:
        agent, events = four[0]
        lines.append(
            f"clause 2 fails as predicted: bundle gives agent {agent} "
            f"the {len(events)} events {[str(e) for e in events]}"
        )
    else:
        ok = False
        lines.append("clause 2 lacks the expected four-event witness")

    translated = translate(space, None, 8, max_nodes, budget=budget)
    eq = systems_equal(translated, generate_system(hs, 8, budget=budget))
    if eq.equal or eq.only_in_b:
        ok = False
        lines.append("translation is not a strict superset of the system")
    else:
        witnesses = [
            r
            for r in eq.only_in_a
            if any(len(h) == 4 for g in r.states for _, h in g.items())
        ]
        if witnesses:
            lines.append(
                f"translation adds runs, e.g. {_describe_run(witnesses[0])}"
            )
        else:
            ok = False
            lines.append("superset witness lacks a four-event history")
    return CheckResult(name, ok, tuple(lines))


def theorem_4(
    space: StrandSpace,
    conf: ConflictRelation,
    horizon: int = 6,
    max_nodes: int = 8,
    budget: StateBudget | None = None,
) -> CheckResult:
    return strand_system_property(
        space,
        conf,
        horizon,
        max_nodes,
        "translation with conflicts is a strand system",
        budget,
    )


def theorem_5(
    hs: HistorySet,
    horizon: int = 5,
    budget: StateBudget | None = None,
) -> CheckResult:
    """The conflict-space built from a history set translates back to
    exactly the system the history set generates."""
    name = "history sets are realizable as conflict spaces"
    budget = ensure(budget)
    ext = extended_space_from_system(hs)
    max_nodes = ext.space.node_count()
    translated = translate(ext.space, ext.conf, horizon, max_nodes, budget=budget)
    generated = generate_system(hs, horizon, budget=budget)
    eq = systems_equal(translated, generated)
    lines = [
        f"{len(ext.space.strands)} strands, {len(ext.conf)} conflict pairs",
        f"{len(translated)} translated vs {len(generated)} generated run prefixes",
    ]
    if eq.equal:
        lines.append("round trip is exact")
    else:
        lines.append(f"difference, e.g. {_describe_run(eq.witness())}")
    return CheckResult(name, eq.equal, tuple(lines))


def theorem_6(
    jp: JointProtocol,
    horizon: int = 6,
    budget: StateBudget | None = None,
) -> CheckResult:
    """A joint protocol's runs form a strand system."""
    name = "protocol runs form a strand system"
    budget = ensure(budget)
    runs = generate_runs(jp, horizon, budget=budget)
    lines = [f"{len(runs)} run prefixes at horizon {horizon}"]
    bad = [r for r in runs if not check_mp(jp.messages, jp.agents, r).ok]
    if bad:
        lines.append(f"{len(bad)} runs violate MP1-MP3, e.g. {_describe_run(bad[0])}")
        return CheckResult(name, False, tuple(lines))
    lines.append("all runs satisfy MP1-MP3")
    regen = generate_system(extract_histories(runs), horizon, budget=budget)
    eq = systems_equal(runs, regen)
    if eq.equal:
        lines.append("regeneration from extracted histories is exact")
    else:
        lines.append(f"regeneration differs, e.g. {_describe_run(eq.witness())}")
    return CheckResult(name, eq.equal, tuple(lines))


def theorem_7(
    jp: JointProtocol,
    horizon: int = 6,
    max_nodes: int = 8,
    budget: StateBudget | None = None,
) -> CheckResult:
    """A monotone joint protocol's derived space translates to exactly
    the protocol's runs.  Non-monotone input is a usage error."""
    name = "monotone protocols are realizable as strand spaces"
    budget = ensure(budget)
    space = space_from_monotone(jp)  # raises InputError when not monotone
    translated = translate(space, None, horizon, max_nodes, budget=budget)
    generated = generate_runs(jp, horizon, budget=budget)
    eq = systems_equal(translated, generated)
    lines = [
        f"{len(space.strands)} strands derived from the protocol",
        f"{len(translated)} translated vs {len(generated)} protocol run prefixes",
    ]
    if eq.equal:
        lines.append("round trip is exact")
    else:
        lines.append(f"difference, e.g. {_describe_run(eq.witness())}")
    return CheckResult(name, eq.equal, tuple(lines))


def lemma_1(
    space: StrandSpace,
    conf: ConflictRelation | None = None,
    max_nodes: int = 8,
    budget: StateBudget | None = None,
) -> CheckResult:
    """Bundle height is at most twice the number of chain steps.

    Checked in the equivalent per-bundle form: every reachable bundle's
    height is at most twice its least chain distance, which bounds every
    chain of every length at once.
    """
    name = "height grows at most two per chain step"
    budget = ensure(budget)
    dist = bundle_distances(space, conf, max_nodes, budget=budget)
    violations = [
        (b, d)
        for b, d in dist.items()
        if bundle_height(space, b) > 2 * d
    ]
    lines = [f"{len(dist)} reachable bundles"]
    if violations:
        b, d = min(violations, key=lambda bd: bd[1])
        lines.append(
            f"violation: bundle {b.heights} has height "
            f"{bundle_height(space, b)} at distance {d}"
        )
    else:
        lines.append("height <= 2 * distance everywhere")
    return CheckResult(name, not violations, tuple(lines))


def lemma_2(
    space: StrandSpace,
    max_nodes: int = 8,
    budget: StateBudget | None = None,
) -> CheckResult:
    """With the identity assignment, every bundle is the end of a chain
    of at most node-count steps."""
    name = "every bundle is reachable within its node count"
    budget = ensure(budget)
    ident = space.with_identity_assignment()
    bundles = enumerate_bundles(ident, None, max_nodes, budget=budget)
    dist = bundle_distances(ident, None, max_nodes, budget=budget)
    misses = [
        b
        for b in bundles
        if b not in dist or dist[b] > b.node_count()
    ]
    lines = [f"{len(bundles)} bundles enumerated"]
    if misses:
        lines.append(f"unreached or slow: {misses[0].heights}")
    else:
        lines.append("all bundles reached within their node counts")
    return CheckResult(name, not misses, tuple(lines))


THEOREMS = {1: theorem_1, 2: theorem_2, 3: theorem_3, 4: theorem_4,
            5: theorem_5, 6: theorem_6, 7: theorem_7}
LEMMAS = {1: lemma_1, 2: lemma_2}
