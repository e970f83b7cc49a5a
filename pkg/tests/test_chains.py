from __future__ import annotations

import pytest

from strandlab.bundles import EMPTY_BUNDLE, Bundle, enumerate_bundles
from strandlab.chains import (
    ChainPrefix,
    bundle_distances,
    check_step,
    enumerate_chain_prefixes,
    hist,
    run_from_chain,
    translate,
)
from strandlab.core import Node, Strand, StrandSpace, negative, positive, recv, sent
from strandlab.errors import InputError
from strandlab.systems import check_mp


def build_chain(space, bundles) -> ChainPrefix:
    """Assemble a chain from consecutive bundles, verifying each step."""
    witnesses = []
    for b1, b2 in zip(bundles, bundles[1:]):
        witness = check_step(space, b1, b2)
        assert witness is not None, f"no step from {b1.heights} to {b2.heights}"
        witnesses.append(witness)
    return ChainPrefix(
        agents=space.agents, bundles=tuple(bundles), witnesses=tuple(witnesses)
    )


def r1_exchange_chain(space) -> ChainPrefix:
    """Four single-extension steps building the u/v exchange."""
    b1 = Bundle.of({"s12": 1})
    b2 = Bundle.of({"s12": 1, "s21": 1}, [(Node("s12", 1), Node("s21", 1))])
    b3 = Bundle.of({"s12": 1, "s21": 2}, [(Node("s12", 1), Node("s21", 1))])
    b4 = Bundle.of(
        {"s12": 2, "s21": 2},
        [(Node("s12", 1), Node("s21", 1)), (Node("s21", 2), Node("s12", 2))],
    )
    return build_chain(space, [EMPTY_BUNDLE, b1, b2, b3, b4])


class TestCheckStep:
    def test_stuttering_step(self, r1_space):
        # [TRIVIAL] every bundle steps to itself with no extensions
        for bundle in enumerate_bundles(r1_space.space, None, 8):
            witness = check_step(r1_space.space, bundle, bundle)
            assert witness is not None
            assert witness.extensions == ()

    def test_first_send_extension(self, r1_space):
        # [PAPER] extending by a +u node performs sent(u)
        witness = check_step(r1_space.space, EMPTY_BUNDLE, Bundle.of({"s12": 1}))
        assert witness is not None
        assert witness.extensions == (("2", "s12", sent("u")),)

    def test_prefix_jump_between_same_agent_strands(self):
        # [PAPER] the witnessing bijection may move a prefix to a longer strand
        space = StrandSpace.of(
            [Strand("s", (positive("u"),)), Strand("sp", (positive("u"), positive("v")))],
            ["a"],
            {"s": "a", "sp": "a"},
        )
        witness = check_step(space, Bundle.of({"s": 1}), Bundle.of({"sp": 2}))
        assert witness is not None
        assert dict(witness.f)["s"] == "sp"
        assert witness.extensions == (("a", "sp", sent("v")),)

    def test_force_identity_blocks_the_jump(self):
        space = StrandSpace.of(
            [Strand("s", (positive("u"),)), Strand("sp", (positive("u"), positive("v")))],
            ["a"],
            {"s": "a", "sp": "a"},
        )
        assert (
            check_step(space, Bundle.of({"s": 1}), Bundle.of({"sp": 2}), force_identity=True)
            is None
        )

    def test_two_node_jump_rejected(self, r1_space):
        # growing an agent by two nodes in one step is not a step
        b2 = Bundle.of(
            {"s12": 1, "s21": 2}, [(Node("s12", 1), Node("s21", 1))]
        )
        assert check_step(r1_space.space, EMPTY_BUNDLE, b2) is None

    def test_edge_preservation_required(self):
        # two senders of u; the receive must keep its original sender
        space = StrandSpace.identity(
            [
                Strand("w1", (positive("u"),)),
                Strand("w2", (positive("u"),)),
                Strand("r", (negative("u"),)),
            ]
        )
        b1 = Bundle.of(
            {"w1": 1, "w2": 1, "r": 1}, [(Node("w1", 1), Node("r", 1))]
        )
        b2 = Bundle.of(
            {"w1": 1, "w2": 1, "r": 1}, [(Node("w2", 1), Node("r", 1))]
        )
        assert check_step(space, b1, b2) is None


class TestChainEnumeration:
    def test_horizon_zero(self, r1_space):
        # [TRIVIAL]
        chains = enumerate_chain_prefixes(r1_space.space, None, 0, 8)
        assert len(chains) == 1
        assert chains[0].bundles == (EMPTY_BUNDLE,)

    def test_exchange_reachable_in_four_steps(self, r1_space):
        # [DERIVED] a chain of four single extensions ends in the full exchange
        chain = r1_exchange_chain(r1_space.space)
        final = chain.final()
        chains = enumerate_chain_prefixes(r1_space.space, None, 4, 8)
        assert any(c.final() == final for c in chains)

    def test_conflicts_respected(self, r1_t5_space):
        # [DERIVED] no chain activates two conflicting agent-2 strands
        chains = enumerate_chain_prefixes(r1_t5_space.space, r1_t5_space.conf, 3, 6)
        for chain in chains:
            for bundle in chain.bundles:
                active = set(bundle.active_strands())
                u_side = {s for s in active if s.startswith("2__sent-u")}
                x_side = {s for s in active if s.startswith("2__sent-x")}
                assert not (u_side and x_side)

    def test_per_step_growth_bounds(self, nack_space):
        space = nack_space.space
        for chain in enumerate_chain_prefixes(space, None, 3, 6):
            for m in range(chain.length):
                for agent in space.agents:
                    before = hist(chain, agent, m)
                    after = hist(chain, agent, m + 1)
                    assert len(after) - len(before) in (0, 1)


class TestHistAndRun:
    def test_hist_at_zero(self, r1_space):
        # [TRIVIAL]
        chain = r1_exchange_chain(r1_space.space)
        assert hist(chain, "1", 0) == ()

    def test_exchange_histories(self, r1_space):
        # [PAPER] agent 2 ends with sent(u), recv(v); agent 3 stays empty
        chain = r1_exchange_chain(r1_space.space)
        assert hist(chain, "2", 4) == (sent("u"), recv("v"))
        assert hist(chain, "3", 4) == ()

    def test_hist_bounds(self, r1_space):
        chain = r1_exchange_chain(r1_space.space)
        with pytest.raises(InputError):
            hist(chain, "2", 5)
        with pytest.raises(InputError):
            hist(chain, "ghost", 0)

    def test_stuttering_run(self, ping_space):
        # [TRIVIAL] a stutter-only chain yields identical empty states
        space = ping_space.space
        chain = build_chain(space, [EMPTY_BUNDLE] * 4)
        run = run_from_chain(chain)
        assert len(run.states) == 4
        assert len(set(run.states)) == 1

    def test_anomalous_interleaving(self, nack_space):
        # [PAPER] mixing the two same-agent strands yields the history
        # recv(u), sent(ack), sent(nack)
        space = nack_space.space
        b1 = Bundle.of({"s1": 1})
        b2 = Bundle.of({"s1": 1, "s2a": 1}, [(Node("s1", 1), Node("s2a", 1))])
        b3 = Bundle.of({"s1": 1, "s2a": 2}, [(Node("s1", 1), Node("s2a", 1))])
        b4 = Bundle.of(
            {"s1": 1, "s2a": 2, "s2b": 1}, [(Node("s1", 1), Node("s2a", 1))]
        )
        chain = build_chain(space, [EMPTY_BUNDLE, b1, b2, b3, b4])
        run = run_from_chain(chain)
        assert run.final().history("2") == (recv("u"), sent("ack"), sent("nack"))


class TestTranslate:
    def test_horizon_zero(self, ping_space):
        # [TRIVIAL]
        runs = translate(ping_space.space, None, 0, 2)
        assert len(runs) == 1

    def test_four_event_history_reachable_naturally(self, r1_space):
        # [PAPER] the natural relay space lets agent 2 interleave both pairs
        runs = translate(r1_space.space, None, 8, 8)
        target = (sent("u"), recv("v"), sent("x"), recv("y"))
        assert any(run.final().history("2") == target for run in runs)

    def test_conflicts_block_four_events(self, r1_t5_space):
        # [DERIVED] with conflicts, agent 2 never reaches four events
        runs = translate(r1_t5_space.space, r1_t5_space.conf, 8, 12)
        assert all(
            len(g.history("2")) <= 2 for run in runs for g in run.states
        )

    def test_translated_runs_satisfy_mp(self, nack_space):
        # the computational core of the strand-system theorem
        space = nack_space.space
        for run in translate(space, None, 5, 6):
            assert check_mp(space.messages(), space.agents, run).ok

    def test_translate_agrees_with_chain_enumeration(self, nack_space):
        space = nack_space.space
        via_chains = {
            run_from_chain(c) for c in enumerate_chain_prefixes(space, None, 3, 6)
        }
        assert translate(space, None, 3, 6) == frozenset(via_chains)


class TestLemmaBounds:
    def test_height_at_most_twice_distance(self, r1_space, nack_space):
        from strandlab.bundles import bundle_height

        for doc in (r1_space, nack_space):
            dist = bundle_distances(doc.space, None, 8)
            for bundle, d in dist.items():
                assert bundle_height(doc.space, bundle) <= 2 * d

    def test_identity_reachability_within_node_count(self, nack_space):
        ident = nack_space.space.with_identity_assignment()
        dist = bundle_distances(ident, None, 6)
        for bundle in enumerate_bundles(ident, None, 6):
            assert bundle in dist
            assert dist[bundle] <= bundle.node_count()
