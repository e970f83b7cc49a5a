from __future__ import annotations

import itertools

import pytest

from strandlab.bundles import (
    EMPTY_BUNDLE,
    Bundle,
    ConflictRelation,
    bundle_height,
    causal_edges,
    enumerate_bundles,
    message_equivalent,
    strand_height,
    validate_bundle,
)
from strandlab.core import (
    GlobalState,
    Node,
    Strand,
    StrandSpace,
    negative,
    positive,
    recv,
    sent,
    term_of,
)
from strandlab.errors import InputError


def r1_exchange_bundle() -> Bundle:
    """u sent and received, then v sent and received."""
    return Bundle.of(
        {"s12": 2, "s21": 2},
        [
            (Node("s12", 1), Node("s21", 1)),
            (Node("s21", 2), Node("s12", 2)),
        ],
    )


def longest_path_oracle(space, bundle) -> int:
    """Edge count of the longest causal path, by exhaustive DFS."""
    nodes = list(bundle.nodes())
    edges = causal_edges(bundle)
    out = {n: [m for a, m in edges if a == n] for n in nodes}

    def depth(n):
        return max((1 + depth(m) for m in out[n]), default=0)

    return max((depth(n) for n in nodes), default=0)


class TestValidateBundle:
    def test_empty_bundle_passes(self, r1_space):
        # [TRIVIAL] all axioms are vacuous
        assert validate_bundle(r1_space.space, EMPTY_BUNDLE).ok

    def test_relay_exchange_passes(self, r1_space):
        # [PAPER] the u-then-v exchange picture
        assert validate_bundle(r1_space.space, r1_exchange_bundle()).ok

    def test_unmatched_receive_fails_b2(self, r1_space):
        # [TRIVIAL] dropping the v edge leaves <s12,2> without a sender
        bundle = Bundle.of(
            {"s12": 2, "s21": 2}, [(Node("s12", 1), Node("s21", 1))]
        )
        report = validate_bundle(r1_space.space, bundle)
        assert report.failed_axioms() == ("B2",)
        assert any("s12,2" in msg for _, msg in report.problems)

    def test_send_reuse_is_a_structural_failure(self):
        space = StrandSpace.identity(
            [
                Strand("w", (positive("u"),)),
                Strand("r1", (negative("u"),)),
                Strand("r2", (negative("u"),)),
            ]
        )
        bundle = Bundle.of(
            {"w": 1, "r1": 1, "r2": 1},
            [(Node("w", 1), Node("r1", 1)), (Node("w", 1), Node("r2", 1))],
        )
        report = validate_bundle(space, bundle)
        assert "edges" in report.failed_axioms()

    def test_cycle_fails_b4(self):
        space = StrandSpace.identity(
            [
                Strand("e", (negative("b"), positive("a"))),
                Strand("f", (negative("a"), positive("b"))),
            ]
        )
        bundle = Bundle.of(
            {"e": 2, "f": 2},
            [(Node("e", 2), Node("f", 1)), (Node("f", 2), Node("e", 1))],
        )
        report = validate_bundle(space, bundle)
        assert report.failed_axioms() == ("B4",)

    def test_conflicting_strands_fail_b5(self, r1_t5_space):
        bundle = Bundle.of({"2__sent-u": 1, "2__sent-x": 1})
        report = validate_bundle(r1_t5_space.space, bundle, r1_t5_space.conf)
        assert report.failed_axioms() == ("B5",)

    def test_b5_not_checked_without_conf(self, r1_t5_space):
        bundle = Bundle.of({"2__sent-u": 1, "2__sent-x": 1})
        assert validate_bundle(r1_t5_space.space, bundle).ok

    def test_unknown_strand_is_an_input_error(self, r1_space):
        with pytest.raises(InputError):
            validate_bundle(r1_space.space, Bundle.of({"ghost": 1}))


class TestHeights:
    def test_empty_bundle_height(self, r1_space):
        # [TRIVIAL]
        assert bundle_height(r1_space.space, EMPTY_BUNDLE) == 0

    def test_exchange_height(self, r1_space):
        # [DERIVED] longest causal path over 4 nodes has 3 edges
        assert bundle_height(r1_space.space, r1_exchange_bundle()) == 3

    def test_single_send_height(self):
        # [TRIVIAL] one node, no edges
        space = StrandSpace.identity([Strand("s", (positive("u"),))])
        assert bundle_height(space, Bundle.of({"s": 1})) == 0

    def test_height_matches_oracle_on_all_relay_bundles(self, r1_space):
        for bundle in enumerate_bundles(r1_space.space, None, 8):
            assert bundle_height(r1_space.space, bundle) == longest_path_oracle(
                r1_space.space, bundle
            )

    def test_invalid_bundle_rejected(self, r1_space):
        with pytest.raises(InputError):
            bundle_height(r1_space.space, Bundle.of({"s21": 1}))

    def test_strand_height(self, r1_space):
        bundle = r1_exchange_bundle()
        assert strand_height(r1_space.space, EMPTY_BUNDLE, "s12") == 0
        assert strand_height(r1_space.space, bundle, "s12") == 2
        assert strand_height(r1_space.space, bundle, "s23") == 0
        with pytest.raises(InputError):
            strand_height(r1_space.space, bundle, "ghost")


class TestEnumerateBundles:
    def test_max_nodes_zero(self, r1_space):
        # [TRIVIAL]
        assert enumerate_bundles(r1_space.space, None, 0) == (EMPTY_BUNDLE,)

    def test_full_exchange_bundle_present(self, r1_space):
        # [PAPER] a bundle containing all eight signed terms exists
        bundles = enumerate_bundles(r1_space.space, None, 8)
        full = [b for b in bundles if b.node_count() == 8]
        assert len(full) == 1
        terms = sorted(str(term_of(r1_space.space, n)) for n in full[0].nodes())
        assert terms == ["+u", "+v", "+x", "+y", "-u", "-v", "-x", "-y"]

    def test_conflict_relation_filters(self, r1_t5_space):
        # [DERIVED] no bundle mixes agent 2's u-side and x-side strands
        bundles = enumerate_bundles(r1_t5_space.space, r1_t5_space.conf, 8)
        for bundle in bundles:
            active = set(bundle.active_strands())
            assert not (
                any(s.startswith("2__sent-u") for s in active)
                and any(s.startswith("2__sent-x") for s in active)
            )

    def test_all_results_validate(self, r1_space, nack_space, r1_t5_space):
        for doc in (r1_space, nack_space, r1_t5_space):
            for bundle in enumerate_bundles(doc.space, doc.conf, 6):
                assert validate_bundle(doc.space, bundle, doc.conf).ok

    def test_enumeration_is_deterministic(self, nack_space):
        first = enumerate_bundles(nack_space.space, None, 6)
        second = enumerate_bundles(nack_space.space, None, 6)
        assert first == second

    def test_distinct_matchings_are_distinct_bundles(self):
        space = StrandSpace.identity(
            [
                Strand("w1", (positive("u"),)),
                Strand("w2", (positive("u"),)),
                Strand("r", (negative("u"),)),
            ]
        )
        bundles = enumerate_bundles(space, None, 3)
        three_node = [b for b in bundles if b.node_count() == 3]
        assert len(three_node) == 2  # the receive can pair with either send

    def test_lemma2_reduction_preserves_validity_and_height(self, nack_space):
        space = nack_space.space
        for bundle in enumerate_bundles(space, None, 6):
            for sid, k in bundle.heights:
                top = Node(sid, k)
                if not term_of(space, top).positive:
                    continue
                if any(sender == top for sender, _ in bundle.edges):
                    continue
                reduced = Bundle.of(
                    {**bundle.height_map, sid: k - 1}, bundle.edges
                )
                assert validate_bundle(space, reduced).ok
                assert bundle_height(space, reduced) <= bundle_height(space, bundle)


class TestMessageEquivalence:
    def test_empty_against_empty(self, ping_space):
        ident = ping_space.space.with_identity_assignment()
        g = GlobalState.empty(ident.agents)
        assert message_equivalent(ident, g, EMPTY_BUNDLE)

    def test_relay_exchange_state(self, r1_space):
        # [PAPER] the u/v exchange run matches the exchange bundle
        ident = r1_space.space.with_identity_assignment()
        g = GlobalState.of(
            {
                "s12": (sent("u"), recv("v")),
                "s21": (recv("u"), sent("v")),
                "s23": (),
                "s32": (),
            }
        )
        assert message_equivalent(ident, g, r1_exchange_bundle())
        # [TRIVIAL] height mismatch against the empty bundle
        assert not message_equivalent(ident, g, EMPTY_BUNDLE)

    def test_requires_identity_assignment(self, r1_space):
        g = GlobalState.empty(r1_space.space.agents)
        with pytest.raises(InputError):
            message_equivalent(r1_space.space, g, EMPTY_BUNDLE)

    def test_invariant_under_rematching(self):
        space = StrandSpace.identity(
            [
                Strand("w1", (positive("u"),)),
                Strand("w2", (positive("u"),)),
                Strand("r", (negative("u"),)),
            ]
        )
        bundles = [
            b for b in enumerate_bundles(space, None, 3) if b.node_count() == 3
        ]
        g = GlobalState.of({"w1": (sent("u"),), "w2": (sent("u"),), "r": (recv("u"),)})
        assert all(message_equivalent(space, g, b) for b in bundles)
