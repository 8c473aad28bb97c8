import itertools
import math

import numpy as np
import pytest

from combifuse.core import (
    RankFunction,
    ScoreFunction,
    ScoreMatrix,
    derive_ranks,
    top_score_view,
)
from combifuse.diversity import DiversityMatrix, diversity_matrix
from combifuse.errors import (
    DegenerateWeightsError,
    DomainMismatchError,
    NotFoundError,
    UnsupportedInputError,
)
from combifuse.fusion import (
    FusionSpec,
    WeightScheme,
    average_rank_combination,
    average_score_combination,
    enumerate_pair_fusions,
    enumerate_subset_fusions,
    fuse_fused,
    rank_fused,
    weighted_combination_diversity,
    weighted_score_combination_performance,
)
from helpers import labels_for, random_matrix, random_rsc


def matrix_from_probs(probs, labels=None, systems=None):
    probs = np.asarray(probs, dtype=float)
    n, m, c = probs.shape
    systems = systems or tuple("ABCDEFGH"[:m])
    labels = labels if labels is not None else [0] * n
    ids = [f"d{i}" for i in range(n)]
    return ScoreMatrix.build(ids, labels, systems, labels_for(c), probs)


def strength_matrix(strengths):
    """A DiversityMatrix whose per-system strengths equal ``strengths``.

    Builds a star-shaped instance: one pivot system P plus the named
    systems, where cd(P, S) = m * ds(S) and the named systems are
    mutually at distance 0 (m = number of systems in the matrix - 1).
    """
    names = tuple(strengths) + ("P",)
    m = len(names)
    cd = np.zeros((m, m))
    for i, name in enumerate(strengths):
        cd[i, m - 1] = cd[m - 1, i] = strengths[name] * (m - 1)
    return DiversityMatrix(systems=names, cd=cd)


class TestAverageScoreCombination:
    def test_mean_of_two(self):
        fused = average_score_combination(
            [ScoreFunction("A", [0.8]), ScoreFunction("B", [0.6])]
        )
        assert fused.fused_scores[0] == pytest.approx(0.7)
        assert fused.name == "AB"
        assert fused.spec.metric == "ASC"

    def test_idempotent_on_identical_members(self):
        values = np.array([0.9, 0.2, 0.5, 0.7])
        fused = average_score_combination(
            [ScoreFunction(s, values) for s in "ABC"]
        )
        assert np.allclose(fused.fused_scores, values, atol=1e-12, rtol=0.0)

    def test_unanimous_top_scores_share_rank_one(self):
        views = [ScoreFunction(s, [1.0, 0.4]) for s in "ABCDEF"]
        fused = average_score_combination(views, rank_policy="competition")
        assert fused.fused_scores[0] == 1.0
        assert fused.rankings[0] == 1

    def test_length_mismatch(self):
        with pytest.raises(DomainMismatchError):
            average_score_combination(
                [ScoreFunction("A", [0.1, 0.2]), ScoreFunction("B", [0.3])]
            )


class TestAverageRankCombination:
    def test_mean_of_ranks(self):
        fused = average_rank_combination(
            [RankFunction("A", [1], policy="ordinal"), RankFunction("B", [3], policy="ordinal")]
        )
        assert fused.fused_scores[0] == pytest.approx(2.0)

    def test_identity_on_identical_members(self):
        ranks = derive_ranks(ScoreFunction("A", [0.3, 0.9, 0.1]), "ordinal")
        fused = average_rank_combination(
            [ranks, RankFunction("B", ranks.ranks, policy="ordinal")]
        )
        assert fused.rankings.tolist() == ranks.ranks.tolist()

    def test_opposed_rankings_tie(self):
        fused = average_rank_combination(
            [
                RankFunction("A", [1, 2, 3], policy="competition"),
                RankFunction("B", [3, 2, 1], policy="competition"),
            ]
        )
        assert fused.fused_scores.tolist() == [2.0, 2.0, 2.0]
        assert fused.rankings.tolist() == [1, 1, 1]

    def test_mixed_policies_rejected(self):
        with pytest.raises(DomainMismatchError):
            average_rank_combination(
                [
                    RankFunction("A", [1], policy="ordinal"),
                    RankFunction("B", [1], policy="competition"),
                ]
            )


class TestWeightedCombinationDiversity:
    def test_equal_strengths_reduce_to_average(self):
        views = [ScoreFunction("A", [0.8, 0.1]), ScoreFunction("B", [0.4, 0.5])]
        dm = strength_matrix({"A": 0.25, "B": 0.25})
        weighted = weighted_combination_diversity(views, dm, "score")
        plain = average_score_combination(views)
        assert np.array_equal(weighted.fused_scores, plain.fused_scores)

    def test_score_mode_hand_value(self):
        views = [ScoreFunction("A", [0.8]), ScoreFunction("B", [0.4])]
        dm = strength_matrix({"A": 0.3, "B": 0.1})
        fused = weighted_combination_diversity(views, dm, "score")
        assert fused.fused_scores[0] == pytest.approx(0.75 * 0.8 + 0.25 * 0.4)
        assert fused.spec.metric == "WSCDS"

    def test_rank_mode_hand_value(self):
        ranks = [
            RankFunction("A", [1], policy="competition"),
            RankFunction("B", [4], policy="competition"),
        ]
        dm = strength_matrix({"A": 0.5, "B": 0.25})
        fused = weighted_combination_diversity(ranks, dm, "rank")
        assert fused.fused_scores[0] == pytest.approx((2 * 1 + 4 * 4) / 6)
        assert fused.spec.metric == "WRCDS"

    def test_zero_total_strength_rejected(self):
        views = [ScoreFunction("A", [0.8]), ScoreFunction("B", [0.4])]
        dm = strength_matrix({"A": 0.0, "B": 0.0})
        with pytest.raises(DegenerateWeightsError):
            weighted_combination_diversity(views, dm, "score")

    def test_zero_individual_strength_rejected_in_rank_mode(self):
        ranks = [
            RankFunction("A", [1], policy="competition"),
            RankFunction("B", [2], policy="competition"),
        ]
        dm = strength_matrix({"A": 0.0, "B": 0.5})
        with pytest.raises(DegenerateWeightsError):
            weighted_combination_diversity(ranks, dm, "rank")

    def test_missing_system_in_matrix(self):
        views = [ScoreFunction("A", [0.8]), ScoreFunction("Z", [0.4])]
        dm = strength_matrix({"A": 0.3, "B": 0.1})
        with pytest.raises(NotFoundError):
            weighted_combination_diversity(views, dm, "score")


class TestWscp:
    def test_hand_example(self):
        probs = np.zeros((1, 2, 2))
        probs[0, 0] = [0.6, 0.4]
        probs[0, 1] = [0.2, 0.8]
        m = matrix_from_probs(probs, labels=[1], systems=("M1", "M2"))
        recalls = {"M1": {0: 0.9, 1: 0.5}, "M2": {0: 0.5, 1: 1.0}}
        fused = weighted_score_combination_performance(m, ["M1", "M2"], recalls)
        assert fused.fused_class_probs[0, 0] == pytest.approx(0.64 / 1.4, abs=1e-12)
        assert fused.fused_class_probs[0, 1] == pytest.approx(1.0 / 1.5, abs=1e-12)
        assert fused.predictions.tolist() == [1]
        assert fused.fused_scores[0] == pytest.approx(2 / 3)

    def test_unanimous_item_scores_one_rank_one(self):
        probs = np.zeros((3, 2, 2))
        probs[0, :, 1] = 1.0  # both members certain of class 1
        probs[1] = [[0.6, 0.4], [0.7, 0.3]]
        probs[2] = [[0.5, 0.5], [0.5, 0.5]]
        m = matrix_from_probs(probs, labels=[1, 0, 0], systems=("D", "E"))
        recalls = {"D": {0: 0.8, 1: 0.9}, "E": {0: 0.7, 1: 0.6}}
        fused = weighted_score_combination_performance(m, ["D", "E"], recalls)
        assert fused.fused_scores[0] == 1.0
        assert fused.rankings[0] == 1

    def test_equal_recalls_reduce_to_plain_average(self):
        rng = np.random.default_rng(21)
        m = random_matrix(rng, n=12, systems=("A", "B"), n_classes=3)
        recalls = {"A": {0: 0.5, 1: 0.5, 2: 0.5}, "B": {0: 0.5, 1: 0.5, 2: 0.5}}
        fused = weighted_score_combination_performance(m, ["A", "B"], recalls)
        plain = (m.class_probs("A") + m.class_probs("B")) / 2
        assert np.allclose(fused.fused_class_probs, plain, atol=1e-12, rtol=0.0)

    def test_simplex_preserved_with_class_uniform_weights(self):
        rng = np.random.default_rng(22)
        m = random_matrix(rng, n=30, systems=("A", "B", "C"), n_classes=4)
        recalls = {
            "A": {c: 0.9 for c in range(4)},
            "B": {c: 0.4 for c in range(4)},
            "C": {c: 0.7 for c in range(4)},
        }
        fused = weighted_score_combination_performance(m, ["A", "B", "C"], recalls)
        sums = fused.fused_class_probs.sum(axis=1)
        assert np.allclose(sums, 1.0, atol=1e-9, rtol=0.0)

    def test_scalar_mode_preserves_simplex_for_any_recalls(self):
        rng = np.random.default_rng(23)
        m = random_matrix(rng, n=25, systems=("A", "B"), n_classes=3)
        recalls = {
            "A": {0: 0.9, 1: 0.1, 2: 0.4},
            "B": {0: 0.2, 1: 0.8, 2: 0.6},
        }
        fused = weighted_score_combination_performance(
            m, ["A", "B"], recalls, per_class=False
        )
        assert np.allclose(fused.fused_class_probs.sum(axis=1), 1.0, atol=1e-9, rtol=0.0)

    def test_argmax_invariant_under_uniform_scaling(self):
        rng = np.random.default_rng(24)
        m = random_matrix(rng, n=40, systems=("A", "B", "C"), n_classes=5)
        recalls = {
            s: {c: float(rng.uniform(0.05, 1.0)) for c in range(5)} for s in "ABC"
        }
        fused = weighted_score_combination_performance(m, ["A", "B", "C"], recalls)
        for scale in (0.5, 0.25):  # powers of two: scaling is exact
            scaled = {
                s: {c: w * scale for c, w in per.items()} for s, per in recalls.items()
            }
            redone = weighted_score_combination_performance(m, ["A", "B", "C"], scaled)
            assert np.array_equal(redone.predictions, fused.predictions)
            assert np.array_equal(redone.fused_class_probs, fused.fused_class_probs)

    def test_zero_weights_for_class_rejected(self):
        probs = np.full((1, 2, 2), 0.5)
        m = matrix_from_probs(probs, systems=("A", "B"))
        recalls = {"A": {0: 0.0, 1: 0.5}, "B": {0: 0.0, 1: 0.5}}
        with pytest.raises(DegenerateWeightsError) as err:
            weighted_score_combination_performance(m, ["A", "B"], recalls)
        assert "class 0" in str(err.value)

    def test_missing_recall_rejected(self):
        probs = np.full((1, 2, 2), 0.5)
        m = matrix_from_probs(probs, systems=("A", "B"))
        with pytest.raises(NotFoundError):
            weighted_score_combination_performance(m, ["A", "B"], {"A": {0: 1.0, 1: 1.0}})

    def test_zero_weight_mode_never_predicts_dead_class(self):
        rng = np.random.default_rng(37)
        m = random_matrix(rng, n=40, systems=("A", "B"), n_classes=3)
        recalls = {"A": {0: 0.9, 1: 0.7, 2: 0.0}, "B": {0: 0.8, 1: 0.6, 2: 0.0}}
        fused = weighted_score_combination_performance(
            m, ["A", "B"], recalls, zero_weight_classes="zero"
        )
        assert not np.any(fused.predictions == 2)
        assert np.all(fused.fused_class_probs[:, 2] == 0.0)

    def test_all_classes_dead_rejected_even_in_zero_mode(self):
        rng = np.random.default_rng(38)
        m = random_matrix(rng, n=10, systems=("A", "B"), n_classes=2)
        recalls = {"A": {0: 0.0, 1: 0.0}, "B": {0: 0.0, 1: 0.0}}
        with pytest.raises(DegenerateWeightsError):
            weighted_score_combination_performance(
                m, ["A", "B"], recalls, zero_weight_classes="zero"
            )


class TestMemberOrderInvariance:
    def test_bitwise_for_every_metric(self):
        rng = np.random.default_rng(25)
        m = random_matrix(rng, n=18, systems=("A", "B", "C", "D"), n_classes=3)
        views = {s: top_score_view(m, s) for s in "ABCD"}
        ranks = {s: derive_ranks(views[s], "competition") for s in "ABCD"}
        curve_rng = np.random.default_rng(3)
        dm = diversity_matrix([random_rsc(curve_rng, s, 18) for s in "ABCD"])
        recalls = {s: {c: float(rng.uniform(0.1, 1.0)) for c in range(3)} for s in "ABCD"}

        orders = [("A", "C", "D"), ("D", "A", "C"), ("C", "D", "A")]
        for build in (
            lambda o: average_score_combination([views[s] for s in o]),
            lambda o: average_rank_combination([ranks[s] for s in o]),
            lambda o: weighted_combination_diversity([views[s] for s in o], dm, "score"),
            lambda o: weighted_combination_diversity([ranks[s] for s in o], dm, "rank"),
            lambda o: weighted_score_combination_performance(m, o, recalls),
        ):
            base = build(orders[0])
            for other in orders[1:]:
                redone = build(other)
                assert np.array_equal(redone.fused_scores, base.fused_scores)
                assert redone.spec.member_systems == base.spec.member_systems


class TestEnumerate:
    def test_pair_count_and_order_m6(self):
        rng = np.random.default_rng(26)
        m = random_matrix(rng, n=10, systems=tuple("ABCDEF"), n_classes=3)
        fusions = enumerate_pair_fusions(m, "ASC")
        names = [f.name for f in fusions]
        expected = ["".join(c) for c in itertools.combinations("ABCDEF", 2)]
        assert names == expected
        assert len(names) == 15

    def test_pair_count_formula(self):
        rng = np.random.default_rng(27)
        for m_count in range(2, 9):
            systems = tuple(chr(ord("A") + i) for i in range(m_count))
            m = random_matrix(rng, n=6, systems=systems, n_classes=2)
            fusions = enumerate_pair_fusions(m, "ASC")
            assert len(fusions) == math.comb(m_count, 2)

    def test_four_system_order(self):
        rng = np.random.default_rng(28)
        m = random_matrix(rng, n=5, systems=tuple("ABCD"), n_classes=2)
        names = [f.name for f in enumerate_pair_fusions(m, "ASC")]
        assert names == ["AB", "AC", "AD", "BC", "BD", "CD"]

    def test_single_pair(self):
        rng = np.random.default_rng(29)
        m = random_matrix(rng, n=5, systems=("A", "B"), n_classes=2)
        assert len(enumerate_pair_fusions(m, "ASC")) == 1

    def test_subset_size_three(self):
        rng = np.random.default_rng(30)
        m = random_matrix(rng, n=5, systems=tuple("ABCD"), n_classes=2)
        fusions = enumerate_subset_fusions(m, "ASC", subset_size=3)
        assert [f.name for f in fusions] == ["ABC", "ABD", "ACD", "BCD"]

    def test_wscp_requires_recalls(self):
        rng = np.random.default_rng(31)
        m = random_matrix(rng, n=5, systems=("A", "B"), n_classes=2)
        with pytest.raises(ValueError):
            enumerate_pair_fusions(m, "WSCP")

    def test_all_metrics_run(self):
        rng = np.random.default_rng(32)
        m = random_matrix(rng, n=8, systems=tuple("ABC"), n_classes=3)
        recalls = {s: {c: 0.5 for c in range(3)} for s in "ABC"}
        for metric in ("ASC", "ARC", "WSCDS", "WRCDS", "WSCP"):
            fusions = enumerate_pair_fusions(m, metric, recalls=recalls)
            assert len(fusions) == 3


class TestFuseFused:
    def _wscp(self, m, members, recalls):
        return weighted_score_combination_performance(m, members, recalls)

    def test_singleton_is_identity(self):
        rng = np.random.default_rng(33)
        m = random_matrix(rng, n=10, systems=("A", "B"), n_classes=3)
        recalls = {s: {c: 0.7 for c in range(3)} for s in "AB"}
        fused = self._wscp(m, ["A", "B"], recalls)
        again = fuse_fused([fused])
        assert np.array_equal(again.fused_class_probs, fused.fused_class_probs)
        assert np.array_equal(again.predictions, fused.predictions)

    def test_identical_members_unchanged(self):
        rng = np.random.default_rng(34)
        m = random_matrix(rng, n=10, systems=("A", "B", "C"), n_classes=3)
        recalls = {s: {c: 0.7 for c in range(3)} for s in "ABC"}
        x = self._wscp(m, ["A", "B"], recalls)
        y = self._wscp(m, ["A", "C"], recalls)
        fused = fuse_fused([x, y])
        same = fuse_fused([x, y])
        assert np.array_equal(fused.fused_class_probs, same.fused_class_probs)
        mean = (x.fused_class_probs + y.fused_class_probs) / 2
        assert np.allclose(fused.fused_class_probs, mean, atol=1e-15, rtol=0.0)

    def test_tie_breaks_to_lower_code(self):
        probs = np.zeros((1, 2, 2))
        probs[0, 0] = [0.6, 0.4]
        probs[0, 1] = [0.4, 0.6]
        m = matrix_from_probs(probs, systems=("M1", "M2"))
        uniform = {"M1": {0: 1.0, 1: 1.0}, "M2": {0: 1.0, 1: 1.0}}
        x = self._wscp(m, ["M1"], uniform)
        y = self._wscp(m, ["M2"], uniform)
        fused = fuse_fused([x, y])
        assert fused.fused_class_probs[0].tolist() == [0.5, 0.5]
        assert fused.predictions.tolist() == [0]
        assert fused.name == "M1+M2"

    def test_name_concatenates_pair_names(self):
        rng = np.random.default_rng(35)
        m = random_matrix(rng, n=6, systems=tuple("BCE"), n_classes=2)
        recalls = {s: {c: 0.9 for c in range(2)} for s in "BCE"}
        be = self._wscp(m, ["B", "E"], recalls)
        ce = self._wscp(m, ["C", "E"], recalls)
        assert fuse_fused([be, ce]).name == "BECE"

    def test_member_without_probs_rejected(self):
        fused = average_score_combination([ScoreFunction("A", [0.5]), ScoreFunction("B", [0.6])])
        with pytest.raises(UnsupportedInputError):
            fuse_fused([fused])

    def test_mismatched_class_sets_rejected(self):
        rng = np.random.default_rng(36)
        m2 = random_matrix(rng, n=6, systems=("A", "B"), n_classes=2)
        m3 = random_matrix(rng, n=6, systems=("A", "B"), n_classes=3)
        x = self._wscp(m2, ["A", "B"], {s: {c: 1.0 for c in range(2)} for s in "AB"})
        y = self._wscp(m3, ["A", "B"], {s: {c: 1.0 for c in range(3)} for s in "AB"})
        with pytest.raises(DomainMismatchError):
            fuse_fused([x, y])



class TestRankFused:
    def test_competition_ties(self):
        fused = average_score_combination(
            [ScoreFunction("A", [1.0, 1.0, 0.5]), ScoreFunction("B", [1.0, 1.0, 0.5])]
        )
        assert rank_fused(fused, "competition").tolist() == [1, 1, 3]

    def test_ordinal_stable(self):
        fused = average_score_combination(
            [ScoreFunction("A", [1.0, 1.0, 0.5]), ScoreFunction("B", [1.0, 1.0, 0.5])]
        )
        assert rank_fused(fused, "ordinal").tolist() == [1, 2, 3]

    def test_rank_metric_ranks_ascending(self):
        fused = average_rank_combination(
            [
                RankFunction("A", [1, 3, 2], policy="ordinal"),
                RankFunction("B", [1, 3, 2], policy="ordinal"),
            ]
        )
        assert rank_fused(fused, "competition").tolist() == [1, 3, 2]


class TestSpecValidation:
    def test_metric_scheme_consistency(self):
        with pytest.raises(ValueError):
            FusionSpec(("A", "B"), "ASC", WeightScheme(kind="diversity_strength", weights=(0.5, 0.5)))
        with pytest.raises(ValueError):
            FusionSpec(("A", "B"), "WSCDS", WeightScheme.average(2))

    def test_duplicate_members_rejected(self):
        with pytest.raises(ValueError):
            FusionSpec(("A", "A"), "ASC", WeightScheme.average(2))

    def test_members_canonicalized_with_weights(self):
        scheme = WeightScheme(kind="diversity_strength", weights=(0.75, 0.25))
        spec = FusionSpec(("B", "A"), "WSCDS", scheme)
        assert spec.member_systems == ("A", "B")
        assert spec.scheme.weights == (0.25, 0.75)

    def test_average_weights_are_exact(self):
        assert WeightScheme.average(4).weights == (0.25,) * 4

    def test_negative_recall_weights_rejected(self):
        with pytest.raises(ValueError):
            WeightScheme(
                kind="performance_recall",
                class_codes=(0,),
                class_weights=((-0.1,),),
            )

    def test_scaled_recall_weights_accepted(self):
        scheme = WeightScheme(
            kind="performance_recall",
            class_codes=(0,),
            class_weights=((1.5,),),
        )
        assert scheme.class_weights == ((1.5,),)
