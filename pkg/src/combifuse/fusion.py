"""Combination metrics for fusing scoring systems.

Five metrics are supported:

* ASC / ARC     -- average score / average rank combination (uniform 1/m).
* WSCDS / WRCDS -- score / rank combination weighted by diversity strength
                  (the rank variant uses inverse weights).
* WSCP          -- per-class recall-weighted averaging of class
                  probabilities, i.e. a soft vote that trusts each member
                  in proportion to how well it recalls each class.

All metrics accumulate member contributions in canonical (sorted) member
name order, so fused values are bitwise independent of caller ordering.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Literal, Mapping, Sequence

import numpy as np

from .core import (
    RankFunction,
    RankPolicy,
    ScoreFunction,
    ScoreMatrix,
    argmax_selection,
    derive_ranks,
    derive_rsc,
    top_score_view,
)
from .diversity import DiversityMatrix, diversity_matrix, diversity_strength
from .errors import (
    DegenerateWeightsError,
    DomainMismatchError,
    NotFoundError,
    UnsupportedInputError,
)

Metric = Literal["ASC", "ARC", "WSCDS", "WRCDS", "WSCP"]

#: Weighting-scheme kinds admissible for each metric.  WSCP additionally
#: admits the equal-weight "average" scheme, which is how a fusion of
#: already-fused probability models (see fuse_fused) is described.
METRIC_SCHEMES: dict[str, frozenset[str]] = {
    "ASC": frozenset({"average"}),
    "ARC": frozenset({"average"}),
    "WSCDS": frozenset({"diversity_strength"}),
    "WRCDS": frozenset({"diversity_strength"}),
    "WSCP": frozenset({"performance_recall", "average"}),
}

#: Metrics whose fused value is a combined rank: lower is better.
ASCENDING_METRICS = frozenset({"ARC", "WRCDS"})


@dataclass(frozen=True)
class WeightScheme:
    """Per-member fusion weights.

    ``weights`` aligns with the owning FusionSpec's member order.  For the
    performance_recall kind, ``class_weights[i][j]`` is member i's recall
    for ``class_codes[j]`` and ``weights`` is left empty (normalization
    happens per class at combination time).
    """

    kind: Literal["average", "diversity_strength", "performance_recall"]
    weights: tuple[float, ...] = ()
    class_codes: tuple[int, ...] = ()
    class_weights: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("average", "diversity_strength", "performance_recall"):
            raise ValueError(f"unknown weight scheme kind {self.kind!r}")
        if self.kind == "performance_recall":
            # True recalls lie in [0, 1] (the weights file enforces that);
            # the scheme itself only needs non-negative finite weights, so
            # uniformly rescaled weight sets stay valid.
            for row in self.class_weights:
                for w in row:
                    if not (math.isfinite(w) and w >= 0.0):
                        raise ValueError(f"recall weight {w} must be finite and >= 0")

    @classmethod
    def average(cls, m: int) -> "WeightScheme":
        return cls(kind="average", weights=(1.0 / m,) * m)

    @classmethod
    def from_strengths(cls, strengths: Sequence[float], inverse: bool = False) -> "WeightScheme":
        """Normalized diversity-strength weights (inverse for rank fusion)."""
        ds = np.asarray(strengths, dtype=np.float64)
        if inverse:
            if np.any(ds <= 0.0):
                raise DegenerateWeightsError(
                    "inverse diversity weights need every strength > 0"
                )
            raw = 1.0 / ds
        else:
            raw = ds
        total = float(raw.sum())
        if total <= 0.0:
            raise DegenerateWeightsError("total diversity strength is zero")
        return cls(kind="diversity_strength", weights=tuple(float(w / total) for w in raw))

    @classmethod
    def from_recalls(
        cls,
        members: Sequence[str],
        class_codes: Sequence[int],
        recalls: Mapping[str, Mapping[int, float]],
    ) -> "WeightScheme":
        rows = []
        for member in members:
            if member not in recalls:
                raise NotFoundError(f"no recall weights for system {member!r}")
            per_class = recalls[member]
            row = []
            for code in class_codes:
                if code not in per_class:
                    raise NotFoundError(
                        f"no recall weight for system {member!r}, class {code}"
                    )
                row.append(float(per_class[code]))
            rows.append(tuple(row))
        return cls(
            kind="performance_recall",
            class_codes=tuple(int(c) for c in class_codes),
            class_weights=tuple(rows),
        )

    def _permuted(self, order: Sequence[int]) -> "WeightScheme":
        weights = tuple(self.weights[i] for i in order) if self.weights else ()
        class_weights = (
            tuple(self.class_weights[i] for i in order) if self.class_weights else ()
        )
        return WeightScheme(
            kind=self.kind,
            weights=weights,
            class_codes=self.class_codes,
            class_weights=class_weights,
        )


@dataclass(frozen=True)
class FusionSpec:
    """Which systems are fused, with which metric, weights, and tie policy.

    Member systems are stored in canonical sorted order (weights are
    permuted alongside), which is also the fixed summation order of every
    combination: fused values never depend on how callers listed members.
    """

    member_systems: tuple[str, ...]
    metric: Metric
    scheme: WeightScheme
    rank_policy: RankPolicy = "competition"

    def __post_init__(self) -> None:
        members = tuple(self.member_systems)
        if not members:
            raise ValueError("member_systems must not be empty")
        if len(set(members)) != len(members):
            raise ValueError("member_systems contain duplicates")
        if self.metric not in METRIC_SCHEMES:
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.scheme.kind not in METRIC_SCHEMES[self.metric]:
            raise ValueError(
                f"scheme kind {self.scheme.kind!r} is not valid for metric {self.metric}"
            )
        if self.rank_policy not in ("ordinal", "competition"):
            raise ValueError(f"unknown rank policy {self.rank_policy!r}")
        order = sorted(range(len(members)), key=lambda i: members[i])
        if order != list(range(len(members))):
            object.__setattr__(self, "member_systems", tuple(members[i] for i in order))
            object.__setattr__(self, "scheme", self.scheme._permuted(order))
        else:
            object.__setattr__(self, "member_systems", members)

    @property
    def name(self) -> str:
        return fused_model_name(self.member_systems)


def fused_model_name(members: Sequence[str]) -> str:
    """Short display name for a fused model.

    Pure upper-case letter names concatenate ("A"+"B" -> "AB", and fusing
    models "BE" and "CE" -> "BECE"); anything else joins with "+".
    """
    if all(m.isalpha() and m.isupper() for m in members):
        return "".join(members)
    return "+".join(members)


@dataclass(frozen=True)
class FusedSystem:
    """The output of one fusion: combined values, plus a ranking of items.

    ``fused_scores`` holds the combined score for score metrics and the
    combined rank value for rank metrics (where lower is better).  Only
    WSCP-style fusions carry per-class probabilities and predictions.
    """

    spec: FusionSpec
    fused_scores: np.ndarray = field(repr=False)
    rankings: np.ndarray = field(repr=False)
    fused_class_probs: np.ndarray | None = field(default=None, repr=False)
    predictions: np.ndarray | None = field(default=None, repr=False)
    class_codes: tuple[int, ...] = ()

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def ascending(self) -> bool:
        """Whether lower fused values are better (rank metrics)."""
        return self.spec.metric in ASCENDING_METRICS

    def __len__(self) -> int:
        return int(self.fused_scores.shape[0])


def _rank_of_values(values: np.ndarray, policy: RankPolicy, ascending: bool) -> np.ndarray:
    ordered = -values if ascending else values
    return derive_ranks(ScoreFunction(system="fused", values=ordered), policy).ranks


def rank_fused(fused: FusedSystem, policy: RankPolicy) -> np.ndarray:
    """Re-rank a fused system's items under the given tie policy.

    Score metrics rank fused values descending; rank metrics ascending.
    Under the competition policy a leading block of equal best values
    shares rank 1.
    """
    return _rank_of_values(fused.fused_scores, policy, fused.ascending)


def _sorted_by_system(items: Sequence, kind: str):
    systems = [x.system for x in items]
    if len(set(systems)) != len(systems):
        raise ValueError(f"duplicate member systems in {kind} inputs")
    return sorted(items, key=lambda x: x.system)


def _stack_values(items: Sequence[np.ndarray]) -> np.ndarray:
    n = items[0].shape[0]
    for v in items[1:]:
        if v.shape[0] != n:
            raise DomainMismatchError("member systems cover different item counts")
    return np.stack(items, axis=0).astype(np.float64)


def average_score_combination(
    views: Sequence[ScoreFunction],
    rank_policy: RankPolicy = "competition",
) -> FusedSystem:
    """Uniform-weight score fusion: fused(d) = (1/m) * sum_i s_i(d)."""
    if not views:
        raise ValueError("need at least one member system")
    views = _sorted_by_system(views, "score")
    stacked = _stack_values([v.values for v in views])
    fused = stacked.sum(axis=0) / len(views)
    spec = FusionSpec(
        member_systems=tuple(v.system for v in views),
        metric="ASC",
        scheme=WeightScheme.average(len(views)),
        rank_policy=rank_policy,
    )
    return FusedSystem(
        spec=spec,
        fused_scores=fused,
        rankings=_rank_of_values(fused, rank_policy, ascending=False),
    )


def average_rank_combination(
    ranks: Sequence[RankFunction],
    rank_policy: RankPolicy | None = None,
) -> FusedSystem:
    """Uniform-weight rank fusion: fused(d) = (1/m) * sum_i r_i(d).

    Lower combined rank is better, so the final ranking sorts ascending.
    Members must share one tie policy; it is also the default policy for
    the final ranking.
    """
    if not ranks:
        raise ValueError("need at least one member system")
    policies = {r.policy for r in ranks}
    if len(policies) > 1:
        raise DomainMismatchError("member rank functions use different tie policies")
    if rank_policy is None:
        rank_policy = ranks[0].policy
    ranks = _sorted_by_system(ranks, "rank")
    stacked = _stack_values([r.ranks for r in ranks])
    fused = stacked.sum(axis=0) / len(ranks)
    spec = FusionSpec(
        member_systems=tuple(r.system for r in ranks),
        metric="ARC",
        scheme=WeightScheme.average(len(ranks)),
        rank_policy=rank_policy,
    )
    return FusedSystem(
        spec=spec,
        fused_scores=fused,
        rankings=_rank_of_values(fused, rank_policy, ascending=True),
    )


def weighted_combination_diversity(
    views: Sequence[ScoreFunction] | Sequence[RankFunction],
    matrix: DiversityMatrix,
    mode: Literal["score", "rank"] = "score",
    rank_policy: RankPolicy = "competition",
) -> FusedSystem:
    """Diversity-strength-weighted fusion (WSCDS for scores, WRCDS for ranks).

    Score mode weights each member by ds_i / sum(ds); weights are
    normalized once, so no further division is applied.  Rank mode swaps
    in inverse weights: fused(d) = sum_i (1/ds_i) r_i(d) / sum_i (1/ds_i),
    ranked ascending.  More diverse systems count more in score mode and
    less in rank mode.
    """
    if not views:
        raise ValueError("need at least one member system")
    if mode == "score":
        if not all(isinstance(v, ScoreFunction) for v in views):
            raise UnsupportedInputError("score mode requires score functions")
        views = _sorted_by_system(views, "score")
        stacked = _stack_values([v.values for v in views])
        ascending = False
        metric: Metric = "WSCDS"
    elif mode == "rank":
        if not all(isinstance(v, RankFunction) for v in views):
            raise UnsupportedInputError("rank mode requires rank functions")
        if len({r.policy for r in views}) > 1:
            raise DomainMismatchError("member rank functions use different tie policies")
        views = _sorted_by_system(views, "rank")
        stacked = _stack_values([r.ranks for r in views])
        ascending = True
        metric = "WRCDS"
    else:
        raise ValueError(f"unknown mode {mode!r}")

    strengths = [diversity_strength(matrix, v.system).ds for v in views]
    scheme = WeightScheme.from_strengths(strengths, inverse=(mode == "rank"))
    weights = np.asarray(scheme.weights, dtype=np.float64)
    fused = (weights[:, None] * stacked).sum(axis=0)
    spec = FusionSpec(
        member_systems=tuple(v.system for v in views),
        metric=metric,
        scheme=scheme,
        rank_policy=rank_policy,
    )
    return FusedSystem(
        spec=spec,
        fused_scores=fused,
        rankings=_rank_of_values(fused, rank_policy, ascending=ascending),
    )


def weighted_score_combination_performance(
    matrix: ScoreMatrix,
    members: Sequence[str],
    recalls: Mapping[str, Mapping[int, float]],
    rank_policy: RankPolicy = "competition",
    per_class: bool = True,
    zero_weight_classes: Literal["error", "zero"] = "error",
) -> FusedSystem:
    """Recall-weighted soft vote over class probabilities (WSCP).

    For each class c: fused[d][c] = sum_i w_i(c) p_i(d, c) / sum_i w_i(c),
    where w_i(c) is member i's recall for class c.  Predictions are the
    per-item argmax (ties to the lowest class code) and the fused score is
    the probability of the predicted class.

    With ``per_class=False`` each member gets one scalar weight, the mean
    of its per-class recalls, applied uniformly to all classes; the fused
    row is then a convex combination of the member rows.

    A class whose weights are all zero (no member ever recalls it) leaves
    the weighted average undefined.  By default that raises; with
    ``zero_weight_classes="zero"`` the fused model instead assigns zero
    confidence to that class and never predicts it, which lets exhaustive
    pair sweeps run on real exports where weak pairs exist.
    """
    members = sorted(members)
    if not members:
        raise ValueError("need at least one member system")
    if len(set(members)) != len(members):
        raise ValueError("member_systems contain duplicates")
    codes = matrix.class_codes()
    scheme = WeightScheme.from_recalls(members, codes.tolist(), recalls)
    weight_rows = np.asarray(scheme.class_weights, dtype=np.float64)
    if not per_class:
        scalar = weight_rows.mean(axis=1)
        weight_rows = np.repeat(scalar[:, None], len(codes), axis=1)

    denom = weight_rows.sum(axis=0)
    dead = denom <= 0.0
    if np.all(dead):
        raise DegenerateWeightsError("all recall weights are zero for every class")
    if np.any(dead):
        if zero_weight_classes == "error":
            bad = int(codes[int(np.argmax(dead))])
            raise DegenerateWeightsError(f"all recall weights are zero for class {bad}")
        # Zero weights mean zero votes: the numerator is already 0 for
        # these classes, so any positive divisor yields fused prob 0.
        denom = np.where(dead, 1.0, denom)

    stacked = np.stack([matrix.class_probs(m) for m in members], axis=0)
    fused_probs = (weight_rows[:, None, :] * stacked).sum(axis=0) / denom[None, :]
    predictions, pred_cols = argmax_selection(fused_probs, codes)
    fused_scores = fused_probs[np.arange(fused_probs.shape[0]), pred_cols]

    spec = FusionSpec(
        member_systems=tuple(members),
        metric="WSCP",
        scheme=scheme,
        rank_policy=rank_policy,
    )
    return FusedSystem(
        spec=spec,
        fused_scores=fused_scores,
        rankings=_rank_of_values(fused_scores, rank_policy, ascending=False),
        fused_class_probs=fused_probs,
        predictions=predictions,
        class_codes=tuple(int(c) for c in codes),
    )


def enumerate_subset_fusions(
    matrix: ScoreMatrix,
    metric: Metric,
    subset_size: int = 2,
    recalls: Mapping[str, Mapping[int, float]] | None = None,
    diversity: DiversityMatrix | None = None,
    rank_policy: RankPolicy = "competition",
    zero_weight_classes: Literal["error", "zero"] = "error",
) -> list[FusedSystem]:
    """Fuse every size-k subset of the matrix's systems with one metric.

    Produces C(m, k) fusions in lexicographic member order (AB, AC, ...,
    EF for the 6-system pair sweep).  Diversity-weighted metrics compute
    strengths against *all* systems in the matrix (or accept a
    precomputed matrix); WSCP requires recall weights.
    """
    systems = sorted(matrix.systems)
    if len(systems) < subset_size:
        raise ValueError(f"need at least {subset_size} systems, have {len(systems)}")
    if subset_size < 1:
        raise ValueError("subset_size must be positive")

    metric = metric.upper()  # type: ignore[assignment]
    if metric not in METRIC_SCHEMES:
        raise ValueError(f"unknown metric {metric!r}")

    views: dict[str, ScoreFunction] = {}
    rank_views: dict[str, RankFunction] = {}
    if metric in ("ASC", "WSCDS"):
        views = {s: top_score_view(matrix, s) for s in systems}
    elif metric in ("ARC", "WRCDS"):
        rank_views = {
            s: derive_ranks(top_score_view(matrix, s), rank_policy) for s in systems
        }
    if metric in ("WSCDS", "WRCDS") and diversity is None:
        diversity = diversity_matrix([derive_rsc(top_score_view(matrix, s)) for s in systems])
    if metric == "WSCP" and recalls is None:
        raise ValueError("the WSCP metric requires recall weights")

    fusions: list[FusedSystem] = []
    for combo in itertools.combinations(systems, subset_size):
        if metric == "ASC":
            fused = average_score_combination([views[s] for s in combo], rank_policy)
        elif metric == "ARC":
            fused = average_rank_combination([rank_views[s] for s in combo], rank_policy)
        elif metric == "WSCDS":
            fused = weighted_combination_diversity(
                [views[s] for s in combo], diversity, "score", rank_policy
            )
        elif metric == "WRCDS":
            fused = weighted_combination_diversity(
                [rank_views[s] for s in combo], diversity, "rank", rank_policy
            )
        else:
            fused = weighted_score_combination_performance(
                matrix, combo, recalls, rank_policy,
                zero_weight_classes=zero_weight_classes,
            )
        fusions.append(fused)
    return fusions


def enumerate_pair_fusions(
    matrix: ScoreMatrix,
    metric: Metric,
    recalls: Mapping[str, Mapping[int, float]] | None = None,
    diversity: DiversityMatrix | None = None,
    rank_policy: RankPolicy = "competition",
    zero_weight_classes: Literal["error", "zero"] = "error",
) -> list[FusedSystem]:
    """All C(m, 2) two-system fusions, in lexicographic member order."""
    return enumerate_subset_fusions(
        matrix, metric, 2, recalls=recalls, diversity=diversity,
        rank_policy=rank_policy, zero_weight_classes=zero_weight_classes,
    )


def fuse_fused(systems: Sequence[FusedSystem], rank_policy: RankPolicy | None = None) -> FusedSystem:
    """Combine already-fused probability models by equal-weight averaging.

    Every input must carry per-class probabilities (WSCP-style).  The
    result averages those probabilities per class, predicts by argmax
    (ties to the lowest class code), and is named after its members, e.g.
    fusing models BE and CE yields BECE.
    """
    if not systems:
        raise ValueError("need at least one fused system")
    for fused in systems:
        if fused.fused_class_probs is None or fused.predictions is None:
            raise UnsupportedInputError(
                f"fused model {fused.name!r} lacks class probabilities"
            )
    systems = sorted(systems, key=lambda f: f.name)
    codes = systems[0].class_codes
    n = len(systems[0])
    for fused in systems[1:]:
        if fused.class_codes != codes or len(fused) != n:
            raise DomainMismatchError("fused systems cover different items or classes")
    if rank_policy is None:
        rank_policy = systems[0].spec.rank_policy

    stacked = np.stack([f.fused_class_probs for f in systems], axis=0)
    mean_probs = stacked.sum(axis=0) / len(systems)
    codes_arr = np.asarray(codes, dtype=np.int64)
    predictions, pred_cols = argmax_selection(mean_probs, codes_arr)
    fused_scores = mean_probs[np.arange(n), pred_cols]

    spec = FusionSpec(
        member_systems=tuple(f.name for f in systems),
        metric="WSCP",
        scheme=WeightScheme.average(len(systems)),
        rank_policy=rank_policy,
    )
    return FusedSystem(
        spec=spec,
        fused_scores=fused_scores,
        rankings=_rank_of_values(fused_scores, rank_policy, ascending=False),
        fused_class_probs=mean_probs,
        predictions=predictions,
        class_codes=codes,
    )
