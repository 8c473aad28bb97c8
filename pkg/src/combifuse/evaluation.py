"""Per-class model evaluation, winner selection, and hybrid routing.

Recall is the metric that matters most here: a missed attack is worse
than a false alarm, and the rarest classes (a handful of flows) are
exactly where single models fail.  Evaluation therefore reports per-class
precision/recall/F1, picks recall winners per class, and can assemble a
hybrid model that routes each class to the fused model that detects it
best.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Collection, Mapping, Sequence

import numpy as np

from .core import ClassLabel
from .errors import (
    DomainMismatchError,
    EmptyPoolError,
    NotFoundError,
)


@dataclass(frozen=True)
class ClassMetrics:
    """Precision/recall/F1 for one class of one model.

    ``precision_defined`` / ``recall_defined`` distinguish a true zero
    from a vacuous one (empty denominator), which is reported as 0.0.
    """

    code: int
    precision: float
    recall: float
    f1: float
    support: int
    precision_defined: bool = True
    recall_defined: bool = True


@dataclass(frozen=True)
class ClassReport:
    """Per-class metrics of one (base or fused) model."""

    model: str
    rows: tuple[ClassMetrics, ...]

    def row(self, code: int) -> ClassMetrics:
        for r in self.rows:
            if r.code == code:
                return r
        raise NotFoundError(f"report for {self.model!r} has no class {code}")

    def codes(self) -> tuple[int, ...]:
        return tuple(r.code for r in self.rows)

    @property
    def n_items(self) -> int:
        return sum(r.support for r in self.rows)


def class_report(
    model: str,
    predictions: Sequence[int] | np.ndarray,
    labels: Sequence[int] | np.ndarray,
    classes: Sequence[ClassLabel] | Sequence[int],
) -> ClassReport:
    """Confusion-matrix based per-class precision, recall, and F1.

    precision = TP / (TP + FP), recall = TP / (TP + FN), both 0 when the
    denominator is 0 (flagged as undefined); f1 = 2pr / (p + r) when
    p + r > 0, else 0.
    """
    preds = np.asarray(predictions, dtype=np.int64)
    truth = np.asarray(labels, dtype=np.int64)
    if preds.shape != truth.shape or preds.ndim != 1:
        raise DomainMismatchError(
            f"predictions ({preds.shape}) and labels ({truth.shape}) are misaligned"
        )
    codes = [c.code if isinstance(c, ClassLabel) else int(c) for c in classes]
    if len(set(codes)) != len(codes):
        raise ValueError("class codes contain duplicates")
    known = set(codes)
    stray = (set(preds.tolist()) | set(truth.tolist())) - known
    if stray:
        raise NotFoundError(f"codes {sorted(stray)} are outside the class set")

    rows = []
    for code in codes:
        pred_c = preds == code
        true_c = truth == code
        tp = int(np.sum(pred_c & true_c))
        fp = int(np.sum(pred_c & ~true_c))
        fn = int(np.sum(~pred_c & true_c))
        support = tp + fn
        p_defined = (tp + fp) > 0
        r_defined = support > 0
        precision = tp / (tp + fp) if p_defined else 0.0
        recall = tp / support if r_defined else 0.0
        f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        rows.append(
            ClassMetrics(
                code=code,
                precision=precision,
                recall=recall,
                f1=f1,
                support=support,
                precision_defined=p_defined,
                recall_defined=r_defined,
            )
        )
    return ClassReport(model=model, rows=tuple(rows))


def format_recall_pct(recall: float) -> str:
    """Recall as a percentage rounded half-up to 2 decimals ("95.59").

    Trailing zeros are dropped, so 1.0 renders as "100".
    """
    pct = Decimal(repr(recall)) * Decimal(100)
    text = str(pct.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))
    return text.rstrip("0").rstrip(".") if "." in text else text


@dataclass(frozen=True)
class PoolWinners:
    """The maximal-recall model(s) of one pool for one class."""

    pool: str
    models: tuple[str, ...]
    recall: float


@dataclass(frozen=True)
class BestPerClass:
    """Recall winners per class, one entry per pool (ties listed in full)."""

    pools: tuple[str, ...]
    by_class: Mapping[int, tuple[PoolWinners, ...]]

    def winners(self, code: int, pool: str) -> PoolWinners:
        for entry in self.by_class[code]:
            if entry.pool == pool:
                return entry
        raise NotFoundError(f"no pool {pool!r} for class {code}")


def best_per_class(
    reports: Sequence[ClassReport],
    pools: Mapping[str, Sequence[str]],
) -> BestPerClass:
    """Select, per class and per pool, the model(s) with maximal recall.

    Comparison uses full-precision recalls; presentation rounding is left
    to ``format_recall_pct``.  Winner sets are sorted by model name so the
    result does not depend on report order.
    """
    if not reports:
        raise EmptyPoolError("no reports given")
    by_model = {}
    code_set = reports[0].codes()
    for report in reports:
        if report.codes() != code_set:
            raise DomainMismatchError(
                f"report for {report.model!r} covers a different class set"
            )
        by_model[report.model] = report
    for pool, members in pools.items():
        if not members:
            raise EmptyPoolError(f"pool {pool!r} is empty")
        for name in members:
            if name not in by_model:
                raise NotFoundError(f"pool {pool!r} references unknown model {name!r}")

    by_class: dict[int, tuple[PoolWinners, ...]] = {}
    for code in code_set:
        entries = []
        for pool, members in pools.items():
            recalls = {name: by_model[name].row(code).recall for name in members}
            top = max(recalls.values())
            winners = tuple(sorted(name for name, r in recalls.items() if r == top))
            entries.append(PoolWinners(pool=pool, models=winners, recall=top))
        by_class[code] = tuple(entries)
    return BestPerClass(pools=tuple(pools.keys()), by_class=by_class)


@dataclass(frozen=True)
class HybridModel:
    """Per-class routing between prediction sources.

    ``routes`` lists (class code, source) pairs in precedence order.  An
    item is predicted by the first routed source whose own prediction is
    the class routed to it; if no route fires, ``default`` predicts.
    ``assignment`` records the materialized class -> source map (routed
    classes keep their source, every other class falls to the default).
    """

    routes: tuple[tuple[int, str], ...]
    default: str
    assignment: Mapping[int, str]

    def sources(self) -> tuple[str, ...]:
        seen: list[str] = []
        for _, source in self.routes:
            if source not in seen:
                seen.append(source)
        if self.default not in seen:
            seen.append(self.default)
        return tuple(seen)


def build_hybrid(
    routes: Mapping[int, str] | Sequence[tuple[int, str]],
    default: str,
    classes: Sequence[ClassLabel] | Sequence[int],
    available_sources: Collection[str],
) -> HybridModel:
    """Materialize a per-class routing over known prediction sources.

    ``routes`` maps class codes to the source that should answer for that
    class (e.g. {4: "DF", 11: "CE"} with default "BE"); declaration order
    is precedence order.  Every class ends up with exactly one source.
    """
    route_items = list(routes.items()) if isinstance(routes, Mapping) else list(routes)
    codes = [c.code if isinstance(c, ClassLabel) else int(c) for c in classes]
    known = set(codes)
    seen_codes = set()
    for code, source in route_items:
        if code not in known:
            raise NotFoundError(f"route references unknown class code {code}")
        if code in seen_codes:
            raise ValueError(f"class {code} routed twice")
        seen_codes.add(code)
        if source not in available_sources:
            raise NotFoundError(f"class {code} routed to missing source {source!r}")
    if default not in available_sources:
        raise NotFoundError(f"default source {default!r} is missing")

    routed = dict(route_items)
    assignment = {code: routed.get(code, default) for code in codes}
    return HybridModel(
        routes=tuple((int(c), s) for c, s in route_items),
        default=default,
        assignment=assignment,
    )


def hybrid_predictions(
    hybrid: HybridModel,
    predictions_by_source: Mapping[str, np.ndarray],
    with_sources: bool = False,
):
    """Apply a hybrid model to per-source predictions.

    Routes fire in precedence order: the first routed source predicting
    exactly its routed class claims the item; unclaimed items go to the
    default source.  With ``with_sources=True`` also returns, per item,
    the name of the source whose prediction was used.
    """
    for source in hybrid.sources():
        if source not in predictions_by_source:
            raise NotFoundError(f"no predictions for source {source!r}")
    default_preds = np.asarray(predictions_by_source[hybrid.default], dtype=np.int64)
    n = default_preds.shape[0]
    result = default_preds.copy()
    chosen = np.full(n, hybrid.default, dtype=object)
    claimed = np.zeros(n, dtype=bool)
    for code, source in hybrid.routes:
        preds = np.asarray(predictions_by_source[source], dtype=np.int64)
        if preds.shape[0] != n:
            raise DomainMismatchError(f"source {source!r} covers a different item count")
        fires = ~claimed & (preds == code)
        result[fires] = code
        chosen[fires] = source
        claimed |= fires
    if with_sources:
        return result, chosen
    return result
