"""Data model and score/rank machinery for multi-system fusion.

A scoring system is viewed abstractly as a score function over data items
together with the rank function obtained by sorting those scores in
descending order.  The rank-score characteristic (RSC) of a system maps
each rank k to the k-th largest normalized score; it captures how the
system distributes confidence across items, independent of item identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Literal, Sequence

import numpy as np

from .errors import (
    DuplicateItemError,
    InvalidScoreError,
    NotFoundError,
)

RankPolicy = Literal["ordinal", "competition"]

#: Tolerance within which a probability row is accepted without rescaling.
ROW_SUM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class ClassLabel:
    """A traffic class: integer code plus human-readable name."""

    code: int
    name: str


#: The 14 traffic classes of the LYCOS-IDS2017 dataset, by their standard
#: integer encoding.  The data model accepts any class set; this is the
#: default used when a scores file carries codes 0..13.
CANONICAL_CLASSES: tuple[ClassLabel, ...] = (
    ClassLabel(0, "Benign"),
    ClassLabel(1, "Bot"),
    ClassLabel(2, "DDoS"),
    ClassLabel(3, "DoS Goldeneye"),
    ClassLabel(4, "DoS Hulk"),
    ClassLabel(5, "DoS Slowhttptest"),
    ClassLabel(6, "DoS Slowloris"),
    ClassLabel(7, "FTP Patator"),
    ClassLabel(8, "Heartbleed"),
    ClassLabel(9, "Portscan"),
    ClassLabel(10, "SSH Patator"),
    ClassLabel(11, "Webattack Bruteforce"),
    ClassLabel(12, "Webattack Sql Injection"),
    ClassLabel(13, "Webattack XSS"),
)

#: Default names of the six base scoring systems.
CANONICAL_SYSTEMS: tuple[str, ...] = ("A", "B", "C", "D", "E", "F")


def canonical_label(code: int) -> ClassLabel:
    """Return the canonical label for ``code``, or a generic one."""
    for label in CANONICAL_CLASSES:
        if label.code == code:
            return label
    return ClassLabel(code, f"class {code}")


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _frozen_copy(values, dtype) -> np.ndarray:
    return _readonly(np.array(values, dtype=dtype, copy=True))


@dataclass(frozen=True)
class ScoreMatrix:
    """Per-item class-probability outputs of several scoring systems.

    ``probs[i, s, c]`` is the probability that system ``systems[s]``
    assigns to item ``item_ids[i]`` belonging to class ``classes[c]``.
    ``labels[i]`` is the true class code of item i.

    Rows (one per item/system) whose probabilities do not sum to 1 within
    ``ROW_SUM_TOLERANCE`` are rescaled by their sum at construction and
    counted in ``renormalized_rows``; all-zero rows are rejected.
    """

    item_ids: tuple[str, ...]
    labels: np.ndarray
    systems: tuple[str, ...]
    classes: tuple[ClassLabel, ...]
    probs: np.ndarray
    renormalized_rows: int = 0

    @classmethod
    def build(
        cls,
        item_ids: Sequence[str],
        labels: Sequence[int],
        systems: Sequence[str],
        classes: Sequence[ClassLabel],
        probs: np.ndarray,
    ) -> "ScoreMatrix":
        item_ids = tuple(str(i) for i in item_ids)
        systems = tuple(systems)
        classes = tuple(classes)
        labels_arr = np.array(labels, dtype=np.int64, copy=True)
        p = np.array(probs, dtype=np.float64, copy=True)

        n, m, c = len(item_ids), len(systems), len(classes)
        if p.shape != (n, m, c):
            raise ValueError(f"probs shape {p.shape} != ({n}, {m}, {c})")
        if n < 1 or m < 1:
            raise ValueError("need at least one item and one system")
        if c < 2:
            raise ValueError("need at least two classes")
        if len(set(item_ids)) != n:
            raise DuplicateItemError("item_ids contain duplicates")
        if len(set(systems)) != m:
            raise ValueError("system names contain duplicates")
        codes = [label.code for label in classes]
        if len(set(codes)) != c:
            raise ValueError("class codes contain duplicates")
        if labels_arr.shape != (n,):
            raise ValueError("labels must align with item_ids")
        unknown = set(labels_arr.tolist()) - set(codes)
        if unknown:
            raise NotFoundError(f"labels reference unknown class codes {sorted(unknown)}")
        if not np.all(np.isfinite(p)):
            raise InvalidScoreError("probabilities must be finite")
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise InvalidScoreError("probabilities must lie in [0, 1]")

        sums = p.sum(axis=2)
        if np.any(sums <= 0.0):
            i, s = np.argwhere(sums <= 0.0)[0]
            raise InvalidScoreError(
                f"probability row sums to 0 (item {item_ids[i]!r}, system {systems[s]!r})"
            )
        off = np.abs(sums - 1.0) > ROW_SUM_TOLERANCE
        renormalized = int(off.sum())
        if renormalized:
            p = np.where(off[:, :, None], p / sums[:, :, None], p)

        return cls(
            item_ids=item_ids,
            labels=_readonly(labels_arr),
            systems=systems,
            classes=classes,
            probs=_readonly(p),
            renormalized_rows=renormalized,
        )

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    def system_index(self, system: str) -> int:
        try:
            return self.systems.index(system)
        except ValueError:
            raise NotFoundError(f"unknown system {system!r}") from None

    def class_index(self, code: int) -> int:
        for i, label in enumerate(self.classes):
            if label.code == code:
                return i
        raise NotFoundError(f"unknown class code {code}")

    def class_codes(self) -> np.ndarray:
        return np.array([label.code for label in self.classes], dtype=np.int64)

    def class_probs(self, system: str) -> np.ndarray:
        """The (n_items, n_classes) probability block of one system."""
        return self.probs[:, self.system_index(system), :]

    def argmax_predictions(self, system: str) -> np.ndarray:
        """Per-item predicted class codes for one system (argmax).

        Exact probability ties break to the lowest class code.
        """
        return argmax_class_codes(self.class_probs(system), self.class_codes())


def argmax_selection(probs: np.ndarray, codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise argmax over class probabilities.

    Returns (chosen class codes, chosen column indices).  Ties at the
    maximum resolve to the smallest class code, which keeps predictions
    deterministic under permutations of the class axis.
    """
    probs = np.asarray(probs, dtype=np.float64)
    codes = np.asarray(codes, dtype=np.int64)
    best = probs == probs.max(axis=1, keepdims=True)
    masked = np.where(best, codes[None, :], np.iinfo(np.int64).max)
    cols = np.argmin(masked, axis=1)
    return masked[np.arange(cols.shape[0]), cols], cols


def argmax_class_codes(probs: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Row-wise argmax as class codes (ties to the smallest code)."""
    return argmax_selection(probs, codes)[0]


@dataclass(frozen=True)
class ScoreFunction:
    """One system's per-item real-valued confidence scores."""

    system: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = _frozen_copy(self.values, np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 1:
            raise ValueError("scores must be one-dimensional")

    def __len__(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class RankFunction:
    """Per-item positive integer ranks derived from a score function.

    Lower rank means higher score.  Under the ordinal policy ranks are a
    permutation of 1..n (ties broken by ascending item index); under the
    competition policy tied items share the minimal rank of their group.
    """

    system: str
    ranks: np.ndarray = field(repr=False)
    policy: RankPolicy = "ordinal"

    def __post_init__(self) -> None:
        r = _frozen_copy(self.ranks, np.int64)
        object.__setattr__(self, "ranks", r)
        if r.ndim != 1:
            raise ValueError("ranks must be one-dimensional")

    def __len__(self) -> int:
        return int(self.ranks.shape[0])


@dataclass(frozen=True)
class RscFunction:
    """Rank-score characteristic: rank k (1..n) -> k-th largest normalized score.

    Values are non-increasing and lie in [0, 1].
    """

    system: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = _frozen_copy(self.values, np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or v.shape[0] < 1:
            raise ValueError("an RSC function needs at least one rank")

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def points(self) -> Iterator[tuple[int, float]]:
        """Yield (rank, score) pairs with ranks ascending from 1."""
        for k, value in enumerate(self.values, start=1):
            yield k, float(value)


def top_score_view(matrix: ScoreMatrix, system: str) -> ScoreFunction:
    """Collapse a system's class probabilities to its per-item top score.

    The top score of an item is the highest probability the system assigns
    to any class, i.e. the model's confidence in its own prediction.
    """
    block = matrix.class_probs(system)
    return ScoreFunction(system=system, values=block.max(axis=1))


def _check_scores(scores: ScoreFunction) -> np.ndarray:
    v = scores.values
    if v.shape[0] == 0:
        raise InvalidScoreError(f"system {scores.system!r} has no scores")
    if not np.all(np.isfinite(v)):
        raise InvalidScoreError(f"system {scores.system!r} has non-finite scores")
    return v


def derive_ranks(scores: ScoreFunction, policy: RankPolicy = "ordinal") -> RankFunction:
    """Rank items by descending score under the chosen tie policy.

    ordinal:     ranks are a permutation of 1..n; ties break by ascending
                 item index (stable).
    competition: tied items all receive the minimal rank of their tie
                 group (rank = 1 + number of strictly better items).
    """
    values = _check_scores(scores)
    n = values.shape[0]
    order = np.argsort(-values, kind="stable")
    ranks = np.empty(n, dtype=np.int64)
    positions = np.arange(1, n + 1, dtype=np.int64)
    if policy == "ordinal":
        ranks[order] = positions
    elif policy == "competition":
        sorted_vals = values[order]
        group_start = np.empty(n, dtype=bool)
        group_start[0] = True
        group_start[1:] = sorted_vals[1:] != sorted_vals[:-1]
        shared = np.maximum.accumulate(np.where(group_start, positions, 1))
        ranks[order] = shared
    else:
        raise ValueError(f"unknown rank policy {policy!r}")
    return RankFunction(system=scores.system, ranks=ranks, policy=policy)


def normalize_scores(scores: ScoreFunction) -> ScoreFunction:
    """Linearly rescale scores onto [0, 1] via (s - min) / (max - min).

    A constant score vector carries no ranking information and maps to
    all zeros.
    """
    values = _check_scores(scores)
    lo = values.min()
    hi = values.max()
    if hi == lo:
        normalized = np.zeros_like(values)
    else:
        normalized = (values - lo) / (hi - lo)
    return ScoreFunction(system=scores.system, values=normalized)


def derive_rsc(scores: ScoreFunction) -> RscFunction:
    """Compute the rank-score characteristic of a score function.

    Normalizes the scores, ranks them (ordinal, keeping the rank map a
    bijection), and reads off the normalized score at each rank; this is
    simply the normalized scores sorted in descending order.
    """
    normalized = normalize_scores(scores)
    return RscFunction(system=scores.system, values=np.sort(normalized.values)[::-1].copy())
