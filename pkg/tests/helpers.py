"""Shared builders and independent oracles used across the test suite.

Oracles here are deliberately written in plain Python (dicts and loops),
independent of the numpy code paths they check.
"""

from __future__ import annotations

import math

import numpy as np

from combifuse.core import ClassLabel, RscFunction, ScoreMatrix


def labels_for(n_classes: int) -> tuple[ClassLabel, ...]:
    return tuple(ClassLabel(i, f"class {i}") for i in range(n_classes))


def random_matrix(
    rng: np.random.Generator,
    n: int = 20,
    systems: tuple[str, ...] = ("A", "B", "C"),
    n_classes: int = 3,
) -> ScoreMatrix:
    """A valid random ScoreMatrix with Dirichlet probability rows."""
    probs = rng.dirichlet(np.ones(n_classes), size=(n, len(systems)))
    item_ids = [f"d{i:05d}" for i in range(n)]
    labels = rng.integers(0, n_classes, size=n)
    return ScoreMatrix.build(item_ids, labels, systems, labels_for(n_classes), probs)


def random_rsc(rng: np.random.Generator, system: str, n: int) -> RscFunction:
    """A random valid RSC curve: non-increasing values in [0, 1]."""
    return RscFunction(system=system, values=np.sort(rng.uniform(0.0, 1.0, size=n))[::-1])


def cd_oracle(a, b) -> float:
    """Brute-force cognitive diversity (pure Python, ascending ranks)."""
    va = [float(x) for x in a.values]
    vb = [float(x) for x in b.values]
    n = len(va)
    total = 0.0
    for k in range(n):
        d = va[k] - vb[k]
        total += d * d
    return math.sqrt(total / (n * n - n))


def confusion_oracle(predictions, labels, codes):
    """Brute-force per-class precision/recall/F1 via explicit counting.

    Returns {code: (precision, recall, f1, support)} with the 0-when-
    undefined convention.
    """
    out = {}
    for code in codes:
        tp = fp = fn = 0
        for pred, true in zip(predictions, labels):
            if pred == code and true == code:
                tp += 1
            elif pred == code and true != code:
                fp += 1
            elif pred != code and true == code:
                fn += 1
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        out[code] = (precision, recall, f1, tp + fn)
    return out
