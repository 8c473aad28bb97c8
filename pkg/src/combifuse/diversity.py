"""Cognitive diversity between scoring systems.

Two systems are cognitively diverse when their RSC functions differ: they
spread confidence over ranks in different ways even if they agree on many
individual items.  The pairwise measure here is a root-mean-square style
distance between RSC curves; a system's diversity strength is its average
distance to all other systems and later serves as a fusion weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import RscFunction
from .errors import DegenerateDomainError, DomainMismatchError, NotFoundError


@dataclass(frozen=True)
class DiversityMatrix:
    """Symmetric matrix of pairwise cognitive diversity values."""

    systems: tuple[str, ...]
    cd: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m = len(self.systems)
        cd = np.array(self.cd, dtype=np.float64, copy=True)
        if cd.shape != (m, m):
            raise ValueError(f"cd shape {cd.shape} != ({m}, {m})")
        if len(set(self.systems)) != m:
            raise ValueError("system names contain duplicates")
        if not np.all(np.isfinite(cd)) or np.any(cd < 0.0):
            raise ValueError("diversity values must be finite and non-negative")
        if np.any(cd != cd.T) or np.any(np.diag(cd) != 0.0):
            raise ValueError("diversity matrix must be symmetric with zero diagonal")
        cd.flags.writeable = False
        object.__setattr__(self, "cd", cd)

    def index(self, system: str) -> int:
        try:
            return self.systems.index(system)
        except ValueError:
            raise NotFoundError(f"unknown system {system!r}") from None

    def pair(self, a: str, b: str) -> float:
        return float(self.cd[self.index(a), self.index(b)])


@dataclass(frozen=True)
class DiversityStrength:
    """Average cognitive diversity of one system against all others."""

    system: str
    ds: float


def cognitive_diversity(f_a: RscFunction, f_b: RscFunction) -> float:
    """Distance between two RSC functions on a shared rank domain 1..n.

    Computed as sqrt( (1 / (n^2 - n)) * sum_k (f_a(k) - f_b(k))^2 ) with
    the sum taken in ascending rank order.  Symmetric, non-negative, and
    zero exactly when the two curves coincide pointwise.
    """
    n = f_a.n
    if f_b.n != n:
        raise DomainMismatchError(
            f"rank domains differ: {f_a.system!r} has n={n}, {f_b.system!r} has n={f_b.n}"
        )
    if n < 2:
        raise DegenerateDomainError("cognitive diversity needs a rank domain with n >= 2")
    diff = f_a.values - f_b.values
    # Strict left-to-right accumulation: ascending-k summation order is
    # part of the contract (bitwise-reproducible results).
    total = float(np.add.accumulate(diff * diff)[-1])
    return math.sqrt(total / (n * n - n))


def diversity_matrix(rscs: Sequence[RscFunction]) -> DiversityMatrix:
    """Pairwise cognitive diversity for two or more systems.

    Each pair is computed independently (fixed ascending-rank summation
    within a pair), so the result does not depend on evaluation order.
    """
    if len(rscs) < 2:
        raise DegenerateDomainError("need at least two systems")
    systems = tuple(r.system for r in rscs)
    if len(set(systems)) != len(systems):
        raise ValueError("system names contain duplicates")
    m = len(rscs)
    cd = np.zeros((m, m), dtype=np.float64)
    for i in range(m):
        for j in range(i + 1, m):
            value = cognitive_diversity(rscs[i], rscs[j])
            cd[i, j] = value
            cd[j, i] = value
    return DiversityMatrix(systems=systems, cd=cd)


def diversity_strength(matrix: DiversityMatrix, system: str) -> DiversityStrength:
    """Mean diversity of ``system`` against the other m-1 systems."""
    i = matrix.index(system)
    m = len(matrix.systems)
    if m < 2:
        raise DegenerateDomainError("diversity strength needs at least two systems")
    row = np.delete(matrix.cd[i], i)
    return DiversityStrength(system=system, ds=float(row.mean()))


def all_strengths(matrix: DiversityMatrix) -> dict[str, float]:
    """Diversity strength of every system in the matrix, keyed by name."""
    return {s: diversity_strength(matrix, s).ds for s in matrix.systems}


def rsc_curve_rows(rscs: Sequence[RscFunction]) -> list[tuple[str, int, float]]:
    """Flatten RSC functions to (system, rank, score) rows for plotting.

    Rows are grouped by system in input order with ranks ascending, ready
    to chart with rank on the x axis and normalized score on the y axis.
    """
    rows: list[tuple[str, int, float]] = []
    for rsc in rscs:
        for rank, score in rsc.points():
            rows.append((rsc.system, rank, score))
    return rows
