"""Combinatorial fusion of multi-class scoring systems.

Ingest per-item class probabilities from several models, derive rank and
rank-score characteristic functions, measure cognitive diversity, fuse
subsets of systems under score/rank/weighted metrics, and evaluate the
fused models per attack class.
"""

__version__ = "0.1.0"

from .core import (
    CANONICAL_CLASSES,
    CANONICAL_SYSTEMS,
    ClassLabel,
    RankFunction,
    RscFunction,
    ScoreFunction,
    ScoreMatrix,
    derive_ranks,
    derive_rsc,
    normalize_scores,
    top_score_view,
)
from .diversity import (
    DiversityMatrix,
    DiversityStrength,
    cognitive_diversity,
    diversity_matrix,
    diversity_strength,
    rsc_curve_rows,
)
from .errors import (
    CombifuseError,
    DegenerateDomainError,
    DegenerateWeightsError,
    DomainMismatchError,
    DuplicateItemError,
    EmptyPoolError,
    InvalidScoreError,
    NotFoundError,
    ParseError,
    SchemaError,
    UnsupportedInputError,
)
from .evaluation import (
    BestPerClass,
    ClassMetrics,
    ClassReport,
    HybridModel,
    best_per_class,
    build_hybrid,
    class_report,
    hybrid_predictions,
)
from .fusion import (
    FusedSystem,
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
from .io import ingest_scores, load_weights, write_scores_csv, write_weights_csv

__all__ = [
    "CANONICAL_CLASSES",
    "CANONICAL_SYSTEMS",
    "BestPerClass",
    "ClassLabel",
    "ClassMetrics",
    "ClassReport",
    "CombifuseError",
    "DegenerateDomainError",
    "DegenerateWeightsError",
    "DiversityMatrix",
    "DiversityStrength",
    "DomainMismatchError",
    "DuplicateItemError",
    "EmptyPoolError",
    "FusedSystem",
    "FusionSpec",
    "HybridModel",
    "InvalidScoreError",
    "NotFoundError",
    "ParseError",
    "RankFunction",
    "RscFunction",
    "SchemaError",
    "ScoreFunction",
    "ScoreMatrix",
    "UnsupportedInputError",
    "WeightScheme",
    "average_rank_combination",
    "average_score_combination",
    "best_per_class",
    "build_hybrid",
    "class_report",
    "cognitive_diversity",
    "derive_ranks",
    "derive_rsc",
    "diversity_matrix",
    "diversity_strength",
    "enumerate_pair_fusions",
    "enumerate_subset_fusions",
    "fuse_fused",
    "hybrid_predictions",
    "ingest_scores",
    "load_weights",
    "normalize_scores",
    "rank_fused",
    "rsc_curve_rows",
    "top_score_view",
    "weighted_combination_diversity",
    "weighted_score_combination_performance",
    "write_scores_csv",
    "write_weights_csv",
]
