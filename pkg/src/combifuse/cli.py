"""Command-line surface.

Five subcommands cover the whole pipeline on one scores file:

  rsc        export rank-score characteristic curves (plot data)
  diversity  pairwise cognitive diversity + per-system strength
  fuse       fuse member subsets (or all pairs) under one metric
  evaluate   per-class precision/recall/F1 and best-per-class winners
  hybrid     route classes to fused models and evaluate the result

Outputs are machine-readable (JSON/CSV), written atomically, and
deterministic apart from the generated_at field in each JSON meta block.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__
from .core import (
    RankPolicy,
    ScoreMatrix,
    derive_ranks,
    derive_rsc,
    top_score_view,
)
from .diversity import all_strengths, diversity_matrix, rsc_curve_rows
from .errors import CombifuseError
from .evaluation import (
    best_per_class,
    build_hybrid,
    class_report,
    format_recall_pct,
    hybrid_predictions,
)
from .fusion import (
    FusedSystem,
    FusionSpec,
    average_rank_combination,
    average_score_combination,
    enumerate_pair_fusions,
    weighted_combination_diversity,
    weighted_score_combination_performance,
)
from .io import (
    ingest_scores,
    load_weights,
    write_csv_report,
    write_json_report,
)

METRIC_CHOICES = ("asc", "arc", "wscds", "wrcds", "wscp")


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one CLI invocation (recorded in report meta)."""

    command: str
    scores: str
    out_dir: str
    weights: str | None = None
    metric: str | None = None
    members: tuple[tuple[str, ...], ...] = ()
    all_pairs: bool = False
    rank_policy: RankPolicy = "competition"
    top_k: int = 10
    report_format: str = "json"
    scalar_weights: bool = False
    routes: tuple[tuple[int, str], ...] = ()
    default_source: str | None = None
    seed: int | None = None  # reserved; the pipeline is deterministic

    def meta(self) -> dict:
        # Basenames only: identical inputs must yield identical reports
        # no matter where they sit or where output goes.
        config = {
            "scores": Path(self.scores).name,
            "weights": Path(self.weights).name if self.weights else None,
            "metric": self.metric,
            "members": ["".join(m) if all(len(s) == 1 for s in m) else list(m) for m in self.members],
            "all_pairs": self.all_pairs,
            "rank_policy": self.rank_policy,
            "top_k": self.top_k,
            "format": self.report_format,
            "scalar_weights": self.scalar_weights,
            "routes": [f"{code}={source}" for code, source in self.routes],
            "default_source": self.default_source,
            "seed": self.seed,
        }
        return {
            "generated_at": datetime.now(timezone.utc).isoformat(),
            "tool": f"combifuse {__version__}",
            "command": self.command,
            "config": config,
        }


def _parse_members(text: str) -> tuple[str, ...]:
    members = tuple(text.split(",")) if "," in text else tuple(text)
    if any(not m for m in members):
        raise argparse.ArgumentTypeError(f"bad member list {text!r}")
    return members


def _parse_route(text: str) -> tuple[int, str]:
    code_text, sep, source = text.partition("=")
    if not sep or not source:
        raise argparse.ArgumentTypeError(f"route {text!r} is not of the form CODE=SOURCE")
    try:
        code = int(code_text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"route {text!r} has a non-integer class code")
    return code, source


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combifuse",
        description="Fuse multi-class scoring systems and evaluate the results.",
    )
    parser.add_argument("--version", action="version", version=f"combifuse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scores", required=True, help="scores CSV (item_id,label,SYS:code,...)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="reserved; recorded in reports")

    p_rsc = sub.add_parser("rsc", help="export rank-score characteristic curves")
    common(p_rsc)

    p_div = sub.add_parser("diversity", help="cognitive diversity matrix and strengths")
    common(p_div)

    p_fuse = sub.add_parser("fuse", help="fuse member subsets under one metric")
    common(p_fuse)
    p_fuse.add_argument("--metric", required=True, choices=METRIC_CHOICES)
    p_fuse.add_argument("--weights", help="recall weights CSV (required for wscp)")
    group = p_fuse.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--members",
        action="append",
        type=_parse_members,
        help='member subset, e.g. "AB" or "sysX,sysY"; repeatable',
    )
    group.add_argument("--all-pairs", action="store_true", help="fuse every 2-system subset")
    p_fuse.add_argument("--rank-policy", choices=("ordinal", "competition"), default="competition")
    p_fuse.add_argument("--top-k", type=int, default=10, help="size of the top-ranked block")
    p_fuse.add_argument(
        "--scalar-weights",
        action="store_true",
        help="wscp only: one scalar weight per member (mean of its class recalls)",
    )

    p_eval = sub.add_parser("evaluate", help="per-class metrics and best-per-class winners")
    common(p_eval)
    p_eval.add_argument(
        "--weights",
        help="recall weights CSV; adds the WSCP all-pairs pool to best-per-class",
    )
    p_eval.add_argument("--rank-policy", choices=("ordinal", "competition"), default="competition")
    p_eval.add_argument("--format", choices=("json", "csv"), default="json")

    p_hyb = sub.add_parser("hybrid", help="route classes to fused models")
    common(p_hyb)
    p_hyb.add_argument("--weights", required=True, help="recall weights CSV")
    p_hyb.add_argument(
        "--route",
        action="append",
        type=_parse_route,
        default=[],
        metavar="CODE=SOURCE",
        help="route one class to a fused model, e.g. 4=DF; repeatable",
    )
    p_hyb.add_argument("--default", required=True, dest="default_source", metavar="SOURCE")
    p_hyb.add_argument("--rank-policy", choices=("ordinal", "competition"), default="competition")
    p_hyb.add_argument("--format", choices=("json", "csv"), default="json")

    return parser


# ---------------------------------------------------------------------------
# report payload helpers


def spec_payload(spec: FusionSpec) -> dict:
    scheme: dict = {"kind": spec.scheme.kind}
    if spec.scheme.weights:
        scheme["weights"] = {
            member: w for member, w in zip(spec.member_systems, spec.scheme.weights)
        }
    if spec.scheme.class_weights:
        scheme["class_weights"] = {
            member: {str(code): w for code, w in zip(spec.scheme.class_codes, row)}
            for member, row in zip(spec.member_systems, spec.scheme.class_weights)
        }
    return {
        "name": spec.name,
        "members": list(spec.member_systems),
        "metric": spec.metric,
        "scheme": scheme,
        "rank_policy": spec.rank_policy,
    }


def _top_block(fused: FusedSystem, item_ids: Sequence[str], top_k: int) -> list[dict]:
    n = len(fused)
    order = np.lexsort((np.arange(n), fused.rankings))
    rows = []
    for idx in order[: max(top_k, 0)]:
        row = {
            "item_id": item_ids[int(idx)],
            "fused_value": float(fused.fused_scores[idx]),
            "rank": int(fused.rankings[idx]),
        }
        if fused.predictions is not None:
            row["predicted_class"] = int(fused.predictions[idx])
        rows.append(row)
    return rows


def _write_fusion_outputs(
    fused: FusedSystem,
    matrix: ScoreMatrix,
    config: RunConfig,
    out_dir: Path,
) -> None:
    payload = {
        "meta": config.meta(),
        "model": fused.name,
        "spec": spec_payload(fused.spec),
        "n_items": len(fused),
        "top_k": config.top_k,
        "top_block": _top_block(fused, matrix.item_ids, config.top_k),
    }
    write_json_report(payload, out_dir / f"fusion_{fused.name}.json")

    if fused.predictions is not None:
        rows = [
            (item_id, int(fused.predictions[i]), float(fused.fused_scores[i]))
            for i, item_id in enumerate(matrix.item_ids)
        ]
        write_csv_report(
            ("item_id", "predicted_class", "fused_score"),
            rows,
            out_dir / f"predictions_{fused.name}.csv",
        )
    else:
        # Score/rank metrics carry no class prediction; emit values + ranks.
        rows = [
            (item_id, float(fused.fused_scores[i]), int(fused.rankings[i]))
            for i, item_id in enumerate(matrix.item_ids)
        ]
        write_csv_report(
            ("item_id", "fused_value", "rank"),
            rows,
            out_dir / f"predictions_{fused.name}.csv",
        )


def _report_rows_payload(report) -> dict:
    return {
        "model": report.model,
        "rows": [
            {
                "class_code": row.code,
                "precision": row.precision,
                "recall": row.recall,
                "f1": row.f1,
                "support": row.support,
                "precision_defined": row.precision_defined,
                "recall_defined": row.recall_defined,
            }
            for row in report.rows
        ],
    }


def _write_best_per_class(best, classes, path: Path) -> None:
    header = ["class_code", "class_name"]
    for pool in best.pools:
        header.extend([f"{pool}_best", f"{pool}_recall_pct"])
    rows = []
    for label in classes:
        row: list = [label.code, label.name]
        for pool in best.pools:
            winners = best.winners(label.code, pool)
            row.append("|".join(winners.models))
            row.append(format_recall_pct(winners.recall))
        rows.append(row)
    write_csv_report(header, rows, path)


# ---------------------------------------------------------------------------
# subcommands


def cmd_rsc(matrix: ScoreMatrix, config: RunConfig, out_dir: Path) -> None:
    rscs = [derive_rsc(top_score_view(matrix, s)) for s in matrix.systems]
    write_csv_report(("system", "rank", "score"), rsc_curve_rows(rscs), out_dir / "rsc_curves.csv")


def cmd_diversity(matrix: ScoreMatrix, config: RunConfig, out_dir: Path) -> None:
    rscs = [derive_rsc(top_score_view(matrix, s)) for s in matrix.systems]
    dm = diversity_matrix(rscs)
    payload = {
        "meta": config.meta(),
        "systems": list(dm.systems),
        "cd": [[float(v) for v in row] for row in dm.cd],
        "ds": all_strengths(dm),
    }
    write_json_report(payload, out_dir / "diversity.json")


def _fuse_members(
    matrix: ScoreMatrix,
    metric: str,
    members: Sequence[str],
    config: RunConfig,
    recalls: Mapping[str, Mapping[int, float]] | None,
    diversity=None,
) -> FusedSystem:
    policy = config.rank_policy
    if metric == "ASC":
        return average_score_combination(
            [top_score_view(matrix, s) for s in members], policy
        )
    if metric == "ARC":
        return average_rank_combination(
            [derive_ranks(top_score_view(matrix, s), policy) for s in members], policy
        )
    if metric in ("WSCDS", "WRCDS"):
        mode = "score" if metric == "WSCDS" else "rank"
        views = (
            [top_score_view(matrix, s) for s in members]
            if mode == "score"
            else [derive_ranks(top_score_view(matrix, s), policy) for s in members]
        )
        return weighted_combination_diversity(views, diversity, mode, policy)
    return weighted_score_combination_performance(
        matrix, members, recalls, policy,
        per_class=not config.scalar_weights, zero_weight_classes="zero",
    )


def cmd_fuse(matrix: ScoreMatrix, config: RunConfig, out_dir: Path) -> None:
    metric = config.metric.upper()
    recalls = load_weights(config.weights) if config.weights else None
    if metric == "WSCP" and recalls is None:
        raise CombifuseError("the wscp metric requires --weights")

    diversity = None
    if metric in ("WSCDS", "WRCDS"):
        rscs = [derive_rsc(top_score_view(matrix, s)) for s in sorted(matrix.systems)]
        diversity = diversity_matrix(rscs)

    if config.all_pairs:
        if metric == "WSCP" and config.scalar_weights:
            fusions = [
                _fuse_members(matrix, metric, pair, config, recalls)
                for pair in itertools.combinations(sorted(matrix.systems), 2)
            ]
        else:
            fusions = enumerate_pair_fusions(
                matrix, metric, recalls=recalls, diversity=diversity,
                rank_policy=config.rank_policy, zero_weight_classes="zero",
            )
    else:
        fusions = [
            _fuse_members(matrix, metric, members, config, recalls, diversity)
            for members in config.members
        ]

    for fused in fusions:
        _write_fusion_outputs(fused, matrix, config, out_dir)

    if metric == "WSCP" and config.all_pairs:
        reports = [
            class_report(f.name, f.predictions, matrix.labels, matrix.classes)
            for f in fusions
        ]
        write_json_report(
            {"meta": config.meta(), "reports": [_report_rows_payload(r) for r in reports]},
            out_dir / "class_reports.json",
        )
        best = best_per_class(reports, {"combined": [r.model for r in reports]})
        _write_best_per_class(best, matrix.classes, out_dir / "best_per_class.csv")


def cmd_evaluate(matrix: ScoreMatrix, config: RunConfig, out_dir: Path) -> None:
    reports = [
        class_report(system, matrix.argmax_predictions(system), matrix.labels, matrix.classes)
        for system in matrix.systems
    ]
    pools: dict[str, list[str]] = {"individual": [r.model for r in reports]}

    if config.weights:
        recalls = load_weights(config.weights)
        fused_all = enumerate_pair_fusions(
            matrix, "WSCP", recalls=recalls, rank_policy=config.rank_policy,
            zero_weight_classes="zero",
        )
        fused_reports = [
            class_report(f.name, f.predictions, matrix.labels, matrix.classes)
            for f in fused_all
        ]
        reports = reports + fused_reports
        pools["combined"] = [r.model for r in fused_reports]

    if config.report_format == "json":
        write_json_report(
            {"meta": config.meta(), "reports": [_report_rows_payload(r) for r in reports]},
            out_dir / "eval_report.json",
        )
    else:
        rows = []
        for report in reports:
            for row in report.rows:
                rows.append(
                    (
                        report.model,
                        row.code,
                        row.precision,
                        row.recall,
                        row.f1,
                        row.support,
                        row.precision_defined,
                        row.recall_defined,
                    )
                )
        write_csv_report(
            (
                "model",
                "class_code",
                "precision",
                "recall",
                "f1",
                "support",
                "precision_defined",
                "recall_defined",
            ),
            rows,
            out_dir / "eval_report.csv",
        )

    best = best_per_class(reports, pools)
    _write_best_per_class(best, matrix.classes, out_dir / "best_per_class.csv")


def cmd_hybrid(matrix: ScoreMatrix, config: RunConfig, out_dir: Path) -> None:
    recalls = load_weights(config.weights)
    source_names: list[str] = []
    for _, source in config.routes:
        if source not in source_names:
            source_names.append(source)
    if config.default_source not in source_names:
        source_names.append(config.default_source)

    fused_by_name: dict[str, FusedSystem] = {}
    for name in source_names:
        members = _parse_members(name)
        fused_by_name[name] = weighted_score_combination_performance(
            matrix, members, recalls, config.rank_policy,
            per_class=not config.scalar_weights, zero_weight_classes="zero",
        )

    hybrid = build_hybrid(
        config.routes, config.default_source, matrix.classes, set(fused_by_name)
    )
    preds_by_source = {name: f.predictions for name, f in fused_by_name.items()}
    predictions, chosen = hybrid_predictions(hybrid, preds_by_source, with_sources=True)
    scores = np.array(
        [fused_by_name[chosen[i]].fused_scores[i] for i in range(len(predictions))]
    )

    rows = [
        (item_id, int(predictions[i]), float(scores[i]), str(chosen[i]))
        for i, item_id in enumerate(matrix.item_ids)
    ]
    write_csv_report(
        ("item_id", "predicted_class", "fused_score", "source"),
        rows,
        out_dir / "hybrid_predictions.csv",
    )

    report = class_report("hybrid", predictions, matrix.labels, matrix.classes)
    payload = {
        "meta": config.meta(),
        "routing": {
            "routes": [{"class_code": c, "source": s} for c, s in hybrid.routes],
            "default": hybrid.default,
            "precedence": [f"{c}={s}" for c, s in hybrid.routes] + ["default"],
            "assignment": {str(code): hybrid.assignment[code] for code in sorted(hybrid.assignment)},
        },
        "sources": {name: spec_payload(f.spec) for name, f in fused_by_name.items()},
        "report": _report_rows_payload(report),
    }
    if config.report_format == "json":
        write_json_report(payload, out_dir / "hybrid_report.json")
    else:
        rows = [
            (row.code, row.precision, row.recall, row.f1, row.support)
            for row in report.rows
        ]
        write_csv_report(
            ("class_code", "precision", "recall", "f1", "support"),
            rows,
            out_dir / "hybrid_report.csv",
        )
        write_json_report({"meta": config.meta(), "routing": payload["routing"]}, out_dir / "hybrid_routing.json")


HANDLERS = {
    "rsc": cmd_rsc,
    "diversity": cmd_diversity,
    "fuse": cmd_fuse,
    "evaluate": cmd_evaluate,
    "hybrid": cmd_hybrid,
}


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        scores=args.scores,
        out_dir=args.out,
        weights=getattr(args, "weights", None),
        metric=getattr(args, "metric", None),
        members=tuple(getattr(args, "members", None) or ()),
        all_pairs=bool(getattr(args, "all_pairs", False)),
        rank_policy=getattr(args, "rank_policy", "competition"),
        top_k=getattr(args, "top_k", 10),
        report_format=getattr(args, "format", "json"),
        scalar_weights=bool(getattr(args, "scalar_weights", False)),
        routes=tuple(getattr(args, "route", []) or ()),
        default_source=getattr(args, "default_source", None),
        seed=args.seed,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _config_from_args(args)
    try:
        matrix = ingest_scores(config.scores)
        out_dir = Path(config.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        HANDLERS[config.command](matrix, config, out_dir)
    except (CombifuseError, OSError) as exc:
        error = {
            "command": config.command,
            "error": type(exc).__name__,
            "message": str(exc),
        }
        print(json.dumps(error), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
