"""Weighted scoring and candidate ranking.

The final score of a candidate is the weighted sum of its five group scores.
Candidates sort by descending score; exact ties break toward the earlier
step, consistent with the root cause being the earliest correctable
decision. The ranking pipeline (graph build, backtrace, features, sort) is
pure and deterministic, so traces may be ranked concurrently.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .features import FeatureConfig, FeatureVector, compute_features
from .graph import CausalGraph, backtrace, build_graph
from .model import ExecutionTrace

DEFAULT_MAX_DEPTH = 10

GROUP_ORDER = ("position", "structure", "content", "flow", "confidence")


@dataclass(frozen=True)
class WeightVector:
    """Non-negative group weights summing to one."""

    position: float = 0.70
    structure: float = 0.20
    content: float = 0.05
    flow: float = 0.03
    confidence: float = 0.02

    def __post_init__(self) -> None:
        values = self.as_dict()
        for name, value in values.items():
            if value < 0:
                raise ValueError(f"weight {name} must be >= 0, got {value}")
        total = sum(values.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1 (got {total!r})")

    def as_dict(self) -> dict[str, float]:
        return {
            "position": self.position,
            "structure": self.structure,
            "content": self.content,
            "flow": self.flow,
            "confidence": self.confidence,
        }

    def as_tuple(self) -> tuple[float, ...]:
        return (self.position, self.structure, self.content, self.flow, self.confidence)

    @staticmethod
    def from_dict(obj: dict[str, float]) -> "WeightVector":
        return WeightVector(**{k: float(obj[k]) for k in GROUP_ORDER})

    @staticmethod
    def restricted(groups, base: "WeightVector | None" = None) -> "WeightVector":
        """Keep only ``groups``, renormalizing their base weights to sum 1."""
        base = base or WeightVector()
        kept = {g: base.as_dict()[g] for g in groups}
        total = sum(kept.values())
        if total <= 0:
            raise ValueError("restricted weight set has zero mass")
        values = {g: (kept[g] / total if g in kept else 0.0) for g in GROUP_ORDER}
        values.update({g: 0.0 for g in GROUP_ORDER if g not in kept})
        return WeightVector(**values)

    @staticmethod
    def with_position(w_position: float) -> "WeightVector":
        """Set the position weight, spreading the remainder proportionally
        over the other groups' default ratios."""
        base = WeightVector()
        rest = [base.structure, base.content, base.flow, base.confidence]
        rest_total = sum(rest)
        scale = (1.0 - w_position) / rest_total
        return WeightVector(
            position=w_position,
            structure=base.structure * scale,
            content=base.content * scale,
            flow=base.flow * scale,
            confidence=base.confidence * scale,
        )


def score(group_score_map: dict[str, float], weights: WeightVector) -> float:
    """Weighted linear combination of the five group scores."""
    w = weights.as_dict()
    return sum(w[group] * group_score_map[group] for group in GROUP_ORDER)


@dataclass(frozen=True)
class RankedCandidate:
    step_id: int
    score: float
    group_scores: dict[str, float] = field(compare=False)
    contributions: dict[str, float] = field(compare=False)
    rank: int = 0


@dataclass(frozen=True)
class RankedDiagnosis:
    """Candidates ordered by score (desc), ties broken by earlier step."""

    scenario_id: str
    error_node_id: int
    candidates: tuple[RankedCandidate, ...]
    weights: WeightVector
    config_fingerprint: str
    timings_ms: dict[str, float] = field(compare=False, default_factory=dict)

    @property
    def candidate_count(self) -> int:
        return len(self.candidates)

    def top(self) -> int:
        return self.candidates[0].step_id

    def rank_of(self, step_id: int) -> int | None:
        for cand in self.candidates:
            if cand.step_id == step_id:
                return cand.rank
        return None

    def ordered_step_ids(self) -> list[int]:
        return [c.step_id for c in self.candidates]

    def to_obj(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "error_node_id": self.error_node_id,
            "candidate_count": self.candidate_count,
            "weights": self.weights.as_dict(),
            "config_fingerprint": self.config_fingerprint,
            "candidates": [
                {
                    "step_id": c.step_id,
                    "rank": c.rank,
                    "score": c.score,
                    "groups": c.group_scores,
                    "contributions": c.contributions,
                }
                for c in self.candidates
            ],
        }


def rank_candidates(
    trace: ExecutionTrace,
    features_by_node: dict[int, FeatureVector],
    weights: WeightVector,
    error_node: int,
    config_fingerprint: str = "",
    timings_ms: dict[str, float] | None = None,
) -> RankedDiagnosis:
    scored = []
    for v in sorted(features_by_node):
        fv = features_by_node[v]
        total = score(fv.group_scores, weights)
        contributions = {
            g: weights.as_dict()[g] * fv.group_scores[g] for g in GROUP_ORDER
        }
        scored.append((v, total, fv.group_scores, contributions))
    # Descending score; earlier step wins ties. Sorting on (-score, step_id)
    # makes the order total, so input permutations cannot change it.
    scored.sort(key=lambda item: (-item[1], item[0]))
    ranked = tuple(
        RankedCandidate(
            step_id=v,
            score=total,
            group_scores=groups,
            contributions=contributions,
            rank=i + 1,
        )
        for i, (v, total, groups, contributions) in enumerate(scored)
    )
    return RankedDiagnosis(
        scenario_id=trace.scenario_id,
        error_node_id=error_node,
        candidates=ranked,
        weights=weights,
        config_fingerprint=config_fingerprint,
        timings_ms=timings_ms or {},
    )


def rank(
    trace: ExecutionTrace,
    weights: WeightVector | None = None,
    config: FeatureConfig | None = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
    error_node: int | None = None,
    graph: CausalGraph | None = None,
    collect_timings: bool = False,
) -> RankedDiagnosis:
    """Full pipeline: build graph, backtrace, extract features, score, sort.

    In blind mode the error node defaults to the highest step id (generated
    benchmarks always manifest the failure at the final step); pass
    ``error_node`` to override.
    """
    weights = weights or WeightVector()
    config = config or FeatureConfig()
    anchor = error_node if error_node is not None else len(trace)

    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    if graph is None:
        graph = build_graph(trace)
    t1 = time.perf_counter()
    candidates = backtrace(graph, anchor, max_depth)
    t2 = time.perf_counter()
    features_by_node = compute_features(trace, graph, candidates.members, anchor, config)
    t3 = time.perf_counter()
    diagnosis = rank_candidates(
        trace,
        features_by_node,
        weights,
        anchor,
        config_fingerprint=config.fingerprint(),
    )
    t4 = time.perf_counter()
    if collect_timings:
        timings = {
            "graph_construction": (t1 - t0) * 1e3,
            "backward_tracing": (t2 - t1) * 1e3,
            "feature_extraction": (t3 - t2) * 1e3,
            "node_ranking": (t4 - t3) * 1e3,
        }
        diagnosis = RankedDiagnosis(
            scenario_id=diagnosis.scenario_id,
            error_node_id=diagnosis.error_node_id,
            candidates=diagnosis.candidates,
            weights=diagnosis.weights,
            config_fingerprint=diagnosis.config_fingerprint,
            timings_ms=timings,
        )
    return diagnosis


def render_markdown(diagnosis: RankedDiagnosis) -> str:
    """Human-readable rendering of a diagnosis report."""
    lines = [
        f"# Diagnosis for {diagnosis.scenario_id}",
        "",
        f"Error node: step {diagnosis.error_node_id}; "
        f"{diagnosis.candidate_count} candidates ranked.",
        "",
        "| rank | step | score | " + " | ".join(GROUP_ORDER) + " |",
        "|---|---|---|" + "---|" * len(GROUP_ORDER),
    ]
    for cand in diagnosis.candidates:
        groups = " | ".join(f"{cand.group_scores[g]:.3f}" for g in GROUP_ORDER)
        lines.append(
            f"| {cand.rank} | {cand.step_id} | {cand.score:.4f} | {groups} |"
        )
    lines.append("")
    return "\n".join(lines)
