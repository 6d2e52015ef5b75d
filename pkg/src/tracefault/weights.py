"""Grid search over group weights and the position-weight sensitivity sweep.

The grid is the cartesian product of per-group candidate values filtered to
combinations summing to one; each feasible point is evaluated by Hit@1 on a
validation set. Ties break toward the larger position weight, then
lexicographically, so repeated searches return the same vector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import EmptyBenchmark, EmptyGrid
from .features import FeatureConfig
from .ranking import DEFAULT_MAX_DEPTH, WeightVector, rank
from .stats import hit_at_k

DEFAULT_GRID = {
    "position": (0.5, 0.6, 0.7, 0.8),
    "structure": (0.1, 0.15, 0.2, 0.25),
    "content": (0.03, 0.05, 0.07, 0.1),
    "flow": (0.02, 0.03, 0.05),
    "confidence": (0.01, 0.02, 0.03),
}

SWEEP_POSITION_VALUES = (0.5, 0.6, 0.7, 0.8, 0.9)


@dataclass(frozen=True)
class GridSpec:
    position: tuple[float, ...] = DEFAULT_GRID["position"]
    structure: tuple[float, ...] = DEFAULT_GRID["structure"]
    content: tuple[float, ...] = DEFAULT_GRID["content"]
    flow: tuple[float, ...] = DEFAULT_GRID["flow"]
    confidence: tuple[float, ...] = DEFAULT_GRID["confidence"]
    sum_tolerance: float = 1e-9

    def feasible_points(self) -> list[WeightVector]:
        """All grid combinations whose weights sum to one, in grid order."""
        points = []
        for combo in itertools.product(
            self.position, self.structure, self.content, self.flow, self.confidence
        ):
            if abs(sum(combo) - 1.0) <= self.sum_tolerance:
                points.append(WeightVector(*combo))
        return points


def _ranks_for_weights(scenarios, weights, config, max_depth) -> list[int | None]:
    ranks: list[int | None] = []
    for scenario in scenarios:
        diagnosis = rank(
            scenario.trace,
            weights=weights,
            config=config,
            max_depth=max_depth,
            error_node=scenario.ground_truth.error_node_id,
        )
        ranks.append(diagnosis.rank_of(scenario.ground_truth.root_cause_node_id))
    return ranks


def grid_search(
    validation,
    grid: GridSpec | None = None,
    config: FeatureConfig | None = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> tuple[WeightVector, list[tuple[WeightVector, float]]]:
    """Exhaustively score every feasible grid point by validation Hit@1."""
    validation = list(validation)
    if not validation:
        raise EmptyBenchmark("grid search requires a non-empty validation set")
    grid = grid or GridSpec()
    config = config or FeatureConfig()
    points = grid.feasible_points()
    if not points:
        raise EmptyGrid("no weight combination satisfies the sum-to-one constraint")
    table: list[tuple[WeightVector, float]] = []
    for weights in points:
        ranks = _ranks_for_weights(validation, weights, config, max_depth)
        table.append((weights, hit_at_k(ranks, 1)))
    best = max(
        table,
        key=lambda item: (item[1], item[0].position, item[0].as_tuple()),
    )[0]
    return best, table


def sensitivity_sweep(
    scenarios,
    position_values=SWEEP_POSITION_VALUES,
    config: FeatureConfig | None = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> list[tuple[float, float]]:
    """Hit@1 as the position weight varies.

    For each value the remaining mass is spread over the other groups in
    proportion to their default ratios.
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise EmptyBenchmark("sensitivity sweep over zero scenarios")
    config = config or FeatureConfig()
    rows: list[tuple[float, float]] = []
    for w_position in position_values:
        weights = WeightVector.with_position(w_position)
        ranks = _ranks_for_weights(scenarios, weights, config, max_depth)
        rows.append((w_position, hit_at_k(ranks, 1)))
    return rows


def weights_report(best: WeightVector, table) -> dict:
    return {
        "best": best.as_dict(),
        "evaluated_points": len(table),
        "table": [
            {"weights": weights.as_dict(), "hit_at_1": hit1} for weights, hit1 in table
        ],
    }
