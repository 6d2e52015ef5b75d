"""Scoring, ranking order, tie-breaks, and the worked examples."""

import pytest

from tracefault.features import FeatureConfig
from tracefault.model import parse_scenario
from tracefault.ranking import (
    GROUP_ORDER,
    RankedDiagnosis,
    WeightVector,
    rank,
    rank_candidates,
    render_markdown,
    score,
)


def groups(p=0.0, s=0.0, c=0.0, f=0.0, e=0.0):
    return {"position": p, "structure": s, "content": c, "flow": f, "confidence": e}


def test_score_all_ones_is_one():
    assert score(groups(1, 1, 1, 1, 1), WeightVector()) == pytest.approx(1.0)


def test_score_position_only_is_position_weight():
    assert score(groups(p=1.0), WeightVector()) == pytest.approx(0.70)


def test_score_convex_combination():
    assert score(groups(0.5, 0.5, 0.5, 0.5, 0.5), WeightVector()) == pytest.approx(0.5)


def test_weight_vector_validation():
    with pytest.raises(ValueError):
        WeightVector(position=0.9, structure=0.2, content=0.05, flow=0.03, confidence=0.02)
    with pytest.raises(ValueError):
        WeightVector(position=-0.1, structure=1.1, content=0.0, flow=0.0, confidence=0.0)


def test_weight_restriction_renormalizes():
    restricted = WeightVector.restricted(("position", "structure"))
    assert restricted.position == pytest.approx(0.7 / 0.9)
    assert restricted.structure == pytest.approx(0.2 / 0.9)
    assert restricted.content == 0.0


def test_with_position_spreads_proportionally():
    w = WeightVector.with_position(0.9)
    assert w.position == pytest.approx(0.9)
    assert w.structure == pytest.approx(0.1 * (0.20 / 0.30))
    assert sum(w.as_tuple()) == pytest.approx(1.0)
    # the default position weight reproduces the default vector
    assert WeightVector.with_position(0.7).as_tuple() == pytest.approx(
        WeightVector().as_tuple()
    )


def test_example1_ranks_step3_first(example1_bytes):
    scenario = parse_scenario(example1_bytes)
    diagnosis = rank(scenario.trace)
    assert diagnosis.top() == 3
    assert diagnosis.error_node_id == 5
    assert diagnosis.candidate_count == 5


def test_example2_ranks_step3_first(example2_bytes):
    scenario = parse_scenario(example2_bytes)
    diagnosis = rank(scenario.trace)
    assert diagnosis.top() == 3


def test_example1_position_group_dominates_breakdown(example1_bytes):
    scenario = parse_scenario(example1_bytes)
    diagnosis = rank(scenario.trace)
    winner = diagnosis.candidates[0]
    assert max(winner.contributions, key=winner.contributions.get) == "position"


def test_tie_break_earlier_step_wins(example1_bytes):
    trace = parse_scenario(example1_bytes).trace
    features = {
        2: groups(p=0.4, s=0.4),
        4: groups(p=0.4, s=0.4),
        5: groups(p=0.1),
    }
    from tracefault.features import FeatureVector

    fvs = {
        v: FeatureVector(step_id=v, raw={}, normalized={}, group_scores=gs)
        for v, gs in features.items()
    }
    diagnosis = rank_candidates(trace, fvs, WeightVector(), error_node=5)
    assert [c.step_id for c in diagnosis.candidates] == [2, 4, 5]


def test_ranking_is_permutation_and_monotone(example1_bytes):
    scenario = parse_scenario(example1_bytes)
    diagnosis = rank(scenario.trace)
    ids = sorted(c.step_id for c in diagnosis.candidates)
    assert ids == [1, 2, 3, 4, 5]
    scores = [c.score for c in diagnosis.candidates]
    assert scores == sorted(scores, reverse=True)
    assert [c.rank for c in diagnosis.candidates] == [1, 2, 3, 4, 5]


def test_weight_degeneracy_position_only(example2_bytes):
    scenario = parse_scenario(example2_bytes)
    weights = WeightVector(position=1.0, structure=0.0, content=0.0, flow=0.0, confidence=0.0)
    diagnosis = rank(scenario.trace, weights=weights)
    by_position = sorted(
        diagnosis.candidates, key=lambda c: (-c.group_scores["position"], c.step_id)
    )
    assert [c.step_id for c in diagnosis.candidates] == [c.step_id for c in by_position]


def test_argmax_invariant_under_constant_group_shift(example1_bytes):
    trace = parse_scenario(example1_bytes).trace
    base = rank(trace)
    from tracefault.features import FeatureVector

    shifted = {
        c.step_id: FeatureVector(
            step_id=c.step_id,
            raw={},
            normalized={},
            group_scores={
                g: (v + 0.1 if g == "structure" else v)
                for g, v in c.group_scores.items()
            },
        )
        for c in base.candidates
    }
    again = rank_candidates(trace, shifted, WeightVector(), error_node=5)
    assert again.top() == base.top()


def test_explicit_error_node_override(example1_bytes):
    scenario = parse_scenario(example1_bytes)
    diagnosis = rank(scenario.trace, error_node=4)
    assert diagnosis.error_node_id == 4
    assert 5 not in diagnosis.ordered_step_ids()  # not an ancestor of step 4


def test_max_depth_limits_candidates(example1_bytes):
    scenario = parse_scenario(example1_bytes)
    diagnosis = rank(scenario.trace, max_depth=1)
    assert set(diagnosis.ordered_step_ids()) == {3, 4, 5}  # parents of 5 only


def test_report_object_and_markdown(example1_bytes):
    scenario = parse_scenario(example1_bytes)
    diagnosis = rank(scenario.trace)
    obj = diagnosis.to_obj()
    assert obj["scenario_id"] == "sof_example1"
    assert obj["error_node_id"] == 5
    assert obj["weights"]["position"] == 0.70
    assert obj["config_fingerprint"] == FeatureConfig().fingerprint()
    assert len(obj["candidates"]) == 5
    contributions = obj["candidates"][0]["contributions"]
    assert set(contributions) == set(GROUP_ORDER)
    text = render_markdown(diagnosis)
    assert "| 1 | 3 |" in text


def test_timings_collected_on_request(example1_bytes):
    scenario = parse_scenario(example1_bytes)
    diagnosis = rank(scenario.trace, collect_timings=True)
    assert set(diagnosis.timings_ms) == {
        "graph_construction",
        "backward_tracing",
        "feature_extraction",
        "node_ranking",
    }
    assert all(v >= 0 for v in diagnosis.timings_ms.values())
