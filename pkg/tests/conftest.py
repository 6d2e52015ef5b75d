"""Shared fixtures: the seed-42 benchmark is generated once per session."""

import random
from pathlib import Path

import pytest

from tracefault.baselines import FixtureAdapter
from tracefault.benchgen import generate_benchmark
from tracefault.evaluation import units_from_scenarios

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def benchmark():
    return generate_benchmark(seed=42)


@pytest.fixture(scope="session")
def units(benchmark):
    return units_from_scenarios(benchmark)


def simulated_llm_fixture(benchmark, accuracy=0.66, seed=7) -> dict[str, str]:
    """Deterministic stand-in completions with a controlled accuracy profile:
    mostly right, otherwise biased toward naming the error node."""
    fixture = {}
    for generated in benchmark:
        gt = generated.scenario.ground_truth
        trace = generated.trace
        rng = random.Random(f"llm|{seed}|{trace.scenario_id}")
        draw = rng.random()
        if draw < accuracy:
            answer = gt.root_cause_node_id
        elif draw < accuracy + 0.18:
            answer = gt.error_node_id
        elif draw < accuracy + 0.26:
            answer = min(gt.error_node_id, gt.root_cause_node_id + 1)
        else:
            answer = rng.randrange(1, len(trace) + 1)
        fixture[trace.scenario_id] = str(answer)
    return fixture


@pytest.fixture(scope="session")
def llm_adapter(benchmark):
    return FixtureAdapter(simulated_llm_fixture(benchmark))


@pytest.fixture()
def example1_bytes():
    return (FIXTURES / "example1.json").read_bytes()


@pytest.fixture()
def example2_bytes():
    return (FIXTURES / "example2.json").read_bytes()
