"""Comparison methods under a common prediction interface.

Every method emits a full permutation of the trace's step ids (rank 1
first), so Hit@k and reciprocal ranks are defined for all of them:

* random       -- seeded uniform shuffle, deterministic per (scenario, seed).
* first_node   -- step 1 first, remainder in step order.
* last_node    -- the step immediately before the error first, walking
  backward, with the error node itself last.
* llm          -- prompt an external completion adapter (or a recorded
  fixture) for the root-cause step number; the named step is promoted to
  rank 1 and the rest follow in step order.

The external adapter protocol is one process invocation per trace: prompt
on stdin (UTF-8), completion on stdout, exit code 0. Fixture files are JSON
maps from scenario id to completion string, which makes CI runs replayable
without credentials or network access.
"""

from __future__ import annotations

import json
import random
import re
import subprocess
from dataclasses import dataclass, field

from .errors import AdapterFailure, UnparseableCompletion
from .model import ExecutionTrace

LLM_DECODING_PARAMS = {
    "temperature": 0.0,
    "max_tokens": 1024,
    "top_p": 1.0,
    "frequency_penalty": 0.0,
    "presence_penalty": 0.0,
}

PROMPT_TEMPLATE = """You are an expert debugger analyzing a multi-agent system
execution trace. The system encountered an error.
Your task is to identify the ROOT CAUSE - the earliest
step where something went wrong that led to the final error.
## Execution Trace:
{trace_content}
## Error Description:
The system failed at step {error_step}: {error_description}
## Instructions:
1. Analyze the execution trace carefully
2. Identify causal relationships between steps
3. Find the EARLIEST step that caused the error
4. Consider: logic errors, miscommunication,
   data issues, missing validation
## Output Format:
Respond with ONLY the step number, e.g., "3"
Root cause step:
"""


@dataclass(frozen=True)
class Prediction:
    """A method's full ordering over the trace's steps, rank 1 first."""

    method: str
    ordering: tuple[int, ...]
    fallback: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def rank_of(self, step_id: int) -> int:
        return self.ordering.index(step_id) + 1


def random_baseline(trace: ExecutionTrace, seed: int) -> Prediction:
    """Uniform random permutation, deterministic per (scenario id, seed)."""
    rng = random.Random(f"random|{seed}|{trace.scenario_id}")
    ordering = [s.step_id for s in trace.steps]
    rng.shuffle(ordering)
    return Prediction(method="random", ordering=tuple(ordering))


def first_node_baseline(trace: ExecutionTrace) -> Prediction:
    ordering = tuple(s.step_id for s in trace.steps)
    return Prediction(method="first", ordering=ordering)


def last_node_baseline(trace: ExecutionTrace, error_node: int | None = None) -> Prediction:
    """The node immediately before the error first, then walking backward."""
    error = error_node if error_node is not None else len(trace)
    before = list(range(error - 1, 0, -1))
    after = [s.step_id for s in trace.steps if s.step_id > error]
    ordering = tuple(before + after + [error])
    return Prediction(method="last", ordering=ordering)


def render_trace(trace: ExecutionTrace) -> str:
    lines = []
    for step in trace.steps:
        lines.append(f"Step {step.step_id} [{step.agent}]: {step.input}")
        lines.append(f"  -> {step.output}")
    return "\n".join(lines)


def build_prompt(trace: ExecutionTrace, error_node: int) -> str:
    error_step = trace.step(error_node)
    return PROMPT_TEMPLATE.format(
        trace_content=render_trace(trace),
        error_step=error_node,
        error_description=error_step.output,
    )


_LEADING_INT_RE = re.compile(r"\s*(\d+)\b")


def parse_completion(completion: str) -> int:
    """Strict parse: the completion must lead with the step number."""
    match = _LEADING_INT_RE.match(completion)
    if not match:
        raise UnparseableCompletion(
            f"completion does not start with a step number: {completion[:80]!r}"
        )
    return int(match.group(1))


class FixtureAdapter:
    """Replay adapter: completions recorded per scenario id."""

    def __init__(self, completions: dict[str, str]):
        self.completions = dict(completions)

    @staticmethod
    def from_file(path) -> "FixtureAdapter":
        with open(path, "r", encoding="utf-8") as handle:
            return FixtureAdapter(json.load(handle))

    def complete(self, trace: ExecutionTrace, prompt: str) -> str:
        try:
            return self.completions[trace.scenario_id]
        except KeyError:
            raise AdapterFailure(
                f"fixture has no completion for scenario {trace.scenario_id!r}"
            ) from None


class CommandAdapter:
    """Run an external command with the prompt on stdin."""

    def __init__(self, argv: list[str], timeout: float = 120.0):
        self.argv = list(argv)
        self.timeout = timeout

    def complete(self, trace: ExecutionTrace, prompt: str) -> str:
        try:
            proc = subprocess.run(
                self.argv,
                input=prompt.encode("utf-8"),
                capture_output=True,
                timeout=self.timeout,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise AdapterFailure(f"adapter command failed: {exc}") from None
        if proc.returncode != 0:
            raise AdapterFailure(
                f"adapter exited {proc.returncode}: {proc.stderr.decode(errors='replace')[:200]}"
            )
        return proc.stdout.decode("utf-8", errors="replace")


def llm_baseline(
    trace: ExecutionTrace,
    adapter,
    error_node: int | None = None,
    strict: bool = True,
) -> Prediction:
    """Ask the adapter for the root-cause step; promote it to rank 1.

    An unparseable completion raises in strict mode; otherwise the
    prediction falls back to the last-node ordering with ``fallback`` set.
    """
    error = error_node if error_node is not None else len(trace)
    prompt = build_prompt(trace, error)
    completion = adapter.complete(trace, prompt)
    meta = {"decoding": dict(LLM_DECODING_PARAMS)}
    try:
        choice = parse_completion(completion)
    except UnparseableCompletion:
        if strict:
            raise
        fallback = last_node_baseline(trace, error)
        return Prediction(
            method="llm", ordering=fallback.ordering, fallback=True, meta=meta
        )
    step_ids = [s.step_id for s in trace.steps]
    if choice in step_ids:
        ordering = tuple([choice] + [v for v in step_ids if v != choice])
    else:
        # Out-of-range step number: treat like an unparseable reply.
        if strict:
            raise UnparseableCompletion(
                f"completion names step {choice}, outside the {len(trace)}-step trace"
            )
        fallback = last_node_baseline(trace, error)
        return Prediction(
            method="llm", ordering=fallback.ordering, fallback=True, meta=meta
        )
    return Prediction(method="llm", ordering=ordering, meta=meta)


def classify_llm_error(predicted: int, root: int, error_node: int) -> str:
    """Bucket a wrong rank-1 choice by its relation to the ground truth."""
    if predicted == root:
        raise ValueError("classify_llm_error expects a wrong prediction")
    if predicted == error_node:
        return "selected_error_node"
    if abs(predicted - root) == 1:
        return "off_by_one"
    if root < predicted < error_node:
        return "intermediate_step"
    return "completely_incorrect"
