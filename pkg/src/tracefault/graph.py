"""Causal graph construction and topological queries over a trace.

Three edge kinds are derived from a trace:

* ``sequential``    -- between successive steps of the same agent (the
  agent's own reasoning thread, which survives interruptions by others).
* ``communication`` -- at hand-offs: from the last step of an agent block to
  the next step (different agent), plus an explicit edge from every
  ``message`` step to its first downstream consumer by another agent.
* ``data``          -- from producer to consumer when declared artifact
  names overlap; when a step carries no produces/consumes lists, a
  conservative identifier scan of its text is used instead.

All edges satisfy ``from < to`` (chronological order), which makes every
graph acyclic by construction. Construction and queries are pure functions
on immutable inputs.
"""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass, field

from .errors import NodeNotFound
from .model import ExecutionTrace

logger = logging.getLogger(__name__)

EDGE_KINDS = ("sequential", "communication", "data")

# Fallback tokenizer: identifiers of length >= 3 minus common English
# function words, applied only when produces/consumes lists are absent.
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]{2,}")
_STOP_WORDS = frozenset(
    """
    the and for with from into that this then than when while are was were
    has have had been being will would could should can may might must not
    all any each other some such only over under out off per via you your
    our their its his her using use used these those what which where who
    how why does did done
    """.split()
)


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    kind: str


@dataclass(frozen=True)
class CausalGraph:
    """DAG over step ids with typed edges and adjacency indexes."""

    nodes: tuple[int, ...]
    edges: tuple[Edge, ...]
    successors: dict[int, tuple[int, ...]] = field(repr=False, compare=False, default=None)
    predecessors: dict[int, tuple[int, ...]] = field(repr=False, compare=False, default=None)

    @staticmethod
    def from_edges(nodes: list[int], edges: list[Edge]) -> "CausalGraph":
        node_set = set(nodes)
        kept: list[Edge] = []
        seen: set[tuple[int, int, str]] = set()
        for e in edges:
            if e.src not in node_set or e.dst not in node_set:
                raise NodeNotFound(f"edge {e.src}->{e.dst}: endpoint not a node")
            if e.src >= e.dst:
                # Chronology violation; dropping preserves acyclicity cheaply.
                logger.debug("dropping non-chronological edge %s->%s", e.src, e.dst)
                continue
            key = (e.src, e.dst, e.kind)
            if key in seen:
                continue
            seen.add(key)
            kept.append(e)
        kept.sort(key=lambda e: (e.src, e.dst, EDGE_KINDS.index(e.kind)))
        succ: dict[int, list[int]] = {v: [] for v in nodes}
        pred: dict[int, list[int]] = {v: [] for v in nodes}
        for src, dst in sorted({(e.src, e.dst) for e in kept}):
            succ[src].append(dst)
            pred[dst].append(src)
        return CausalGraph(
            nodes=tuple(sorted(nodes)),
            edges=tuple(kept),
            successors={v: tuple(vs) for v, vs in succ.items()},
            predecessors={v: tuple(vs) for v, vs in pred.items()},
        )

    def __contains__(self, node: int) -> bool:
        return node in self.successors

    def out_degree(self, v: int) -> int:
        return len(self.successors[v])

    def in_degree(self, v: int) -> int:
        return len(self.predecessors[v])

    def edge_kind_counts(self) -> dict[str, int]:
        counts = {kind: 0 for kind in EDGE_KINDS}
        for e in self.edges:
            counts[e.kind] += 1
        return counts

    def to_obj(self) -> dict:
        """JSON-friendly dump used by ``analyze --dump-graph`` and goldens."""
        return {
            "nodes": list(self.nodes),
            "edges": [{"from": e.src, "to": e.dst, "kind": e.kind} for e in self.edges],
        }


def _identifier_tokens(text: str) -> set[str]:
    return {t.lower() for t in _IDENT_RE.findall(text)} - _STOP_WORDS


def build_graph(trace: ExecutionTrace) -> CausalGraph:
    """Derive the typed causal DAG for a trace (see module docstring)."""
    steps = trace.steps
    n = len(steps)
    edges: list[Edge] = []

    # Sequential: successive steps in each agent's own timeline.
    last_by_agent: dict[str, int] = {}
    for step in steps:
        prev = last_by_agent.get(step.agent)
        if prev is not None:
            edges.append(Edge(prev, step.step_id, "sequential"))
        last_by_agent[step.agent] = step.step_id

    # Communication: hand-off at each agent-block boundary.
    for i in range(n - 1):
        if steps[i].agent != steps[i + 1].agent:
            edges.append(Edge(steps[i].step_id, steps[i + 1].step_id, "communication"))

    # Communication: message steps link to their first cross-agent consumer.
    for step in steps:
        if step.action_type != "message":
            continue
        for later in steps[step.step_id :]:
            if later.agent != step.agent:
                edges.append(Edge(step.step_id, later.step_id, "communication"))
                break

    # Data: declared artifact overlap, with a text-scan fallback per side.
    produced: list[set[str]] = []
    consumed: list[set[str]] = []
    for step in steps:
        if step.produces is not None:
            produced.append({p.lower() for p in step.produces})
        else:
            produced.append(_identifier_tokens(step.output))
        if step.consumes is not None:
            consumed.append({c.lower() for c in step.consumes})
        else:
            consumed.append(_identifier_tokens(step.input))
    for i in range(n):
        if not produced[i]:
            continue
        for j in range(i + 1, n):
            if produced[i] & consumed[j]:
                edges.append(Edge(steps[i].step_id, steps[j].step_id, "data"))

    return CausalGraph.from_edges([s.step_id for s in steps], edges)


@dataclass(frozen=True)
class CandidateSet:
    """Result of backward tracing: members plus their BFS discovery layer."""

    members: frozenset[int]
    depth_of: dict[int, int] = field(compare=False)

    def ordered(self) -> list[int]:
        return sorted(self.members)


def backtrace(graph: CausalGraph, error_node: int, max_depth: int = 10) -> CandidateSet:
    """Collect ancestors of ``error_node`` within ``max_depth`` BFS layers.

    Layered breadth-first traversal over reverse edges: the candidate set
    starts as ``{error_node}`` (layer 0) and each of the ``max_depth``
    rounds adds the not-yet-seen parents of the current frontier.
    """
    if error_node not in graph:
        raise NodeNotFound(f"error node {error_node} not in graph")
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    depth_of = {error_node: 0}
    frontier = [error_node]
    for layer in range(1, max_depth + 1):
        new_frontier: list[int] = []
        for v in frontier:
            for u in graph.predecessors[v]:
                if u not in depth_of:
                    depth_of[u] = layer
                    new_frontier.append(u)
        frontier = new_frontier
        if not frontier:
            break
    return CandidateSet(members=frozenset(depth_of), depth_of=depth_of)


def descendants(graph: CausalGraph, v: int) -> set[int]:
    """All nodes forward-reachable from ``v`` (excluding ``v`` itself)."""
    if v not in graph:
        raise NodeNotFound(f"node {v} not in graph")
    seen: set[int] = set()
    stack = list(graph.successors[v])
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(graph.successors[u])
    return seen


def shortest_path_len(graph: CausalGraph, src: int, dst: int) -> float:
    """Directed BFS distance from ``src`` to ``dst``; ``inf`` if unreachable."""
    if src not in graph or dst not in graph:
        raise NodeNotFound(f"path endpoints {src}->{dst} not in graph")
    if src == dst:
        return 0
    dist = {src: 0}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for u in graph.successors[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                if u == dst:
                    return dist[u]
                queue.append(u)
    return float("inf")


def distances_to(graph: CausalGraph, dst: int) -> dict[int, float]:
    """Directed distance from every node to ``dst`` in one reverse BFS."""
    if dst not in graph:
        raise NodeNotFound(f"node {dst} not in graph")
    dist: dict[int, float] = {dst: 0}
    queue = deque([dst])
    while queue:
        v = queue.popleft()
        for u in graph.predecessors[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return {v: dist.get(v, float("inf")) for v in graph.nodes}


def longest_path_depth(graph: CausalGraph, v: int | None = None):
    """Longest path length from any source (no-parent node).

    With a single node argument returns that node's depth; without it
    returns the full map. Nodes are already topologically ordered by id
    (edges satisfy ``from < to``), so one forward sweep suffices.
    """
    depth = {u: 0 for u in graph.nodes}
    for u in graph.nodes:
        for w in graph.successors[u]:
            if depth[u] + 1 > depth[w]:
                depth[w] = depth[u] + 1
    if v is None:
        return depth
    if v not in graph:
        raise NodeNotFound(f"node {v} not in graph")
    return depth[v]


def betweenness(graph: CausalGraph) -> dict[int, float]:
    """Directed betweenness: sum over ordered pairs of pass-through ratios.

    Brandes' accumulation over the simple digraph (parallel edge kinds
    collapse to one adjacency). Values are raw sums; min-max scaling happens
    downstream in feature normalization.
    """
    scores = {v: 0.0 for v in graph.nodes}
    for source in graph.nodes:
        # BFS phase: shortest-path counts and predecessor lists.
        sigma = {v: 0 for v in graph.nodes}
        dist = {v: -1 for v in graph.nodes}
        preds: dict[int, list[int]] = {v: [] for v in graph.nodes}
        sigma[source] = 1
        dist[source] = 0
        order: list[int] = []
        queue = deque([source])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in graph.successors[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        # Accumulation phase in reverse BFS order.
        delta = {v: 0.0 for v in order}
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != source:
                scores[w] += delta[w]
    return scores
