"""Command-line entry point.

Subcommands cover the full pipeline: ``generate`` (benchmark synthesis),
``analyze`` (single-trace diagnosis), ``evaluate`` (metrics over a
benchmark), ``learn-weights`` (grid search), ``blind`` (anonymized split),
and ``bench`` (runtime scaling). All outputs are written atomically (temp
file then rename) and no subcommand mutates its inputs, so reruns are
idempotent.

Exit codes: 0 success, 1 failed ``--check`` thresholds, 2 usage errors,
3 input/output or schema errors. The default generation seed can also be
set through the ``TRACEFAULT_SEED`` environment variable (flag wins).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .baselines import FixtureAdapter
from .benchgen import (
    DEFAULT_SEED,
    benchmark_manifest,
    generate_benchmark,
    make_blind,
    verify_ground_truth,
)
from .errors import TracefaultError
from .evaluation import (
    DEFAULT_EVAL_SEED,
    evaluate,
    render_report,
    run_checks,
    runtime_bench,
    units_from_blind,
    units_from_scenarios,
)
from .features import FeatureConfig
from .graph import build_graph
from .model import (
    DOMAINS,
    canonical_json_bytes,
    parse_scenario,
    parse_trace_blind,
    serialize_scenario,
    serialize_trace,
)
from .ranking import DEFAULT_MAX_DEPTH, WeightVector, rank, render_markdown
from .stats import BOOTSTRAP_DEFAULT_B, BOOTSTRAP_DEFAULT_SEED
from .weights import GridSpec, grid_search, weights_report

VALIDATION_SEED = 2024
VALIDATION_PER_DOMAIN = 5


def _write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, obj) -> None:
    _write_atomic(path, canonical_json_bytes(obj))


def _default_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("TRACEFAULT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise TracefaultError(f"TRACEFAULT_SEED is not an integer: {env!r}")
    return DEFAULT_SEED


def _load_weights(path: str | None) -> WeightVector:
    if path is None:
        return WeightVector()
    with open(path, "r", encoding="utf-8") as handle:
        obj = json.load(handle)
    return WeightVector.from_dict(obj.get("best", obj))


def _load_config(path: str | None) -> FeatureConfig:
    if path is None:
        return FeatureConfig()
    with open(path, "r", encoding="utf-8") as handle:
        return FeatureConfig.from_obj(json.load(handle))


def cmd_generate(args) -> int:
    seed = _default_seed(args.seed)
    out = Path(args.out)
    scenarios = generate_benchmark(seed=seed)
    for generated in scenarios:
        verify_ground_truth(generated)
    for generated in scenarios:
        scenario = generated.scenario
        _write_atomic(
            out / "scenarios" / f"{scenario.trace.scenario_id}.json",
            serialize_scenario(scenario),
        )
    blind_traces, answers = make_blind(scenarios, args.salt)
    for trace in blind_traces:
        _write_atomic(out / "blind" / f"{trace.scenario_id}.json", serialize_trace(trace))
    _write_json(out / "answers.json", answers)

    # Held-out split under a distinct seed; never part of the benchmark.
    validation_seed = VALIDATION_SEED if seed == DEFAULT_SEED else seed + VALIDATION_SEED
    validation = generate_benchmark(
        seed=validation_seed,
        counts={domain: VALIDATION_PER_DOMAIN for domain in DOMAINS},
    )
    for generated in validation:
        _write_atomic(
            out / "validation" / f"{generated.scenario.trace.scenario_id}.json",
            serialize_scenario(generated.scenario),
        )

    manifest = benchmark_manifest(scenarios, seed)
    manifest["verified"] = len(scenarios)
    manifest["validation_count"] = len(validation)
    _write_json(out / "manifest.json", manifest)
    print(f"generated {len(scenarios)} scenarios + {len(validation)} validation -> {out}")
    return 0


def _read_scenarios(directory: Path):
    files = sorted(directory.glob("*.json"))
    if not files:
        raise TracefaultError(f"no scenario files in {directory}")
    return [parse_scenario(path.read_bytes()) for path in files]


def cmd_analyze(args) -> int:
    raw = Path(args.trace).read_bytes()
    head = json.loads(raw.decode("utf-8"))
    if isinstance(head, dict) and "ground_truth" in head:
        trace = parse_scenario(raw).trace
    else:
        trace = parse_trace_blind(raw)
    weights = _load_weights(args.weights)
    config = _load_config(args.feature_config)
    diagnosis = rank(
        trace,
        weights=weights,
        config=config,
        max_depth=args.max_depth,
        error_node=args.error_node,
    )
    report = diagnosis.to_obj()
    if args.dump_graph:
        report["graph"] = build_graph(trace).to_obj()
    if not args.explain:
        for candidate in report["candidates"]:
            candidate.pop("groups", None)
            candidate.pop("contributions", None)
    if args.out:
        _write_json(Path(args.out), report)
    else:
        sys.stdout.write(canonical_json_bytes(report).decode("utf-8"))
    if args.markdown:
        sys.stdout.write(render_markdown(diagnosis))
    return 0


def cmd_evaluate(args) -> int:
    bench = Path(args.benchmark)
    if args.blind:
        answers_path = bench / "answers.json"
        if not answers_path.exists():
            raise TracefaultError(f"blind evaluation needs {answers_path}")
        answers = json.loads(answers_path.read_text(encoding="utf-8"))
        blind_dir = bench / "blind"
        traces = [
            parse_trace_blind(path.read_bytes())
            for path in sorted(blind_dir.glob("*.json"))
        ]
        if not traces:
            raise TracefaultError(f"no blind traces in {blind_dir}")
        units = units_from_blind(traces, answers)
    else:
        units = units_from_scenarios(_read_scenarios(bench / "scenarios"))

    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    adapter = FixtureAdapter.from_file(args.llm_fixture) if args.llm_fixture else None
    result = evaluate(
        units,
        methods=methods,
        weights=_load_weights(args.weights),
        config=_load_config(args.feature_config),
        max_depth=args.max_depth,
        eval_seed=args.eval_seed,
        bootstrap_b=args.bootstrap_b,
        bootstrap_seed=args.bootstrap_seed,
        llm_adapter=adapter,
        jobs=args.jobs,
        with_ablations=args.ablations,
        with_sweep=args.sweep,
    )
    out_dir = Path(args.out_dir)
    significance = result.get("significance", {})
    _write_json(out_dir / "metrics.json", result)
    _write_json(out_dir / "significance.json", significance)
    _write_atomic(out_dir / "report.md", render_report(result).encode("utf-8"))
    main_block = result["methods"].get("tracefault")
    if main_block:
        print(
            f"hit@1={main_block['hit_at_1']:.4f} hit@3={main_block['hit_at_3']:.4f} "
            f"mrr={main_block['mrr']:.4f} -> {out_dir}"
        )
    if args.check:
        failures = run_checks(result)
        for failure in failures:
            print(f"CHECK FAILED: {failure}", file=sys.stderr)
        if failures:
            return 1
        print("all checks passed")
    return 0


def cmd_learn_weights(args) -> int:
    scenarios = _read_scenarios(Path(args.validation))
    best, table = grid_search(
        scenarios,
        grid=GridSpec(),
        config=_load_config(args.feature_config),
        max_depth=args.max_depth,
    )
    report = weights_report(best, table)
    _write_json(Path(args.out), report)
    print(f"best weights {best.as_dict()} -> {args.out}")
    return 0


def cmd_blind(args) -> int:
    scenarios = _read_scenarios(Path(args.benchmark) / "scenarios")
    blind_traces, answers = make_blind(scenarios, args.salt)
    out = Path(args.out_dir)
    for trace in blind_traces:
        _write_atomic(out / "blind" / f"{trace.scenario_id}.json", serialize_trace(trace))
    _write_json(out / "answers.json", answers)
    print(f"blinded {len(blind_traces)} scenarios -> {out}")
    return 0


def cmd_bench(args) -> int:
    sizes = tuple(int(s) for s in args.sizes.split(","))
    result = runtime_bench(sizes=sizes, reps=args.reps)
    _write_json(Path(args.out), result)
    fit = result["linear_fit"]
    print(
        f"sizes {sizes}: slope {fit['slope_ms_per_step']:.3f} ms/step, "
        f"r2 {fit['r2']:.4f} -> {args.out}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracefault",
        description="Root-cause localization for multi-agent workflow traces.",
    )
    parser.add_argument("--version", action="version", version=f"tracefault {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="generate the synthetic benchmark")
    p_gen.add_argument("--seed", type=int, default=None, help="generation seed (default 42)")
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.add_argument("--salt", default="tracefault", help="salt for blind ids")
    p_gen.set_defaults(func=cmd_generate)

    p_an = sub.add_parser("analyze", help="rank root-cause candidates for one trace")
    p_an.add_argument("trace", help="scenario or blind trace JSON file")
    p_an.add_argument("--weights", default=None, help="weights.json from learn-weights")
    p_an.add_argument("--feature-config", default=None, help="feature config JSON")
    p_an.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p_an.add_argument("--error-node", type=int, default=None)
    p_an.add_argument("--explain", action="store_true", help="include per-group scores")
    p_an.add_argument("--dump-graph", action="store_true", help="include typed edges")
    p_an.add_argument("--markdown", action="store_true", help="also print a table")
    p_an.add_argument("--out", default=None, help="write analysis.json here")
    p_an.set_defaults(func=cmd_analyze)

    p_ev = sub.add_parser("evaluate", help="run methods over a benchmark directory")
    p_ev.add_argument("benchmark", help="directory produced by generate")
    p_ev.add_argument("--methods", default="tracefault,random,first,last")
    p_ev.add_argument("--blind", action="store_true", help="evaluate the blind split")
    p_ev.add_argument("--weights", default=None)
    p_ev.add_argument("--feature-config", default=None)
    p_ev.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p_ev.add_argument("--eval-seed", type=int, default=DEFAULT_EVAL_SEED)
    p_ev.add_argument("--bootstrap-b", type=int, default=BOOTSTRAP_DEFAULT_B)
    p_ev.add_argument("--bootstrap-seed", type=int, default=BOOTSTRAP_DEFAULT_SEED)
    p_ev.add_argument("--llm-fixture", default=None, help="replay fixture JSON")
    p_ev.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p_ev.add_argument("--ablations", action="store_true")
    p_ev.add_argument("--sweep", action="store_true")
    p_ev.add_argument("--check", action="store_true", help="exit 1 on threshold failure")
    p_ev.add_argument("--out-dir", default="eval-out")
    p_ev.set_defaults(func=cmd_evaluate)

    p_lw = sub.add_parser("learn-weights", help="grid-search weights on a validation set")
    p_lw.add_argument("validation", help="directory of validation scenario files")
    p_lw.add_argument("--feature-config", default=None)
    p_lw.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p_lw.add_argument("--out", default="weights.json")
    p_lw.set_defaults(func=cmd_learn_weights)

    p_bl = sub.add_parser("blind", help="anonymize a benchmark and split answers")
    p_bl.add_argument("benchmark", help="directory containing scenarios/")
    p_bl.add_argument("--salt", default="tracefault")
    p_bl.add_argument("--out-dir", default=None)
    p_bl.set_defaults(func=cmd_blind)

    p_be = sub.add_parser("bench", help="runtime scaling across trace sizes")
    p_be.add_argument("--sizes", default="5,10,15,20,25")
    p_be.add_argument("--reps", type=int, default=30)
    p_be.add_argument("--out", default="timings.json")
    p_be.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "blind" and args.out_dir is None:
        args.out_dir = args.benchmark
    try:
        return args.func(args)
    except TracefaultError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
