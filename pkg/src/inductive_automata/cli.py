"""
Command-line entry point: learn, check, bench and summarize.

Exit codes: 0 success, 1 usage or load error, 2 timeout, 3 unsafe model or
failed check.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .automata import load_dfa, save_dfa
from .bench import read_rows, run_bench, summarize, write_rows
from .config import BenchConfig, ConfigError, LearnerConfig
from .constants import (CORE_SHRINK_MODES, EXIT_SUCCESS, EXIT_TIMEOUT,
                        EXIT_UNSAFE, EXIT_USAGE_ERROR, RESULT_TIMEOUT,
                        RESULT_UNSAFE, RESULT_VALID, RS_STRATEGIES,
                        RUN_STATS_FIELDS, SAT_BACKENDS, TEACHER_KINDS)
from .encoding import X
from .learner import Learner, Success, Unsafe, outcome_result
from .logger.logger import RunLog, log_message
from .models import MODELS_ROOT
from .project.project_info import log_project_info
from .teachers import (Teacher, rmc_teacher_from_files,
                       separation_teacher_from_files)
from .utils import InductiveAutomataError, UnsafeModelError


class UsageError(InductiveAutomataError):
    category = "Usage Error"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _add_model_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=("sep", "rmc"), required=True)
    parser.add_argument("--pos", help="positive language (.aut), sep mode")
    parser.add_argument("--neg", help="negative language (.aut), sep mode")
    parser.add_argument("--initial", help="initial configurations (.aut), rmc mode")
    parser.add_argument("--bad", help="bad configurations (.aut), rmc mode")
    parser.add_argument("--step", help="one-step transducer (.trd), rmc mode")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="inductive-automata", description="Learn regular invariants and separators.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    learn = commands.add_parser("learn", help="learn an invariant or a separator")
    _add_model_arguments(learn)
    learn.add_argument("--rs", choices=RS_STRATEGIES, help="counterexample analysis strategy")
    learn.add_argument("--teacher", choices=TEACHER_KINDS, default="idmat", help="teacher variant (rmc only)")
    learn.add_argument("--timeout-secs", type=float)
    learn.add_argument("--max-refinements", type=int)
    learn.add_argument("--core-shrink", choices=CORE_SHRINK_MODES)
    learn.add_argument("--sat-backend", choices=SAT_BACKENDS)
    learn.add_argument("--config", help="learner settings (YAML)")
    learn.add_argument("--out", help="write the result here (.aut)")
    learn.add_argument("--stats", help="write run statistics here (JSON)")
    learn.add_argument("--run-log", help="stream learner events here (JSON lines)")
    learn.add_argument("--dump-cnf", help="write the final SAT instance here (DIMACS)")
    learn.add_argument("--dump-table", action="store_true", help="print the final observation table")
    learn.set_defaults(handler=cmd_learn)

    check = commands.add_parser("check", help="check a candidate invariant or separator")
    _add_model_arguments(check)
    check.add_argument("--invariant", required=True, help="candidate (.aut)")
    check.set_defaults(handler=cmd_check)

    bench = commands.add_parser("bench", help="run the ablation bench")
    bench.add_argument("--models", default=str(MODELS_ROOT), help="directory of model subdirectories (default: bundled models)")
    bench.add_argument("--configs", help="comma-separated rs[:teacher] entries")
    bench.add_argument("--repeats", type=int)
    bench.add_argument("--workers", type=int)
    bench.add_argument("--timeout-secs", type=float)
    bench.add_argument("--config", help="bench settings (YAML)")
    bench.add_argument("--out", help="results CSV (default: stdout)")
    bench.set_defaults(handler=cmd_bench)

    summary = commands.add_parser("summarize", help="best-of-N summary of a results CSV")
    summary.add_argument("results")
    summary.set_defaults(handler=cmd_summarize)
    return parser


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{name}" for name in names if not getattr(args, name)]
    if missing:
        raise UsageError(f"--mode {args.mode} needs {', '.join(missing)}")


def load_teacher(args: argparse.Namespace, kind: str = "idmat") -> Teacher:
    if args.mode == "sep":
        _require(args, "pos", "neg")
        return separation_teacher_from_files(args.pos, args.neg)
    _require(args, "initial", "bad", "step")
    return rmc_teacher_from_files(args.initial, args.bad, args.step, kind)


def _learner_config(args: argparse.Namespace) -> LearnerConfig:
    config = LearnerConfig.from_yaml(args.config) if args.config else LearnerConfig()
    return config.with_overrides(
        rs_strategy=args.rs,
        timeout=args.timeout_secs,
        max_refinements=args.max_refinements,
        core_shrink=args.core_shrink,
        sat_backend=args.sat_backend,
    )


def _write_stats(path: str, args: argparse.Namespace, result: str, learner: Optional[Learner], teacher: Optional[Teacher], config: LearnerConfig) -> None:
    stats = dict.fromkeys(RUN_STATS_FIELDS, 0)
    stats.update(mode=args.mode, result=result, rs_strategy=config.rs_strategy.value)
    if teacher is not None:
        stats.update(
            mem_queries=teacher.stats.mem_status_calls,
            mem_hint_queries=teacher.stats.mem_hint_calls,
            val_queries=teacher.stats.val_calls,
        )
    if learner is not None:
        stats.update(
            sat_calls=learner.stats.sat_calls,
            unsat_cores=learner.stats.unsat_cores,
            prefix_count=learner.stats.prefix_count,
            suffix_count=learner.stats.suffix_count,
            hypothesis_states=learner.stats.hypothesis_states,
            wall_ms=round(learner.stats.wall_ms, 3),
        )
    Path(path).write_text(json.dumps(stats, indent=2) + "\n", encoding="utf-8")


@log_project_info
def cmd_learn(args: argparse.Namespace) -> int:
    config = _learner_config(args)
    try:
        teacher = load_teacher(args, args.teacher)
    except UnsafeModelError as error:
        print(f"unsafe: {error}")
        if args.stats:
            _write_stats(args.stats, args, RESULT_UNSAFE, None, None, config)
        return EXIT_UNSAFE

    run_log = RunLog(args.run_log)
    learner = Learner(teacher, config, run_log)
    try:
        outcome = learner.run()
    finally:
        learner.close()
        run_log.close()
    result = outcome_result(outcome)

    if args.dump_table:
        fill = {}
        if learner.hypothesis is not None:
            fill = {
                key.word: value
                for key, value in learner.hypothesis.model.assignment.items()
                if isinstance(key, X)
            }
        print(learner.table.render(fill), end="")
    if args.dump_cnf:
        learner.encoding.dump_dimacs(args.dump_cnf)
    if args.stats:
        _write_stats(args.stats, args, result, learner, teacher, config)

    if isinstance(outcome, Success):
        if args.out:
            save_dfa(outcome.invariant, args.out, comment=f"learned by inductive-automata ({args.mode})")
        print(f"{RESULT_VALID}: {outcome.invariant.state_count} states")
        return EXIT_SUCCESS
    if result == RESULT_TIMEOUT:
        print(f"{RESULT_TIMEOUT}: {outcome.reason}")
        return EXIT_TIMEOUT
    if isinstance(outcome, Unsafe):
        witness = teacher.alphabet.render(outcome.witness) if outcome.witness is not None else "?"
        print(f"{RESULT_UNSAFE}: {witness}")
        return EXIT_UNSAFE
    print(f"error: {outcome.detail}")
    return EXIT_USAGE_ERROR


@log_project_info
def cmd_check(args: argparse.Namespace) -> int:
    try:
        teacher = load_teacher(args)
    except UnsafeModelError as error:
        print(f"unsafe: {error}")
        return EXIT_UNSAFE
    candidate = load_dfa(args.invariant)
    violation = teacher.certify(candidate)
    if violation is None:
        print("ok")
        return EXIT_SUCCESS
    print(f"{violation.condition}: {teacher.alphabet.render(violation.witness)}")
    return EXIT_UNSAFE


@log_project_info
def cmd_bench(args: argparse.Namespace) -> int:
    bench = BenchConfig.from_yaml(args.config) if args.config else BenchConfig()
    configs = tuple(entry.strip() for entry in args.configs.split(",") if entry.strip()) if args.configs else None
    bench = bench.with_overrides(
        configs=configs,
        repeats=args.repeats,
        workers=args.workers,
        timeout=args.timeout_secs,
    )
    rows = run_bench(args.models, bench)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            write_rows(rows, handle)
    else:
        write_rows(rows, sys.stdout)
    return EXIT_SUCCESS


@log_project_info
def cmd_summarize(args: argparse.Namespace) -> int:
    summary = summarize(read_rows(args.results))
    columns = ("model", "config", "solved", "wall_ms", "mem", "val", "states")
    print("\t".join(columns))
    for row in summary:
        print("\t".join(str(row[column]) for column in columns))
    return EXIT_SUCCESS


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except (UsageError, ConfigError) as error:
        print(f"usage error: {error}", file=sys.stderr)
        return EXIT_USAGE_ERROR
    except InductiveAutomataError as error:
        log_message("error", f"{error.category}: {error}", "main", "cli")
        print(f"{error.category}: {error}", file=sys.stderr)
        return EXIT_USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
