"""
Ablation bench: every model directory under a root, crossed with the
configured `rs[:teacher]` entries, repeated, one CSV row per run.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import Dict, Iterable, List, Optional, TextIO

from .config import BenchConfig, LearnerConfig, parse_bench_entry
from .constants import BENCH_CSV_FIELDS, RESULT_ERROR, RESULT_UNSAFE, RESULT_VALID
from .learner import Learner, outcome_result
from .logger.logger import (create_step_log_file, log_message, safe_log_close,
                            safe_log_write)
from .teachers import teacher_for_model_dir
from .utils import InductiveAutomataError, UnsafeModelError

BenchRow = Dict[str, object]


def discover_models(root) -> List[Path]:
    root = Path(root)
    if not root.is_dir():
        raise InductiveAutomataError(f"model directory {root} does not exist")
    return sorted(path for path in root.iterdir() if path.is_dir() and not path.name.startswith(("_", ".")))


def _empty_row(model: str, entry: str, repeat: int, result: str) -> BenchRow:
    row: BenchRow = {name: 0 for name in BENCH_CSV_FIELDS}
    row.update(model=model, config=entry, repeat=repeat, result=result, wall_ms=0.0)
    return row


def run_one(model_dir: Path, entry: str, repeat: int, bench: BenchConfig) -> BenchRow:
    """One full learner stack on one model; never raises."""
    strategy, kind = parse_bench_entry(entry)
    try:
        teacher = teacher_for_model_dir(model_dir, kind)
    except UnsafeModelError as error:
        log_message("warning", f"Model {model_dir.name} has no answer: {error}", "run_one", "bench")
        return _empty_row(model_dir.name, entry, repeat, RESULT_UNSAFE)
    except InductiveAutomataError as error:
        log_message("warning", f"Skipping model {model_dir.name}: {error}", "run_one", "bench")
        return _empty_row(model_dir.name, entry, repeat, RESULT_ERROR)

    config = LearnerConfig(
        rs_strategy=strategy,
        timeout=bench.timeout,
        max_refinements=bench.max_refinements,
    )
    learner = Learner(teacher, config)
    start = time.monotonic()
    try:
        outcome = learner.run()
    finally:
        learner.close()
    wall_ms = (time.monotonic() - start) * 1000.0

    row = _empty_row(model_dir.name, entry, repeat, outcome_result(outcome))
    row.update(
        wall_ms=round(wall_ms, 3),
        mem=teacher.stats.mem_status_calls,
        mem_hints=teacher.stats.mem_hint_calls,
        val=teacher.stats.val_calls,
        sat_calls=learner.stats.sat_calls,
        cores=learner.stats.unsat_cores,
        states=learner.stats.hypothesis_states if row["result"] == RESULT_VALID else 0,
    )
    return row


def run_bench(root, bench: Optional[BenchConfig] = None) -> List[BenchRow]:
    bench = bench or BenchConfig()
    models = discover_models(root)
    tasks = [
        (model_dir, entry, repeat)
        for model_dir in models
        for entry in bench.configs
        for repeat in range(bench.repeats)
    ]
    log_message(
        "info",
        f"Running {len(tasks)} bench tasks over {len(models)} models with {bench.workers} workers",
        "run_bench",
        "bench",
    )
    log_filepath, log_file_handle = create_step_log_file("bench")
    rows: List[BenchRow] = []
    try:
        with ThreadPoolExecutor(max_workers=bench.workers) as executor:
            future_to_task = {
                executor.submit(run_one, model_dir, entry, repeat, bench): (model_dir, entry, repeat)
                for model_dir, entry, repeat in tasks
            }
            for future in as_completed(future_to_task):
                model_dir, entry, repeat = future_to_task[future]
                try:
                    row = future.result()
                except Exception as error:
                    log_message(
                        "error",
                        f"Bench task {model_dir.name}/{entry}/{repeat} failed: {error}",
                        "run_bench",
                        "bench",
                    )
                    row = _empty_row(model_dir.name, entry, repeat, RESULT_ERROR)
                rows.append(row)
                safe_log_write(
                    log_file_handle,
                    f"{row['model']} {row['config']} #{row['repeat']}: {row['result']} in {row['wall_ms']} ms\n",
                )
    finally:
        safe_log_close(log_file_handle)
    rows.sort(key=lambda row: (row["model"], bench.configs.index(row["config"]), row["repeat"]))
    return rows


def write_rows(rows: Iterable[BenchRow], handle: TextIO) -> None:
    writer = csv.DictWriter(handle, fieldnames=list(BENCH_CSV_FIELDS), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({name: row[name] for name in BENCH_CSV_FIELDS})


def read_rows(path) -> List[BenchRow]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        missing = set(BENCH_CSV_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise InductiveAutomataError(f"{path} lacks bench columns: {', '.join(sorted(missing))}")
        return list(reader)


def summarize(rows: Iterable[BenchRow]) -> List[BenchRow]:
    """Best-of-N per (model, config): the fastest valid repeat, if any."""
    groups: Dict[tuple, List[BenchRow]] = {}
    for row in rows:
        groups.setdefault((row["model"], row["config"]), []).append(row)
    summary = []
    for (model, entry), members in sorted(groups.items()):
        valid = [row for row in members if row["result"] == RESULT_VALID]
        if valid:
            best = dict(min(valid, key=lambda row: float(row["wall_ms"])))
        else:
            best = dict(members[0])
        best["solved"] = f"{len(valid)}/{len(members)}"
        summary.append(best)
    return summary
