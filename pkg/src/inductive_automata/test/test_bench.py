"""
Tests for the ablation bench runner and its CSV output.
"""

import io
import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from inductive_automata.automata import save_dfa, universal
from inductive_automata.bench import (discover_models, read_rows, run_bench,
                                      summarize, write_rows)
from inductive_automata.config import BenchConfig
from inductive_automata.constants import BENCH_CSV_FIELDS
from inductive_automata.models import MODELS_ROOT, model_names, model_path
from inductive_automata.utils import InductiveAutomataError


@pytest.fixture
def models(tmp_path):
    root = tmp_path / "models"
    root.mkdir()
    for name in ("sep_ab", "token_pass"):
        shutil.copytree(model_path(name), root / name)
    (root / "_scratch").mkdir()
    (root / "notes.txt").write_text("not a model\n", encoding="utf-8")
    return root


def test_discover_models(models):
    assert [path.name for path in discover_models(models)] == ["sep_ab", "token_pass"]
    assert [path.name for path in discover_models(MODELS_ROOT)] == model_names()
    with pytest.raises(InductiveAutomataError):
        discover_models(models / "missing")


def test_bundled_models_are_listed():
    assert {"equidist", "sep_ab", "token_hop", "token_pass"} <= set(model_names())
    with pytest.raises(KeyError):
        model_path("no_such_model")


def test_run_bench_rows(models):
    bench = BenchConfig(configs=("small", "off:strict"), repeats=2, timeout=60.0, workers=2)
    rows = run_bench(models, bench)
    assert len(rows) == 2 * 2 * 2
    assert [(row["model"], row["config"], row["repeat"]) for row in rows] == [
        (model, entry, repeat)
        for model in ("sep_ab", "token_pass")
        for entry in ("small", "off:strict")
        for repeat in range(2)
    ]
    for row in rows:
        assert set(BENCH_CSV_FIELDS) <= set(row)
        assert row["result"] == "valid", row
        assert row["states"] >= 1
        assert row["val"] >= 1
        assert row["sat_calls"] >= 1


def test_unsafe_and_broken_models_get_rows(models, ox):
    unsafe = models / "unsafe_pass"
    shutil.copytree(model_path("equidist"), unsafe)
    save_dfa(universal(ox), unsafe / "sb.aut")
    broken = models / "broken"
    broken.mkdir()
    (broken / "pos.aut").write_text("alphabet a\nstates 1\n", encoding="utf-8")

    rows = run_bench(models, BenchConfig(configs=("small",), repeats=1))
    results = {row["model"]: row["result"] for row in rows}
    assert results["unsafe_pass"] == "unsafe"
    assert results["broken"] == "error"
    assert results["sep_ab"] == "valid"


def test_csv_round_trip_and_summary(models, tmp_path):
    rows = run_bench(models, BenchConfig(configs=("short",), repeats=2))
    handle = io.StringIO()
    write_rows(rows, handle)
    header = handle.getvalue().splitlines()[0]
    assert header == ",".join(BENCH_CSV_FIELDS)

    path = tmp_path / "results.csv"
    path.write_text(handle.getvalue(), encoding="utf-8")
    loaded = read_rows(path)
    assert len(loaded) == len(rows)

    summary = summarize(loaded)
    assert [(row["model"], row["solved"]) for row in summary] == [("sep_ab", "2/2"), ("token_pass", "2/2")]
    for row in summary:
        fastest = min(float(other["wall_ms"]) for other in loaded if other["model"] == row["model"])
        assert float(row["wall_ms"]) == fastest


def test_summary_of_unsolved_group():
    rows = [
        {"model": "m", "config": "small", "result": "timeout", "wall_ms": "10"},
        {"model": "m", "config": "small", "result": "error", "wall_ms": "0"},
    ]
    [row] = summarize(rows)
    assert row["solved"] == "0/2"


def test_read_rows_needs_bench_columns(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("model,config\nm,small\n", encoding="utf-8")
    with pytest.raises(InductiveAutomataError):
        read_rows(path)


def test_inductive_teacher_solves_what_the_baselines_solve(tmp_path):
    """Token models: idmat ⊇ strict ∪ nonstrict, and small never asks more than off."""
    root = tmp_path / "token_models"
    root.mkdir()
    names = ("equidist", "token_hop", "token_pass")
    for name in names:
        shutil.copytree(model_path(name), root / name)
    strategies = ("small", "off")
    configs = tuple(
        strategy if kind == "idmat" else f"{strategy}:{kind}"
        for kind in ("idmat", "strict", "nonstrict")
        for strategy in strategies
    )
    rows = run_bench(root, BenchConfig(configs=configs, repeats=1, timeout=30.0, workers=2))
    assert len(rows) == len(names) * len(configs)
    assert {row["result"] for row in rows} <= {"valid", "timeout"}

    handle = io.StringIO()
    write_rows(rows, handle)
    assert len(handle.getvalue().splitlines()) == 1 + len(rows)

    solved = {(row["model"], row["config"]) for row in rows if row["result"] == "valid"}
    mem = {(row["model"], row["config"]): row["mem"] for row in rows}
    for strategy in strategies:
        inductive = {name for name in names if (name, strategy) in solved}
        baselines = {
            name
            for name in names
            for kind in ("strict", "nonstrict")
            if (name, f"{strategy}:{kind}") in solved
        }
        assert inductive >= baselines
        assert inductive == set(names)
    for name in names:
        assert mem[(name, "small")] <= mem[(name, "off")]
