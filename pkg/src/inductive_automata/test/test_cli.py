"""
Tests for the inductive-automata command line.
"""

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from inductive_automata import cli
from inductive_automata.automata import load_dfa, save_dfa, universal
from inductive_automata.constants import (EXIT_SUCCESS, EXIT_TIMEOUT,
                                          EXIT_UNSAFE, EXIT_USAGE_ERROR,
                                          RUN_STATS_FIELDS)
from inductive_automata.models import model_path
from inductive_automata.teachers import teacher_for_model_dir


def sep_args():
    directory = model_path("sep_ab")
    return ["--mode", "sep", "--pos", str(directory / "pos.aut"), "--neg", str(directory / "neg.aut")]


def rmc_args(directory=None, bad=None):
    directory = directory or model_path("equidist")
    return [
        "--mode", "rmc",
        "--initial", str(directory / "s0.aut"),
        "--bad", str(bad or directory / "sb.aut"),
        "--step", str(directory / "step.trd"),
    ]


def test_learn_separator(tmp_path, capsys):
    out, stats = tmp_path / "sep.aut", tmp_path / "stats.json"
    code = cli.main(["learn", *sep_args(), "--out", str(out), "--stats", str(stats)])
    assert code == EXIT_SUCCESS
    assert capsys.readouterr().out.startswith("valid: ")

    teacher = teacher_for_model_dir(model_path("sep_ab"))
    assert teacher.certify(load_dfa(out)) is None

    data = json.loads(stats.read_text(encoding="utf-8"))
    assert set(data) == set(RUN_STATS_FIELDS)
    assert data["mode"] == "sep"
    assert data["result"] == "valid"
    assert data["rs_strategy"] == "small"
    assert data["val_queries"] >= 1
    assert data["hypothesis_states"] >= 2


def test_learn_invariant_with_dumps(tmp_path, capsys):
    cnf, events = tmp_path / "final.cnf", tmp_path / "events.jsonl"
    code = cli.main([
        "learn", *rmc_args(), "--rs", "short", "--timeout-secs", "120",
        "--dump-table", "--dump-cnf", str(cnf), "--run-log", str(events),
    ])
    assert code == EXIT_SUCCESS
    output = capsys.readouterr().out
    assert output.splitlines()[-1].startswith("valid: ")
    assert "|" in output
    assert cnf.read_text(encoding="utf-8").count("p cnf") == 1
    kinds = [json.loads(line)["event"] for line in events.read_text(encoding="utf-8").splitlines()]
    assert kinds[-1] == "result"


def test_learn_reads_yaml_settings(tmp_path, capsys):
    config = tmp_path / "learner.yaml"
    config.write_text("learner:\n  max_refinements: 1\n", encoding="utf-8")
    code = cli.main(["learn", *rmc_args(), "--config", str(config)])
    assert code == EXIT_TIMEOUT
    assert capsys.readouterr().out.strip() == "timeout: max_refinements"


def test_flags_override_yaml(tmp_path, capsys):
    config = tmp_path / "learner.yaml"
    config.write_text("learner:\n  max_refinements: 1\n", encoding="utf-8")
    code = cli.main(["learn", *sep_args(), "--config", str(config), "--max-refinements", "500"])
    assert code == EXIT_SUCCESS


def test_unsafe_model_exits_three(tmp_path, capsys, ox):
    bad = tmp_path / "bad.aut"
    save_dfa(universal(ox), bad)
    stats = tmp_path / "stats.json"
    code = cli.main(["learn", *rmc_args(bad=bad), "--stats", str(stats)])
    assert code == EXIT_UNSAFE
    assert capsys.readouterr().out.strip() == "unsafe: xx"
    assert json.loads(stats.read_text(encoding="utf-8"))["result"] == "unsafe"


def test_overlapping_separation_exits_three(tmp_path, capsys):
    directory = model_path("sep_ab")
    code = cli.main(["learn", "--mode", "sep", "--pos", str(directory / "pos.aut"), "--neg", str(directory / "pos.aut")])
    assert code == EXIT_UNSAFE
    assert capsys.readouterr().out.startswith("unsafe: ")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["learn", "--mode", "sep"],
        ["learn", "--mode", "rmc", "--initial", "a.aut"],
        ["learn", "--mode", "both"],
        ["learn", "--mode", "sep", "--pos", "p.aut", "--neg", "n.aut", "--rs", "fastest"],
    ],
)
def test_usage_errors_exit_one(argv, capsys):
    assert cli.main(argv) == EXIT_USAGE_ERROR
    assert "usage error" in capsys.readouterr().err


def test_missing_model_file_exits_one(tmp_path, capsys):
    code = cli.main(["learn", "--mode", "sep", "--pos", str(tmp_path / "nope.aut"), "--neg", str(tmp_path / "nope.aut")])
    assert code == EXIT_USAGE_ERROR


def test_check(tmp_path, capsys, ox, invariant):
    candidate = tmp_path / "invariant.aut"
    save_dfa(invariant, candidate)
    assert cli.main(["check", *rmc_args(), "--invariant", str(candidate)]) == EXIT_SUCCESS
    assert capsys.readouterr().out.strip() == "ok"

    save_dfa(universal(ox), candidate)
    assert cli.main(["check", *rmc_args(), "--invariant", str(candidate)]) == EXIT_UNSAFE
    assert capsys.readouterr().out.strip() == "invariant ∩ bad = ∅: xox"


def test_bench_and_summarize(tmp_path, capsys):
    models = tmp_path / "models"
    models.mkdir()
    source = model_path("sep_ab")
    target = models / "sep_ab"
    target.mkdir()
    for name in ("pos.aut", "neg.aut"):
        (target / name).write_text((source / name).read_text(encoding="utf-8"), encoding="utf-8")

    results = tmp_path / "results.csv"
    code = cli.main([
        "bench", "--models", str(models), "--configs", "small,off",
        "--repeats", "2", "--timeout-secs", "60", "--out", str(results),
    ])
    assert code == EXIT_SUCCESS
    lines = results.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 1 + 4

    capsys.readouterr()
    assert cli.main(["summarize", str(results)]) == EXIT_SUCCESS
    rows = [line.split("\t") for line in capsys.readouterr().out.splitlines()]
    assert rows[0] == ["model", "config", "solved", "wall_ms", "mem", "val", "states"]
    assert [row[:3] for row in rows[1:]] == [["sep_ab", "off", "2/2"], ["sep_ab", "small", "2/2"]]


def test_command_log_in_debug_mode(tmp_path, monkeypatch, capsys):
    from argparse import Namespace

    from inductive_automata.project.project_info import log_project_info

    @log_project_info
    def cmd_inspect(args):
        return EXIT_UNSAFE

    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("INDUCTIVE_AUTOMATA_DEBUG", "1")
    assert cmd_inspect(Namespace(mode="rmc", out=None, dump_table=False)) == EXIT_UNSAFE
    assert "inductive-automata v" in capsys.readouterr().err
    [log] = (tmp_path / "logs").glob("inductive_automata_inspect_*.log")
    text = log.read_text(encoding="utf-8")
    assert "--mode rmc" in text
    assert "--out" not in text
    assert "exit code 3" in text

    monkeypatch.delenv("INDUCTIVE_AUTOMATA_DEBUG")
    cmd_inspect(Namespace(mode="sep"))
    assert len(list((tmp_path / "logs").iterdir())) == 1
