"""
Constants for the inductive_automata package.

This module contains the defaults, exit codes, file-format patterns and fixed
field names used throughout the package.
"""

import re

# Display symbols
EPSILON_SYMBOL = "ε"
BLANK_SYMBOL = "□"

# Learner defaults
DEFAULT_RS_STRATEGY = "small"
DEFAULT_CORE_SHRINK = "one-pass"
DEFAULT_SAT_BACKEND = "minisat22"
DEFAULT_MAX_REFINEMENTS = 10_000
DEFAULT_TIMEOUT_SECS = None
DEFAULT_PREFER_SHARP = True

RS_STRATEGIES = ("off", "small", "short")
CORE_SHRINK_MODES = ("off", "one-pass", "fixpoint")
TEACHER_KINDS = ("idmat", "strict", "nonstrict")
SAT_BACKENDS = ("minisat22", "glucose4", "cadical153")

# Bench defaults
DEFAULT_BENCH_REPEATS = 3
DEFAULT_BENCH_CONFIGS = ("small", "short", "off")
DEFAULT_BENCH_TIMEOUT_SECS = 60.0

# Exit codes
EXIT_SUCCESS = 0
EXIT_USAGE_ERROR = 1
EXIT_TIMEOUT = 2
EXIT_UNSAFE = 3

# Model directory layout
RMC_MODEL_FILES = {"initial": "s0.aut", "bad": "sb.aut", "step": "step.trd"}
SEPARATION_MODEL_FILES = {"positive": "pos.aut", "negative": "neg.aut"}

# Text formats (.aut / .trd)
COMMENT_PATTERN = re.compile(r"#.*$")
WHITESPACE_PATTERN = re.compile(r"\s+")
AUTOMATON_HEADER_KEYWORDS = ("alphabet", "states", "initial", "accepting", "trans")

# Stats and CSV field names, kept verbatim
RUN_STATS_FIELDS = (
    "mode",
    "result",
    "mem_queries",
    "mem_hint_queries",
    "val_queries",
    "sat_calls",
    "unsat_cores",
    "prefix_count",
    "suffix_count",
    "hypothesis_states",
    "wall_ms",
    "rs_strategy",
)

BENCH_CSV_FIELDS = (
    "model",
    "config",
    "repeat",
    "result",
    "wall_ms",
    "mem",
    "mem_hints",
    "val",
    "sat_calls",
    "cores",
    "states",
)

RESULT_VALID = "valid"
RESULT_TIMEOUT = "timeout"
RESULT_UNSAFE = "unsafe"
RESULT_ERROR = "error"

# Logging
DEBUG_ENV_VAR = "INDUCTIVE_AUTOMATA_DEBUG"
LOGS_DIRECTORY = "logs"
PACKAGE_LOG_FILE = "inductive_automata.log"
