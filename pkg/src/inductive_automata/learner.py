"""
The learning loop and its counterexample analyses.

Each round extends the table, syncs the encoding and solves it. An UNSAT
answer grows the prefixes from the core. A SAT answer yields a hypothesis
that goes to the teacher. A simple counterexample is analysed along one
dimension (breaking interval); an inductive one along two (breaking
rectangle). Either analysis only adds suffixes.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from .automata import EMPTY_WORD, Dfa, Word, sort_shortlex
from .config import LearnerConfig, RsStrategy
from .constants import RESULT_ERROR, RESULT_TIMEOUT, RESULT_UNSAFE, RESULT_VALID
from .encoding import Hypothesis, SatResult, TableEncoding
from .logger.logger import RunLog, log_message
from .sat import Sat
from .table import ObservationTable, TriBool
from .teachers import InductiveCex, MembershipCache, SimpleCex, Teacher, Valid
from .utils import (ContractViolationError, EncodingInvariantError,
                    SolverInterruptedError, UnsafeModelError)

Interval = Tuple[int, int]
Rectangle = Tuple[int, int, int, int]


@dataclass
class LearnStats:
    sat_calls: int = 0
    unsat_cores: int = 0
    core_refinements: int = 0
    simple_refinements: int = 0
    inductive_refinements: int = 0
    prefix_count: int = 0
    suffix_count: int = 0
    hypothesis_states: int = 0
    wall_ms: float = 0.0

    @property
    def refinements(self) -> int:
        return self.core_refinements + self.simple_refinements + self.inductive_refinements

    def as_dict(self) -> Dict[str, Union[int, float]]:
        return asdict(self)


@dataclass
class Success:
    invariant: Dfa
    stats: LearnStats


@dataclass
class Timeout:
    stats: LearnStats
    reason: str = "timeout"


@dataclass
class Unsafe:
    witness: Optional[Word]
    stats: LearnStats


@dataclass
class ContractViolation:
    detail: str
    stats: LearnStats = field(default_factory=LearnStats)


LearnOutcome = Union[Success, Timeout, Unsafe, ContractViolation]


def _implies(first: bool, second: bool) -> TriBool:
    return TriBool.of((not first) or second)


def model_value(word: Word, hypothesis: Hypothesis, cache: MembershipCache) -> Optional[bool]:
    """ν_m(word): the teacher if decisive, else the projected model, else unknown."""
    status = cache.status(word)
    if status.decisive:
        return status is TriBool.ONE
    return hypothesis.model.cell(word)


def agree_simple(word: Word, hypothesis: Hypothesis, position: int, cache: MembershipCache) -> TriBool:
    return TriBool.of(model_value(hypothesis.partial_computation(word, position), hypothesis, cache))


def agree_row(word: Word, hypothesis: Hypothesis, cache: MembershipCache) -> List[TriBool]:
    return [agree_simple(word, hypothesis, position, cache) for position in range(len(word) + 1)]


def agree_inductive(
    first: Word,
    second: Word,
    hypothesis: Hypothesis,
    i: int,
    j: int,
    cache: MembershipCache,
) -> TriBool:
    left = hypothesis.partial_computation(first, i)
    right = hypothesis.partial_computation(second, j)
    left_status, right_status = cache.status(left), cache.status(right)
    if left_status.decisive and right_status.decisive:
        return _implies(left_status is TriBool.ONE, right_status is TriBool.ONE)
    # hints are only asked about a blank word; the partner may be decisive
    if left_status is TriBool.BLANK and (left, right) in cache.hints(left, {right}):
        return TriBool.ONE
    left_value = model_value(left, hypothesis, cache)
    right_value = model_value(right, hypothesis, cache)
    if left_value is not None and right_value is not None:
        return _implies(left_value, right_value)
    return TriBool.BLANK


def agree_grid(first: Word, second: Word, hypothesis: Hypothesis, cache: MembershipCache) -> List[List[TriBool]]:
    return [
        [agree_inductive(first, second, hypothesis, i, j, cache) for j in range(len(second) + 1)]
        for i in range(len(first) + 1)
    ]


def find_breaking_interval(values: Sequence[TriBool], strategy: RsStrategy = RsStrategy.SMALL) -> Interval:
    last = len(values) - 1
    if last < 1 or not (values[0].decisive and values[last].decisive) or values[0] is values[last]:
        raise ContractViolationError(
            "evaluation row endpoints must be decisive and differ: "
            + "".join(value.symbol for value in values)
        )
    strategy = RsStrategy(strategy)
    if strategy is RsStrategy.OFF:
        return (0, last)
    intervals = [
        (i, j)
        for i in range(last + 1)
        if values[i].decisive
        for j in range(i + 1, last + 1)
        if values[j].decisive and values[j] is not values[i]
    ]
    if strategy is RsStrategy.SMALL:
        return min(intervals, key=lambda interval: (interval[1] - interval[0], interval[0]))
    return min(intervals, key=lambda interval: (-interval[0], interval[1]))


def find_breaking_rectangle(grid: Sequence[Sequence[TriBool]], strategy: RsStrategy = RsStrategy.SMALL) -> Rectangle:
    last_i = len(grid) - 1
    last_j = len(grid[0]) - 1 if grid else -1
    if last_i < 0 or last_j < 0 or grid[0][0] is not TriBool.ONE or grid[last_i][last_j] is not TriBool.ZERO:
        raise ContractViolationError("evaluation grid corners must be 1 at (0,0) and 0 at the far end")
    strategy = RsStrategy(strategy)
    if strategy is RsStrategy.OFF:
        return (0, last_i, 0, last_j)
    decisive = [
        (i, j, grid[i][j])
        for i in range(last_i + 1)
        for j in range(last_j + 1)
        if grid[i][j].decisive
    ]
    rectangles = [
        (i, i2, j, j2)
        for i, j, low in decisive
        for i2, j2, high in decisive
        if i <= i2 and j <= j2 and (i, j) != (i2, j2) and low is not high
    ]
    if not rectangles:
        raise ContractViolationError("no breaking rectangle in the evaluation grid")

    def size(rectangle: Rectangle) -> int:
        i, i2, j, j2 = rectangle
        return (i2 - i + 1) + (j2 - j + 1)

    if strategy is RsStrategy.SMALL:
        return min(rectangles, key=lambda rectangle: (size(rectangle), rectangle))
    return min(rectangles, key=lambda rectangle: (-rectangle[0], -rectangle[2], size(rectangle), rectangle))


def suffixes_for_interval(word: Word, i: int, j: int) -> Set[Word]:
    return {word[position:] for position in range(i + 1, j + 1)}


def suffixes_for_rectangle(first: Word, second: Word, rectangle: Rectangle) -> Set[Word]:
    i, i2, j, j2 = rectangle
    return {first[position:] for position in range(i, i2 + 1)} | {
        second[position:] for position in range(j, j2 + 1)
    }


class Learner:
    """One learning run: owns the table, the membership cache and the encoding."""

    def __init__(self, teacher: Teacher, config: Optional[LearnerConfig] = None, run_log: Optional[RunLog] = None):
        self.teacher = teacher
        self.config = config or LearnerConfig()
        self.run_log = run_log or RunLog()
        self.cache = MembershipCache(teacher)
        self.table = ObservationTable(teacher.alphabet)
        self.encoding = TableEncoding(
            self.table,
            backend=self.config.sat_backend,
            core_shrink=self.config.core_shrink,
            prefer_sharp=self.config.prefer_sharp,
        )
        self.stats = LearnStats()
        self.hypothesis: Optional[Hypothesis] = None
        self._started = 0.0

    def render(self, word: Word) -> str:
        return self.teacher.alphabet.render(word)

    def run(self) -> LearnOutcome:
        self._started = time.monotonic()
        if self.config.timeout is not None:
            self.encoding.solver.deadline = self._started + self.config.timeout
        try:
            outcome = self._loop()
        except SolverInterruptedError as error:
            log_message("warning", f"Stopping: {error}", "run", "learner", refinements=self.stats.refinements)
            outcome = Timeout(self.stats, "timeout")
        except UnsafeModelError as error:
            log_message("warning", f"Model is unsafe: {error}", "run", "learner")
            outcome = Unsafe(error.witness, self.stats)
        except (ContractViolationError, EncodingInvariantError) as error:
            log_message("error", f"{error.category}: {error}", "run", "learner")
            outcome = ContractViolation(str(error), self.stats)
        self._finish_stats()
        self.run_log.record("result", outcome=type(outcome).__name__, **self.stats.as_dict())
        return outcome

    def _finish_stats(self) -> None:
        self.stats.sat_calls = self.encoding.solver.stats.solve_calls
        self.stats.prefix_count = len(self.table.prefixes)
        self.stats.suffix_count = len(self.table.suffixes)
        self.stats.wall_ms = (time.monotonic() - self._started) * 1000.0

    def _out_of_budget(self) -> Optional[str]:
        if self.stats.refinements >= self.config.max_refinements:
            return "max_refinements"
        if self.config.timeout is not None and time.monotonic() - self._started > self.config.timeout:
            return "timeout"
        return None

    def _extend(self, prefixes, suffixes) -> None:
        self.table.extend_and_fill(prefixes, suffixes, self.cache)
        self.encoding.sync()

    def _loop(self) -> LearnOutcome:
        self._extend([EMPTY_WORD], [EMPTY_WORD])
        while True:
            reason = self._out_of_budget()
            if reason:
                log_message("warning", f"Stopping: {reason}", "run", "learner", refinements=self.stats.refinements)
                return Timeout(self.stats, reason)

            result = self.encoding.solve_table()
            if not isinstance(result, SatResult):
                self._refine_from_core(result.core)
                continue

            hypothesis = self.encoding.hypothesis_from_model(result.model)
            self.encoding.check_filled_subtable(hypothesis)
            self.hypothesis = hypothesis
            self.stats.hypothesis_states = hypothesis.dfa.state_count
            self.run_log.record(
                "sat",
                basis=[self.render(word) for word in hypothesis.basis],
                row_distinct=result.model.row_distinct,
            )

            answer = self.teacher.validate(hypothesis.dfa)
            if isinstance(answer, Valid):
                violation = self.teacher.certify(hypothesis.dfa)
                if violation is not None:
                    raise ContractViolationError(
                        f"teacher accepted a hypothesis failing {violation.condition} "
                        f"on {self.render(violation.witness)}"
                    )
                log_message(
                    "info",
                    f"Found a {hypothesis.dfa.state_count}-state answer",
                    "run",
                    "learner",
                    prefixes=len(self.table.prefixes),
                    suffixes=len(self.table.suffixes),
                )
                return Success(hypothesis.dfa, self.stats)
            if isinstance(answer, SimpleCex):
                self._refine_simple(hypothesis, answer.word)
            else:
                self._refine_inductive(hypothesis, answer)

    def _refine_from_core(self, core) -> None:
        self.stats.unsat_cores += 1
        self.stats.core_refinements += 1
        bound = self.config.refinement_bound
        if bound is not None and self.stats.core_refinements > bound:
            raise ContractViolationError(
                f"core refinement {self.stats.core_refinements} exceeds the bound {bound}"
            )
        prefixes = self.encoding.prefixes_from_core(core)
        self.run_log.record(
            "unsat",
            core=[f"{self.render(selector.prefix)}·{self.teacher.alphabet.letters[selector.letter]}" for selector in core],
        )
        self.run_log.record("prefixes", added=[self.render(word) for word in sort_shortlex(prefixes)])
        self._extend(prefixes, [])

    def _add_suffixes(self, suffixes: Set[Word], hypothesis: Hypothesis) -> None:
        new = {suffix for suffix in suffixes if not self.table.is_suffix(suffix)}
        if not new:
            raise ContractViolationError("counterexample analysis added no new suffix")
        self.run_log.record("suffixes", added=[self.render(word) for word in sort_shortlex(new)])
        self._extend([], new)
        if self.config.check_refinements:
            self._check_refinement(hypothesis)

    def _check_refinement(self, hypothesis: Hypothesis) -> None:
        """Re-solving under the previous model must now fail."""
        outcome = self.encoding.replay(hypothesis.model)
        refuted = not isinstance(outcome, Sat)
        self.run_log.record("refinement_check", refuted=refuted)
        if not refuted:
            raise ContractViolationError("previous model still satisfies the refined instance")

    def _refine_simple(self, hypothesis: Hypothesis, word: Word) -> None:
        values = agree_row(word, hypothesis, self.cache)
        i, j = find_breaking_interval(values, self.config.rs_strategy)
        self.stats.simple_refinements += 1
        self.run_log.record(
            "cex",
            kind="simple",
            word=self.render(word),
            row="".join(value.symbol for value in values),
        )
        self.run_log.record("interval", i=i, j=j)
        self._add_suffixes(suffixes_for_interval(word, i, j), hypothesis)

    def _refine_inductive(self, hypothesis: Hypothesis, answer: InductiveCex) -> None:
        first, second = answer.first, answer.second
        grid = agree_grid(first, second, hypothesis, self.cache)
        rectangle = find_breaking_rectangle(grid, self.config.rs_strategy)
        self.stats.inductive_refinements += 1
        self.run_log.record("cex", kind="inductive", first=self.render(first), second=self.render(second))
        self.run_log.record("rectangle", i=rectangle[0], i2=rectangle[1], j=rectangle[2], j2=rectangle[3])
        self._add_suffixes(suffixes_for_rectangle(first, second, rectangle), hypothesis)

    def close(self) -> None:
        self.encoding.close()


def outcome_result(outcome: LearnOutcome) -> str:
    """Result label used in stats files and bench rows."""
    if isinstance(outcome, Success):
        return RESULT_VALID
    if isinstance(outcome, Timeout):
        return RESULT_TIMEOUT
    if isinstance(outcome, Unsafe):
        return RESULT_UNSAFE
    return RESULT_ERROR


def run(teacher: Teacher, config: Optional[LearnerConfig] = None, run_log: Optional[RunLog] = None) -> LearnOutcome:
    learner = Learner(teacher, config, run_log)
    try:
        return learner.run()
    finally:
        learner.close()
