"""
Incremental SAT with assumption literals, failed-assumption cores and core
shrinking, on top of python-sat.

Literals follow the DIMACS convention: a positive integer is a variable, its
negation the negated variable. Variables are allocated through an IDPool, so
every variable can carry a hashable key.

A solver may carry a deadline on the monotonic clock. Every solve then runs
through solve_limited with a timer that interrupts it once the deadline
passes, and the interrupted call raises SolverInterruptedError.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import count
from threading import Timer
from typing import Any, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from pysat.formula import CNF, IDPool
from pysat.solvers import Solver

from .constants import DEFAULT_SAT_BACKEND
from .logger.logger import log_message
from .utils import PreconditionError, SolverInterruptedError


@dataclass(frozen=True)
class Sat:
    assignment: Mapping[int, bool]

    def value(self, literal: int) -> bool:
        positive = self.assignment.get(abs(literal), False)
        return positive if literal > 0 else not positive


@dataclass(frozen=True)
class Unsat:
    core: Tuple[int, ...]


SatOutcome = Union[Sat, Unsat]


@dataclass
class SolverStats:
    solve_calls: int = 0
    shrink_calls: int = 0
    clauses: int = 0


class SatSolver:
    """One incremental solver instance plus the clause log needed for dumps."""

    def __init__(self, backend: str = DEFAULT_SAT_BACKEND):
        self.backend = backend
        self._pool = IDPool()
        self._solver = Solver(name=backend)
        self._clauses: List[List[int]] = []
        self._anonymous = count()
        self._has_empty_clause = False
        self.stats = SolverStats()
        self.deadline: Optional[float] = None

    def __enter__(self) -> "SatSolver":
        return self

    def __exit__(self, *exc_info: Any) -> None:
        self.close()

    def close(self) -> None:
        if self._solver is not None:
            self._solver.delete()
            self._solver = None

    @property
    def top(self) -> int:
        return self._pool.top

    @property
    def clauses(self) -> List[List[int]]:
        return self._clauses

    def new_var(self, key: Optional[Hashable] = None) -> int:
        """Variable for `key` (allocated on first use); anonymous if key is None."""
        if key is None:
            key = ("aux", next(self._anonymous))
        return self._pool.id(key)

    def var_of(self, key: Hashable) -> Optional[int]:
        return self._pool.obj2id.get(key)

    def key_of(self, var: int) -> Hashable:
        return self._pool.obj(abs(var))

    def add_clause(self, literals: Iterable[int]) -> None:
        clause = [int(literal) for literal in literals]
        for literal in clause:
            if literal == 0 or abs(literal) > self._pool.top:
                raise PreconditionError(f"literal {literal} uses an unallocated variable")
        self._clauses.append(clause)
        self.stats.clauses += 1
        if not clause:
            self._has_empty_clause = True
            return
        self._solver.add_clause(clause)

    def solve_under_assumptions(self, assumptions: Sequence[int] = (), counted: bool = True) -> SatOutcome:
        if counted:
            self.stats.solve_calls += 1
        return self._solve(assumptions)

    def _solve(self, assumptions: Sequence[int]) -> SatOutcome:
        assumptions = list(dict.fromkeys(int(literal) for literal in assumptions))
        if self._has_empty_clause:
            return Unsat(())
        if self._solver_answer(assumptions):
            model = self._solver.get_model() or []
            signs = {abs(literal): literal > 0 for literal in model}
            return Sat({var: signs.get(var, False) for var in range(1, self._pool.top + 1)})
        failed = set(self._solver.get_core() or ())
        return Unsat(tuple(literal for literal in assumptions if literal in failed))

    def _solver_answer(self, assumptions: List[int]) -> bool:
        if self.deadline is None:
            return self._solver.solve(assumptions=assumptions)
        remaining = self.deadline - time.monotonic()
        if remaining <= 0:
            raise SolverInterruptedError("solver deadline passed before the call")
        timer = Timer(remaining, self._solver.interrupt)
        timer.start()
        try:
            answer = self._solver.solve_limited(assumptions=assumptions, expect_interrupt=True)
        finally:
            timer.cancel()
            timer.join()
            self._solver.clear_interrupt()
        if answer is None:
            log_message("warning", "SAT call interrupted at the deadline", "solve", "sat", clauses=self.stats.clauses)
            raise SolverInterruptedError("SAT call interrupted at the deadline")
        return answer

    def shrink_core(self, core: Iterable[int]) -> Tuple[int, ...]:
        """Deletion-based minimisation of an unsatisfiable assumption set."""
        self.stats.shrink_calls += 1
        remaining = list(dict.fromkeys(int(literal) for literal in core))
        outcome = self._solve(remaining)
        if isinstance(outcome, Sat):
            raise PreconditionError("shrink_core called with a satisfiable assumption set")
        kept = set(outcome.core)
        remaining = [literal for literal in remaining if literal in kept]

        position = 0
        while position < len(remaining):
            trial = remaining[:position] + remaining[position + 1:]
            outcome = self._solve(trial)
            if isinstance(outcome, Unsat):
                kept = set(outcome.core)
                remaining = [literal for literal in trial if literal in kept]
            else:
                position += 1
        return tuple(remaining)

    def dump_dimacs(self, path, comments: Optional[Sequence[str]] = None) -> None:
        formula = CNF(from_clauses=self._clauses)
        formula.nv = max(formula.nv, self._pool.top)
        formula.to_file(str(path), comments=[f"c {line}" for line in comments or ()])
        log_message(
            "info",
            f"Wrote {len(self._clauses)} clauses over {self._pool.top} variables to {path}",
            "dump_dimacs",
            "sat",
        )

    def keys(self) -> Dict[int, Hashable]:
        return {var: key for key, var in self._pool.obj2id.items()}
