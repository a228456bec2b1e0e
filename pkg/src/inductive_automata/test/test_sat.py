"""
Tests for the incremental SAT wrapper: truth-table agreement, assumption
cores and their shrinking.
"""

import sys
import time
from itertools import product
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from inductive_automata.sat import Sat, SatSolver, Unsat
from inductive_automata.utils import PreconditionError, SolverInterruptedError


def brute_force_sat(variables, clauses):
    for bits in product((False, True), repeat=variables):
        if all(any(bits[abs(lit) - 1] == (lit > 0) for lit in clause) for clause in clauses):
            return True
    return False


def test_agrees_with_truth_table():
    rng = np.random.default_rng(7)
    for _ in range(15):
        with SatSolver() as solver:
            variables = [solver.new_var(("v", index)) for index in range(12)]
            clauses = []
            for _ in range(int(rng.integers(20, 70))):
                chosen = rng.choice(variables, size=3, replace=False)
                signs = rng.choice([-1, 1], size=3)
                clauses.append([int(var * sign) for var, sign in zip(chosen, signs)])
            for clause in clauses:
                solver.add_clause(clause)
            outcome = solver.solve_under_assumptions()
            assert isinstance(outcome, Sat) == brute_force_sat(12, clauses)
            if isinstance(outcome, Sat):
                assert all(any(outcome.value(lit) for lit in clause) for clause in clauses)


def test_keys_and_empty_clause():
    with SatSolver() as solver:
        a = solver.new_var("a")
        assert solver.new_var("a") == a
        assert solver.var_of("a") == a
        assert solver.var_of("b") is None
        assert solver.key_of(-a) == "a"
        solver.add_clause([])
        assert solver.solve_under_assumptions() == Unsat(())


def test_unallocated_literal_is_rejected():
    with SatSolver() as solver:
        solver.new_var("a")
        with pytest.raises(PreconditionError):
            solver.add_clause([1, 5])


def test_core_and_shrinking():
    with SatSolver() as solver:
        selectors = [solver.new_var(("sel", index)) for index in range(4)]
        x = solver.new_var("x")
        # sel0 -> x, sel1 -> -x, sel2 and sel3 are irrelevant
        solver.add_clause([-selectors[0], x])
        solver.add_clause([-selectors[1], -x])
        solver.add_clause([-selectors[2], x, -x])

        outcome = solver.solve_under_assumptions(selectors)
        assert isinstance(outcome, Unsat)
        assert set(outcome.core) <= set(selectors)
        assert {selectors[0], selectors[1]} <= set(outcome.core)

        core = solver.shrink_core(selectors)
        assert sorted(core) == sorted(selectors[:2])
        # a shrunk core is still unsatisfiable on its own
        assert isinstance(solver.solve_under_assumptions(core), Unsat)

        with pytest.raises(PreconditionError):
            solver.shrink_core([selectors[0]])


def test_random_guarded_cores_are_unsat():
    rng = np.random.default_rng(11)
    for _ in range(10):
        with SatSolver() as solver:
            variables = [solver.new_var(("v", index)) for index in range(6)]
            selectors = [solver.new_var(("s", index)) for index in range(25)]
            for selector in selectors:
                chosen = rng.choice(variables, size=2, replace=False)
                signs = rng.choice([-1, 1], size=2)
                solver.add_clause([-selector] + [int(var * sign) for var, sign in zip(chosen, signs)])
            outcome = solver.solve_under_assumptions(selectors)
            if isinstance(outcome, Sat):
                continue
            core = solver.shrink_core(outcome.core)
            assert isinstance(solver.solve_under_assumptions(core), Unsat)
            for position in range(len(core)):
                smaller = core[:position] + core[position + 1:]
                assert isinstance(solver.solve_under_assumptions(smaller), Sat)


def test_solve_call_counting_and_dimacs(tmp_path):
    with SatSolver() as solver:
        a, b = solver.new_var("a"), solver.new_var("b")
        solver.add_clause([a, b])
        solver.solve_under_assumptions([-a])
        solver.solve_under_assumptions([-b], counted=False)
        assert solver.stats.solve_calls == 1
        assert solver.stats.clauses == 1

        path = tmp_path / "tiny.cnf"
        solver.dump_dimacs(path, comments=["1 a", "2 b"])
        text = path.read_text()
        assert "c 1 a" in text
        assert "p cnf 2 1" in text
        assert "1 2 0" in text


def test_deadline_interrupts_a_long_call():
    """Eleven pigeons in ten holes keeps minisat busy far past half a second."""
    from pysat.examples.genhard import PHP

    formula = PHP(10)
    with SatSolver() as solver:
        for index in range(formula.nv):
            solver.new_var(("pigeon", index))
        for clause in formula.clauses:
            solver.add_clause(clause)

        solver.deadline = time.monotonic() + 0.5
        started = time.monotonic()
        with pytest.raises(SolverInterruptedError):
            solver.solve_under_assumptions()
        assert time.monotonic() - started < 5.0
        with pytest.raises(SolverInterruptedError):
            solver.solve_under_assumptions()


def test_deadline_in_the_future_still_answers():
    with SatSolver() as solver:
        a, b = solver.new_var("a"), solver.new_var("b")
        solver.add_clause([a, b])
        solver.add_clause([-a])
        solver.deadline = time.monotonic() + 60
        outcome = solver.solve_under_assumptions()
        assert isinstance(outcome, Sat) and outcome.value(b)
        assert isinstance(solver.solve_under_assumptions([-b]), Unsat)
        assert solver.shrink_core([-b, a]) in ((-b,), (a,))
