"""
SAT encoding of an incomplete observation table.

The instance asks for a prefix-closed basis B ⊆ P and values for the blank
cells such that the filled sub-table over B is sharp and closed and respects
the inductive pairs. Variables:

    B(p)           p is in the basis
    E(p, a, p')    the a-successor of basis state p is p'
    X(w)           membership value chosen for the blank cell w
    ClosSel        activation literal of one closure clause generation

Closure clauses are the only ones that stop being valid when P grows (their
disjunction over P widens), so each generation is guarded by selectors that
are assumed true while current and retired by a unit clause afterwards. Every
other family is monotone and only emitted for the part of the table that is
new since the previous sync.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from .automata import EMPTY_WORD, Dfa, Word
from .config import CoreShrink
from .constants import DEFAULT_SAT_BACKEND
from .logger.logger import log_message
from .sat import Sat, SatOutcome, SatSolver
from .table import ObservationTable, TriBool
from .utils import EncodingInvariantError


@dataclass(frozen=True)
class B:
    prefix: Word


@dataclass(frozen=True)
class E:
    prefix: Word
    letter: int
    target: Word


@dataclass(frozen=True)
class X:
    word: Word


@dataclass(frozen=True)
class ClosSel:
    prefix: Word
    letter: int
    generation: int


@dataclass(frozen=True)
class DistSel:
    generation: int


@dataclass(frozen=True)
class D:
    """Suffix `suffix` tells the rows of `first` and `second` apart."""

    first: Word
    second: Word
    suffix: Word


VarKey = Union[B, E, X, ClosSel, DistSel, D]

# A cell value during encoding: a constant or the literal of X(w)
Nu = Union[bool, int]


@dataclass
class PartialModel:
    """Solver model projected onto the chosen basis."""

    assignment: Dict[VarKey, bool]
    basis: Tuple[Word, ...]
    row_distinct: bool = False

    def cell(self, word: Word) -> Optional[bool]:
        return self.assignment.get(X(word))

    def in_basis(self, prefix: Word) -> bool:
        return bool(self.assignment.get(B(prefix), False))


@dataclass(frozen=True)
class Hypothesis:
    """DFA over the basis; state i is labelled by basis[i]."""

    dfa: Dfa
    basis: Tuple[Word, ...]
    model: PartialModel

    def access_word(self, word: Sequence[int]) -> Word:
        return self.basis[self.dfa.run(word)]

    def partial_computation(self, word: Word, position: int) -> Word:
        return self.access_word(word[:position]) + word[position:]

    def accepts(self, word: Sequence[int]) -> bool:
        return self.dfa.accepts(word)


@dataclass(frozen=True)
class SatResult:
    model: PartialModel


@dataclass(frozen=True)
class UnsatResult:
    core: Tuple[ClosSel, ...]
    raw_core_size: int = 0


SolveResult = Union[SatResult, UnsatResult]


class TableEncoding:
    def __init__(
        self,
        table: ObservationTable,
        backend: str = DEFAULT_SAT_BACKEND,
        core_shrink: CoreShrink = CoreShrink.ONE_PASS,
        prefer_sharp: bool = True,
    ):
        self.table = table
        self.solver = SatSolver(backend)
        self.core_shrink = CoreShrink(core_shrink)
        self.prefer_sharp = prefer_sharp
        self.generation = 0
        self.family_counts: Counter = Counter()
        self._clos_selectors: List[int] = []
        self._dist_generation = 0
        self._dist_selector: Optional[int] = None
        self._known_prefixes: Set[Word] = set()
        self._known_suffixes: Set[Word] = set()
        self._known_pairs: Set[Tuple[Word, Word]] = set()
        self._defined_diffs: Set[D] = set()

    def close(self) -> None:
        self.solver.close()

    @property
    def selectors(self) -> List[int]:
        return list(self._clos_selectors)

    def clause_counts(self) -> Dict[str, int]:
        return dict(self.family_counts)

    def _add(self, literals: Iterable[int], family: str) -> None:
        self.solver.add_clause(literals)
        self.family_counts[family] += 1

    def _var(self, key: VarKey) -> int:
        return self.solver.new_var(key)

    def literal(self, key: VarKey, value: bool = True) -> int:
        """Assumption literal fixing `key`; the variable must already exist."""
        var = self.solver.var_of(key)
        if var is None:
            raise EncodingInvariantError(f"no variable allocated for {key}")
        return var if value else -var

    def nu(self, word: Word) -> Nu:
        status = self.table.cell_value(word)
        if status.decisive:
            return status is TriBool.ONE
        return self._var(X(word))

    def _emit_equal(self, guard: int, left: Nu, right: Nu, family: str) -> None:
        """guard → (left ↔ right), folded when either side is constant."""
        if isinstance(left, bool) and isinstance(right, bool):
            if left != right:
                self._add([-guard], family)
            return
        if isinstance(left, bool):
            left, right = right, left
        if isinstance(right, bool):
            self._add([-guard, left if right else -left], family)
            return
        if left == right:
            return
        self._add([-guard, -left, right], family)
        self._add([-guard, left, -right], family)

    def sync(self) -> None:
        """Emit the clauses for everything the table gained since the last sync."""
        table = self.table
        prefixes = table.prefixes
        letters = range(len(table.alphabet))
        fresh = {prefix for prefix in prefixes if prefix not in self._known_prefixes}
        new_suffixes = [suffix for suffix in table.suffixes if suffix not in self._known_suffixes]
        new_pairs = sorted(table.pairs - self._known_pairs)
        if not (fresh or new_suffixes or new_pairs):
            return
        position = {prefix: index for index, prefix in enumerate(prefixes)}
        before = sum(self.family_counts.values())

        for prefix in prefixes:
            if prefix in fresh:
                self._var(B(prefix))
        for prefix in prefixes:
            for letter in letters:
                for target in prefixes:
                    if prefix in fresh or target in fresh:
                        self._var(E(prefix, letter, target))

        if EMPTY_WORD in fresh:
            self._add([self._var(B(EMPTY_WORD))], "basis")
        for word in prefixes:
            if word in fresh and word:
                parent, letter = word[:-1], word[-1]
                self._add([-self._var(B(word)), self._var(B(parent))], "basis")
                self._add([-self._var(B(word)), self._var(E(parent, letter, word))], "reach")

        for prefix in prefixes:
            for letter in letters:
                extended = prefix + (letter,)
                for target in prefixes:
                    if target == extended:
                        continue
                    suffixes = table.suffixes if (prefix in fresh or target in fresh) else new_suffixes
                    guard = self._var(E(prefix, letter, target))
                    for suffix in suffixes:
                        self._emit_equal(guard, self.nu(extended + suffix), self.nu(target + suffix), "cong")

        if fresh:
            for prefix in prefixes:
                for letter in letters:
                    for index, first in enumerate(prefixes):
                        for second in prefixes[index + 1:]:
                            if prefix in fresh or first in fresh or second in fresh:
                                self._add(
                                    [-self._var(E(prefix, letter, first)), -self._var(E(prefix, letter, second))],
                                    "det",
                                )
            for prefix in prefixes:
                for letter in letters:
                    for target in prefixes:
                        if prefix in fresh or target in fresh:
                            self._add([-self._var(E(prefix, letter, target)), self._var(B(target))], "succ")
            for word in prefixes:
                if not word:
                    continue
                parent, letter = word[:-1], word[-1]
                for earlier in prefixes[: position[word]]:
                    if word in fresh or earlier in fresh:
                        self._add(
                            [
                                -self._var(B(word)),
                                -self._var(B(earlier)),
                                -self._var(E(parent, letter, earlier)),
                            ],
                            "sharp",
                        )

        for first, second in new_pairs:
            self._add([-self._var(X(first)), self._var(X(second))], "ind")

        if fresh:
            self._emit_closure()
        if self.prefer_sharp and (fresh or new_suffixes):
            self._emit_distinct()

        self._known_prefixes.update(fresh)
        self._known_suffixes.update(new_suffixes)
        self._known_pairs.update(new_pairs)
        log_message(
            "debug",
            f"Synced table: +{len(fresh)} prefixes, +{len(new_suffixes)} suffixes, "
            f"+{len(new_pairs)} pairs, +{sum(self.family_counts.values()) - before} clauses",
            "sync",
            "encoding",
            generation=self.generation,
            variables=self.solver.top,
        )

    def _emit_closure(self) -> None:
        for selector in self._clos_selectors:
            self._add([-selector], "clos_retired")
        self.generation += 1
        self._clos_selectors = []
        prefixes = self.table.prefixes
        for prefix in prefixes:
            for letter in range(len(self.table.alphabet)):
                selector = self._var(ClosSel(prefix, letter, self.generation))
                self._add(
                    [-selector, -self._var(B(prefix))]
                    + [self._var(E(prefix, letter, target)) for target in prefixes],
                    "clos",
                )
                self._clos_selectors.append(selector)

    def _emit_distinct(self) -> None:
        """Guarded preference for pairwise distinct basis rows."""
        if self._dist_selector is not None:
            self._add([-self._dist_selector], "distinct_retired")
        self._dist_generation += 1
        selector = self._var(DistSel(self._dist_generation))
        self._dist_selector = selector
        prefixes = self.table.prefixes
        for index, first in enumerate(prefixes):
            for second in prefixes[index + 1:]:
                options: List[int] = []
                separated = False
                for suffix in self.table.suffixes:
                    left, right = self.nu(first + suffix), self.nu(second + suffix)
                    if isinstance(left, bool) and isinstance(right, bool):
                        if left != right:
                            separated = True
                            break
                        continue
                    if left == right:
                        continue
                    key = D(first, second, suffix)
                    differ = self._var(key)
                    if key not in self._defined_diffs:
                        self._defined_diffs.add(key)
                        if isinstance(left, bool):
                            left, right = right, left
                        if isinstance(right, bool):
                            self._add([-differ, -left if right else left], "distinct_def")
                        else:
                            self._add([-differ, left, right], "distinct_def")
                            self._add([-differ, -left, -right], "distinct_def")
                    options.append(differ)
                if separated:
                    continue
                self._add(
                    [-selector, -self._var(B(first)), -self._var(B(second))] + options,
                    "distinct",
                )

    def solve_table(self, extra_assumptions: Sequence[int] = ()) -> SolveResult:
        assumptions = self._clos_selectors + list(extra_assumptions)
        if self.prefer_sharp and self._dist_selector is not None:
            outcome = self.solver.solve_under_assumptions(assumptions + [self._dist_selector])
            if isinstance(outcome, Sat):
                return SatResult(self._project(outcome, row_distinct=True))
        outcome = self.solver.solve_under_assumptions(assumptions)
        if isinstance(outcome, Sat):
            return SatResult(self._project(outcome, row_distinct=False))

        raw = outcome.core
        core = raw
        if self.core_shrink is not CoreShrink.OFF and core:
            core = self.solver.shrink_core(core)
            while self.core_shrink is CoreShrink.FIXPOINT:
                again = self.solver.shrink_core(core)
                if len(again) == len(core):
                    break
                core = again
        selectors = tuple(
            key
            for key in (self.solver.key_of(literal) for literal in core)
            if isinstance(key, ClosSel) and key.generation == self.generation
        )
        if not selectors:
            log_message(
                "error",
                f"UNSAT core without closure selectors (raw size {len(raw)})",
                "solve_table",
                "encoding",
            )
            raise EncodingInvariantError("UNSAT core contains no current closure selector")
        log_message(
            "debug",
            f"UNSAT core of {len(selectors)} closure selectors (raw {len(raw)})",
            "solve_table",
            "encoding",
        )
        return UnsatResult(selectors, len(raw))

    def _project(self, outcome: Sat, row_distinct: bool) -> PartialModel:
        table = self.table

        def value(key: VarKey) -> bool:
            return outcome.value(self.literal(key))

        basis = tuple(prefix for prefix in table.prefixes if value(B(prefix)))
        assignment: Dict[VarKey, bool] = {B(prefix): value(B(prefix)) for prefix in table.prefixes}
        for prefix in basis:
            for letter in range(len(table.alphabet)):
                for target in basis:
                    key = E(prefix, letter, target)
                    assignment[key] = value(key)
        rows = set(basis) | {prefix + (letter,) for prefix in basis for letter in range(len(table.alphabet))}
        for row in rows:
            for suffix in table.suffixes:
                word = row + suffix
                if table.status[word] is TriBool.BLANK and self.solver.var_of(X(word)) is not None:
                    assignment[X(word)] = value(X(word))
        return PartialModel(assignment, basis, row_distinct)

    def value(self, word: Word, model: PartialModel) -> Optional[bool]:
        """ν_m restricted to table cells: teacher first, then the model."""
        status = self.table.status.get(word, TriBool.BLANK)
        if status.decisive:
            return status is TriBool.ONE
        return model.cell(word)

    def hypothesis_from_model(self, model: PartialModel) -> Hypothesis:
        basis = model.basis
        if not basis or basis[0] != EMPTY_WORD:
            raise EncodingInvariantError("basis does not start with the empty word")
        index = {prefix: state for state, prefix in enumerate(basis)}
        letters = len(self.table.alphabet)
        delta = np.zeros((len(basis), letters), dtype=np.int64)
        for prefix in basis:
            if prefix and prefix[:-1] not in index:
                raise EncodingInvariantError(f"basis is not prefix-closed at {self._render(prefix)}")
            for letter in range(letters):
                targets = [target for target in basis if model.assignment.get(E(prefix, letter, target))]
                if len(targets) != 1:
                    raise EncodingInvariantError(
                        f"state {self._render(prefix)} has {len(targets)} successors on "
                        f"{self.table.alphabet.letters[letter]!r}"
                    )
                delta[index[prefix], letter] = index[targets[0]]
        accepting = set()
        for prefix in basis:
            accepted = self.value(prefix, model)
            if accepted is None:
                raise EncodingInvariantError(f"basis word {self._render(prefix)} has no value")
            if accepted:
                accepting.add(index[prefix])
        dfa = Dfa(self.table.alphabet, delta, 0, frozenset(accepting))
        return Hypothesis(dfa, basis, model)

    def check_filled_subtable(self, hypothesis: Hypothesis) -> None:
        """Structural checks of the filled sub-table behind a hypothesis."""
        table = self.table
        model = hypothesis.model
        basis_set = set(hypothesis.basis)

        def filled(word: Word) -> bool:
            value = self.value(word, model)
            if value is None:
                raise EncodingInvariantError(f"cell {self._render(word)} is unfilled")
            return value

        def row(word: Word) -> Tuple[bool, ...]:
            return tuple(filled(word + suffix) for suffix in table.suffixes)

        for state, prefix in enumerate(hypothesis.basis):
            for letter in range(len(table.alphabet)):
                extended = prefix + (letter,)
                target = hypothesis.basis[int(hypothesis.dfa.delta[state, letter])]
                if extended in basis_set and target != extended:
                    raise EncodingInvariantError(
                        f"basis word {self._render(extended)} is not its own successor"
                    )
                if row(extended) != row(target):
                    raise EncodingInvariantError(
                        f"row {self._render(extended)} differs from its successor {self._render(target)}"
                    )
        if model.row_distinct:
            rows = [row(prefix) for prefix in hypothesis.basis]
            if len(set(rows)) != len(rows):
                raise EncodingInvariantError("row-distinct model has two equal basis rows")
        for prefix in hypothesis.basis:
            if hypothesis.accepts(prefix) != filled(prefix):
                raise EncodingInvariantError(f"hypothesis disagrees with the table on {self._render(prefix)}")
        for first, second in table.pairs:
            if model.cell(first) is True and model.cell(second) is False:
                raise EncodingInvariantError(
                    f"inductive pair {table.render_pair((first, second))} is violated"
                )

    def prefixes_from_core(self, core: Iterable[ClosSel]) -> Set[Word]:
        words = {
            selector.prefix + (selector.letter,)
            for selector in core
            if selector.generation == self.generation
        }
        words = {word for word in words if not self.table.is_prefix(word)}
        if not words:
            raise EncodingInvariantError("UNSAT core yields no new prefix")
        return words

    def model_assumptions(self, model: PartialModel) -> List[int]:
        literals = []
        for key, value in model.assignment.items():
            var = self.solver.var_of(key)
            if var is not None:
                literals.append(var if value else -var)
        return literals

    def replay(self, model: PartialModel) -> SatOutcome:
        """Solve the plain instance with `model` asserted; not counted as a learner call."""
        return self.solver.solve_under_assumptions(
            self._clos_selectors + self.model_assumptions(model), counted=False
        )

    def describe(self, key) -> str:
        render = self._render
        if isinstance(key, B):
            return f"b[{render(key.prefix)}]"
        if isinstance(key, E):
            return f"e[{render(key.prefix)},{self.table.alphabet.letters[key.letter]},{render(key.target)}]"
        if isinstance(key, X):
            return f"x[{render(key.word)}]"
        if isinstance(key, ClosSel):
            return f"clos[{render(key.prefix)},{self.table.alphabet.letters[key.letter]}]@{key.generation}"
        if isinstance(key, DistSel):
            return f"distinct@{key.generation}"
        if isinstance(key, D):
            return f"d[{render(key.first)},{render(key.second)},{render(key.suffix)}]"
        return str(key)

    def dump_dimacs(self, path) -> None:
        comments = [f"{var} {self.describe(key)}" for var, key in sorted(self.solver.keys().items())]
        comments += [f"family {name} {count}" for name, count in sorted(self.family_counts.items())]
        self.solver.dump_dimacs(path, comments)

    def _render(self, word: Word) -> str:
        return self.table.alphabet.render(word)
