"""
Incomplete observation table.

Cells are keyed by the concatenated word, so rows that spell the same word
share one status. The table only stores what the teacher said; the values the
SAT model fills in for blank cells live in the encoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Set, Tuple

from .automata import EMPTY_WORD, Alphabet, Word, sort_shortlex
from .constants import BLANK_SYMBOL
from .logger.logger import log_message
from .utils import ContractViolationError, PreconditionError, render_template

if TYPE_CHECKING:
    from .teachers import MembershipCache

WordPair = Tuple[Word, Word]


class TriBool(Enum):
    ZERO = 0
    ONE = 1
    BLANK = 2

    @property
    def decisive(self) -> bool:
        return self is not TriBool.BLANK

    @classmethod
    def of(cls, value: Optional[bool]) -> "TriBool":
        if value is None:
            return cls.BLANK
        return cls.ONE if value else cls.ZERO

    def as_bool(self) -> Optional[bool]:
        if self is TriBool.BLANK:
            return None
        return self is TriBool.ONE

    @property
    def symbol(self) -> str:
        return {TriBool.ZERO: "0", TriBool.ONE: "1", TriBool.BLANK: BLANK_SYMBOL}[self]


@dataclass
class TableDelta:
    """What one extend_and_fill call added."""

    prefixes: List[Word] = field(default_factory=list)
    suffixes: List[Word] = field(default_factory=list)
    cells: List[Word] = field(default_factory=list)
    pairs: Set[WordPair] = field(default_factory=set)

    @property
    def empty(self) -> bool:
        return not (self.prefixes or self.suffixes or self.cells or self.pairs)


class ObservationTable:
    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.prefixes: List[Word] = []
        self.suffixes: List[Word] = []
        self.status: Dict[Word, TriBool] = {}
        self.incomplete: Set[Word] = set()
        self.pairs: Set[WordPair] = set()
        self._prefix_set: Set[Word] = set()
        self._suffix_set: Set[Word] = set()

    def is_prefix(self, word: Word) -> bool:
        return word in self._prefix_set

    def is_suffix(self, word: Word) -> bool:
        return word in self._suffix_set

    def frontier(self) -> List[Word]:
        """Rows of P·Σ that are not themselves prefixes, shortlex-sorted."""
        return sort_shortlex(
            {
                prefix + (letter,)
                for prefix in self.prefixes
                for letter in range(len(self.alphabet))
            }
            - self._prefix_set
        )

    def rows(self) -> List[Word]:
        return self.prefixes + self.frontier()

    def cell_words(self) -> Set[Word]:
        return {row + suffix for row in self.rows() for suffix in self.suffixes}

    def is_cell(self, word: Word) -> bool:
        return word in self.status

    def cell_value(self, word: Word) -> TriBool:
        try:
            return self.status[word]
        except KeyError:
            raise PreconditionError(
                f"{self.alphabet.render(word)} is not a cell of the table"
            ) from None

    def row(self, prefix: Word) -> Tuple[TriBool, ...]:
        return tuple(self.cell_value(prefix + suffix) for suffix in self.suffixes)

    def extend_and_fill(
        self,
        new_prefixes: Iterable[Word],
        new_suffixes: Iterable[Word],
        oracle: "MembershipCache",
    ) -> TableDelta:
        """Add prefixes (prefix-closed) and suffixes, then query every new cell."""
        delta = TableDelta()

        for word in sort_shortlex(set(new_prefixes)):
            for cut in range(len(word) + 1):
                prefix = self.alphabet.check_word(word[:cut])
                if prefix not in self._prefix_set:
                    self._prefix_set.add(prefix)
                    delta.prefixes.append(prefix)
        if delta.prefixes:
            self.prefixes = sort_shortlex(self._prefix_set)

        for suffix in sort_shortlex(set(new_suffixes)):
            suffix = self.alphabet.check_word(suffix)
            if suffix not in self._suffix_set:
                self._suffix_set.add(suffix)
                self.suffixes.append(suffix)
                delta.suffixes.append(suffix)

        if not (delta.prefixes or delta.suffixes):
            return delta

        newcomers: List[Word] = []
        for word in sort_shortlex(self.cell_words() - self.status.keys()):
            status = oracle.status(word)
            self.status[word] = status
            delta.cells.append(word)
            if status is TriBool.BLANK:
                newcomers.append(word)
        self.incomplete.update(newcomers)

        for word in newcomers:
            candidates = self.incomplete - {word}
            for pair in sorted(oracle.hints(word, candidates)):
                if word not in pair or not set(pair) <= self.incomplete:
                    raise ContractViolationError(
                        f"hint pair {self.render_pair(pair)} for "
                        f"{self.alphabet.render(word)} leaves the incomplete cells"
                    )
                if pair not in self.pairs:
                    self.pairs.add(pair)
                    delta.pairs.add(pair)

        log_message(
            "debug",
            f"Table now |P|={len(self.prefixes)} |S|={len(self.suffixes)} "
            f"cells={len(self.status)} blank={len(self.incomplete)} pairs={len(self.pairs)}",
            "extend_and_fill",
            "table",
        )
        return delta

    def render_pair(self, pair: WordPair) -> str:
        return f"({self.alphabet.render(pair[0])}, {self.alphabet.render(pair[1])})"

    def render(self, fill: Optional[Dict[Word, bool]] = None) -> str:
        """Aligned text dump; `fill` supplies model values for blank cells."""
        fill = fill or {}
        header = [self.alphabet.render(suffix) for suffix in self.suffixes]

        def entry(word: Word) -> str:
            status = self.status[word]
            if status is TriBool.BLANK and word in fill:
                return f"[{int(fill[word])}]"
            return status.symbol

        def render_rows(rows: List[Word]) -> List[Tuple[str, List[str]]]:
            return [
                (self.alphabet.render(row), [entry(row + suffix) for suffix in self.suffixes])
                for row in rows
            ]

        prefix_rows = render_rows(self.prefixes)
        frontier_rows = render_rows(self.frontier())
        everything = [label for label, _ in prefix_rows + frontier_rows] + [""]
        label_width = max(len(label) for label in everything)
        widths = [
            max([len(header[column])] + [len(cells[column]) for _, cells in prefix_rows + frontier_rows])
            for column in range(len(header))
        ]
        return render_template(
            "table.txt.j2",
            header=header,
            widths=widths,
            label_width=label_width,
            prefix_rows=prefix_rows,
            frontier_rows=frontier_rows,
            pairs=[self.render_pair(pair) for pair in sorted(self.pairs)],
        )


def initial_table(alphabet: Alphabet, oracle: "MembershipCache") -> ObservationTable:
    table = ObservationTable(alphabet)
    table.extend_and_fill([EMPTY_WORD], [EMPTY_WORD], oracle)
    return table
