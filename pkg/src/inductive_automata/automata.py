"""
Finite automata over a small explicit alphabet.

Words are tuples of letter indices; the package-wide word order is shortlex
(length first, then lexicographic on letter indices). DFAs carry a total
transition table as a read-only numpy array of shape (states, letters).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .constants import (AUTOMATON_HEADER_KEYWORDS, COMMENT_PATTERN,
                        EPSILON_SYMBOL, WHITESPACE_PATTERN)
from .logger.logger import log_message
from .utils import (AlphabetMismatchError, AutomatonFormatError,
                    MalformedWordError, render_template)

Word = Tuple[int, ...]
EMPTY_WORD: Word = ()


def shortlex_key(word: Word) -> Tuple[int, Word]:
    return (len(word), word)


def sort_shortlex(words: Iterable[Word]) -> List[Word]:
    return sorted(words, key=shortlex_key)


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of letter symbols; a letter's index is its position."""

    letters: Tuple[str, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise AutomatonFormatError("alphabet must not be empty")
        if len(set(letters)) != len(letters):
            raise AutomatonFormatError(f"duplicate symbols in alphabet {letters}")
        for symbol in letters:
            if not symbol or WHITESPACE_PATTERN.search(symbol) or symbol == EPSILON_SYMBOL:
                raise AutomatonFormatError(f"invalid alphabet symbol {symbol!r}")

    @cached_property
    def index(self) -> Dict[str, int]:
        return {symbol: position for position, symbol in enumerate(self.letters)}

    @property
    def size(self) -> int:
        return len(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def letter(self, symbol: str) -> int:
        try:
            return self.index[symbol]
        except KeyError:
            raise MalformedWordError(
                f"symbol {symbol!r} is not in alphabet {' '.join(self.letters)}"
            ) from None

    def check_word(self, word: Sequence[int]) -> Word:
        word = tuple(word)
        for letter in word:
            if not 0 <= letter < len(self.letters):
                raise MalformedWordError(
                    f"letter index {letter} out of range for alphabet of size {len(self.letters)}"
                )
        return word

    def parse_word(self, text: str) -> Word:
        """Parse 'xoox', 'a b a' or 'ε' into a word."""
        text = text.strip()
        if text in ("", EPSILON_SYMBOL):
            return EMPTY_WORD
        if all(len(symbol) == 1 for symbol in self.letters) and not WHITESPACE_PATTERN.search(text):
            return tuple(self.letter(symbol) for symbol in text)
        return tuple(self.letter(symbol) for symbol in WHITESPACE_PATTERN.split(text))

    def parse_words(self, *texts: str) -> List[Word]:
        return [self.parse_word(text) for text in texts]

    def render(self, word: Sequence[int]) -> str:
        if not word:
            return EPSILON_SYMBOL
        separator = "" if all(len(symbol) == 1 for symbol in self.letters) else " "
        return separator.join(self.letters[letter] for letter in word)

    def words_of_length(self, length: int) -> Iterator[Word]:
        """All words of the given length in lexicographic order."""
        return product(range(len(self.letters)), repeat=length)

    def words_up_to(self, length: int) -> Iterator[Word]:
        """All words of length at most `length` in shortlex order."""
        for size in range(length + 1):
            yield from self.words_of_length(size)


@dataclass(frozen=True, eq=False)
class Dfa:
    """Complete deterministic automaton."""

    alphabet: Alphabet
    delta: np.ndarray
    initial: int = 0
    accepting: FrozenSet[int] = field(default_factory=frozenset)

    def __post_init__(self):
        delta = np.array(self.delta, dtype=np.int64, copy=True)
        if delta.ndim != 2 or delta.shape[0] == 0 or delta.shape[1] != len(self.alphabet):
            raise AutomatonFormatError(
                f"transition table of shape {delta.shape} does not match "
                f"{len(self.alphabet)} letters"
            )
        if delta.min() < 0 or delta.max() >= delta.shape[0]:
            raise AutomatonFormatError("transition target out of range")
        if not 0 <= self.initial < delta.shape[0]:
            raise AutomatonFormatError(f"initial state {self.initial} out of range")
        accepting = frozenset(int(state) for state in self.accepting)
        if any(not 0 <= state < delta.shape[0] for state in accepting):
            raise AutomatonFormatError("accepting state out of range")
        delta.setflags(write=False)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "accepting", accepting)

    @property
    def state_count(self) -> int:
        return int(self.delta.shape[0])

    @cached_property
    def accepting_mask(self) -> np.ndarray:
        mask = np.zeros(self.state_count, dtype=bool)
        mask[list(self.accepting)] = True
        mask.setflags(write=False)
        return mask

    def run(self, word: Sequence[int], start: Optional[int] = None) -> int:
        state = self.initial if start is None else start
        letters = len(self.alphabet)
        for letter in word:
            if not 0 <= letter < letters:
                raise MalformedWordError(
                    f"letter index {letter} out of range for alphabet of size {letters}"
                )
            state = int(self.delta[state, letter])
        return state

    def accepts(self, word: Sequence[int]) -> bool:
        return self.run(word) in self.accepting

    def __contains__(self, word: Sequence[int]) -> bool:
        return self.accepts(word)

    def __repr__(self) -> str:
        return (
            f"Dfa(states={self.state_count}, initial={self.initial}, "
            f"accepting={sorted(self.accepting)}, alphabet={self.alphabet.letters})"
        )

    @classmethod
    def from_transitions(
        cls,
        alphabet: Alphabet,
        state_count: int,
        initial: int,
        accepting: Iterable[int],
        transitions: Mapping[Tuple[int, int], int],
    ) -> "Dfa":
        """Build a DFA from a partial table, completing it with a rejecting sink."""
        missing = [
            (state, letter)
            for state in range(state_count)
            for letter in range(len(alphabet))
            if (state, letter) not in transitions
        ]
        total = state_count + 1 if missing else state_count
        delta = np.full((total, len(alphabet)), total - 1, dtype=np.int64)
        for (state, letter), target in transitions.items():
            delta[state, letter] = target
        return cls(alphabet, delta, initial, frozenset(accepting))


@dataclass(frozen=True)
class Nfa:
    """Nondeterministic automaton; intermediate result of transducer images."""

    alphabet: Alphabet
    state_count: int
    initial: FrozenSet[int]
    accepting: FrozenSet[int]
    transitions: FrozenSet[Tuple[int, int, int]]

    @cached_property
    def successors(self) -> Dict[Tuple[int, int], FrozenSet[int]]:
        table: Dict[Tuple[int, int], set] = {}
        for source, letter, target in self.transitions:
            table.setdefault((source, letter), set()).add(target)
        return {key: frozenset(targets) for key, targets in table.items()}

    def accepts(self, word: Sequence[int]) -> bool:
        current = set(self.initial)
        for letter in word:
            current = {
                target
                for state in current
                for target in self.successors.get((state, letter), ())
            }
            if not current:
                return False
        return bool(current & self.accepting)


def _require_same_alphabet(a: Dfa, b: Dfa, operation: str) -> None:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatchError(
            f"{operation}: alphabets {a.alphabet.letters} and {b.alphabet.letters} differ"
        )


def _restrict_to_reachable(
    alphabet: Alphabet, table: np.ndarray, initial: int, accepting_mask: np.ndarray
) -> Dfa:
    """Keep the states reachable from `initial`, numbered in BFS order."""
    order = [initial]
    seen = np.zeros(table.shape[0], dtype=bool)
    seen[initial] = True
    queue = deque(order)
    while queue:
        state = queue.popleft()
        for target in table[state]:
            if not seen[target]:
                seen[target] = True
                order.append(int(target))
                queue.append(int(target))
    renumber = np.full(table.shape[0], -1, dtype=np.int64)
    renumber[order] = np.arange(len(order))
    delta = renumber[table[order]]
    accepting = frozenset(np.flatnonzero(accepting_mask[order]).tolist())
    return Dfa(alphabet, delta, 0, accepting)


def _product(a: Dfa, b: Dfa, combine: Callable[[np.ndarray, np.ndarray], np.ndarray], operation: str) -> Dfa:
    _require_same_alphabet(a, b, operation)
    right = b.state_count
    table = (a.delta[:, None, :] * right + b.delta[None, :, :]).reshape(
        a.state_count * right, len(a.alphabet)
    )
    mask = combine(a.accepting_mask[:, None], b.accepting_mask[None, :]).reshape(-1)
    return _restrict_to_reachable(a.alphabet, table, a.initial * right + b.initial, mask)


def accepts(dfa: Dfa, word: Sequence[int]) -> bool:
    return dfa.accepts(word)


def complement(dfa: Dfa) -> Dfa:
    rejecting = frozenset(range(dfa.state_count)) - dfa.accepting
    return Dfa(dfa.alphabet, dfa.delta, dfa.initial, rejecting)


def intersect(a: Dfa, b: Dfa) -> Dfa:
    return _product(a, b, np.logical_and, "intersect")


def union(a: Dfa, b: Dfa) -> Dfa:
    return _product(a, b, np.logical_or, "union")


def difference(a: Dfa, b: Dfa) -> Dfa:
    """Words of `a` that `b` rejects."""
    return _product(a, b, lambda left, right: left & ~right, "difference")


def symmetric_difference(a: Dfa, b: Dfa) -> Dfa:
    return _product(a, b, np.logical_xor, "symmetric_difference")


def universal(alphabet: Alphabet) -> Dfa:
    return Dfa(alphabet, np.zeros((1, len(alphabet)), dtype=np.int64), 0, frozenset({0}))


def empty(alphabet: Alphabet) -> Dfa:
    return Dfa(alphabet, np.zeros((1, len(alphabet)), dtype=np.int64), 0, frozenset())


def from_words(alphabet: Alphabet, words: Iterable[Sequence[int]]) -> Dfa:
    """DFA of a finite language (a prefix tree plus a sink)."""
    nodes: Dict[Word, int] = {EMPTY_WORD: 0}
    transitions: Dict[Tuple[int, int], int] = {}
    accepting = set()
    for word in sort_shortlex(alphabet.check_word(word) for word in words):
        for cut in range(1, len(word) + 1):
            prefix = word[:cut]
            if prefix not in nodes:
                nodes[prefix] = len(nodes)
                transitions[(nodes[prefix[:-1]], prefix[-1])] = nodes[prefix]
        accepting.add(nodes[word])
    return Dfa.from_transitions(alphabet, len(nodes), 0, accepting, transitions)


def shortest_accepted(dfa: Dfa) -> Optional[Word]:
    """Shortlex-least accepted word, or None for the empty language."""
    parent: Dict[int, Tuple[int, int]] = {}
    seen = {dfa.initial}
    queue = deque([dfa.initial])
    while queue:
        state = queue.popleft()
        if state in dfa.accepting:
            letters = []
            cursor = state
            while cursor in parent:
                cursor, letter = parent[cursor]
                letters.append(letter)
            return tuple(reversed(letters))
        for letter in range(len(dfa.alphabet)):
            target = int(dfa.delta[state, letter])
            if target not in seen:
                seen.add(target)
                parent[target] = (state, letter)
                queue.append(target)
    return None


def is_empty(dfa: Dfa) -> bool:
    return shortest_accepted(dfa) is None


def words_of_length(dfa: Dfa, length: int) -> List[Word]:
    """Accepted words of exactly `length` letters, shortlex-sorted."""
    if length < 0:
        raise MalformedWordError(f"negative length {length}")
    # live[r][q]: some word of length r leads from q to acceptance
    live = [dfa.accepting_mask]
    for _ in range(length):
        live.append(live[-1][dfa.delta].any(axis=1))

    if not live[length][dfa.initial]:
        return []
    # one layer per position; expanding letters in order keeps each layer sorted
    layer: List[Tuple[int, Word]] = [(dfa.initial, EMPTY_WORD)]
    for remaining in range(length, 0, -1):
        layer = [
            (target, prefix + (letter,))
            for state, prefix in layer
            for letter, target in enumerate(dfa.delta[state].tolist())
            if live[remaining - 1][target]
        ]
    return [prefix for _, prefix in layer]


def equivalent(a: Dfa, b: Dfa) -> Tuple[bool, Optional[Word]]:
    """Language equality plus the shortlex-least distinguishing word."""
    witness = shortest_accepted(symmetric_difference(a, b))
    return witness is None, witness


def is_subset(a: Dfa, b: Dfa) -> Tuple[bool, Optional[Word]]:
    witness = shortest_accepted(difference(a, b))
    return witness is None, witness


def reachable(dfa: Dfa) -> Dfa:
    return _restrict_to_reachable(dfa.alphabet, dfa.delta, dfa.initial, dfa.accepting_mask)


def minimize(dfa: Dfa) -> Dfa:
    """Minimal complete DFA by Moore partition refinement (reporting only)."""
    trimmed = reachable(dfa)
    labels = trimmed.accepting_mask.astype(np.int64)
    block_count = len(np.unique(labels))
    while True:
        signature = np.column_stack([labels, labels[trimmed.delta]])
        _, refined = np.unique(signature, axis=0, return_inverse=True)
        refined = refined.reshape(-1)
        refined_count = int(refined.max()) + 1
        labels = refined
        if refined_count == block_count:
            break
        block_count = refined_count
    quotient = np.zeros((block_count, len(dfa.alphabet)), dtype=np.int64)
    quotient[labels] = labels[trimmed.delta]
    mask = np.zeros(block_count, dtype=bool)
    mask[labels[trimmed.accepting_mask]] = True
    return _restrict_to_reachable(dfa.alphabet, quotient, int(labels[trimmed.initial]), mask)


def determinize(nfa: Nfa) -> Dfa:
    """Subset construction; only reachable subsets are built."""
    start = frozenset(nfa.initial)
    subsets: Dict[FrozenSet[int], int] = {start: 0}
    queue = deque([start])
    rows: List[List[int]] = []
    accepting = set()
    while queue:
        current = queue.popleft()
        index = subsets[current]
        if current & nfa.accepting:
            accepting.add(index)
        row = []
        for letter in range(len(nfa.alphabet)):
            target = frozenset(
                successor
                for state in current
                for successor in nfa.successors.get((state, letter), ())
            )
            if target not in subsets:
                subsets[target] = len(subsets)
                queue.append(target)
            row.append(subsets[target])
        rows.append(row)
    log_message(
        "debug",
        f"Determinized NFA with {nfa.state_count} states into {len(rows)} subsets",
        "determinize",
        "automata",
    )
    return Dfa(nfa.alphabet, np.array(rows, dtype=np.int64), 0, frozenset(accepting))


class RawAutomaton:
    """Header fields and transitions of an .aut/.trd text, before validation."""

    def __init__(self, source: str):
        self.source = source
        self.alphabet: Optional[Alphabet] = None
        self.state_count: Optional[int] = None
        self.initial: List[int] = []
        self.accepting: List[int] = []
        self.transitions: List[Tuple[int, Tuple[int, ...], int, int]] = []


def parse_automaton_text(text: str, source: str, labels_per_transition: int) -> RawAutomaton:
    """Parse the shared line format; `labels_per_transition` is 1 (.aut) or 2 (.trd)."""
    raw = RawAutomaton(source)

    def state_number(token: str, line_number: int) -> int:
        try:
            number = int(token)
        except ValueError:
            raise AutomatonFormatError(f"expected a state number, got {token!r}", source, line_number) from None
        if raw.state_count is None:
            raise AutomatonFormatError("'states' must precede state references", source, line_number)
        if not 0 <= number < raw.state_count:
            raise AutomatonFormatError(f"state {number} out of range", source, line_number)
        return number

    for line_number, line in enumerate(text.splitlines(), start=1):
        line = COMMENT_PATTERN.sub("", line).strip()
        if not line:
            continue
        keyword, *tokens = WHITESPACE_PATTERN.split(line)
        if keyword == "alphabet":
            raw.alphabet = Alphabet(tuple(tokens))
        elif keyword == "states":
            if len(tokens) != 1 or not tokens[0].isdigit() or int(tokens[0]) < 1:
                raise AutomatonFormatError("'states' takes one positive integer", source, line_number)
            raw.state_count = int(tokens[0])
        elif keyword == "initial":
            raw.initial.extend(state_number(token, line_number) for token in tokens)
        elif keyword == "accepting":
            raw.accepting.extend(state_number(token, line_number) for token in tokens)
        elif keyword == "trans":
            if raw.alphabet is None:
                raise AutomatonFormatError("'alphabet' must precede transitions", source, line_number)
            if len(tokens) != labels_per_transition + 2:
                raise AutomatonFormatError(
                    f"'trans' takes {labels_per_transition + 2} fields", source, line_number
                )
            try:
                labels = tuple(raw.alphabet.letter(symbol) for symbol in tokens[1:-1])
            except MalformedWordError as error:
                raise AutomatonFormatError(str(error), source, line_number) from error
            raw.transitions.append(
                (state_number(tokens[0], line_number), labels, state_number(tokens[-1], line_number), line_number)
            )
        else:
            raise AutomatonFormatError(
                f"unknown keyword {keyword!r}; expected one of {', '.join(AUTOMATON_HEADER_KEYWORDS)}",
                source,
                line_number,
            )

    if raw.alphabet is None or raw.state_count is None:
        raise AutomatonFormatError("missing 'alphabet' or 'states' line", source)
    if not raw.initial:
        raise AutomatonFormatError("missing 'initial' line", source)
    return raw


def parse_dfa(text: str, source: str = "<text>") -> Dfa:
    raw = parse_automaton_text(text, source, 1)
    if len(raw.initial) != 1:
        raise AutomatonFormatError("a DFA has exactly one initial state", source)
    transitions: Dict[Tuple[int, int], int] = {}
    for state, (letter,), target, line_number in raw.transitions:
        if (state, letter) in transitions:
            raise AutomatonFormatError(
                f"duplicate transition for state {state} on {raw.alphabet.letters[letter]!r}",
                source,
                line_number,
            )
        transitions[(state, letter)] = target
    return Dfa.from_transitions(raw.alphabet, raw.state_count, raw.initial[0], raw.accepting, transitions)


def load_dfa(path) -> Dfa:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        log_message("error", f"Cannot read automaton {path}: {error}", "load_dfa", "automata")
        raise AutomatonFormatError(f"cannot read file: {error}", str(path)) from error
    dfa = parse_dfa(text, str(path))
    log_message("debug", f"Loaded {dfa!r} from {path}", "load_dfa", "automata")
    return dfa


def dump_dfa(dfa: Dfa, comment: Optional[str] = None) -> str:
    """Render a DFA in the .aut format."""
    transitions = [
        (state, dfa.alphabet.letters[letter], int(dfa.delta[state, letter]))
        for state in range(dfa.state_count)
        for letter in range(len(dfa.alphabet))
    ]
    return render_template(
        "automaton.aut.j2",
        comment=comment,
        alphabet=dfa.alphabet.letters,
        state_count=dfa.state_count,
        initial=dfa.initial,
        accepting=sorted(dfa.accepting),
        transitions=transitions,
    )


def save_dfa(dfa: Dfa, path, comment: Optional[str] = None) -> None:
    Path(path).write_text(dump_dfa(dfa, comment), encoding="utf-8")
