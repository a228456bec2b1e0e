"""
Length-preserving transducers: the one-step relation of a regular transition
system, its images on regular languages, and fixpoints on finite word sets.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple

from .automata import (Alphabet, Dfa, Nfa, Word, determinize, load_dfa,
                       parse_automaton_text, sort_shortlex)
from .constants import RMC_MODEL_FILES
from .logger.logger import log_message
from .utils import (AlphabetMismatchError, AutomatonFormatError,
                    PreconditionError)

Move = Tuple[int, int]
TransducerTransition = Tuple[int, int, int, int]


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class Transducer:
    """Letter-to-letter transducer; every transition reads and writes one letter."""

    alphabet: Alphabet
    state_count: int
    initial: FrozenSet[int]
    accepting: FrozenSet[int]
    transitions: FrozenSet[TransducerTransition]

    def __post_init__(self):
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        states = range(self.state_count)
        letters = range(len(self.alphabet))
        if not self.initial or any(state not in states for state in self.initial | self.accepting):
            raise AutomatonFormatError("transducer initial/accepting states out of range")
        for source, read, write, target in self.transitions:
            if source not in states or target not in states or read not in letters or write not in letters:
                raise AutomatonFormatError(
                    f"transducer transition {(source, read, write, target)} out of range"
                )

    @cached_property
    def _forward_moves(self) -> Dict[Move, Tuple[Move, ...]]:
        table: Dict[Move, List[Move]] = {}
        for source, read, write, target in sorted(self.transitions):
            table.setdefault((source, read), []).append((write, target))
        return {key: tuple(moves) for key, moves in table.items()}

    @cached_property
    def _backward_moves(self) -> Dict[Move, Tuple[Move, ...]]:
        table: Dict[Move, List[Move]] = {}
        for source, read, write, target in sorted(self.transitions):
            table.setdefault((source, write), []).append((read, target))
        return {key: tuple(moves) for key, moves in table.items()}

    def moves(self, direction: Direction) -> Dict[Move, Tuple[Move, ...]]:
        """Map (state, consumed letter) to (produced letter, next state) pairs."""
        if Direction(direction) is Direction.FORWARD:
            return self._forward_moves
        return self._backward_moves


@dataclass(frozen=True)
class RmcModel:
    """Regular transition system: initial configurations, bad ones, one step."""

    initial_lang: Dfa
    bad_lang: Dfa
    step: Transducer

    def __post_init__(self):
        if not (self.initial_lang.alphabet == self.bad_lang.alphabet == self.step.alphabet):
            raise AlphabetMismatchError("initial, bad and step automata must share one alphabet")

    @property
    def alphabet(self) -> Alphabet:
        return self.step.alphabet


def step_words(t: Transducer, word: Sequence[int], direction: Direction = Direction.FORWARD) -> List[Word]:
    """Words related to `word` by one step, shortlex-sorted."""
    word = t.alphabet.check_word(word)
    moves = t.moves(direction)
    reached: List[FrozenSet[int]] = [t.initial]
    for letter in word:
        reached.append(
            frozenset(target for state in reached[-1] for _, target in moves.get((state, letter), ()))
        )
    # tails[q]: outputs of the rest of the word read from state q
    tails: Dict[int, Set[Word]] = {state: {()} for state in reached[-1] & t.accepting}
    for position in range(len(word) - 1, -1, -1):
        previous = tails
        tails = {}
        for state in reached[position]:
            produced = {
                (letter,) + tail
                for letter, target in moves.get((state, word[position]), ())
                for tail in previous.get(target, ())
            }
            if produced:
                tails[state] = produced
    return sort_shortlex(set().union(*tails.values()))


def image(t: Transducer, lang: Dfa, direction: Direction = Direction.FORWARD) -> Dfa:
    """DFA of Post(L) (forward) or Pre(L) (backward)."""
    if t.alphabet != lang.alphabet:
        raise AlphabetMismatchError(
            f"image: alphabets {t.alphabet.letters} and {lang.alphabet.letters} differ"
        )
    forward = Direction(direction) is Direction.FORWARD
    pairs: Dict[Tuple[int, int], int] = {}
    queue = deque()
    for state in sorted(t.initial):
        pair = (state, lang.initial)
        pairs[pair] = len(pairs)
        queue.append(pair)

    transitions = set()
    by_source: Dict[int, List[TransducerTransition]] = {}
    for transition in sorted(t.transitions):
        by_source.setdefault(transition[0], []).append(transition)

    while queue:
        pair = queue.popleft()
        t_state, l_state = pair
        for _, read, write, target in by_source.get(t_state, ()):
            consumed, emitted = (read, write) if forward else (write, read)
            successor = (target, int(lang.delta[l_state, consumed]))
            if successor not in pairs:
                pairs[successor] = len(pairs)
                queue.append(successor)
            transitions.add((pairs[pair], emitted, pairs[successor]))

    accepting = frozenset(
        index
        for (t_state, l_state), index in pairs.items()
        if t_state in t.accepting and l_state in lang.accepting
    )
    nfa = Nfa(
        t.alphabet,
        len(pairs),
        frozenset(pairs[(state, lang.initial)] for state in t.initial),
        accepting,
        frozenset(transitions),
    )
    return determinize(nfa)


def star_finite(
    t: Transducer, seed: Iterable[Sequence[int]], direction: Direction = Direction.FORWARD
) -> FrozenSet[Word]:
    """Least set containing `seed` and closed under one step in `direction`."""
    ordered = sort_shortlex({t.alphabet.check_word(word) for word in seed})
    if len({len(word) for word in ordered}) > 1:
        raise PreconditionError("star_finite needs a seed of words of one length")
    visited: Set[Word] = set(ordered)
    queue = deque(ordered)
    while queue:
        current = queue.popleft()
        for successor in step_words(t, current, direction):
            if successor not in visited:
                visited.add(successor)
                queue.append(successor)
    return frozenset(visited)


def parse_transducer(text: str, source: str = "<text>") -> Transducer:
    raw = parse_automaton_text(text, source, 2)
    transitions = frozenset(
        (state, labels[0], labels[1], target) for state, labels, target, _ in raw.transitions
    )
    return Transducer(raw.alphabet, raw.state_count, frozenset(raw.initial), frozenset(raw.accepting), transitions)


def load_transducer(path) -> Transducer:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        log_message("error", f"Cannot read transducer {path}: {error}", "load_transducer", "transducer")
        raise AutomatonFormatError(f"cannot read file: {error}", str(path)) from error
    transducer = parse_transducer(text, str(path))
    log_message(
        "debug",
        f"Loaded transducer with {transducer.state_count} states and "
        f"{len(transducer.transitions)} transitions from {path}",
        "load_transducer",
        "transducer",
    )
    return transducer


def load_rmc_model(initial_path, bad_path, step_path) -> RmcModel:
    return RmcModel(load_dfa(initial_path), load_dfa(bad_path), load_transducer(step_path))


def load_rmc_directory(directory) -> RmcModel:
    directory = Path(directory)
    return load_rmc_model(
        directory / RMC_MODEL_FILES["initial"],
        directory / RMC_MODEL_FILES["bad"],
        directory / RMC_MODEL_FILES["step"],
    )
