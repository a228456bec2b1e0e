"""
Incomplete but inductive teachers.

A teacher answers membership with 1, 0 or "don't know", may back a "don't
know" with inductive pairs (w1, w2) meaning "if w1 is in the target, so is
w2", and answers validity queries with either a simple counterexample or an
inductive one. Two constructions are provided: separation of two regular
languages, and regular model checking of a length-preserving transition
system, plus the strict and non-strict baselines of the latter.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import AbstractSet, Dict, FrozenSet, Iterable, Optional, Sequence, Tuple, Union

from .automata import (Alphabet, Dfa, Word, difference, intersect, load_dfa,
                       shortest_accepted, sort_shortlex, union,
                       words_of_length)
from .constants import RMC_MODEL_FILES, SEPARATION_MODEL_FILES, TEACHER_KINDS
from .logger.logger import log_message
from .table import TriBool, WordPair
from .transducer import (Direction, RmcModel, image, load_rmc_directory,
                         load_rmc_model, star_finite, step_words)
from .utils import (AlphabetMismatchError, AutomatonFormatError,
                    PreconditionError, UnsafeModelError)


@dataclass(frozen=True)
class MemAnswer:
    status: TriBool
    pairs: FrozenSet[WordPair] = frozenset()


@dataclass(frozen=True)
class Valid:
    pass


@dataclass(frozen=True)
class SimpleCex:
    word: Word


@dataclass(frozen=True)
class InductiveCex:
    first: Word
    second: Word


ValAnswer = Union[Valid, SimpleCex, InductiveCex]


@dataclass(frozen=True)
class Violation:
    """First failing validity condition of a candidate and its witness."""

    condition: str
    witness: Word


@dataclass
class TeacherStats:
    mem_status_calls: int = 0
    mem_hint_calls: int = 0
    val_calls: int = 0


class Teacher(ABC):
    mode = "abstract"
    kind = "idmat"

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.stats = TeacherStats()

    def mem_status(self, word: Sequence[int]) -> TriBool:
        self.stats.mem_status_calls += 1
        return self._status(self.alphabet.check_word(word))

    def mem_hints(self, word: Sequence[int], candidates: Iterable[Word]) -> FrozenSet[WordPair]:
        word = self.alphabet.check_word(word)
        if self._status(word).decisive:
            raise PreconditionError(
                f"hint query on {self.alphabet.render(word)}, whose status is decisive"
            )
        self.stats.mem_hint_calls += 1
        return self._hints(word, frozenset(candidates))

    def mem(self, word: Sequence[int], candidates: Iterable[Word] = ()) -> MemAnswer:
        """Full membership answer: a status plus, when unknown, the hint pairs."""
        status = self.mem_status(word)
        if status.decisive:
            return MemAnswer(status)
        return MemAnswer(status, self.mem_hints(word, candidates))

    def validate(self, hypothesis: Dfa) -> ValAnswer:
        self.stats.val_calls += 1
        if hypothesis.alphabet != self.alphabet:
            raise AlphabetMismatchError("hypothesis alphabet differs from the teacher's")
        answer = self._validate(hypothesis)
        log_message(
            "debug",
            f"Validity query on {hypothesis.state_count}-state hypothesis: {self._render_answer(answer)}",
            "validate",
            "teachers",
        )
        return answer

    def _render_answer(self, answer: ValAnswer) -> str:
        if isinstance(answer, SimpleCex):
            return f"simple counterexample {self.alphabet.render(answer.word)}"
        if isinstance(answer, InductiveCex):
            return (
                f"inductive counterexample ({self.alphabet.render(answer.first)}, "
                f"{self.alphabet.render(answer.second)})"
            )
        return "valid"

    @abstractmethod
    def _status(self, word: Word) -> TriBool:
        ...

    @abstractmethod
    def _hints(self, word: Word, candidates: FrozenSet[Word]) -> FrozenSet[WordPair]:
        ...

    @abstractmethod
    def _validate(self, hypothesis: Dfa) -> ValAnswer:
        ...

    @abstractmethod
    def certify(self, hypothesis: Dfa) -> Optional[Violation]:
        """Uncounted check of every validity condition."""


def _first_violation(checks: Sequence[Tuple[str, Dfa]]) -> Optional[Violation]:
    for condition, witnesses in checks:
        witness = shortest_accepted(witnesses)
        if witness is not None:
            return Violation(condition, witness)
    return None


class SeparationTeacher(Teacher):
    """Target class: every regular H with positive ⊆ H and H ∩ negative = ∅."""

    mode = "sep"

    def __init__(self, positive: Dfa, negative: Dfa):
        if positive.alphabet != negative.alphabet:
            raise AlphabetMismatchError("positive and negative languages use different alphabets")
        super().__init__(positive.alphabet)
        self.positive = positive
        self.negative = negative
        overlap = shortest_accepted(intersect(positive, negative))
        if overlap is not None:
            log_message(
                "error",
                f"Positive and negative languages share {self.alphabet.render(overlap)}",
                "init",
                "teachers",
            )
            raise UnsafeModelError(
                f"no separator exists: {self.alphabet.render(overlap)} is both positive and negative",
                overlap,
            )

    def _status(self, word: Word) -> TriBool:
        if self.positive.accepts(word):
            return TriBool.ONE
        if self.negative.accepts(word):
            return TriBool.ZERO
        return TriBool.BLANK

    def _hints(self, word: Word, candidates: FrozenSet[Word]) -> FrozenSet[WordPair]:
        return frozenset()

    def _validate(self, hypothesis: Dfa) -> ValAnswer:
        witness = shortest_accepted(
            union(difference(self.positive, hypothesis), intersect(hypothesis, self.negative))
        )
        return Valid() if witness is None else SimpleCex(witness)

    def certify(self, hypothesis: Dfa) -> Optional[Violation]:
        return _first_violation(
            [
                ("positive ⊆ separator", difference(self.positive, hypothesis)),
                ("separator ∩ negative = ∅", intersect(hypothesis, self.negative)),
            ]
        )


class RmcTeacher(Teacher):
    """Target class: every regular inductive invariant of the transition system."""

    mode = "rmc"

    def __init__(self, model: RmcModel):
        super().__init__(model.alphabet)
        self.model = model
        self._layers: Dict[int, Tuple[FrozenSet[Word], FrozenSet[Word]]] = {}
        self._closures: Dict[Tuple[Word, Direction], FrozenSet[Word]] = {}

    def layer(self, length: int) -> Tuple[FrozenSet[Word], FrozenSet[Word]]:
        """Post*(S0 ∩ Σⁿ) and Pre*(Sb ∩ Σⁿ) for n = length, memoised."""
        if length not in self._layers:
            step = self.model.step
            reachable = star_finite(step, words_of_length(self.model.initial_lang, length), Direction.FORWARD)
            doomed = star_finite(step, words_of_length(self.model.bad_lang, length), Direction.BACKWARD)
            if reachable & doomed:
                witness = sort_shortlex(word for word in reachable if self.model.bad_lang.accepts(word))[0]
                log_message(
                    "error",
                    f"Bad configuration {self.alphabet.render(witness)} is reachable",
                    "layer",
                    "teachers",
                    length=length,
                )
                raise UnsafeModelError(
                    f"bad configuration {self.alphabet.render(witness)} is reachable", witness
                )
            self._layers[length] = (reachable, doomed)
            log_message(
                "debug",
                f"Layer {length}: {len(reachable)} reachable, {len(doomed)} co-reachable",
                "layer",
                "teachers",
            )
        return self._layers[length]

    def closure(self, word: Word, direction: Direction) -> FrozenSet[Word]:
        key = (word, direction)
        if key not in self._closures:
            self._closures[key] = star_finite(self.model.step, [word], direction)
        return self._closures[key]

    def _status(self, word: Word) -> TriBool:
        reachable, doomed = self.layer(len(word))
        if word in reachable:
            return TriBool.ONE
        if word in doomed:
            return TriBool.ZERO
        return TriBool.BLANK

    def _hints(self, word: Word, candidates: FrozenSet[Word]) -> FrozenSet[WordPair]:
        same_length = {candidate for candidate in candidates if len(candidate) == len(word)}
        if not same_length:
            return frozenset()
        forward = self.closure(word, Direction.FORWARD) & same_length
        backward = self.closure(word, Direction.BACKWARD) & same_length
        return frozenset({(word, later) for later in forward} | {(earlier, word) for earlier in backward})

    def _validate(self, hypothesis: Dfa) -> ValAnswer:
        model = self.model
        witness = shortest_accepted(
            union(difference(model.initial_lang, hypothesis), intersect(hypothesis, model.bad_lang))
        )
        if witness is not None:
            return SimpleCex(witness)
        second = shortest_accepted(difference(image(model.step, hypothesis, Direction.FORWARD), hypothesis))
        if second is None:
            return Valid()
        first = next(
            candidate
            for candidate in step_words(model.step, second, Direction.BACKWARD)
            if hypothesis.accepts(candidate)
        )
        if self._status(first) is TriBool.ZERO:
            return SimpleCex(first)
        if self._status(second) is TriBool.ONE:
            return SimpleCex(second)
        return InductiveCex(first, second)

    def certify(self, hypothesis: Dfa) -> Optional[Violation]:
        model = self.model
        return _first_violation(
            [
                ("initial ⊆ invariant", difference(model.initial_lang, hypothesis)),
                ("invariant ∩ bad = ∅", intersect(hypothesis, model.bad_lang)),
                (
                    "Post(invariant) ⊆ invariant",
                    difference(image(model.step, hypothesis, Direction.FORWARD), hypothesis),
                ),
            ]
        )


class StrictRmcTeacher(RmcTeacher):
    """Answers 0 wherever the inductive teacher does not know."""

    kind = "strict"

    def _status(self, word: Word) -> TriBool:
        status = super()._status(word)
        return TriBool.ZERO if status is TriBool.BLANK else status


class NonStrictRmcTeacher(RmcTeacher):
    """Answers 1 wherever the inductive teacher does not know."""

    kind = "nonstrict"

    def _status(self, word: Word) -> TriBool:
        status = super()._status(word)
        return TriBool.ONE if status is TriBool.BLANK else status


RMC_TEACHERS = {
    "idmat": RmcTeacher,
    "strict": StrictRmcTeacher,
    "nonstrict": NonStrictRmcTeacher,
}


class MembershipCache:
    """Per-run memo in front of a teacher: each distinct query is asked once."""

    def __init__(self, teacher: Teacher):
        self.teacher = teacher
        self._statuses: Dict[Word, TriBool] = {}
        self._hints: Dict[Tuple[Word, FrozenSet[Word]], FrozenSet[WordPair]] = {}

    def status(self, word: Word) -> TriBool:
        if word not in self._statuses:
            self._statuses[word] = self.teacher.mem_status(word)
        return self._statuses[word]

    def hints(self, word: Word, candidates: AbstractSet[Word]) -> FrozenSet[WordPair]:
        candidates = frozenset(candidates)
        if not candidates:
            return frozenset()
        key = (word, candidates)
        if key not in self._hints:
            self._hints[key] = self.teacher.mem_hints(word, candidates)
        return self._hints[key]

    def value(self, word: Word) -> Optional[bool]:
        return self.status(word).as_bool()

    @property
    def queried_words(self) -> FrozenSet[Word]:
        return frozenset(self._statuses)


def make_rmc_teacher(model: RmcModel, kind: str = "idmat") -> RmcTeacher:
    if kind not in RMC_TEACHERS:
        raise PreconditionError(f"unknown teacher kind {kind!r}; expected one of {', '.join(TEACHER_KINDS)}")
    return RMC_TEACHERS[kind](model)


def separation_teacher_from_files(positive_path, negative_path) -> SeparationTeacher:
    return SeparationTeacher(load_dfa(positive_path), load_dfa(negative_path))


def rmc_teacher_from_files(initial_path, bad_path, step_path, kind: str = "idmat") -> RmcTeacher:
    return make_rmc_teacher(load_rmc_model(initial_path, bad_path, step_path), kind)


def rmc_teacher_from_directory(directory, kind: str = "idmat") -> RmcTeacher:
    return make_rmc_teacher(load_rmc_directory(directory), kind)


def teacher_for_model_dir(directory, kind: str = "idmat") -> Teacher:
    """Build the teacher a bench model directory describes."""
    directory = Path(directory)
    if all((directory / name).is_file() for name in RMC_MODEL_FILES.values()):
        return rmc_teacher_from_directory(directory, kind)
    if all((directory / name).is_file() for name in SEPARATION_MODEL_FILES.values()):
        return separation_teacher_from_files(
            directory / SEPARATION_MODEL_FILES["positive"],
            directory / SEPARATION_MODEL_FILES["negative"],
        )
    raise AutomatonFormatError("directory holds neither an RMC nor a separation model", str(directory))
