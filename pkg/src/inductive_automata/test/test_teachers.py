"""
Tests for the separation and RMC teachers and their baselines.
"""

import sys
from collections import deque
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from inductive_automata.automata import (Alphabet, difference, from_words,
                                         universal)
from inductive_automata.models import model_path
from inductive_automata.table import TriBool
from inductive_automata.teachers import (InductiveCex, NonStrictRmcTeacher,
                                         RmcTeacher, SeparationTeacher,
                                         SimpleCex, StrictRmcTeacher, Valid,
                                         Violation, make_rmc_teacher,
                                         teacher_for_model_dir)
from inductive_automata.transducer import Direction, RmcModel, step_words
from inductive_automata.utils import (AlphabetMismatchError,
                                      AutomatonFormatError, PreconditionError,
                                      UnsafeModelError)


def naive_closure(step, seeds, direction):
    seen = set(seeds)
    queue = deque(seeds)
    while queue:
        word = queue.popleft()
        for other in step_words(step, word, direction):
            if other not in seen:
                seen.add(other)
                queue.append(other)
    return seen


def test_membership_matches_naive_fixpoint(equidist, equidist_model, ox):
    step = equidist_model.step
    for length in range(7):
        layer = list(ox.words_of_length(length))
        reachable = naive_closure(step, [u for u in layer if equidist_model.initial_lang.accepts(u)], Direction.FORWARD)
        doomed = naive_closure(step, [u for u in layer if equidist_model.bad_lang.accepts(u)], Direction.BACKWARD)
        for word in layer:
            expected = TriBool.ONE if word in reachable else TriBool.ZERO if word in doomed else TriBool.BLANK
            assert equidist.mem_status(word) is expected


def test_hints_match_the_closure_formula(equidist, equidist_model, ox, w):
    step = equidist_model.step
    blanks = [word for word in ox.words_of_length(6) if equidist.mem_status(word) is TriBool.BLANK]
    for word in blanks:
        candidates = set(blanks) - {word}
        expected = {(word, later) for later in naive_closure(step, [word], Direction.FORWARD) & candidates}
        expected |= {(earlier, word) for earlier in naive_closure(step, [word], Direction.BACKWARD) & candidates}
        assert equidist.mem_hints(word, candidates) == expected

    assert equidist.mem_hints(w("xooxo"), {w("oxxoo"), w("xx")}) == {
        (w("xooxo"), w("oxxoo")),
        (w("oxxoo"), w("xooxo")),
    }
    answer = equidist.mem(w("oxxoo"), {w("xooxo")})
    assert answer.status is TriBool.BLANK
    assert answer.pairs == {(w("oxxoo"), w("xooxo")), (w("xooxo"), w("oxxoo"))}


def test_hints_need_an_unknown_word(equidist, w):
    with pytest.raises(PreconditionError):
        equidist.mem_hints(w("xx"), {w("oo")})


def test_validity_answers(equidist, sigma_star, invariant, even, w):
    assert equidist.validate(sigma_star) == SimpleCex(w("xox"))
    assert equidist.validate(invariant) == Valid()
    assert equidist.validate(even) == SimpleCex(w("oxox"))
    assert equidist.stats.val_calls == 3


def test_inductive_counterexample(equidist, invariant, ox, w):
    """Dropping oxxoo breaks closure under the step from xooxo; both are unknown."""
    hypothesis = difference(invariant, from_words(ox, [w("oxxoo")]))
    assert equidist.validate(hypothesis) == InductiveCex(w("xooxo"), w("oxxoo"))


def test_inductive_step_with_decisive_end_becomes_simple(equidist, s0, ox, w):
    # Post(xoox) = oxxo is reachable, so the teacher reports it directly
    assert equidist.validate(s0) == SimpleCex(w("oxxo"))


def test_certify(equidist, sigma_star, invariant, w):
    assert equidist.certify(invariant) is None
    assert equidist.certify(sigma_star) == Violation("invariant ∩ bad = ∅", w("xox"))
    assert equidist.stats.val_calls == 0


def test_baseline_teachers_fill_unknowns(equidist_model, w):
    strict = StrictRmcTeacher(equidist_model)
    lenient = NonStrictRmcTeacher(equidist_model)
    assert strict.mem_status(w("o")) is TriBool.ZERO
    assert lenient.mem_status(w("o")) is TriBool.ONE
    assert strict.mem_status(w("xx")) is lenient.mem_status(w("xx")) is TriBool.ONE
    assert strict.mem_status(w("xox")) is lenient.mem_status(w("xox")) is TriBool.ZERO
    assert isinstance(make_rmc_teacher(equidist_model, "strict"), StrictRmcTeacher)
    with pytest.raises(PreconditionError):
        make_rmc_teacher(equidist_model, "lenient")


def test_unsafe_model_is_reported(equidist_model, w):
    teacher = RmcTeacher(RmcModel(equidist_model.initial_lang, universal(equidist_model.alphabet), equidist_model.step))
    with pytest.raises(UnsafeModelError) as caught:
        teacher.mem_status(w("xx"))
    assert caught.value.witness == w("xx")


def test_separation_teacher():
    ab = Alphabet(("a", "b"))
    teacher = teacher_for_model_dir(model_path("sep_ab"))
    assert isinstance(teacher, SeparationTeacher)
    assert teacher.mem_status(ab.parse_word("abab")) is TriBool.ONE
    assert teacher.mem_status(ab.parse_word("baa")) is TriBool.ZERO
    assert teacher.mem_status(ab.parse_word("b")) is TriBool.BLANK
    assert teacher.mem_hints(ab.parse_word("b"), {ab.parse_word("ba")}) == frozenset()
    assert teacher.validate(universal(ab)) == SimpleCex(ab.parse_word("aa"))
    assert teacher.certify(teacher.positive) is None

    with pytest.raises(UnsafeModelError):
        SeparationTeacher(teacher.positive, universal(ab))
    with pytest.raises(AlphabetMismatchError):
        teacher.validate(universal(Alphabet(("o", "x"))))


def test_model_directory_must_hold_a_model(tmp_path):
    with pytest.raises(AutomatonFormatError):
        teacher_for_model_dir(tmp_path)
