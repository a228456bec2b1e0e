"""
Tests for transducer steps, images and finite fixpoints on the
equidistant-tokens model.
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from inductive_automata.transducer import (Direction, RmcModel, image,
                                           load_rmc_directory,
                                           parse_transducer, star_finite,
                                           step_words)
from inductive_automata.utils import (AlphabetMismatchError,
                                      AutomatonFormatError, PreconditionError)


def test_step_words_forward(equidist_model, w):
    step = equidist_model.step
    assert step_words(step, w("xooxo")) == [w("oxxoo")]
    assert step_words(step, w("oxxoo")) == [w("xooxo")]
    assert step_words(step, w("oxoxo")) == [w("xooox")]
    assert step_words(step, w("xx")) == []
    assert step_words(step, w("ooo")) == []


def test_step_words_on_long_words(equidist_model, ox):
    step = equidist_model.step
    apart = ox.parse_word("x" + "o" * 1198 + "x")
    together = ox.parse_word("ox" + "o" * 1196 + "xo")
    assert step_words(step, apart) == [together]
    assert step_words(step, apart, Direction.BACKWARD) == [together]
    inner = ox.parse_word("oox" + "o" * 1194 + "xoo")
    assert step_words(step, together, Direction.BACKWARD) == [inner, apart]
    assert step_words(step, together) == [inner, apart]


def test_step_words_backward_inverts_forward(equidist_model, ox, w):
    step = equidist_model.step
    assert w("xooxo") in step_words(step, w("oxxoo"), Direction.BACKWARD)
    for word in ox.words_up_to(6):
        for later in step_words(step, word):
            assert word in step_words(step, later, Direction.BACKWARD)


def test_image_matches_enumeration(equidist_model, ox):
    step = equidist_model.step
    s0 = equidist_model.initial_lang
    post = image(step, s0, Direction.FORWARD)
    pre = image(step, equidist_model.bad_lang, Direction.BACKWARD)
    for length in range(7):
        layer = [word for word in ox.words_of_length(length)]
        successors = {later for word in layer if s0.accepts(word) for later in step_words(step, word)}
        predecessors = {
            earlier
            for word in layer
            if equidist_model.bad_lang.accepts(word)
            for earlier in step_words(step, word, Direction.BACKWARD)
        }
        for word in layer:
            assert post.accepts(word) == (word in successors)
            assert pre.accepts(word) == (word in predecessors)


def test_star_finite(equidist_model, w):
    step = equidist_model.step
    reachable = star_finite(step, [w("xoooox")])
    assert reachable == {w("xoooox"), w("oxooxo"), w("ooxxoo")}
    doomed = star_finite(step, [w("oxox")], Direction.BACKWARD)
    assert w("xoox") not in doomed
    assert w("oxox") in doomed
    with pytest.raises(PreconditionError):
        star_finite(step, [w("x"), w("xo")])


def test_parse_transducer_rejects_bad_lines():
    with pytest.raises(AutomatonFormatError):
        parse_transducer("alphabet o x\nstates 1\ninitial 0\ntrans 0 o 0\n")


def test_model_alphabets_must_agree(equidist_model):
    from inductive_automata.automata import Alphabet, universal

    with pytest.raises(AlphabetMismatchError):
        RmcModel(universal(Alphabet(("a", "b"))), equidist_model.bad_lang, equidist_model.step)


def test_load_rmc_directory_needs_all_files(tmp_path):
    with pytest.raises(AutomatonFormatError):
        load_rmc_directory(tmp_path)
