"""
Shared fixtures: the two-letter alphabet `o x`, the equidistant-tokens model
and a handful of DFAs over it.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from inductive_automata.automata import Alphabet, Dfa, universal
from inductive_automata.models import model_path
from inductive_automata.teachers import MembershipCache, RmcTeacher
from inductive_automata.transducer import load_rmc_directory


def dfa_from(alphabet, state_count, accepting, transitions):
    """DFA from {(state, symbol): target}; missing moves go to a sink."""
    return Dfa.from_transitions(
        alphabet,
        state_count,
        0,
        accepting,
        {(state, alphabet.letter(symbol)): target for (state, symbol), target in transitions.items()},
    )


@pytest.fixture
def ox():
    return Alphabet(("o", "x"))


@pytest.fixture
def w(ox):
    """Word parser: w("xoox") -> (1, 0, 0, 1)."""
    return ox.parse_word


@pytest.fixture
def s0(ox):
    """x(oo)*x"""
    return dfa_from(ox, 4, [3], {(0, "x"): 1, (1, "o"): 2, (2, "o"): 1, (1, "x"): 3})


@pytest.fixture
def sb(ox):
    """o*xoxo*"""
    return dfa_from(
        ox, 4, [3], {(0, "o"): 0, (0, "x"): 1, (1, "o"): 2, (2, "x"): 3, (3, "o"): 3}
    )


@pytest.fixture
def invariant(ox):
    """o*x(ΣΣ)*xo*: two tokens with an even gap."""
    return dfa_from(
        ox,
        5,
        [3, 4],
        {
            (0, "o"): 0, (0, "x"): 1,
            (1, "o"): 2, (1, "x"): 3,
            (2, "o"): 1, (2, "x"): 1,
            (3, "o"): 4, (3, "x"): 1,
            (4, "o"): 3, (4, "x"): 3,
        },
    )


@pytest.fixture
def even(ox):
    """Words of even length; both letters toggle the state."""
    return Dfa(ox, np.array([[1, 1], [0, 0]]), 0, frozenset({0}))


@pytest.fixture
def sigma_star(ox):
    return universal(ox)


@pytest.fixture
def equidist_model():
    return load_rmc_directory(model_path("equidist"))


@pytest.fixture
def equidist(equidist_model):
    return RmcTeacher(equidist_model)


@pytest.fixture
def equidist_cache(equidist):
    return MembershipCache(equidist)


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


def random_dfa(rng, alphabet, state_count):
    delta = rng.integers(0, state_count, size=(state_count, len(alphabet)))
    accepting = frozenset(int(state) for state in np.flatnonzero(rng.random(state_count) < 0.5))
    return Dfa(alphabet, delta, 0, accepting)


@pytest.fixture
def make_random_dfa():
    return random_dfa
