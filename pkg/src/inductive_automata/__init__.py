"""
__init__.py for the inductive_automata package.

Active learning of regular invariants and separators from teachers that may
answer "don't know" but promise inductive pairs among the unknown words.
"""

from ._version import __version__
from .automata import (EMPTY_WORD, Alphabet, Dfa, Nfa, Word, complement,
                       determinize, dump_dfa, equivalent, intersect, is_empty,
                       is_subset, load_dfa, minimize, parse_dfa, save_dfa,
                       shortest_accepted, sort_shortlex, union)
from .bench import read_rows, run_bench, summarize, write_rows
from .config import (BenchConfig, ConfigError, CoreShrink, LearnerConfig,
                     RsStrategy)
from .encoding import Hypothesis, PartialModel, TableEncoding
from .learner import (ContractViolation, Learner, LearnOutcome, LearnStats,
                      Success, Timeout, Unsafe, find_breaking_interval,
                      find_breaking_rectangle, run)
from .table import ObservationTable, TriBool
from .teachers import (InductiveCex, MembershipCache, NonStrictRmcTeacher,
                       RmcTeacher, SeparationTeacher, SimpleCex,
                       StrictRmcTeacher, Teacher, Valid, make_rmc_teacher,
                       teacher_for_model_dir)
from .transducer import (Direction, RmcModel, Transducer, image,
                         load_rmc_directory, load_transducer, parse_transducer)
from .utils import (AlphabetMismatchError, AutomatonFormatError,
                    ContractViolationError, EncodingInvariantError,
                    InductiveAutomataError, MalformedWordError,
                    PreconditionError, UnsafeModelError)
