import importlib.resources as pkg_resources
import traceback
from typing import Any, Optional

from jinja2 import Template

from .logger.logger import log_message


class InductiveAutomataError(Exception):
    """Base exception of the inductive_automata package."""

    category = "Inductive Automata Error"


class MalformedWordError(InductiveAutomataError):
    category = "Malformed Word"


class AlphabetMismatchError(InductiveAutomataError):
    category = "Alphabet Mismatch"


class AutomatonFormatError(InductiveAutomataError):
    """Raised when an .aut or .trd source cannot be parsed."""

    category = "Automaton Format Error"

    def __init__(self, message: str, source: str = "<text>", line: int = 0):
        location = f"{source}:{line}" if line else source
        super().__init__(f"{location}: {message}")
        self.source = source
        self.line = line


class PreconditionError(InductiveAutomataError):
    """An operation was called outside its contract."""

    category = "Precondition Error"


class EncodingInvariantError(InductiveAutomataError):
    """The SAT encoding produced something its construction rules out."""

    category = "Encoding Invariant Violation"


class ContractViolationError(InductiveAutomataError):
    """A learner-level guarantee failed (endpoint property, progress, re-solve)."""

    category = "Contract Violation"


class SolverInterruptedError(InductiveAutomataError):
    """A SAT call ran past the solver deadline and was interrupted."""

    category = "Solver Interrupted"


class UnsafeModelError(InductiveAutomataError):
    """No invariant or separator can exist; carries the offending word."""

    category = "Unsafe Model"

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


def import_file(package: str, resource: str) -> str:
    """Read a text resource shipped inside the package."""
    try:
        log_message(
            "debug", f"Importing file {resource} from package {package}", "import_file", "utils"
        )
        content = pkg_resources.files(package).joinpath(resource).read_text(
            encoding="utf-8"
        )
        if not content:
            log_message(
                "warning",
                f"Imported file {resource} from package {package} is empty",
                "import_file",
                "utils",
            )
        return content
    except Exception as error:
        log_message(
            "error",
            f"Error importing file {resource} from package {package}: {error}",
            "import_file",
            "utils",
        )
        log_message("debug", f"Traceback: {traceback.format_exc()}", "import_file", "utils")
        raise InductiveAutomataError(
            f"Error importing file {resource} from package {package}: {error}"
        ) from error


def render_template(resource: str, **context: Any) -> str:
    """Render one of the packaged jinja2 templates."""
    template_string = import_file("inductive_automata.templates", resource)
    jinja_template = Template(template_string, keep_trailing_newline=True)
    return jinja_template.render(**context)
