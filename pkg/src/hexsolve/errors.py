"""Exception hierarchy for the hexsolve package.

Every error raised by the pipeline derives from HexError so the CLI can
map failures to a diagnostic and a nonzero exit code.
"""

from __future__ import annotations


class HexError(Exception):
    """Base class for all hexsolve errors."""


class ParseError(HexError):
    """Syntax error in program text, with 1-based line/column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ArityClashError(HexError):
    """A predicate is used with two different arities in one program."""

    def __init__(self, predicate: str, seen: int, expected: int):
        super().__init__(
            f"predicate '{predicate}' used with arity {seen} but previously with {expected}"
        )
        self.predicate = predicate


class MalformedPropertyTagError(HexError):
    """A property tag does not match the property catalogue."""

    def __init__(self, token: str, message: str):
        super().__init__(f"property '{token}': {message}")
        self.token = token


class LinkError(HexError):
    """An external atom cannot be resolved against the registry."""


class UnknownExternalError(LinkError):
    def __init__(self, name: str):
        super().__init__(f"external source '&{name}' is not registered")
        self.name = name


class SignatureMismatchError(LinkError):
    """External atom inputs/outputs do not fit the registered signature."""


class DuplicateNameError(HexError):
    def __init__(self, name: str):
        super().__init__(f"external source '{name}' is already registered")
        self.name = name


class ExternalSourceError(HexError):
    """An oracle function failed or misbehaved during evaluation."""


class FunctionalityViolationError(ExternalSourceError):
    """A source declared functional returned two distinct output tuples."""

    def __init__(self, name: str, tuples):
        super().__init__(
            f"functional source '&{name}' returned {len(tuples)} distinct tuples: "
            + ", ".join(str(t) for t in sorted(tuples, key=str)[:4])
        )
        self.name = name
        self.tuples = tuples


class IntegerOverflowError(ExternalSourceError):
    """Integer arithmetic in a source left the signed 64-bit range."""


class GroundingError(HexError):
    """The grounder cannot instantiate the program."""


class NonTerminationError(GroundingError):
    """Grounding iteration cap exceeded with the safety check disabled."""

    def __init__(self, iterations: int):
        super().__init__(
            f"grounding did not stabilize within {iterations} iterations "
            "(safety check is disabled; the program may have no finite grounding)"
        )
        self.iterations = iterations


class CheckExplosionError(HexError):
    """Minimality check is too large for brute force and search is disabled."""

    def __init__(self, true_atoms: int, cap: int):
        super().__init__(
            f"minimality check over {true_atoms} true atoms exceeds cap {cap} "
            "and the search-based fallback is disabled"
        )
        self.true_atoms = true_atoms
        self.cap = cap


class RaggedRowsError(HexError):
    """CSV rows have differing field counts."""

    def __init__(self, path: str, line: int, got: int, expected: int):
        super().__init__(f"{path}:{line}: row has {got} fields, expected {expected}")
        self.line = line


class CsvValueError(HexError):
    """A CSV field contains characters the plain-field format rejects."""


class CliError(HexError):
    """Bad command-line usage."""
