"""CSV interoperability: read facts from CSV lines, write extensions back.

Fields are plain: a field containing a quote character is rejected and
commas always separate (no RFC-4180 quoting). Line i of a k-field file
becomes predicate(i, f1, ..., fk); integer-looking fields become integer
constants, everything else a quoted string.
"""

from __future__ import annotations

import re
from typing import Iterable

from .errors import CsvValueError, RaggedRowsError
from .terms import Atom, Constant

_INT_RE = re.compile(r"-?\d+$")


def _field_term(field: str) -> Constant:
    if _INT_RE.match(field):
        return Constant(int(field))
    return Constant(field, quoted=True)


def csv_ingest(predicate: str, path: str) -> "list[Atom]":
    """Facts predicate(line_number, fields...) from a headerless CSV file."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    facts: list[Atom] = []
    width = None
    for number, line in enumerate(lines, start=1):
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise RaggedRowsError(path, number, len(fields), width)
        for field in fields:
            if '"' in field:
                raise CsvValueError(
                    f"{path}:{number}: field {field!r} contains a quote character"
                )
        args = [Constant(number)] + [_field_term(f) for f in fields]
        facts.append(Atom(predicate, tuple(args)))
    return facts


def _format_field(term) -> str:
    if isinstance(term, Constant):
        return str(term.value)
    return str(term)


def csv_emit(predicate: str, answer_set: Iterable[Atom], path: str) -> None:
    """Extension of `predicate` as CSV rows, lexicographically ordered.

    Strings are written unquoted, so ingest followed by emitting the
    fields (minus the line number) reproduces a well-formed input file.
    """
    rows = sorted(
        ",".join(_format_field(t) for t in atom.args)
        for atom in answer_set
        if atom.predicate == predicate
    )
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(row + "\n")
