"""Three-valued assignments over ground atoms."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .terms import Atom, Constant, atom_key


class Truth(enum.Enum):
    TRUE = "T"
    FALSE = "F"
    UNKNOWN = "U"

    def __repr__(self) -> str:
        return self.value


T, F, U = Truth.TRUE, Truth.FALSE, Truth.UNKNOWN


@dataclass(frozen=True)
class Assignment:
    """Mapping from ground atoms to T/F/U.

    Atoms not listed in `values` take `default`. Solver candidates and
    oracle views use default FALSE (atoms outside the universe are false
    in every answer set); free-standing partial assignments use UNKNOWN.
    """

    values: "Mapping[Atom, Truth]" = field(default_factory=dict)
    default: Truth = Truth.UNKNOWN

    @classmethod
    def from_true(cls, atoms: Iterable[Atom], default: Truth = Truth.FALSE):
        return cls({a: T for a in atoms}, default)

    def value(self, atom: Atom) -> Truth:
        return self.values.get(atom, self.default)

    def is_true(self, atom: Atom) -> bool:
        return self.value(atom) is T

    def is_false(self, atom: Atom) -> bool:
        return self.value(atom) is F

    def true_atoms(self) -> "frozenset[Atom]":
        return frozenset(a for a, v in self.values.items() if v is T)

    def unknown_atoms(self) -> "frozenset[Atom]":
        return frozenset(a for a, v in self.values.items() if v is U)

    def is_complete_over(self, atoms: Iterable[Atom]) -> bool:
        return all(self.value(a) is not U for a in atoms)

    def restrict(self, atoms: Iterable[Atom]) -> "Assignment":
        """View over `atoms` only, closed-world outside (default FALSE)."""
        return Assignment({a: self.value(a) for a in atoms}, F)

    def with_unknown(self, atom: Atom) -> "Assignment":
        updated = dict(self.values)
        updated[atom] = U
        return Assignment(updated, self.default)

    def extension(self, predicate: str) -> "frozenset[tuple]":
        """Argument tuples of the true atoms over `predicate`."""
        return frozenset(
            a.args for a, v in self.values.items() if v is T and a.predicate == predicate
        )

    def cache_key(self) -> tuple:
        """Hashable identity of the explicit part, for oracle memoization."""
        items = sorted(self.values.items(), key=lambda kv: atom_key(kv[0]))
        return (self.default, tuple((a, v) for a, v in items))

    def __str__(self) -> str:
        parts = [
            f"{v.value} {a}" for a, v in sorted(self.values.items(), key=lambda kv: atom_key(kv[0]))
        ]
        return "{" + ", ".join(parts) + "}"


def integer_extension(assignment: Assignment, predicate: str) -> "list[int]":
    """Integer constants c with predicate(c) true, for sum-style sources."""
    out = []
    for args in assignment.extension(predicate):
        if len(args) == 1 and isinstance(args[0], Constant) and isinstance(args[0].value, int):
            if not args[0].quoted:
                out.append(args[0].value)
    return out
