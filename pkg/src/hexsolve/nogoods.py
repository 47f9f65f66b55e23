"""Nogoods and the translation of a ground program into a nogood store.

A nogood is a set of signed literals that must not all hold at once.
Rules become nogoods forbidding "body satisfied, every head atom false";
each ground external atom contributes a replacement atom e and partner
atom ne with exactly-one nogoods, realizing the truth-value guess.
Ordinary atoms that no rule can derive are fixed false.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .grounding import GroundProgram
from .terms import Atom, ExternalAtom, atom_key

# (atom, sign): sign True means "atom assigned true" satisfies the literal.
SignedLiteral = "tuple[Atom, bool]"


@dataclass(frozen=True)
class Nogood:
    literals: "frozenset[tuple[Atom, bool]]"

    @classmethod
    def of(cls, *literals) -> "Nogood":
        return cls(frozenset(literals))

    def is_consistent(self) -> bool:
        atoms = [a for a, _ in self.literals]
        return len(set(atoms)) == len(atoms)

    def __len__(self) -> int:
        return len(self.literals)

    def __contains__(self, literal) -> bool:
        return literal in self.literals

    def __le__(self, other: "Nogood") -> bool:
        return self.literals <= other.literals

    def __str__(self) -> str:
        parts = sorted(
            (f"{'T' if sign else 'F'} {atom}" for atom, sign in self.literals),
        )
        return "{" + ", ".join(parts) + "}"


class AtomTable:
    """Dense integer ids for atoms, ordered by their printed form.

    The id order doubles as the deterministic decision order: literal
    +(i+1) states atom i true, -(i+1) states it false.
    """

    def __init__(self, atoms: Iterable[Atom]):
        self.atoms = tuple(sorted(set(atoms), key=atom_key))
        self.index = {atom: i for i, atom in enumerate(self.atoms)}

    def __len__(self) -> int:
        return len(self.atoms)

    def lit(self, atom: Atom, sign: bool) -> int:
        base = self.index[atom] + 1
        return base if sign else -base

    def to_ints(self, nogood: Nogood) -> "tuple[int, ...]":
        return tuple(
            sorted(self.lit(atom, sign) for atom, sign in nogood.literals)
        )


def rule_nogood(rule, instances) -> Nogood:
    """Forbid: body satisfied while every head atom is false."""
    literals = set()
    for literal in rule.body_pos:
        if isinstance(literal, ExternalAtom):
            literals.add((instances[(literal.name, literal.inputs, literal.outputs)].replacement, True))
        else:
            literals.add((literal, True))
    for literal in rule.body_neg:
        if isinstance(literal, ExternalAtom):
            literals.add((instances[(literal.name, literal.inputs, literal.outputs)].replacement, False))
        else:
            literals.add((literal, False))
    for atom in rule.head:
        literals.add((atom, False))
    return Nogood(frozenset(literals))


def encode(ground: GroundProgram) -> "tuple[AtomTable, list[Nogood]]":
    """Initial nogood store plus the atom table for a ground program."""
    atoms = list(ground.universe)
    for instance in ground.instances.values():
        atoms.append(instance.replacement)
        atoms.append(instance.negation_atom)
    table = AtomTable(atoms)

    nogoods: dict[Nogood, None] = {}

    def add(nogood: Nogood):
        # a nogood carrying both signs of one atom can never be violated
        if nogood.is_consistent():
            nogoods.setdefault(nogood, None)

    derivable = {atom for rule in ground.rules for atom in rule.head}
    for rule in ground.rules:
        add(rule_nogood(rule, ground.instances))
    for key in sorted(ground.instances, key=str):
        instance = ground.instances[key]
        add(Nogood.of((instance.replacement, True), (instance.negation_atom, True)))
        add(Nogood.of((instance.replacement, False), (instance.negation_atom, False)))
    for atom in ground.universe:
        if atom not in derivable:
            add(Nogood.of((atom, True)))
    return table, list(nogoods)
