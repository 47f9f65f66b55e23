"""AST for HEX programs: terms, atoms, external atoms, rules, programs.

All node types are immutable and hashable; ground atoms double as the keys
of assignments, nogoods and the grounder's atom universe. Structural
equality is the program equality used by the parser round-trip guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True)
class Constant:
    """Integer, symbolic constant, or (when quoted) a string literal."""

    value: Union[int, str]
    quoted: bool = False

    def __hash__(self) -> int:
        # terms are hashed heavily in assignments and nogood stores
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((self.value, self.quoted))
            object.__setattr__(self, "_hash", cached)
        return cached

    def __str__(self) -> str:
        if self.quoted:
            return f'"{self.value}"'
        return str(self.value)


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Function:
    """Nested function term. Parsed, but not supported by the grounder."""

    name: str
    args: "tuple[Term, ...]"

    def __str__(self) -> str:
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


Term = Union[Constant, Variable, Function]


def term_variables(term: Term) -> Iterator[str]:
    if isinstance(term, Variable):
        yield term.name
    elif isinstance(term, Function):
        for arg in term.args:
            yield from term_variables(arg)


def term_is_ground(term: Term) -> bool:
    if isinstance(term, Variable):
        return False
    if isinstance(term, Function):
        return all(term_is_ground(a) for a in term.args)
    return True


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: "tuple[Term, ...]" = ()

    def __hash__(self) -> int:
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((self.predicate, self.args))
            object.__setattr__(self, "_hash", cached)
        return cached

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(str(a) for a in self.args)})"

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return all(term_is_ground(a) for a in self.args)

    def variables(self) -> "frozenset[str]":
        return frozenset(v for a in self.args for v in term_variables(a))


# Property catalogue: ptype -> (parameter kinds, brief arity description).
# Kind "sym" is a constant naming a predicate parameter, "out" an output
# index, "in" an input index. A trailing "?" marks an optional parameter.
PROPERTY_PARAMS: "dict[str, tuple[str, ...]]" = {
    "functional": (),
    "monotonic": ("sym?",),
    "antimonotonic": ("sym?",),
    "atomlevellinear": (),
    "tuplelevellinear": (),
    "finitedomain": ("out",),
    "relativefinitedomain": ("in", "out"),
    "finitefiber": (),
    "wellorderingstrlen": ("in", "out"),
    "wellordering": ("in", "out"),
    "providespartialanswer": (),
}


@dataclass(frozen=True)
class PropertySpec:
    """One entry of a property tag, e.g. ('monotonic', ('p',))."""

    ptype: str
    params: "tuple[Union[int, str], ...]" = ()

    def __str__(self) -> str:
        return " ".join([self.ptype] + [str(p) for p in self.params])


@dataclass(frozen=True)
class ExternalAtom:
    """&name[inputs](outputs) with optional per-occurrence property tags."""

    name: str
    inputs: "tuple[Term, ...]" = ()
    outputs: "tuple[Term, ...]" = ()
    properties: "tuple[PropertySpec, ...]" = ()

    def __str__(self) -> str:
        text = f"&{self.name}"
        if self.inputs:
            text += f"[{', '.join(str(t) for t in self.inputs)}]"
        text += f"({', '.join(str(t) for t in self.outputs)})"
        if self.properties:
            text += f"<{', '.join(str(p) for p in self.properties)}>"
        return text

    def input_variables(self) -> "frozenset[str]":
        return frozenset(v for t in self.inputs for v in term_variables(t))

    def output_variables(self) -> "frozenset[str]":
        return frozenset(v for t in self.outputs for v in term_variables(t))

    def variables(self) -> "frozenset[str]":
        return self.input_variables() | self.output_variables()

    def is_ground(self) -> bool:
        return all(term_is_ground(t) for t in self.inputs) and all(
            term_is_ground(t) for t in self.outputs
        )


BodyLiteral = Union[Atom, ExternalAtom]


@dataclass(frozen=True)
class Rule:
    """head1 v ... v headH :- pos..., not neg... with head+body nonempty."""

    head: "tuple[Atom, ...]" = ()
    body_pos: "tuple[BodyLiteral, ...]" = ()
    body_neg: "tuple[BodyLiteral, ...]" = ()

    def __str__(self) -> str:
        head = " v ".join(str(a) for a in self.head)
        body = ", ".join(
            [str(b) for b in self.body_pos] + [f"not {b}" for b in self.body_neg]
        )
        if not body:
            return f"{head}."
        if not head:
            return f":- {body}."
        return f"{head} :- {body}."

    @property
    def body(self) -> "tuple[BodyLiteral, ...]":
        return self.body_pos + self.body_neg

    def is_fact(self) -> bool:
        return not self.body_pos and not self.body_neg

    def is_constraint(self) -> bool:
        return not self.head

    def variables(self) -> "frozenset[str]":
        out: set = set()
        for atom in self.head:
            out |= atom.variables()
        for lit in self.body:
            out |= lit.variables()
        return frozenset(out)

    def external_atoms(self) -> "list[tuple[bool, ExternalAtom]]":
        """All external atoms in the body as (is_positive, atom) pairs."""
        found = [(True, b) for b in self.body_pos if isinstance(b, ExternalAtom)]
        found += [(False, b) for b in self.body_neg if isinstance(b, ExternalAtom)]
        return found


@dataclass(frozen=True)
class Program:
    rules: "tuple[Rule, ...]" = ()

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.rules)

    @property
    def external_names(self) -> "frozenset[str]":
        return frozenset(e.name for r in self.rules for _, e in r.external_atoms())

    def facts(self) -> "list[Atom]":
        return [a for r in self.rules if r.is_fact() for a in r.head]


_ATOM_KEYS: "dict[Atom, str]" = {}


def atom_key(atom: Atom) -> str:
    """Total order on ground atoms; drives every deterministic iteration."""
    key = _ATOM_KEYS.get(atom)
    if key is None:
        key = _ATOM_KEYS[atom] = str(atom)
    return key
