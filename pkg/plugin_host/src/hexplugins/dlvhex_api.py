"""The `dlvhex` module surface that plugin scripts program against.

A plugin script imports `dlvhex`, defines one function per external atom
and a register() entry point that calls dlvhex.addAtom for each of them.
During an oracle call the script reads the evaluation through
getTrueInputAtoms / isTrue / isFalse / isAssigned and reports results
through output / outputUnknown. The host aliases this module into
sys.modules under the name `dlvhex` before executing a script.

All script invocations are serialized through one host lock; per-call
state lives in a stack so nested evaluations stay isolated. Scripts only
ever see immutable handles, never the solver's assignment itself.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

from hexsolve.assignment import Assignment, Truth
from hexsolve.errors import HexError
from hexsolve.properties import ExtSourceProperties as _CoreProperties
from hexsolve.sources import CONSTANT as _CONSTANT
from hexsolve.sources import PREDICATE as _PREDICATE
from hexsolve.terms import Atom, Constant, atom_key

PREDICATE = _PREDICATE
CONSTANT = _CONSTANT


class PluginApiError(HexError):
    """A script used the callback API outside its contract."""


class Symbol:
    """Immutable handle for a constant or predicate name."""

    __slots__ = ("_term",)

    def __init__(self, term: Constant):
        self._term = term

    def value(self):
        return self._term.value

    def intValue(self) -> int:
        if isinstance(self._term.value, int) and not self._term.quoted:
            return self._term.value
        raise PluginApiError(f"{self._term} is not an integer constant")

    def isInteger(self) -> bool:
        return isinstance(self._term.value, int) and not self._term.quoted

    def term(self) -> Constant:
        return self._term

    def __eq__(self, other) -> bool:
        if isinstance(other, Symbol):
            return self._term == other._term
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._term)

    def __repr__(self) -> str:
        return f"Symbol({self._term})"

    def __str__(self) -> str:
        return str(self._term)


class AtomHandle:
    """Immutable handle for a ground atom of the evaluation."""

    __slots__ = ("_atom",)

    def __init__(self, atom: Atom):
        self._atom = atom

    def tuple(self) -> "tuple[Symbol, ...]":
        return (Symbol(Constant(self._atom.predicate)),) + tuple(
            Symbol(a) for a in self._atom.args
        )

    def atom(self) -> Atom:
        return self._atom

    def __eq__(self, other) -> bool:
        if isinstance(other, AtomHandle):
            return self._atom == other._atom
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._atom)

    def __repr__(self) -> str:
        return f"AtomHandle({self._atom})"

    def __str__(self) -> str:
        return str(self._atom)


class ExtSourceProperties:
    """Mutable property builder mirroring the interface setter methods."""

    def __init__(self):
        self.functional = False
        self.monotonic_inputs: set[int] = set()
        self.antimonotonic_inputs: set[int] = set()
        self.atomlevellinear = False
        self.tuplelevellinear = False
        self.finite_domain_outputs: set[int] = set()
        self.relative_finite_domain: set = set()
        self.finite_fiber = False
        self.wellordering: set = set()
        self.wellordering_strlen: set = set()
        self.provides_partial_answer = False

    def setFunctionality(self, value: bool = True):
        self.functional = bool(value)

    def addMonotonicInputPredicate(self, index: int):
        self.monotonic_inputs.add(index)

    def addAntimonotonicInputPredicate(self, index: int):
        self.antimonotonic_inputs.add(index)

    def setAtomlevellinear(self, value: bool = True):
        self.atomlevellinear = bool(value)

    def setTuplelevellinear(self, value: bool = True):
        self.tuplelevellinear = bool(value)

    def setFiniteOutputDomain(self, output_index: int):
        self.finite_domain_outputs.add(output_index)

    def setRelativeFiniteOutputDomain(self, input_index: int, output_index: int):
        self.relative_finite_domain.add((input_index, output_index))

    def setWellorderingStrlen(self, input_index: int, output_index: int):
        self.wellordering_strlen.add((input_index, output_index))

    def setWellordering(self, input_index: int, output_index: int):
        self.wellordering.add((input_index, output_index))

    def setFiniteFiber(self, value: bool = True):
        self.finite_fiber = bool(value)

    def setProvidesPartialAnswer(self, value: bool = True):
        self.provides_partial_answer = bool(value)

    def freeze(self) -> _CoreProperties:
        return _CoreProperties(
            functional=self.functional,
            monotonic_inputs=frozenset(self.monotonic_inputs),
            antimonotonic_inputs=frozenset(self.antimonotonic_inputs),
            atomlevellinear=self.atomlevellinear,
            tuplelevellinear=self.tuplelevellinear,
            finite_domain_outputs=frozenset(self.finite_domain_outputs),
            relative_finite_domain=frozenset(self.relative_finite_domain),
            finite_fiber=self.finite_fiber,
            wellordering=frozenset(self.wellordering),
            wellordering_strlen=frozenset(self.wellordering_strlen),
            provides_partial_answer=self.provides_partial_answer,
        )


def _to_term(value) -> Constant:
    if isinstance(value, Symbol):
        return value.term()
    if isinstance(value, Constant):
        return value
    if isinstance(value, bool):
        raise PluginApiError("booleans are not constants")
    if isinstance(value, int):
        return Constant(value)
    if isinstance(value, str):
        # identifier-shaped strings become symbolic constants, the rest
        # string literals; handles echo their original term exactly
        if value and value[0].islower() and value.replace("_", "").isalnum():
            return Constant(value)
        return Constant(value, quoted=True)
    raise PluginApiError(f"cannot marshal {value!r} into a constant")


@dataclass
class _Call:
    view: Assignment
    output_arity: int
    outputs: "set[tuple]" = field(default_factory=set)
    unknowns: "set[tuple]" = field(default_factory=set)
    partial_capable: bool = False


@dataclass
class _Registration:
    module: object
    sink: list


_lock = threading.RLock()
_calls: "list[_Call]" = []
_registration: "list[_Registration]" = []


def host_lock() -> threading.RLock:
    return _lock


def _current_call() -> _Call:
    if not _calls:
        raise PluginApiError("callback used outside an oracle call")
    return _calls[-1]


def _current_registration() -> _Registration:
    if not _registration:
        raise PluginApiError("addAtom used outside register()")
    return _registration[-1]


def push_call(view: Assignment, output_arity: int, partial_capable: bool) -> None:
    _calls.append(_Call(view, output_arity, partial_capable=partial_capable))


def pop_call() -> _Call:
    return _calls.pop()


def push_registration(module, sink: list) -> None:
    _registration.append(_Registration(module, sink))


def pop_registration() -> None:
    _registration.pop()


# -- script-facing callbacks -------------------------------------------


def getTrueInputAtoms():
    """Handles for the relevant input atoms assigned true, in atom order."""
    call = _current_call()
    atoms = sorted(
        (a for a, v in call.view.values.items() if v is Truth.TRUE), key=atom_key
    )
    return tuple(AtomHandle(a) for a in atoms)


def getInputAtoms():
    """Handles for all relevant input atoms, assigned or not; sources that
    answer under partial assignments need to see the unassigned ones."""
    call = _current_call()
    return tuple(
        AtomHandle(a) for a in sorted(call.view.values, key=atom_key)
    )


def storeAtom(terms) -> AtomHandle:
    terms = tuple(terms)
    if not terms:
        raise PluginApiError("storeAtom needs at least a predicate")
    predicate = terms[0]
    if isinstance(predicate, Symbol):
        predicate = predicate.value()
    if not isinstance(predicate, str):
        raise PluginApiError("the first storeAtom element must name a predicate")
    return AtomHandle(Atom(predicate, tuple(_to_term(t) for t in terms[1:])))


def _value_of(atom) -> Truth:
    if isinstance(atom, AtomHandle):
        atom = atom.atom()
    return _current_call().view.value(atom)


def isTrue(atom) -> bool:
    return _value_of(atom) is Truth.TRUE


def isFalse(atom) -> bool:
    return _value_of(atom) is Truth.FALSE


def isAssigned(atom) -> bool:
    return _value_of(atom) is not Truth.UNKNOWN


def output(values) -> None:
    call = _current_call()
    out = tuple(_to_term(v) for v in values)
    if len(out) != call.output_arity:
        raise PluginApiError(
            f"output tuple {out} has arity {len(out)}, expected {call.output_arity}"
        )
    call.outputs.add(out)


def outputUnknown(values) -> None:
    call = _current_call()
    out = tuple(_to_term(v) for v in values)
    if len(out) != call.output_arity:
        raise PluginApiError(
            f"outputUnknown tuple {out} has arity {len(out)}, "
            f"expected {call.output_arity}"
        )
    if call.partial_capable:
        call.unknowns.add(out)


def addAtom(name: str, signature, output_arity: int, prop: Optional[ExtSourceProperties] = None):
    """Export one external atom from the current register() run."""
    registration = _current_registration()
    kinds = tuple(signature)
    for kind in kinds:
        if kind not in (PREDICATE, CONSTANT):
            raise PluginApiError(
                f"signature entries must be dlvhex.PREDICATE or dlvhex.CONSTANT, got {kind!r}"
            )
    registration.sink.append((name, kinds, int(output_arity), prop))
