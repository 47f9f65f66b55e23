"""External sources: signatures, oracle evaluation, registry, linking.

An oracle is three-valued: given the ground input list and an assignment
view over the relevant input atoms it reports which output tuples are
true and which are unknown; everything else is false. Oracles must be
deterministic and knowledge-monotone (a T/F verdict never changes when
the assignment grows). Two-valued sources are wrapped: they answer
unknown whenever the view is incomplete.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .assignment import Assignment, Truth
from .errors import (
    DuplicateNameError,
    FunctionalityViolationError,
    SignatureMismatchError,
    UnknownExternalError,
)
from .properties import ExtSourceProperties, merge_properties
from .terms import Atom, Constant, ExternalAtom, Program, Term, Variable


class InputType(enum.Enum):
    PREDICATE = "predicate"
    CONSTANT = "constant"


PREDICATE, CONSTANT = InputType.PREDICATE, InputType.CONSTANT


@dataclass(frozen=True)
class OracleResult:
    """Output tuples with outcome T, plus the tuples left undefined."""

    true_tuples: "frozenset[tuple]" = frozenset()
    unknown_tuples: "frozenset[tuple]" = frozenset()
    all_unknown: bool = False

    def outcome(self, output: tuple) -> Truth:
        if output in self.true_tuples:
            return Truth.TRUE
        if self.all_unknown or output in self.unknown_tuples:
            return Truth.UNKNOWN
        return Truth.FALSE

    @property
    def defined(self) -> bool:
        return not self.all_unknown and not self.unknown_tuples


UNDEFINED = OracleResult(all_unknown=True)

# An oracle maps (ground inputs, assignment view) to an OracleResult.
Oracle = Callable[[tuple, Assignment], OracleResult]
# A superset function maps (ground inputs, potential input atoms) to tuples.
SupersetFn = Callable[[tuple, "frozenset[Atom]"], "frozenset[tuple]"]


@dataclass(frozen=True)
class ExternalSource:
    name: str
    input_signature: "tuple[InputType, ...]"
    output_arity: int
    oracle: Oracle
    properties: ExtSourceProperties = field(default_factory=ExtSourceProperties)
    superset: Optional[SupersetFn] = None

    def predicate_inputs(self, inputs: tuple) -> "list[str]":
        return [
            term.value
            for sig, term in zip(self.input_signature, inputs)
            if sig is PREDICATE and isinstance(term, Constant)
        ]

    def relevant_atoms(self, inputs: tuple, universe: Iterable[Atom]) -> "tuple[Atom, ...]":
        """Universe atoms over the predicate inputs, in atom order."""
        preds = set(self.predicate_inputs(inputs))
        return tuple(sorted((a for a in universe if a.predicate in preds), key=str))


def evaluate_oracle(
    source: ExternalSource, inputs: tuple, view: Assignment
) -> OracleResult:
    """Raw three-valued evaluation with the two-valued wrap and assertions.

    `view` must already be restricted to the relevant input atoms
    (closed-world outside). Functionality is checked here: declared
    properties serve as assertions.
    """
    if not source.properties.provides_partial_answer and view.unknown_atoms():
        return UNDEFINED
    result = source.oracle(inputs, view)
    if source.properties.functional and len(result.true_tuples) > 1:
        raise FunctionalityViolationError(source.name, result.true_tuples)
    return result


def evaluate(
    source: ExternalSource, inputs: tuple, assignment: Assignment, universe: Iterable[Atom]
) -> "tuple[frozenset[tuple], bool]":
    """Public view: (output tuples with outcome T, everything defined?)."""
    if len(inputs) != len(source.input_signature):
        raise SignatureMismatchError(
            f"&{source.name} expects {len(source.input_signature)} inputs, got {len(inputs)}"
        )
    view = assignment.restrict(source.relevant_atoms(inputs, universe))
    result = evaluate_oracle(source, inputs, view)
    return result.true_tuples, result.defined


def default_superset(
    source: ExternalSource, inputs: tuple, potential: "frozenset[Atom]"
) -> "frozenset[tuple]":
    """Property-driven over-approximation of reachable output tuples.

    Monotonic predicate inputs are set all-true and antimonotonic ones
    all-false; inputs with neither declaration contribute the union of
    the all-true and all-false extremes. Sources with no output terms
    return the empty tuple unconditionally, which is trivially sound.
    """
    if source.output_arity == 0:
        return frozenset({()})
    relevant = source.relevant_atoms(inputs, potential)
    preds = [None] * len(source.input_signature)
    for i, (sig, term) in enumerate(zip(source.input_signature, inputs)):
        if sig is PREDICATE and isinstance(term, Constant):
            preds[i] = term.value

    def extreme(flex_value: Truth) -> Assignment:
        values = {}
        for atom in relevant:
            positions = [i for i, p in enumerate(preds) if p == atom.predicate]
            if any(source.properties.is_monotonic(i) for i in positions):
                values[atom] = Truth.TRUE
            elif any(source.properties.is_antimonotonic(i) for i in positions):
                values[atom] = Truth.FALSE
            else:
                values[atom] = flex_value
        return Assignment(values, Truth.FALSE)

    tuples: set = set()
    for flex in (Truth.TRUE, Truth.FALSE):
        tuples |= evaluate_oracle(source, inputs, extreme(flex)).true_tuples
    return frozenset(tuples)


def grounding_superset(
    source: ExternalSource, inputs: tuple, potential: "frozenset[Atom]"
) -> "frozenset[tuple]":
    if source.superset is not None:
        return source.superset(inputs, potential)
    return default_superset(source, inputs, potential)


class Registry:
    """Name-indexed collection of external sources; immutable after linking."""

    def __init__(self, sources: Iterable[ExternalSource] = ()):
        self._sources: dict[str, ExternalSource] = {}
        for source in sources:
            self.register(source)

    def register(self, source: ExternalSource) -> None:
        if source.name in self._sources:
            raise DuplicateNameError(source.name)
        self._sources[source.name] = source

    def lookup(self, name: str) -> ExternalSource:
        try:
            return self._sources[name]
        except KeyError:
            raise UnknownExternalError(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._sources

    def names(self) -> "list[str]":
        return sorted(self._sources)


class EvalCache:
    """Memoizes oracle calls; oracles are deterministic so this is safe."""

    def __init__(self, registry: Registry):
        self.registry = registry
        self._cache: dict = {}
        self.calls = 0

    def evaluate(self, name: str, inputs: tuple, view: Assignment) -> OracleResult:
        self.calls += 1
        key = (name, inputs, view.cache_key())
        hit = self._cache.get(key)
        if hit is None:
            hit = evaluate_oracle(self.registry.lookup(name), inputs, view)
            self._cache[key] = hit
        return hit


def effective_properties(eatom: ExternalAtom, source: ExternalSource) -> ExtSourceProperties:
    """Interface properties plus this occurrence's tags."""
    return merge_properties(source.properties, eatom.properties, eatom.inputs)


def link(program: Program, registry: Registry) -> None:
    """Resolve every external atom and validate it against its source.

    PREDICATE positions take a symbolic constant naming a predicate;
    CONSTANT positions take a constant or a variable. Tag parameters
    naming predicates must resolve against the occurrence's inputs.
    """
    for rule in program.rules:
        for _, eatom in rule.external_atoms():
            source = registry.lookup(eatom.name)
            sig = source.input_signature
            if len(eatom.inputs) != len(sig):
                raise SignatureMismatchError(
                    f"&{eatom.name} expects {len(sig)} inputs, got {len(eatom.inputs)}"
                )
            for i, (kind, term) in enumerate(zip(sig, eatom.inputs)):
                if kind is PREDICATE:
                    if not (isinstance(term, Constant) and not term.quoted
                            and isinstance(term.value, str)):
                        raise SignatureMismatchError(
                            f"&{eatom.name} input {i} must name a predicate, got {term}"
                        )
                else:
                    if not isinstance(term, (Constant, Variable)):
                        raise SignatureMismatchError(
                            f"&{eatom.name} input {i} must be a constant or variable"
                        )
            if len(eatom.outputs) != source.output_arity:
                raise SignatureMismatchError(
                    f"&{eatom.name} expects {source.output_arity} outputs, "
                    f"got {len(eatom.outputs)}"
                )
            # raises MalformedPropertyTagError on unresolvable tag parameters
            effective_properties(eatom, source)
