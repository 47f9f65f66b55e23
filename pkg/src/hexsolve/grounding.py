"""Bottom-up grounding with value invention via superset queries.

The grounder keeps a growing set P of potentially-true ground atoms,
seeded with the facts. Rules are instantiated by joining their positive
ordinary body atoms against P; output variables of positive external
atoms are bound by querying the source's grounding superset over the
current P. Negative literals never restrict instantiation, so the result
over-approximates: atoms outside P are false in every answer set, hence
the emitted program has the same answer sets as the full grounding.

External atoms whose inputs contain no predicates are assignment
independent; they are evaluated once during grounding and simplified
away instead of being guessed later.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .assignment import Assignment, Truth
from .errors import GroundingError, NonTerminationError
from .properties import ExtSourceProperties, merge_properties
from .sources import (
    PREDICATE,
    EvalCache,
    ExternalSource,
    Registry,
    grounding_superset,
)
from .terms import (
    Atom,
    Constant,
    ExternalAtom,
    Function,
    Program,
    Rule,
    Term,
    Variable,
    atom_key,
)

Substitution = "dict[str, Constant]"

DEFAULT_ITERATION_CAP = 10_000


def substitute_term(term: Term, subst) -> Term:
    if isinstance(term, Variable):
        return subst.get(term.name, term)
    if isinstance(term, Function):
        raise GroundingError(f"function term '{term}' is not supported in rules")
    return term


def substitute_atom(atom: Atom, subst) -> Atom:
    return Atom(atom.predicate, tuple(substitute_term(t, subst) for t in atom.args))


def substitute_external(eatom: ExternalAtom, subst) -> ExternalAtom:
    return ExternalAtom(
        eatom.name,
        tuple(substitute_term(t, subst) for t in eatom.inputs),
        tuple(substitute_term(t, subst) for t in eatom.outputs),
        eatom.properties,
    )


def match_args(pattern: "tuple[Term, ...]", ground: "tuple[Term, ...]", subst):
    """Extend subst so pattern equals ground, or return None."""
    if len(pattern) != len(ground):
        return None
    out = dict(subst)
    for pat, val in zip(pattern, ground):
        pat = substitute_term(pat, out)
        if isinstance(pat, Variable):
            out[pat.name] = val
        elif pat != val:
            return None
    return out


@dataclass
class ExternalInstance:
    """One ground external atom, shared by every occurrence in the rules."""

    name: str
    inputs: "tuple[Term, ...]"
    outputs: "tuple[Term, ...]"
    source: ExternalSource
    props: ExtSourceProperties
    replacement: Atom
    negation_atom: Atom

    @property
    def key(self):
        return (self.name, self.inputs, self.outputs)

    def relevant_atoms(self, universe) -> "tuple[Atom, ...]":
        return self.source.relevant_atoms(self.inputs, universe)


@dataclass
class GroundProgram:
    rules: "tuple[Rule, ...]"
    instances: "dict[tuple, ExternalInstance]"
    universe: "tuple[Atom, ...]"
    iterations: int = 0
    _relevant: "Optional[dict[tuple, tuple[Atom, ...]]]" = None
    _universe_set: "Optional[frozenset[Atom]]" = None

    def instance_for(self, eatom: ExternalAtom) -> ExternalInstance:
        return self.instances[(eatom.name, eatom.inputs, eatom.outputs)]

    def program(self) -> Program:
        return Program(self.rules)

    def replacement_inverse(self) -> "dict[Atom, ExternalInstance]":
        return {inst.replacement: inst for inst in self.instances.values()}

    def relevant_atoms(self, instance: ExternalInstance) -> "tuple[Atom, ...]":
        """Universe atoms over the instance's predicate inputs (cached)."""
        if self._relevant is None:
            self._relevant = {}
        found = self._relevant.get(instance.key)
        if found is None:
            found = instance.relevant_atoms(self.universe)
            self._relevant[instance.key] = found
        return found

    def universe_set(self) -> "frozenset[Atom]":
        if self._universe_set is None:
            self._universe_set = frozenset(self.universe)
        return self._universe_set


_SANITIZE_RE = re.compile(r"[^A-Za-z0-9_]")


def _sanitize(term: Term) -> str:
    if isinstance(term, Constant):
        if isinstance(term.value, int):
            return str(term.value).replace("-", "m")
        cleaned = _SANITIZE_RE.sub("", term.value)
        return cleaned or "s"
    return _SANITIZE_RE.sub("", str(term)) or "t"


class _ReplacementNamer:
    """Deterministic, injective naming of replacement predicates."""

    def __init__(self, reserved: "set[str]"):
        self.reserved = set(reserved)
        self.by_key: dict[tuple, str] = {}

    def base_for(self, name: str, inputs: "tuple[Term, ...]") -> str:
        key = (name, inputs)
        base = self.by_key.get(key)
        if base is not None:
            return base
        # the plain concatenated form can collide across distinct input
        # lists or with user predicates; a counter keeps naming injective
        stem = f"{name}_{''.join(_sanitize(t) for t in inputs)}" if inputs else name
        base, bump = stem, 1
        while (
            base in self.by_key.values()
            or f"e_{base}" in self.reserved
            or f"ne_{base}" in self.reserved
        ):
            bump += 1
            base = f"{stem}_{bump}"
        self.by_key[key] = base
        return base


def replacement_atom(
    eatom: ExternalAtom, namer: Optional[_ReplacementNamer] = None
) -> Atom:
    """Ordinary stand-in atom for a ground external atom."""
    if namer is None:
        namer = _ReplacementNamer(set())
    return Atom(f"e_{namer.base_for(eatom.name, eatom.inputs)}", eatom.outputs)


def _ordered_positive_body(rule: Rule):
    """Positive literals in an instantiation-safe order.

    Ordinary atoms are always processable; an external atom becomes
    processable once its input variables are bound.
    """
    pending = list(rule.body_pos)
    ordered = []
    bound: set[str] = set()
    while pending:
        pick = None
        for literal in pending:
            if isinstance(literal, Atom):
                pick = literal
                break
            if literal.input_variables() <= bound:
                pick = literal
                break
        if pick is None:
            names = ", ".join(f"&{e.name}" for e in pending if isinstance(e, ExternalAtom))
            raise GroundingError(
                f"cannot order rule body for instantiation ({names} has unbound inputs)"
            )
        pending.remove(pick)
        ordered.append(pick)
        if isinstance(pick, Atom):
            bound |= pick.variables()
        else:
            bound |= pick.output_variables()
    return ordered


def _require_ground(literal, rule: Rule):
    if not literal.is_ground():
        raise GroundingError(
            f"variable in '{literal}' of rule '{rule}' is not bound by the positive body"
        )


class _Grounder:
    def __init__(self, program: Program, registry: Registry, cache: EvalCache):
        self.program = program
        self.registry = registry
        self.cache = cache
        self.potential: dict[Atom, None] = {}
        self.by_predicate: dict[str, list[Atom]] = {}
        self.emitted: dict[Rule, None] = {}

    def add_potential(self, atom: Atom):
        if atom not in self.potential:
            self.potential[atom] = None
            self.by_predicate.setdefault(atom.predicate, []).append(atom)

    def expand_external(self, eatom: ExternalAtom, subst):
        """Yield extended substitutions for one positive external literal."""
        grounded = substitute_external(eatom, subst)
        source = self.registry.lookup(eatom.name)
        static = self.static_truth_of(grounded)
        if grounded.is_ground():
            if static is not None:
                if grounded.outputs in static.true_tuples:
                    yield subst
                return
            yield subst
            return
        if static is not None:
            candidates = static.true_tuples
        else:
            relevant = frozenset(
                a
                for pred in source.predicate_inputs(grounded.inputs)
                for a in self.by_predicate.get(pred, ())
            )
            candidates = grounding_superset(source, grounded.inputs, relevant)
        for candidate in sorted(candidates, key=str):
            extended = match_args(grounded.outputs, candidate, subst)
            if extended is not None:
                yield extended

    def instantiate(self, rule: Rule):
        ordered = _ordered_positive_body(rule)
        substs = [dict()]
        for literal in ordered:
            new: list = []
            if isinstance(literal, Atom):
                for subst in substs:
                    pattern = substitute_atom(literal, subst)
                    for candidate in self.by_predicate.get(literal.predicate, ()):
                        extended = match_args(pattern.args, candidate.args, subst)
                        if extended is not None:
                            new.append(extended)
            else:
                for subst in substs:
                    new.extend(self.expand_external(literal, subst))
            substs = new
            if not substs:
                return
        for subst in substs:
            self.emit(rule, subst)

    def emit(self, rule: Rule, subst):
        head = tuple(substitute_atom(a, subst) for a in rule.head)
        for atom in head:
            _require_ground(atom, rule)
        body_pos: list = []
        for literal in rule.body_pos:
            if isinstance(literal, Atom):
                grounded = substitute_atom(literal, subst)
                _require_ground(grounded, rule)
                body_pos.append(grounded)
            else:
                grounded = substitute_external(literal, subst)
                _require_ground(grounded, rule)
                static = self.static_truth_of(grounded)
                if static is None:
                    body_pos.append(grounded)
                elif grounded.outputs not in static.true_tuples:
                    return  # positive literal is statically false
        body_neg: list = []
        for literal in rule.body_neg:
            if isinstance(literal, Atom):
                grounded = substitute_atom(literal, subst)
                _require_ground(grounded, rule)
                body_neg.append(grounded)
            else:
                grounded = substitute_external(literal, subst)
                _require_ground(grounded, rule)
                static = self.static_truth_of(grounded)
                if static is None:
                    body_neg.append(grounded)
                elif grounded.outputs in static.true_tuples:
                    return  # negated literal is statically false
        ground_rule = Rule(head, tuple(body_pos), tuple(body_neg))
        if ground_rule not in self.emitted:
            self.emitted[ground_rule] = None
        for atom in head:
            self.add_potential(atom)

    def static_truth_of(self, grounded: ExternalAtom):
        """Oracle result for assignment-independent externals, else None."""
        source = self.registry.lookup(grounded.name)
        if any(kind is PREDICATE for kind in source.input_signature):
            return None
        return self.cache.evaluate(grounded.name, grounded.inputs, Assignment({}, Truth.FALSE))

    def run(self, disabled: bool, cap: int) -> "tuple[int, list[Rule]]":
        iterations = 0
        while True:
            rules_before = len(self.emitted)
            atoms_before = len(self.potential)
            for rule in self.program.rules:
                self.instantiate(rule)
            if len(self.emitted) == rules_before and len(self.potential) == atoms_before:
                break
            iterations += 1
            if disabled and iterations > cap:
                raise NonTerminationError(iterations)
        return iterations, list(self.emitted)


def ground(
    program: Program,
    registry: Registry,
    disabled: bool = False,
    iteration_cap: int = DEFAULT_ITERATION_CAP,
    cache: Optional[EvalCache] = None,
) -> GroundProgram:
    """Instantiate a safe (or safety-disabled) program to a GroundProgram."""
    cache = cache or EvalCache(registry)
    grounder = _Grounder(program, registry, cache)
    iterations, rules = grounder.run(disabled, iteration_cap)

    universe: dict[Atom, None] = {}
    for rule in rules:
        for atom in rule.head:
            universe.setdefault(atom, None)
        for literal in rule.body:
            if isinstance(literal, Atom):
                universe.setdefault(literal, None)
    ordered_universe = tuple(sorted(universe, key=atom_key))

    predicates = {a.predicate for a in universe}
    namer = _ReplacementNamer(predicates)
    instances: dict[tuple, ExternalInstance] = {}
    for rule in rules:
        for _, eatom in rule.external_atoms():
            key = (eatom.name, eatom.inputs, eatom.outputs)
            source = registry.lookup(eatom.name)
            props = merge_properties(source.properties, eatom.properties, eatom.inputs)
            existing = instances.get(key)
            if existing is not None:
                # occurrences with different tags share one instance;
                # tag declarations hold in addition, so union them
                existing.props = existing.props.union(props)
                continue
            base = namer.base_for(eatom.name, eatom.inputs)
            instances[key] = ExternalInstance(
                name=eatom.name,
                inputs=eatom.inputs,
                outputs=eatom.outputs,
                source=source,
                props=props,
                replacement=Atom(f"e_{base}", eatom.outputs),
                negation_atom=Atom(f"ne_{base}", eatom.outputs),
            )
    return GroundProgram(tuple(rules), instances, ordered_universe, iterations)
