"""Declared semantic properties of external sources.

Properties arrive from two places: the source interface (set when the
source is implemented) and per-occurrence property tags in the program.
Tags hold in addition to interface declarations, so merging is a union;
the catalogue contains no conflicting pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import MalformedPropertyTagError
from .terms import Constant, PropertySpec, Term


@dataclass(frozen=True)
class ExtSourceProperties:
    functional: bool = False
    monotonic_inputs: "frozenset[int]" = frozenset()
    antimonotonic_inputs: "frozenset[int]" = frozenset()
    globally_monotonic: bool = False
    globally_antimonotonic: bool = False
    atomlevellinear: bool = False
    tuplelevellinear: bool = False
    finite_domain_outputs: "frozenset[int]" = frozenset()
    relative_finite_domain: "frozenset[tuple[int, int]]" = frozenset()
    finite_fiber: bool = False
    wellordering: "frozenset[tuple[int, int]]" = frozenset()
    wellordering_strlen: "frozenset[tuple[int, int]]" = frozenset()
    provides_partial_answer: bool = False

    def is_monotonic(self, index: int) -> bool:
        return self.globally_monotonic or index in self.monotonic_inputs

    def is_antimonotonic(self, index: int) -> bool:
        return self.globally_antimonotonic or index in self.antimonotonic_inputs

    def union(self, other: "ExtSourceProperties") -> "ExtSourceProperties":
        return ExtSourceProperties(
            functional=self.functional or other.functional,
            monotonic_inputs=self.monotonic_inputs | other.monotonic_inputs,
            antimonotonic_inputs=self.antimonotonic_inputs | other.antimonotonic_inputs,
            globally_monotonic=self.globally_monotonic or other.globally_monotonic,
            globally_antimonotonic=self.globally_antimonotonic
            or other.globally_antimonotonic,
            atomlevellinear=self.atomlevellinear or other.atomlevellinear,
            tuplelevellinear=self.tuplelevellinear or other.tuplelevellinear,
            finite_domain_outputs=self.finite_domain_outputs
            | other.finite_domain_outputs,
            relative_finite_domain=self.relative_finite_domain
            | other.relative_finite_domain,
            finite_fiber=self.finite_fiber or other.finite_fiber,
            wellordering=self.wellordering | other.wellordering,
            wellordering_strlen=self.wellordering_strlen | other.wellordering_strlen,
            provides_partial_answer=self.provides_partial_answer
            or other.provides_partial_answer,
        )


def _predicate_index(name: str, inputs: Sequence[Term], spec: PropertySpec) -> int:
    for i, term in enumerate(inputs):
        if isinstance(term, Constant) and not term.quoted and term.value == name:
            return i
    raise MalformedPropertyTagError(str(spec), f"'{name}' is not an input parameter")


def merge_properties(
    interface: ExtSourceProperties,
    tags: Iterable[PropertySpec],
    inputs: Sequence[Term] = (),
) -> ExtSourceProperties:
    """Union interface-declared properties with per-occurrence tags.

    A bare `monotonic`/`antimonotonic` tag sets the global flag; the named
    form is resolved to an input index against the occurrence's input list.
    """
    merged = interface
    for spec in tags:
        p = spec.ptype
        if p == "functional":
            merged = replace(merged, functional=True)
        elif p == "monotonic":
            if spec.params:
                idx = _predicate_index(spec.params[0], inputs, spec)
                merged = replace(
                    merged, monotonic_inputs=merged.monotonic_inputs | {idx}
                )
            else:
                merged = replace(merged, globally_monotonic=True)
        elif p == "antimonotonic":
            if spec.params:
                idx = _predicate_index(spec.params[0], inputs, spec)
                merged = replace(
                    merged, antimonotonic_inputs=merged.antimonotonic_inputs | {idx}
                )
            else:
                merged = replace(merged, globally_antimonotonic=True)
        elif p == "atomlevellinear":
            merged = replace(merged, atomlevellinear=True)
        elif p == "tuplelevellinear":
            merged = replace(merged, tuplelevellinear=True)
        elif p == "finitedomain":
            merged = replace(
                merged,
                finite_domain_outputs=merged.finite_domain_outputs | {spec.params[0]},
            )
        elif p == "relativefinitedomain":
            merged = replace(
                merged,
                relative_finite_domain=merged.relative_finite_domain
                | {(spec.params[0], spec.params[1])},
            )
        elif p == "finitefiber":
            merged = replace(merged, finite_fiber=True)
        elif p == "wellordering":
            merged = replace(
                merged, wellordering=merged.wellordering | {(spec.params[0], spec.params[1])}
            )
        elif p == "wellorderingstrlen":
            merged = replace(
                merged,
                wellordering_strlen=merged.wellordering_strlen
                | {(spec.params[0], spec.params[1])},
            )
        elif p == "providespartialanswer":
            merged = replace(merged, provides_partial_answer=True)
        else:
            raise MalformedPropertyTagError(str(spec), "unknown property type")
    return merged
