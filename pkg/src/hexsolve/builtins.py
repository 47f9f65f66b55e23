"""Builtin external sources used throughout the test programs.

diff        set difference of two predicate extensions (three-valued)
union       set union of two predicate extensions
greaterThan sum of the integers in a predicate extension exceeds a bound
edge        successors of a node in a finite graph (file or builtin)
tail        drops the first character of a string
decrement   predecessor of a non-negative integer
"""

from __future__ import annotations

from functools import lru_cache

from .assignment import Assignment, Truth, integer_extension
from .errors import ExternalSourceError, IntegerOverflowError
from .properties import ExtSourceProperties
from .sources import (
    CONSTANT,
    PREDICATE,
    ExternalSource,
    OracleResult,
    Registry,
)
from .terms import Atom, Constant

INT64_MIN, INT64_MAX = -(2**63), 2**63 - 1

# Graph selected by the reserved constant `builtin`.
BUILTIN_GRAPH = ((1, 2), (1, 3), (2, 3))


def _pred_name(term) -> str:
    return term.value


def _diff_oracle(inputs: tuple, view: Assignment) -> OracleResult:
    """X in p and not in q; defined per tuple as soon as one side settles."""
    p, q = _pred_name(inputs[0]), _pred_name(inputs[1])
    true, unknown = set(), set()
    for atom, pv in view.values.items():
        if atom.predicate != p:
            continue
        qv = view.value(Atom(q, atom.args))
        if pv is Truth.TRUE and qv is Truth.FALSE:
            true.add(atom.args)
        elif pv is Truth.FALSE or qv is Truth.TRUE:
            pass
        else:
            unknown.add(atom.args)
    return OracleResult(frozenset(true), frozenset(unknown))


def _union_oracle(inputs: tuple, view: Assignment) -> OracleResult:
    p, q = _pred_name(inputs[0]), _pred_name(inputs[1])
    true = {
        atom.args
        for atom, v in view.values.items()
        if v is Truth.TRUE and atom.predicate in (p, q)
    }
    return OracleResult(frozenset(true))


def _greater_than_oracle(inputs: tuple, view: Assignment) -> OracleResult:
    p, bound = inputs
    if not isinstance(bound.value, int) or bound.quoted:
        raise ExternalSourceError(f"&greaterThan bound must be an integer, got {bound}")
    total = 0
    for value in integer_extension(view, _pred_name(p)):
        if not (INT64_MIN <= value <= INT64_MAX):
            raise IntegerOverflowError(f"&greaterThan input {value} outside 64-bit range")
        total += value
        if not (INT64_MIN <= total <= INT64_MAX):
            raise IntegerOverflowError("&greaterThan sum left the signed 64-bit range")
    if total > bound.value:
        return OracleResult(frozenset({()}))
    return OracleResult()


@lru_cache(maxsize=None)
def _load_graph(path: str) -> "tuple[tuple, ...]":
    """Edge-list format: one `<from> -> <to>;` per line."""

    def node(token: str):
        token = token.strip()
        if not token:
            raise ExternalSourceError(f"{path}: empty node name in edge line")
        try:
            return int(token)
        except ValueError:
            return token

    edges = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip().rstrip(";").strip()
            if not line:
                continue
            if "->" not in line:
                raise ExternalSourceError(f"{path}:{lineno}: expected '<from> -> <to>;'")
            left, right = line.split("->", 1)
            edges.append((node(left), node(right)))
    return tuple(edges)


def _edge_oracle(inputs: tuple, view: Assignment) -> OracleResult:
    graph_term, node_term = inputs
    if not graph_term.quoted and graph_term.value == "builtin":
        graph = BUILTIN_GRAPH
    else:
        graph = _load_graph(str(graph_term.value))
    wanted = node_term.value
    out = {(Constant(dst),) for src, dst in graph if src == wanted}
    return OracleResult(frozenset(out))


def _tail_oracle(inputs: tuple, view: Assignment) -> OracleResult:
    (term,) = inputs
    if not term.quoted or not isinstance(term.value, str) or not term.value:
        return OracleResult()
    return OracleResult(frozenset({(Constant(term.value[1:], quoted=True),)}))


def _decrement_oracle(inputs: tuple, view: Assignment) -> OracleResult:
    (term,) = inputs
    if term.quoted or not isinstance(term.value, int) or term.value < 1:
        return OracleResult()
    return OracleResult(frozenset({(Constant(term.value - 1),)}))


def make_diff() -> ExternalSource:
    return ExternalSource(
        name="diff",
        input_signature=(PREDICATE, PREDICATE),
        output_arity=1,
        oracle=_diff_oracle,
        properties=ExtSourceProperties(
            monotonic_inputs=frozenset({0}),
            antimonotonic_inputs=frozenset({1}),
            tuplelevellinear=True,
            relative_finite_domain=frozenset({(0, 0)}),
            provides_partial_answer=True,
        ),
    )


def make_union() -> ExternalSource:
    return ExternalSource(
        name="union",
        input_signature=(PREDICATE, PREDICATE),
        output_arity=1,
        oracle=_union_oracle,
        properties=ExtSourceProperties(
            globally_monotonic=True,
            monotonic_inputs=frozenset({0, 1}),
            atomlevellinear=True,
        ),
    )


def make_greater_than() -> ExternalSource:
    # No default monotonicity: with negative integers the sum is not
    # monotone in p. Programs restricted to positive integers may tag it.
    return ExternalSource(
        name="greaterThan",
        input_signature=(PREDICATE, CONSTANT),
        output_arity=0,
        oracle=_greater_than_oracle,
    )


def make_edge() -> ExternalSource:
    # finitedomain on the output holds for any concrete graph but is left
    # to tags so that safety analysis of untagged programs stays honest.
    return ExternalSource(
        name="edge",
        input_signature=(CONSTANT, CONSTANT),
        output_arity=1,
        oracle=_edge_oracle,
    )


def make_tail() -> ExternalSource:
    return ExternalSource(
        name="tail",
        input_signature=(CONSTANT,),
        output_arity=1,
        oracle=_tail_oracle,
        properties=ExtSourceProperties(functional=True),
    )


def make_decrement() -> ExternalSource:
    return ExternalSource(
        name="decrement",
        input_signature=(CONSTANT,),
        output_arity=1,
        oracle=_decrement_oracle,
        properties=ExtSourceProperties(
            functional=True, wellordering=frozenset({(0, 0)})
        ),
    )


def builtin_registry() -> Registry:
    """A fresh registry holding every builtin source."""
    return Registry(
        [
            make_diff(),
            make_union(),
            make_greater_than(),
            make_edge(),
            make_tail(),
            make_decrement(),
        ]
    )
