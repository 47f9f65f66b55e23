"""Io-nogood learning from external evaluations, and nogood minimization.

Every evaluation of a ground external atom ties the signed relevant input
atoms to the forced value of its replacement atom: if the oracle reports
the output tuple true, the inputs must not occur together with a false
replacement atom, and symmetrically for a false output. Declared source
properties then shrink these nogoods:

  linearity     keep only the input literals that can influence the tuple
  monotonicity  drop literals whose flip cannot change the verdict
  partial       re-evaluate three-valued oracles with single literals
                removed and drop those that leave the verdict defined

Pipeline order is linearity, monotonicity, partial oracle: structural
shrinking first, oracle calls last. Minimization only ever removes input
literals; the replacement literal always stays.
"""

from __future__ import annotations

from dataclasses import dataclass

from .assignment import Assignment, Truth
from .nogoods import Nogood
from .properties import ExtSourceProperties
from .sources import PREDICATE, EvalCache, ExternalSource
from .terms import Atom, atom_key


@dataclass(frozen=True)
class LearnToggles:
    io_learning: bool = True
    linearity: bool = True
    monotonicity: bool = True
    partial: bool = True

    @classmethod
    def none(cls) -> "LearnToggles":
        return cls(False, False, False, False)


@dataclass(frozen=True)
class IoNogoodContext:
    """One external evaluation: who was asked, under what, with what result."""

    source: ExternalSource
    inputs: tuple
    relevant_atoms: "tuple[Atom, ...]"
    assignment: Assignment  # view over relevant_atoms, closed-world outside
    output: tuple
    output_true: bool  # polarity: True when the oracle reported the tuple T
    replacement: Atom


def learn_io_nogood(ctx: IoNogoodContext) -> Nogood:
    """Signed relevant input atoms plus the complementary replacement literal."""
    literals = {
        (atom, ctx.assignment.value(atom) is Truth.TRUE) for atom in ctx.relevant_atoms
    }
    literals.add((ctx.replacement, not ctx.output_true))
    return Nogood(frozenset(literals))


def _input_literals(nogood: Nogood, ctx: IoNogoodContext):
    return sorted(
        ((a, s) for a, s in nogood.literals if a != ctx.replacement),
        key=lambda lit: atom_key(lit[0]),
    )


def minimize_by_linearity(
    nogood: Nogood,
    ctx: IoNogoodContext,
    props: ExtSourceProperties,
    cache: EvalCache,
) -> Nogood:
    """Shrink via tuple-level or atom-level domain independence.

    Tuple-level: only input atoms whose argument tuple equals the output
    tuple can influence it. Atom-level (output-true polarity only): keep
    the true input atoms that individually produce the output.
    """
    if props.tuplelevellinear:
        kept = [
            (atom, sign)
            for atom, sign in _input_literals(nogood, ctx)
            if atom.args == ctx.output
        ]
        return Nogood(frozenset(kept + [(ctx.replacement, not ctx.output_true)]))
    if props.atomlevellinear and ctx.output_true:
        kept = []
        for atom, sign in _input_literals(nogood, ctx):
            if not sign:
                continue
            alone = Assignment(
                {
                    other: Truth.TRUE if other == atom else Truth.FALSE
                    for other in ctx.relevant_atoms
                },
                Truth.FALSE,
            )
            result = cache.evaluate(ctx.source.name, ctx.inputs, alone)
            if ctx.output in result.true_tuples:
                kept.append((atom, sign))
        if kept:
            return Nogood(frozenset(kept + [(ctx.replacement, False)]))
    return nogood


def minimize_by_monotonicity(
    nogood: Nogood, ctx: IoNogoodContext, props: ExtSourceProperties
) -> Nogood:
    """Drop literals whose removal is covered by (anti)monotonicity.

    Output false (nogood carries T e): growing a monotonic input or
    shrinking an antimonotonic one keeps the output false, so true
    literals over monotonic inputs and false literals over antimonotonic
    inputs are redundant. Output true (nogood carries F e): dually, drop
    false literals over monotonic inputs and true literals over
    antimonotonic ones.
    """

    def positions(predicate: str):
        return [
            i
            for i, (kind, term) in enumerate(zip(ctx.source.input_signature, ctx.inputs))
            if kind is PREDICATE and term.value == predicate
        ]

    kept = []
    for atom, sign in _input_literals(nogood, ctx):
        at = positions(atom.predicate)
        all_mono = bool(at) and all(props.is_monotonic(i) for i in at)
        all_anti = bool(at) and all(props.is_antimonotonic(i) for i in at)
        if ctx.output_true:
            droppable = (all_mono and not sign) or (all_anti and sign)
        else:
            droppable = (all_mono and sign) or (all_anti and not sign)
        if not droppable:
            kept.append((atom, sign))
    return Nogood(frozenset(kept + [(ctx.replacement, not ctx.output_true)]))


def minimize_by_partial_oracle(
    nogood: Nogood,
    ctx: IoNogoodContext,
    props: ExtSourceProperties,
    cache: EvalCache,
) -> Nogood:
    """One greedy pass: unassign each literal; keep it only if needed.

    Requires a three-valued source. By knowledge-monotonicity a verdict
    that stays defined without the literal holds under every completion,
    so the literal is redundant. The fixed literal order makes the result
    deterministic; it is not claimed minimal across orders.
    """
    if not props.provides_partial_answer:
        return nogood
    target = Truth.TRUE if ctx.output_true else Truth.FALSE
    values: dict[Atom, Truth] = {atom: Truth.UNKNOWN for atom in ctx.relevant_atoms}
    literals = _input_literals(nogood, ctx)
    for atom, sign in literals:
        values[atom] = Truth.TRUE if sign else Truth.FALSE
    kept = []
    for atom, sign in literals:
        values[atom] = Truth.UNKNOWN
        result = cache.evaluate(
            ctx.source.name, ctx.inputs, Assignment(dict(values), Truth.FALSE)
        )
        if result.outcome(ctx.output) is not target:
            values[atom] = Truth.TRUE if sign else Truth.FALSE
            kept.append((atom, sign))
    return Nogood(frozenset(kept + [(ctx.replacement, not ctx.output_true)]))


def build_io_nogood(
    ctx: IoNogoodContext,
    props: ExtSourceProperties,
    toggles: LearnToggles,
    cache: EvalCache,
) -> Nogood:
    """Full learning pipeline for one evaluation."""
    nogood = learn_io_nogood(ctx)
    if toggles.linearity:
        nogood = minimize_by_linearity(nogood, ctx, props, cache)
    if toggles.monotonicity:
        nogood = minimize_by_monotonicity(nogood, ctx, props)
    if toggles.partial:
        nogood = minimize_by_partial_oracle(nogood, ctx, props, cache)
    return nogood
