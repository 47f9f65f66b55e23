import itertools

import pytest

from hexsolve.assignment import Assignment, Truth
from hexsolve.builtins import builtin_registry, make_diff, make_union
from hexsolve.learning import (
    IoNogoodContext,
    LearnToggles,
    build_io_nogood,
    learn_io_nogood,
    minimize_by_linearity,
    minimize_by_monotonicity,
    minimize_by_partial_oracle,
)
from hexsolve.nogoods import Nogood
from hexsolve.properties import ExtSourceProperties
from hexsolve.sources import EvalCache, ExternalSource, OracleResult, PREDICATE, Registry
from hexsolve.terms import Atom, Constant

T, F, U = Truth.TRUE, Truth.FALSE, Truth.UNKNOWN

A_, B_ = Constant("a"), Constant("b")
PA, PB, QA, QB = (
    Atom("p", (A_,)),
    Atom("p", (B_,)),
    Atom("q", (A_,)),
    Atom("q", (B_,)),
)
RELEVANT = (PA, PB, QA, QB)
PQ = (Constant("p"), Constant("q"))
E_A, E_B = Atom("e_diff_pq", (A_,)), Atom("e_diff_pq", (B_,))

# the evaluation assignment of the worked difference example:
# p(a), p(b), q(b) true and q(a) false over the universe {a, b}
ASSIGN = Assignment({PA: T, PB: T, QA: F, QB: T}, F)


def diff_contexts():
    diff = make_diff()
    positive = IoNogoodContext(diff, PQ, RELEVANT, ASSIGN, (A_,), True, E_A)
    negative = IoNogoodContext(diff, PQ, RELEVANT, ASSIGN, (B_,), False, E_B)
    return diff, positive, negative


def cache():
    return EvalCache(builtin_registry())


def test_io_nogoods_match_worked_example():
    _, positive, negative = diff_contexts()
    assert learn_io_nogood(positive) == Nogood.of(
        (PA, True), (PB, True), (QA, False), (QB, True), (E_A, False)
    )
    assert learn_io_nogood(negative) == Nogood.of(
        (PA, True), (PB, True), (QA, False), (QB, True), (E_B, True)
    )


def test_zero_input_nogood_is_replacement_only():
    source = ExternalSource("c0", (), 0, lambda i, v: OracleResult(frozenset({()})))
    ctx = IoNogoodContext(source, (), (), Assignment({}, F), (), True, Atom("e_c0"))
    assert learn_io_nogood(ctx) == Nogood.of((Atom("e_c0"), False))


def test_tuplelevel_linearity_reductions():
    diff, positive, negative = diff_contexts()
    reduced_pos = minimize_by_linearity(
        learn_io_nogood(positive), positive, diff.properties, cache()
    )
    reduced_neg = minimize_by_linearity(
        learn_io_nogood(negative), negative, diff.properties, cache()
    )
    assert reduced_pos == Nogood.of((PA, True), (QA, False), (E_A, False))
    assert reduced_neg == Nogood.of((PB, True), (QB, True), (E_B, True))


def test_linearity_fixpoint_when_single_tuple():
    diff, positive, _ = diff_contexts()
    small = Nogood.of((PA, True), (QA, False), (E_A, False))
    assert minimize_by_linearity(small, positive, diff.properties, cache()) == small


def test_atomlevel_linearity_keeps_producing_atoms():
    union = make_union()
    qc = Atom("q", (Constant("c"),))
    relevant = (PA, PB, qc)
    assignment = Assignment({PA: T, PB: T, qc: T}, F)
    e_a = Atom("e_union_pq", (A_,))
    ctx = IoNogoodContext(union, PQ, relevant, assignment, (A_,), True, e_a)
    reduced = minimize_by_linearity(
        learn_io_nogood(ctx), ctx, union.properties, cache()
    )
    assert reduced == Nogood.of((PA, True), (e_a, False))


def test_monotonicity_drops_p_literal_on_negative_nogood():
    diff, _, negative = diff_contexts()
    start = Nogood.of((PB, True), (QB, True), (E_B, True))
    reduced = minimize_by_monotonicity(start, negative, diff.properties)
    assert reduced == Nogood.of((QB, True), (E_B, True))


def test_monotonicity_keeps_needed_literals_on_positive_nogood():
    diff, positive, _ = diff_contexts()
    start = Nogood.of((PA, True), (QA, False), (E_A, False))
    assert minimize_by_monotonicity(start, positive, diff.properties) == start


def test_monotonicity_no_declared_inputs_unchanged():
    diff, _, negative = diff_contexts()
    plain = ExtSourceProperties()
    start = learn_io_nogood(negative)
    assert minimize_by_monotonicity(start, negative, plain) == start


def test_partial_oracle_reduces_negative_nogood():
    diff, _, negative = diff_contexts()
    reduced = minimize_by_partial_oracle(
        learn_io_nogood(negative), negative, diff.properties, cache()
    )
    assert reduced == Nogood.of((QB, True), (E_B, True))


def test_partial_oracle_requires_capability():
    diff, _, negative = diff_contexts()
    two_valued = ExtSourceProperties()  # no provides_partial_answer
    start = learn_io_nogood(negative)
    assert minimize_by_partial_oracle(start, negative, two_valued, cache()) == start


def test_partial_oracle_always_unknown_source_unchanged():
    always_u = ExternalSource(
        "vague",
        (PREDICATE,),
        1,
        lambda inputs, view: OracleResult(
            frozenset(), frozenset(), all_unknown=bool(view.unknown_atoms())
        )
        if view.unknown_atoms()
        else OracleResult(frozenset({(A_,)})),
        ExtSourceProperties(provides_partial_answer=True),
    )
    registry = Registry([always_u])
    relevant = (PA, PB)
    assignment = Assignment({PA: T, PB: T}, F)
    e = Atom("e_vague_p", (A_,))
    ctx = IoNogoodContext(always_u, (Constant("p"),), relevant, assignment, (A_,), True, e)
    start = learn_io_nogood(ctx)
    reduced = minimize_by_partial_oracle(
        start, ctx, always_u.properties, EvalCache(registry)
    )
    assert reduced == start


def test_zero_input_literal_nogood_unchanged_by_partial():
    diff, _, _ = diff_contexts()
    ctx = IoNogoodContext(diff, PQ, (), Assignment({}, F), (A_,), False, E_A)
    start = Nogood.of((E_A, True))
    assert minimize_by_partial_oracle(start, ctx, diff.properties, cache()) == start


def test_pipeline_stage_order_and_toggles():
    diff, _, negative = diff_contexts()
    full = build_io_nogood(negative, diff.properties, LearnToggles(), cache())
    assert full == Nogood.of((QB, True), (E_B, True))
    linear_only = build_io_nogood(
        negative,
        diff.properties,
        LearnToggles(linearity=True, monotonicity=False, partial=False),
        cache(),
    )
    assert linear_only == Nogood.of((PB, True), (QB, True), (E_B, True))
    untouched = build_io_nogood(
        negative,
        diff.properties,
        LearnToggles(linearity=False, monotonicity=False, partial=False),
        cache(),
    )
    assert untouched == learn_io_nogood(negative)


def _nogood_is_valid(nogood: Nogood, ctx: IoNogoodContext, registry) -> bool:
    """A minimized io-nogood is valid iff for every complete assignment
    satisfying its input literals the oracle forces the replacement atom
    to the complement of the nogood's replacement literal."""
    eval_cache = EvalCache(registry)
    inputs = [(a, s) for a, s in nogood.literals if a != ctx.replacement]
    replacement_sign = dict(nogood.literals)[ctx.replacement]
    for bits in itertools.product([T, F], repeat=len(ctx.relevant_atoms)):
        values = dict(zip(ctx.relevant_atoms, bits))
        if any(values[a] is not (T if s else F) for a, s in inputs):
            continue
        result = eval_cache.evaluate(
            ctx.source.name, ctx.inputs, Assignment(values, F)
        )
        actual = result.outcome(ctx.output)
        # nogood forbids replacement_sign, so the oracle must force the
        # opposite sign whenever the inputs match
        if (actual is T) == replacement_sign:
            return False
    return True


def test_minimization_validity_and_shrinking_exhaustive():
    """Over a four-constant universe: every stage output is a subset of
    its input, keeps the replacement literal, and stays valid."""
    registry = builtin_registry()
    diff, union = make_diff(), make_union()
    constants = [Constant(c) for c in "abcd"]
    universe = tuple(
        Atom(p, (c,)) for p in ("p", "q") for c in constants
    )
    eval_cache = EvalCache(registry)
    checked = 0
    for bits in range(2 ** len(universe)):
        if bits % 7:  # sample a deterministic slice; full space is 256*outputs
            continue
        values = {
            a: (T if bits >> i & 1 else F) for i, a in enumerate(universe)
        }
        assignment = Assignment(values, F)
        for source in (diff, union):
            result = eval_cache.evaluate(source.name, PQ, assignment)
            for constant in constants:
                output = (constant,)
                truth = result.outcome(output) is T
                replacement = Atom(f"e_{source.name}", output)
                ctx = IoNogoodContext(
                    source, PQ, universe, assignment, output, truth, replacement
                )
                base = learn_io_nogood(ctx)
                stages = {
                    "base": base,
                    "linear": minimize_by_linearity(
                        base, ctx, source.properties, eval_cache
                    ),
                }
                stages["mono"] = minimize_by_monotonicity(
                    stages["linear"], ctx, source.properties
                )
                stages["partial"] = minimize_by_partial_oracle(
                    stages["mono"], ctx, source.properties, eval_cache
                )
                previous = base
                for name in ("linear", "mono", "partial"):
                    nogood = stages[name]
                    assert nogood.literals <= previous.literals | {
                        (replacement, not truth)
                    }
                    assert (replacement, not truth) in nogood.literals
                    previous = nogood
                    assert _nogood_is_valid(nogood, ctx, registry), (
                        source.name,
                        name,
                        str(nogood),
                    )
                checked += 1
    assert checked > 100
