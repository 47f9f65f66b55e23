import pytest

from hexsolve.builtins import builtin_registry
from hexsolve.errors import GroundingError, NonTerminationError
from hexsolve.grounding import ground, replacement_atom
from hexsolve.parser import parse_program
from hexsolve.properties import ExtSourceProperties
from hexsolve.sources import CONSTANT, ExternalSource, OracleResult, Registry
from hexsolve.terms import Atom, Constant, ExternalAtom

from corpus import DIFF_PROGRAM, SAFE_TEXTS, SCC_TAGGED, TAIL_RECURSIVE


def test_scc_fixpoint_reaches_all_nodes():
    program = parse_program(SCC_TAGGED)
    gp = ground(program, builtin_registry())
    names = {str(a) for a in gp.universe}
    assert {"start(1)", "scc(1)", "scc(2)", "scc(3)"} <= names
    # the edge literals are assignment independent and were simplified away
    assert gp.instances == {}
    assert "scc(2) :- scc(1)." in {str(r) for r in gp.rules}


def test_facts_only_program():
    program = parse_program("a. b(1). c v d.")
    gp = ground(program, builtin_registry())
    assert gp.iterations <= 1
    assert {str(r) for r in gp.rules} == {"a.", "b(1).", "c v d."}


def test_diff_program_grounds_both_candidates():
    program = parse_program(DIFF_PROGRAM)
    gp = ground(program, builtin_registry())
    rules = {str(r) for r in gp.rules}
    assert "r(a) :- &diff[p, q](a)." in rules
    assert "r(b) :- &diff[p, q](b)." in rules
    replacements = {str(i.replacement) for i in gp.instances.values()}
    assert replacements == {"e_diff_pq(a)", "e_diff_pq(b)"}


def test_replacement_atom_naming():
    eatom = ExternalAtom(
        "diff", (Constant("p"), Constant("q")), (Constant("a"),)
    )
    assert str(replacement_atom(eatom)) == "e_diff_pq(a)"
    assert replacement_atom(eatom) == replacement_atom(eatom)


def test_replacement_atoms_injective_over_inputs():
    program = parse_program(
        "p(a). q(a). r(X) :- &diff[p,q](X). s(X) :- &diff[q,p](X)."
    )
    gp = ground(program, builtin_registry())
    predicates = {i.replacement.predicate for i in gp.instances.values()}
    assert predicates == {"e_diff_pq", "e_diff_qp"}


def test_replacement_naming_avoids_user_predicates():
    program = parse_program(
        "e_diff_pq(a). p(a). r(X) :- &diff[p,q](X), e_diff_pq(X)."
    )
    gp = ground(program, builtin_registry())
    inst = next(iter(gp.instances.values()))
    assert inst.replacement.predicate != "e_diff_pq"


def test_grounding_is_idempotent():
    registry = builtin_registry()
    for text in SAFE_TEXTS:
        once = ground(parse_program(text), registry)
        twice = ground(once.program(), registry)
        assert set(twice.rules) == set(once.rules), text


def test_safe_corpus_grounds_finitely():
    registry = builtin_registry()
    for text in SAFE_TEXTS:
        gp = ground(parse_program(text), registry)
        assert len(gp.universe) < 200, text


def test_recursive_tail_grounds_finitely():
    gp = ground(parse_program(TAIL_RECURSIVE), builtin_registry())
    strings = {str(a) for a in gp.universe}
    assert strings == {'s("abc")', 's("bc")', 's("c")', 's("")'}


def test_nontermination_guard_with_disabled_safety():
    grow = ExternalSource(
        "grow",
        (CONSTANT,),
        1,
        lambda inputs, view: OracleResult(
            frozenset({(Constant(inputs[0].value + "x", quoted=True),)})
        ),
    )
    registry = Registry([grow])
    program = parse_program('s("a"). s(Y) :- s(X), &grow[X](Y).')
    with pytest.raises(NonTerminationError):
        ground(program, registry, disabled=True, iteration_cap=25)


def test_function_terms_rejected_by_grounder():
    program = parse_program("p(f(a)).")
    with pytest.raises(GroundingError):
        ground(program, builtin_registry())


def test_negative_literals_do_not_bind():
    program = parse_program("p(a). q(b). r(X) :- p(X), not q(X).")
    gp = ground(program, builtin_registry())
    rules = {str(r) for r in gp.rules}
    assert "r(a) :- p(a), not q(a)." in rules
    assert not any("r(b)" in r for r in rules)


def test_static_false_positive_external_drops_instance():
    # decrement of 0 has no output: the rule instance can never fire
    program = parse_program("p(0). p(9). r(Y) :- p(X), &decrement[X](Y).")
    gp = ground(program, builtin_registry())
    rules = {str(r) for r in gp.rules}
    assert "r(8) :- p(9)." in rules
    assert not any("p(0)," in r or ":- p(0)" in r for r in rules)


def test_static_negative_external_simplification():
    program = parse_program(
        'ok(X) :- d(X), not &tail["ab"](X). d("b"). d("z").'
    )
    gp = ground(program, builtin_registry())
    rules = {str(r) for r in gp.rules}
    # tail("ab") = "b": the instance for X="b" is statically refuted
    assert 'ok("z") :- d("z").' in rules
    assert not any('ok("b")' in r for r in rules)


def test_over_approximation_matches_textbook_grounding():
    """Answer sets of the grounder output equal those of the full
    instantiation over the active constants (program plus invented)."""
    from bruteforce_ref import brute_force_answer_sets, textbook_full_grounding
    from hexsolve.solver import solve_all
    from hexsolve.terms import Constant as C

    registry = builtin_registry()
    cases = [
        DIFF_PROGRAM,
        SCC_TAGGED,
        "p(a). p(b). q(X) :- p(X), not r(X). r(a).",
        "p(a). q(b). u(X) :- &union[p,q](X).",
        "n(2). n(Y) :- n(X), &decrement[X](Y).",
    ]
    for text in cases:
        program = parse_program(text)
        gp = ground(program, registry)
        constants = {t for a in gp.universe for t in a.args}
        for rule in program.rules:
            for atom in rule.head:
                constants.update(t for t in atom.args if isinstance(t, C))
        full = textbook_full_grounding(program, constants)
        expected = brute_force_answer_sets(full, registry)
        found = set(solve_all(gp, registry))
        assert found == expected, text


def test_random_nonground_pipeline_matches_textbook_grounding():
    """Grounder + solver jointly agree with brute force over the full
    textbook instantiation, on random non-ground programs."""
    from bruteforce_ref import brute_force_answer_sets, textbook_full_grounding
    from corpus import random_nonground_program
    from hexsolve.solver import solve_all
    from hexsolve.terms import Constant as C

    registry = builtin_registry()
    mismatches = []
    for seed in range(60):
        program = random_nonground_program(seed)
        gp = ground(program, registry)
        constants = {t for a in gp.universe for t in a.args}
        for rule in program.rules:
            for atom in rule.head:
                constants.update(t for t in atom.args if isinstance(t, C))
        full = textbook_full_grounding(program, constants)
        expected = brute_force_answer_sets(full, registry)
        found = set(solve_all(gp, registry))
        if found != expected:
            mismatches.append(seed)
    assert mismatches == []


def test_random_integer_programs_match_textbook_grounding():
    """Sum-threshold guessing, tagged monotonicity and recursive
    decrement agree with the reference semantics."""
    from bruteforce_ref import brute_force_answer_sets, textbook_full_grounding
    from corpus import random_integer_program
    from hexsolve.solver import solve_all
    from hexsolve.terms import Constant as C

    registry = builtin_registry()
    mismatches = []
    checked = 0
    for seed in range(80):
        program = random_integer_program(seed)
        gp = ground(program, registry)
        constants = {t for a in gp.universe for t in a.args}
        for rule in program.rules:
            for atom in rule.head:
                constants.update(t for t in atom.args if isinstance(t, C))
        full = textbook_full_grounding(program, constants)
        atom_count = len(
            {
                a
                for r in full.rules
                for a in list(r.head) + [b for b in r.body if isinstance(b, Atom)]
            }
        )
        if atom_count > 14:  # keep the brute-force side tractable
            continue
        checked += 1
        expected = brute_force_answer_sets(full, registry)
        found = set(solve_all(gp, registry))
        if found != expected:
            mismatches.append(seed)
    assert mismatches == []
    assert checked >= 30


def test_occurrences_with_different_tags_share_instance_props():
    program = parse_program(
        """
        p(a). q(b).
        r(X) :- &diff[p,q](X)<monotonic p>.
        s(X) :- &diff[p,q](X)<finitedomain 0>.
        """
    )
    gp = ground(program, builtin_registry())
    by_outputs = {
        inst.outputs: inst for inst in gp.instances.values()
    }
    inst = by_outputs[(Constant("a"),)]
    # tags from both occurrences hold in addition to the interface ones
    assert inst.props.finite_domain_outputs == frozenset({0})
    assert 0 in inst.props.monotonic_inputs
    assert inst.props.tuplelevellinear  # from the interface


def test_guessed_instance_kept_even_if_never_true():
    # a is never in diff[p,q] under any assignment (p(a) absent), but the
    # ground-output occurrence stays and is settled by guess + check
    program = parse_program("q(a). r :- &diff[p,q](a).")
    gp = ground(program, builtin_registry())
    assert len(gp.instances) == 1
