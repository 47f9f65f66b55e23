"""Answer set enumeration for ground programs.

The search is chronological backtracking with unit propagation over the
nogood store (static rule/guess nogoods plus learned io-nogoods). Every
complete assignment is a model candidate; it becomes an answer set if

  (i)  the guessed replacement atoms agree with the oracles, and
  (ii) no complete assignment with a strictly smaller set of true atoms
       models the reduct (the ground rules whose bodies the candidate
       satisfies), re-evaluating external atoms along the way.

Unfoundedness of ordinary atoms is handled entirely by check (ii); there
is no completion or loop-nogood machinery. The decision heuristic is the
lexicographic atom order, positive phase first, which makes enumeration
order and statistics reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Optional

from .assignment import Assignment, Truth
from .errors import CheckExplosionError, ExternalSourceError
from .grounding import GroundProgram
from .learning import IoNogoodContext, LearnToggles, build_io_nogood
from .nogoods import AtomTable, Nogood, encode
from .sources import EvalCache, Registry
from .terms import Atom, ExternalAtom

_UNSET, _TRUE, _FALSE = 0, 1, 2


@dataclass
class SolveStats:
    candidates: int = 0
    external_evaluations: int = 0
    learned_nogoods: int = 0
    answer_sets: int = 0
    conflicts: int = 0
    decisions: int = 0

    def as_lines(self) -> "list[str]":
        return [
            f"candidates: {self.candidates}",
            f"external_evaluations: {self.external_evaluations}",
            f"learned_nogoods: {self.learned_nogoods}",
            f"answer_sets: {self.answer_sets}",
            f"conflicts: {self.conflicts}",
            f"decisions: {self.decisions}",
        ]


@dataclass
class SolveOptions:
    learning: LearnToggles = field(default_factory=LearnToggles)
    max_answer_sets: Optional[int] = None
    flp_cap: int = 24
    flp_search_fallback: bool = False


class SearchState:
    """Counting-based unit propagation over integer nogoods.

    Literal +(i+1) states atom i true, -(i+1) states it false; a nogood
    is violated when every literal holds. Counts are maintained eagerly
    on assign/retract, and a full rescan after each backtrack keeps the
    unit queue sound in the presence of nogoods learned mid-search.
    """

    def __init__(self, n_atoms: int):
        self.n = n_atoms
        self.values = [_UNSET] * n_atoms
        self.trail: list[int] = []
        self.decisions: list[tuple[int, bool, int]] = []
        self.nogoods: list[tuple[int, ...]] = []
        self._known: set[tuple[int, ...]] = set()
        self.occur: dict[int, list[int]] = {}
        self.holding: list[int] = []
        self._units: list[int] = []
        self._conflict: Optional[int] = None

    # -- store ---------------------------------------------------------

    def add_nogood(self, lits: "tuple[int, ...]") -> bool:
        """Register a nogood; returns False if it was already known."""
        lits = tuple(sorted(set(lits)))
        if lits in self._known or self._inconsistent(lits):
            return False
        self._known.add(lits)
        index = len(self.nogoods)
        self.nogoods.append(lits)
        holds = 0
        for lit in lits:
            self.occur.setdefault(lit, []).append(index)
            if self._holds(lit):
                holds += 1
        self.holding.append(holds)
        if holds == len(lits) and self._conflict is None:
            self._conflict = index
        elif holds == len(lits) - 1:
            self._units.append(index)
        return True

    @staticmethod
    def _inconsistent(lits) -> bool:
        return any(-lit in lits for lit in lits)

    def _holds(self, lit: int) -> bool:
        value = self.values[abs(lit) - 1]
        return value == (_TRUE if lit > 0 else _FALSE)

    # -- assignment ----------------------------------------------------

    def _assign(self, atom: int, value: int) -> None:
        self.values[atom] = value
        self.trail.append(atom)
        lit = (atom + 1) if value == _TRUE else -(atom + 1)
        for index in self.occur.get(lit, ()):
            self.holding[index] += 1
            size = len(self.nogoods[index])
            if self.holding[index] == size and self._conflict is None:
                self._conflict = index
            elif self.holding[index] == size - 1:
                self._units.append(index)

    def _retract_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            atom = self.trail.pop()
            value = self.values[atom]
            lit = (atom + 1) if value == _TRUE else -(atom + 1)
            for index in self.occur.get(lit, ()):
                self.holding[index] -= 1
            self.values[atom] = _UNSET

    def _refresh(self) -> None:
        """Recompute unit queue and conflict flag from the counts."""
        self._conflict = None
        self._units = []
        for index, lits in enumerate(self.nogoods):
            if self.holding[index] == len(lits):
                if self._conflict is None:
                    self._conflict = index
            elif self.holding[index] == len(lits) - 1:
                self._units.append(index)

    # -- search --------------------------------------------------------

    def propagate(self) -> "Optional[tuple[int, ...]]":
        """Unit propagation to fixpoint; returns a violated nogood or None."""
        while True:
            if self._conflict is not None:
                return self.nogoods[self._conflict]
            if not self._units:
                return None
            index = self._units.pop()
            lits = self.nogoods[index]
            if self.holding[index] != len(lits) - 1:
                continue
            pending = None
            for lit in lits:
                if not self._holds(lit):
                    pending = lit
                    break
            if pending is None or self.values[abs(pending) - 1] != _UNSET:
                continue  # already satisfied through the pending literal
            # all other literals hold: the pending one must not
            self._assign(abs(pending) - 1, _FALSE if pending > 0 else _TRUE)

    def decide(self) -> None:
        for atom in range(self.n):
            if self.values[atom] == _UNSET:
                self.decisions.append((atom, False, len(self.trail)))
                self._assign(atom, _TRUE)
                return
        raise AssertionError("decide() called on a complete assignment")

    def next_branch(self) -> bool:
        """Chronological backtracking; False when the search space is spent."""
        while self.decisions:
            atom, flipped, mark = self.decisions.pop()
            self._retract_to(mark)
            if not flipped:
                self.decisions.append((atom, True, mark))
                self._assign(atom, _FALSE)
                self._refresh()
                return True
        return False

    def complete(self) -> bool:
        return len(self.trail) == self.n

    def snapshot(self, table: AtomTable) -> Assignment:
        values = {
            table.atoms[i]: Truth.TRUE if v == _TRUE else Truth.FALSE
            for i, v in enumerate(self.values)
        }
        return Assignment(values, Truth.FALSE)


def _instances_in_order(ground: GroundProgram):
    return sorted(ground.instances.values(), key=lambda inst: str(inst.replacement))


def compatibility_check(
    candidate: Assignment,
    ground: GroundProgram,
    cache: EvalCache,
    toggles: LearnToggles = LearnToggles.none(),
) -> "tuple[bool, list[Nogood]]":
    """Evaluate every external atom under the candidate.

    ok iff every replacement-atom guess matches its oracle. Io-nogoods
    are produced for every evaluation regardless of whether the guess was
    correct, so both confirming and refuting knowledge is retained.
    """
    ok = True
    learned: list[Nogood] = []
    for instance in _instances_in_order(ground):
        relevant = ground.relevant_atoms(instance)
        view = candidate.restrict(relevant)
        result = cache.evaluate(instance.name, instance.inputs, view)
        actual = result.outcome(instance.outputs)
        if actual is Truth.UNKNOWN:
            raise ExternalSourceError(
                f"&{instance.name} answered unknown under a complete assignment"
            )
        if candidate.value(instance.replacement) is not actual:
            ok = False
        if toggles.io_learning:
            ctx = IoNogoodContext(
                source=instance.source,
                inputs=instance.inputs,
                relevant_atoms=relevant,
                assignment=view,
                output=instance.outputs,
                output_true=actual is Truth.TRUE,
                replacement=instance.replacement,
            )
            learned.append(build_io_nogood(ctx, instance.props, toggles, cache))
    return ok, learned


def _body_satisfied_by_candidate(rule, candidate: Assignment, ground: GroundProgram) -> bool:
    """Body truth under a compatibility-checked candidate; replacement
    atoms already carry the oracle verdicts."""
    for literal in rule.body_pos:
        atom = (
            ground.instance_for(literal).replacement
            if isinstance(literal, ExternalAtom)
            else literal
        )
        if candidate.value(atom) is not Truth.TRUE:
            return False
    for literal in rule.body_neg:
        atom = (
            ground.instance_for(literal).replacement
            if isinstance(literal, ExternalAtom)
            else literal
        )
        if candidate.value(atom) is not Truth.FALSE:
            return False
    return True


def _literal_true(literal, assignment: Assignment, ground, cache: EvalCache) -> bool:
    """Truth of one body literal under an arbitrary complete assignment,
    re-evaluating external atoms through their oracles."""
    if isinstance(literal, ExternalAtom):
        instance = ground.instance_for(literal)
        view = assignment.restrict(ground.relevant_atoms(instance))
        result = cache.evaluate(instance.name, instance.inputs, view)
        return result.outcome(instance.outputs) is Truth.TRUE
    return assignment.value(literal) is Truth.TRUE


def _models_reduct(reduct, assignment: Assignment, ground, cache: EvalCache) -> bool:
    for rule in reduct:
        if any(assignment.value(a) is Truth.TRUE for a in rule.head):
            continue
        body_holds = all(
            _literal_true(b, assignment, ground, cache) for b in rule.body_pos
        ) and all(
            not _literal_true(b, assignment, ground, cache) for b in rule.body_neg
        )
        if body_holds:
            return False
    return True


def flp_check(
    candidate: Assignment,
    ground: GroundProgram,
    cache: EvalCache,
    options: Optional[SolveOptions] = None,
) -> bool:
    """Subset-minimality of the candidate wrt. the reduct.

    True iff no complete assignment whose true atoms form a proper subset
    of the candidate's true ordinary atoms models the reduct.
    """
    options = options or SolveOptions()
    true_atoms = sorted(
        (a for a in ground.universe if candidate.value(a) is Truth.TRUE), key=str
    )
    reduct = [
        rule
        for rule in ground.rules
        if _body_satisfied_by_candidate(rule, candidate, ground)
    ]
    if len(true_atoms) > options.flp_cap:
        if not options.flp_search_fallback:
            raise CheckExplosionError(len(true_atoms), options.flp_cap)
        return not _smaller_model_exists_search(candidate, ground, cache, reduct, true_atoms)
    base = {atom: Truth.FALSE for atom in ground.universe}
    for size in range(len(true_atoms)):
        for subset in combinations(true_atoms, size):
            values = dict(base)
            for atom in subset:
                values[atom] = Truth.TRUE
            smaller = Assignment(values, Truth.FALSE)
            if _models_reduct(reduct, smaller, ground, cache):
                return False
    return True


def _smaller_model_exists_search(
    candidate: Assignment, ground: GroundProgram, cache: EvalCache, reduct, true_atoms
) -> bool:
    """Assumption-driven fallback over the same engine: search for a model
    of the reduct below the candidate instead of enumerating subsets."""
    from .nogoods import rule_nogood

    instances = {}
    for rule in reduct:
        for _, eatom in rule.external_atoms():
            key = (eatom.name, eatom.inputs, eatom.outputs)
            instances[key] = ground.instances[key]
    atoms = list(ground.universe)
    for instance in instances.values():
        atoms.extend([instance.replacement, instance.negation_atom])
    table = AtomTable(atoms)
    state = SearchState(len(table))
    for rule in reduct:
        state.add_nogood(table.to_ints(rule_nogood(rule, ground.instances)))
    for instance in instances.values():
        state.add_nogood(
            (table.lit(instance.replacement, True), table.lit(instance.negation_atom, True))
        )
        state.add_nogood(
            (table.lit(instance.replacement, False), table.lit(instance.negation_atom, False))
        )
    for atom in ground.universe:
        if candidate.value(atom) is not Truth.TRUE:
            state.add_nogood((table.lit(atom, True),))
    # a proper subset leaves at least one currently-true atom false
    state.add_nogood(tuple(table.lit(a, True) for a in true_atoms))
    state._refresh()
    while True:
        conflict = state.propagate()
        if conflict is not None:
            if not state.next_branch():
                return False
            continue
        if state.complete():
            solution = state.snapshot(table)
            guesses_ok = True
            for instance in instances.values():
                view = solution.restrict(ground.relevant_atoms(instance))
                result = cache.evaluate(instance.name, instance.inputs, view)
                if result.outcome(instance.outputs) is not solution.value(
                    instance.replacement
                ):
                    guesses_ok = False
                    break
            if guesses_ok and _models_reduct(reduct, solution, ground, cache):
                return True
            if not state.next_branch():
                return False
            continue
        state.decide()


class _CompatChecker:
    """Per-instance compatibility with memoization on the relevant-atom
    value vector; identical input states across candidates are frequent."""

    def __init__(self, ground: GroundProgram, table: AtomTable, cache: EvalCache,
                 toggles: LearnToggles):
        self.ground = ground
        self.cache = cache
        self.toggles = toggles
        self.entries = []
        for instance in _instances_in_order(ground):
            relevant = ground.relevant_atoms(instance)
            self.entries.append(
                (
                    instance,
                    relevant,
                    [table.index[a] for a in relevant],
                    table.index[instance.replacement],
                )
            )
        self.table = table
        self._memo: dict = {}

    def check(self, values: "list[int]") -> "tuple[bool, list[tuple[int, ...]]]":
        """values is the engine's truth array (1 true, 2 false)."""
        ok = True
        learned: list[tuple[int, ...]] = []
        for index, (instance, relevant, ids, replacement_id) in enumerate(self.entries):
            key = (index, bytes(values[i] for i in ids))
            hit = self._memo.get(key)
            if hit is None:
                view = Assignment(
                    {
                        atom: Truth.TRUE if values[i] == _TRUE else Truth.FALSE
                        for atom, i in zip(relevant, ids)
                    },
                    Truth.FALSE,
                )
                result = self.cache.evaluate(instance.name, instance.inputs, view)
                actual = result.outcome(instance.outputs)
                if actual is Truth.UNKNOWN:
                    raise ExternalSourceError(
                        f"&{instance.name} answered unknown under a complete assignment"
                    )
                nogood_ints = None
                if self.toggles.io_learning:
                    ctx = IoNogoodContext(
                        source=instance.source,
                        inputs=instance.inputs,
                        relevant_atoms=relevant,
                        assignment=view,
                        output=instance.outputs,
                        output_true=actual is Truth.TRUE,
                        replacement=instance.replacement,
                    )
                    nogood = build_io_nogood(ctx, instance.props, self.toggles, self.cache)
                    nogood_ints = self.table.to_ints(nogood)
                hit = (actual is Truth.TRUE, nogood_ints)
                self._memo[key] = hit
            truth, nogood_ints = hit
            if values[replacement_id] != (_TRUE if truth else _FALSE):
                ok = False
            if nogood_ints is not None:
                learned.append(nogood_ints)
        return ok, learned


def solve(
    ground: GroundProgram,
    registry: Registry,
    options: Optional[SolveOptions] = None,
    stats: Optional[SolveStats] = None,
    cache: Optional[EvalCache] = None,
) -> "Iterator[frozenset[Atom]]":
    """Enumerate answer sets (sets of true ordinary atoms), deterministically."""
    options = options or SolveOptions()
    stats = stats if stats is not None else SolveStats()
    cache = cache or EvalCache(registry)

    table, static_nogoods = encode(ground)
    state = SearchState(len(table))
    for nogood in static_nogoods:
        state.add_nogood(table.to_ints(nogood))
    state._refresh()
    checker = _CompatChecker(ground, table, cache, options.learning)

    emitted = 0
    while True:
        conflict = state.propagate()
        if conflict is not None:
            stats.conflicts += 1
            if not state.next_branch():
                break
            continue
        if state.complete():
            stats.candidates += 1
            ok, learned = checker.check(state.values)
            if options.learning.io_learning:
                for nogood_ints in learned:
                    if state.add_nogood(nogood_ints):
                        stats.learned_nogoods += 1
            if ok and flp_check(state.snapshot(table), ground, cache, options):
                stats.answer_sets += 1
                stats.external_evaluations = cache.calls
                ordinary = ground.universe_set()
                yield frozenset(
                    table.atoms[i]
                    for i, v in enumerate(state.values)
                    if v == _TRUE and table.atoms[i] in ordinary
                )
                emitted += 1
                if options.max_answer_sets is not None and emitted >= options.max_answer_sets:
                    break
            if not state.next_branch():
                break
            continue
        state.decide()
        stats.decisions += 1
    stats.external_evaluations = cache.calls


def solve_all(
    ground: GroundProgram,
    registry: Registry,
    options: Optional[SolveOptions] = None,
    stats: Optional[SolveStats] = None,
    cache: Optional[EvalCache] = None,
) -> "list[frozenset[Atom]]":
    return list(solve(ground, registry, options, stats, cache))
