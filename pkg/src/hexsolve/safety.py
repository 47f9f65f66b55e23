"""Finite-groundability analysis: strong and liberal safety.

Strong safety forbids value invention by recursive external atoms (those
on a cycle of the predicate dependency graph). The liberal check is a
conservative fixpoint over (rule, variable) boundedness that additionally
credits declared finiteness properties: finite output domains, output
domains relative to an input, and well-orderings. A variable survives the
fixpoint only if one of the clauses below justifies it; every variable of
every rule must survive for the program to be safe.

Boundedness clauses for variable V in rule r:
  (a) V occurs in a positive ordinary body atom whose other variables are
      bounded and whose predicate is range-restricted (all rules deriving
      it bind their head variables);
  (b) V is an output of a non-recursive positive external atom whose
      input variables are all bounded;
  (c) V sits at an output position declared finitedomain;
  (d) V sits at output j with relativefinitedomain(i, j) and input i is
      bounded;
  (e) as (d) for wellordering / wellorderingstrlen;
  (f) a registered safety plugin vouches for (r, V).

Clauses (c)-(e) also require the external atom's input variables to be
bounded so that a Safe verdict always yields an instantiation order the
grounder can realize. The fixpoint is computed greatest-first (start from
all-bounded, drop unjustified pairs): benign cycles among ordinary
predicates and well-ordered recursion justify themselves, which a least
fixpoint would reject even for strongly safe programs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .sources import PREDICATE, Registry, effective_properties
from .terms import Atom, Constant, ExternalAtom, Program, Rule, Variable


class Verdict(enum.Enum):
    SAFE = "safe"
    UNSAFE = "unsafe"


class Mode(enum.Enum):
    STRONG = "strong"
    LIBERAL = "liberal"
    DISABLED = "disabled"


@dataclass(frozen=True)
class Hint:
    """Unsafe-program diagnostic; rule indices are 1-based for display."""

    rule_index: int
    variable: str
    reason: str

    def __str__(self) -> str:
        return f"rule r{self.rule_index}, variable {self.variable}: {self.reason}"


@dataclass(frozen=True)
class SafetyReport:
    verdict: Verdict
    mode: Mode
    hints: "tuple[Hint, ...]" = ()
    iterations: int = 0

    @property
    def safe(self) -> bool:
        return self.verdict is Verdict.SAFE


# A plugin may vouch for additional (rule_index, variable) pairs, given the
# program, the dependency graph and the currently bounded pairs (0-based
# rule indices). It must only claim boundedness it can guarantee.
SafetyPlugin = Callable[
    [Program, "DependencyGraph", "frozenset[tuple[int, str]]"],
    Iterable["tuple[int, str]"],
]


def _external_node(rule_index: int, position: int) -> str:
    return f"&{rule_index}.{position}"


@dataclass
class DependencyGraph:
    """Predicate dependency graph including external atom occurrences."""

    nodes: "set[str]" = field(default_factory=set)
    edges: "dict[str, set[str]]" = field(default_factory=dict)
    # occurrence node -> (rule index, ExternalAtom)
    external_occurrences: "dict[str, tuple[int, ExternalAtom]]" = field(
        default_factory=dict
    )
    scc_index: "dict[str, int]" = field(default_factory=dict)

    def add_edge(self, src: str, dst: str) -> None:
        self.nodes.add(src)
        self.nodes.add(dst)
        self.edges.setdefault(src, set()).add(dst)

    def is_recursive(self, node: str) -> bool:
        """An occurrence is recursive iff it lies on a dependency cycle."""
        component = self.scc_index.get(node)
        if component is None:
            return False
        return sum(1 for c in self.scc_index.values() if c == component) > 1

    def same_component(self, a: str, b: str) -> bool:
        return (
            a in self.scc_index
            and b in self.scc_index
            and self.scc_index[a] == self.scc_index[b]
        )


def _tarjan(nodes: "set[str]", edges: "dict[str, set[str]]") -> "dict[str, int]":
    index_of: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    scc_of: dict[str, int] = {}
    counter = [0]
    next_scc = [0]

    for root in sorted(nodes):
        if root in index_of:
            continue
        work = [(root, iter(sorted(edges.get(root, ()))))]
        index_of[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, successors = work[-1]
            advanced = False
            for succ in successors:
                if succ not in index_of:
                    index_of[succ] = low[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(sorted(edges.get(succ, ())))))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index_of[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index_of[node]:
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    scc_of[member] = next_scc[0]
                    if member == node:
                        break
                next_scc[0] += 1
    return scc_of


def build_dependency_graph(program: Program) -> DependencyGraph:
    graph = DependencyGraph()
    for index, rule in enumerate(program.rules):
        head_preds = [a.predicate for a in rule.head]
        body_atoms = [b for b in rule.body if isinstance(b, Atom)]
        body_preds = [a.predicate for a in body_atoms]
        for pred in head_preds + body_preds:
            graph.nodes.add(pred)
        # body predicate -> head predicate
        for src in body_preds:
            for dst in head_preds:
                graph.add_edge(src, dst)
        for position, (_, eatom) in enumerate(rule.external_atoms()):
            node = _external_node(index, position)
            graph.nodes.add(node)
            graph.external_occurrences[node] = (index, eatom)
            input_vars = eatom.input_variables()
            # predicate inputs feed the external atom
            for term in eatom.inputs:
                if isinstance(term, Constant) and not term.quoted and isinstance(
                    term.value, str
                ):
                    graph.add_edge(term.value, node)
            # so does any body atom sharing a variable with its inputs
            for atom in body_atoms:
                if atom.variables() & input_vars:
                    graph.add_edge(atom.predicate, node)
            for dst in head_preds:
                graph.add_edge(node, dst)
    graph.scc_index = _tarjan(graph.nodes, graph.edges)
    return graph


def _ordinary_bound_variables(rule: Rule) -> "set[str]":
    """Variables bound by positive ordinary atoms, closed under positive
    external outputs whose inputs are already bound."""
    bound = {
        v for b in rule.body_pos if isinstance(b, Atom) for v in b.variables()
    }
    changed = True
    while changed:
        changed = False
        for literal in rule.body_pos:
            if isinstance(literal, ExternalAtom) and literal.input_variables() <= bound:
                new = literal.output_variables() - bound
                if new:
                    bound |= new
                    changed = True
    return bound


def check_strong_safety(program: Program, graph: DependencyGraph) -> SafetyReport:
    """Ordinary safety first, then no value invention by recursive externals."""
    hints: list[Hint] = []
    for index, rule in enumerate(program.rules):
        bound = _ordinary_bound_variables(rule)
        for variable in sorted(rule.variables() - bound):
            hints.append(
                Hint(
                    index + 1,
                    variable,
                    "does not occur in a positive body atom or a bound external output",
                )
            )
    if hints:
        return SafetyReport(Verdict.UNSAFE, Mode.STRONG, tuple(hints))

    for node, (index, eatom) in sorted(graph.external_occurrences.items()):
        rule = program.rules[index]
        if (True, eatom) not in rule.external_atoms():
            continue  # negated occurrences never drive instantiation
        if not graph.is_recursive(node):
            continue
        domain_atoms = [
            b
            for b in rule.body_pos
            if isinstance(b, Atom) and not graph.same_component(b.predicate, node)
        ]
        for variable in sorted(eatom.output_variables()):
            if not any(variable in a.variables() for a in domain_atoms):
                hints.append(
                    Hint(
                        index + 1,
                        variable,
                        f"output of recursive &{eatom.name} is not bound by a "
                        "non-recursive positive body atom",
                    )
                )
    if hints:
        return SafetyReport(Verdict.UNSAFE, Mode.STRONG, tuple(hints))
    return SafetyReport(Verdict.SAFE, Mode.STRONG)


def _output_positions(eatom: ExternalAtom, variable: str) -> "list[int]":
    return [
        j
        for j, term in enumerate(eatom.outputs)
        if isinstance(term, Variable) and term.name == variable
    ]


def check_liberal_safety(
    program: Program,
    graph: DependencyGraph,
    registry: Registry,
    plugins: Sequence[SafetyPlugin] = (),
) -> SafetyReport:
    rules = program.rules
    all_pairs = {
        (index, variable)
        for index, rule in enumerate(rules)
        for variable in rule.variables()
    }
    bounded = set(all_pairs)
    # positive external occurrences per rule, with effective properties
    occurrences: dict[int, list] = {}
    recursive: dict[tuple[int, int], bool] = {}
    for node, (index, eatom) in graph.external_occurrences.items():
        position = len(occurrences.setdefault(index, []))
        positive = (True, eatom) in rules[index].external_atoms()
        props = effective_properties(eatom, registry.lookup(eatom.name))
        occurrences[index].append((eatom, positive, props))
        recursive[(index, position)] = graph.is_recursive(node)

    head_rules_of: dict[str, list[int]] = {}
    for index, rule in enumerate(rules):
        for atom in rule.head:
            head_rules_of.setdefault(atom.predicate, []).append(index)

    def range_restricted(predicate: str) -> bool:
        for index in head_rules_of.get(predicate, ()):
            for atom in rules[index].head:
                if atom.predicate != predicate:
                    continue
                if any((index, v) not in bounded for v in atom.variables()):
                    return False
        return True

    def input_bounded(index: int, eatom: ExternalAtom, i: int, source) -> bool:
        term = eatom.inputs[i]
        if isinstance(term, Variable):
            return (index, term.name) in bounded
        if source.input_signature[i] is PREDICATE:
            return range_restricted(term.value)
        return True

    def justified(index: int, variable: str, pinned: "set[tuple[int, str]]") -> bool:
        if (index, variable) in pinned:
            return True
        rule = rules[index]
        for literal in rule.body_pos:
            if isinstance(literal, Atom) and variable in literal.variables():
                others_ok = all(
                    (index, w) in bounded for w in literal.variables() if w != variable
                )
                if others_ok and range_restricted(literal.predicate):
                    return True
        for position, (eatom, positive, props) in enumerate(occurrences.get(index, [])):
            if not positive:
                continue
            out_positions = _output_positions(eatom, variable)
            if not out_positions:
                continue
            source = registry.lookup(eatom.name)
            inputs_ok = all(
                (index, v) in bounded for v in eatom.input_variables()
            )
            if not inputs_ok:
                continue
            if not recursive[(index, position)]:
                return True
            for j in out_positions:
                if j in props.finite_domain_outputs:
                    return True
                ordered = (
                    props.relative_finite_domain
                    | props.wellordering
                    | props.wellordering_strlen
                )
                for (i, jj) in ordered:
                    if jj == j and input_bounded(index, eatom, i, source):
                        return True
        return False

    iterations = 0
    changed = True
    while changed:
        changed = False
        pinned: set[tuple[int, str]] = set()
        for plugin in plugins:
            pinned |= {
                pair for pair in plugin(program, graph, frozenset(bounded)) if pair in all_pairs
            }
        for pair in sorted(bounded):
            if not justified(pair[0], pair[1], pinned):
                bounded.discard(pair)
                changed = True
        if changed:
            iterations += 1

    unbounded = sorted(all_pairs - bounded)
    hints = tuple(
        Hint(
            index + 1,
            variable,
            "cannot be proven finite: no range-restricted positive atom and no "
            "applicable finiteness property binds it",
        )
        for index, variable in unbounded
    )
    verdict = Verdict.UNSAFE if hints else Verdict.SAFE
    return SafetyReport(verdict, Mode.LIBERAL, hints, iterations)


def disabled_report() -> SafetyReport:
    """Safety check skipped; termination becomes the user's burden."""
    return SafetyReport(Verdict.SAFE, Mode.DISABLED)


def analyze(
    program: Program,
    registry: Registry,
    mode: Mode,
    plugins: Sequence[SafetyPlugin] = (),
) -> SafetyReport:
    if mode is Mode.DISABLED:
        return disabled_report()
    graph = build_dependency_graph(program)
    if mode is Mode.STRONG:
        return check_strong_safety(program, graph)
    return check_liberal_safety(program, graph, registry, plugins)
