"""hexsolve: answer set programming with external oracle atoms.

Pipeline: parse -> link -> safety analysis -> ground -> solve. External
sources plug in through the Registry; declared source properties drive
nogood minimization, liberal safety and grounding supersets.
"""

from .assignment import Assignment, Truth
from .builtins import builtin_registry
from .errors import HexError
from .grounding import GroundProgram, ground
from .learning import LearnToggles
from .nogoods import Nogood, encode
from .parser import parse_program, unparse
from .properties import ExtSourceProperties, merge_properties
from .safety import (
    Mode,
    SafetyReport,
    Verdict,
    analyze,
    build_dependency_graph,
    check_liberal_safety,
    check_strong_safety,
)
from .solver import SolveOptions, SolveStats, compatibility_check, flp_check, solve, solve_all
from .sources import (
    CONSTANT,
    PREDICATE,
    EvalCache,
    ExternalSource,
    InputType,
    OracleResult,
    Registry,
    evaluate,
    link,
)
from .terms import Atom, Constant, ExternalAtom, Program, PropertySpec, Rule, Variable

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "Atom",
    "CONSTANT",
    "Constant",
    "EvalCache",
    "ExtSourceProperties",
    "ExternalAtom",
    "ExternalSource",
    "GroundProgram",
    "HexError",
    "InputType",
    "LearnToggles",
    "Mode",
    "Nogood",
    "OracleResult",
    "PREDICATE",
    "Program",
    "PropertySpec",
    "Registry",
    "Rule",
    "SafetyReport",
    "SolveOptions",
    "SolveStats",
    "Truth",
    "Variable",
    "Verdict",
    "analyze",
    "build_dependency_graph",
    "builtin_registry",
    "check_liberal_safety",
    "check_strong_safety",
    "compatibility_check",
    "encode",
    "evaluate",
    "flp_check",
    "ground",
    "link",
    "merge_properties",
    "parse_program",
    "solve",
    "solve_all",
    "unparse",
]
