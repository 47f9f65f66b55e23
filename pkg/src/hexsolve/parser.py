"""Parser and unparser for the HEX surface syntax.

Grammar sketch (comments run from '%' to end of line):

    program   : (rule '.')*
    rule      : head | head ':-' body | ':-' body
    head      : atom (('v' | '|') atom)*
    body      : literal (',' literal)*
    literal   : ('not' | 'naf')? (atom | external)
    atom      : IDENT ('(' terms ')')?
    external  : '&' IDENT ('[' terms ']')? ('(' terms? ')')? tag?
    tag       : '<' property (',' property)* '>'
    property  : IDENT (IDENT | INTEGER)*
    term      : INTEGER | STRING | VARIABLE | IDENT ('(' terms ')')?

Predicate arity is fixed per program; violations raise ArityClashError.
Property tags are validated against the catalogue at parse time, including
index ranges against the external atom's input/output arities.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ArityClashError, MalformedPropertyTagError, ParseError
from .terms import (
    PROPERTY_PARAMS,
    Atom,
    Constant,
    ExternalAtom,
    Function,
    Program,
    PropertySpec,
    Rule,
    Term,
    Variable,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<string>"[^"\n]*")
  | (?P<integer>-?\d+)
  | (?P<variable>[A-Z][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<arrow>:-)
  | (?P<punct>[.,()\[\]<>|&])
    """,
    re.VERBOSE,
)

_NEGATION_KEYWORDS = ("not", "naf")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str):
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = match.lastgroup
        value = match.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, line, match.start() - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = match.start() + value.rindex("\n") + 1
        pos = match.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.arities: dict[str, int] = {}

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str):
        raise ParseError(message, self.cur.line, self.cur.column)

    def accept(self, kind: str, text=None):
        tok = self.cur
        if tok.kind == kind and (text is None or tok.text == text):
            self.pos += 1
            return tok
        return None

    def expect(self, kind: str, text=None) -> Token:
        tok = self.accept(kind, text)
        if tok is None:
            want = text or kind
            self.error(f"expected {want!r}, found {self.cur.text!r}")
        return tok

    def parse_program(self) -> Program:
        rules = []
        while self.cur.kind != "eof":
            rules.append(self.parse_rule())
        return Program(tuple(rules))

    def parse_rule(self) -> Rule:
        head: list[Atom] = []
        if not (self.cur.kind == "arrow"):
            head.append(self.parse_atom())
            while self.accept("punct", "|") or self.accept("ident", "v"):
                head.append(self.parse_atom())
        body_pos: list = []
        body_neg: list = []
        if self.accept("arrow"):
            while True:
                negated = False
                if self.cur.kind == "ident" and self.cur.text in _NEGATION_KEYWORDS:
                    self.pos += 1
                    negated = True
                literal = self.parse_body_literal()
                (body_neg if negated else body_pos).append(literal)
                if not self.accept("punct", ","):
                    break
        if not head and not body_pos and not body_neg:
            self.error("a rule needs a head or a body")
        self.expect("punct", ".")
        return Rule(tuple(head), tuple(body_pos), tuple(body_neg))

    def parse_body_literal(self):
        if self.cur.kind == "punct" and self.cur.text == "&":
            return self.parse_external()
        return self.parse_atom()

    def parse_atom(self) -> Atom:
        name = self.expect("ident")
        args: tuple[Term, ...] = ()
        if self.accept("punct", "("):
            args = self.parse_terms()
            self.expect("punct", ")")
        self.check_arity(name.text, len(args), name)
        return Atom(name.text, args)

    def check_arity(self, predicate: str, arity: int, tok: Token):
        known = self.arities.setdefault(predicate, arity)
        if known != arity:
            raise ArityClashError(predicate, arity, known)

    def parse_terms(self) -> "tuple[Term, ...]":
        terms = [self.parse_term()]
        while self.accept("punct", ","):
            terms.append(self.parse_term())
        return tuple(terms)

    def parse_term(self) -> Term:
        tok = self.cur
        if tok.kind == "integer":
            self.pos += 1
            return Constant(int(tok.text))
        if tok.kind == "string":
            self.pos += 1
            return Constant(tok.text[1:-1], quoted=True)
        if tok.kind == "variable":
            self.pos += 1
            return Variable(tok.text)
        if tok.kind == "ident":
            self.pos += 1
            if self.accept("punct", "("):
                args = self.parse_terms()
                self.expect("punct", ")")
                return Function(tok.text, args)
            return Constant(tok.text)
        self.error(f"expected a term, found {tok.text!r}")

    def parse_external(self) -> ExternalAtom:
        self.expect("punct", "&")
        name = self.expect("ident")
        inputs: tuple[Term, ...] = ()
        outputs: tuple[Term, ...] = ()
        if self.accept("punct", "["):
            if not self.accept("punct", "]"):
                inputs = self.parse_terms()
                self.expect("punct", "]")
        if self.accept("punct", "("):
            if not self.accept("punct", ")"):
                outputs = self.parse_terms()
                self.expect("punct", ")")
        properties: tuple[PropertySpec, ...] = ()
        if self.accept("punct", "<"):
            properties = self.parse_property_tag(len(inputs), len(outputs))
        return ExternalAtom(name.text, inputs, outputs, properties)

    def parse_property_tag(self, n_inputs: int, n_outputs: int):
        specs = [self.parse_property(n_inputs, n_outputs)]
        while self.accept("punct", ","):
            specs.append(self.parse_property(n_inputs, n_outputs))
        self.expect("punct", ">")
        return tuple(specs)

    def parse_property(self, n_inputs: int, n_outputs: int) -> PropertySpec:
        tok = self.expect("ident")
        params: list = []
        while self.cur.kind in ("ident", "integer"):
            if self.cur.kind == "ident":
                params.append(self.cur.text)
            else:
                params.append(int(self.cur.text))
            self.pos += 1
        return validate_property(tok.text, tuple(params), n_inputs, n_outputs)


def validate_property(
    ptype: str, params: tuple, n_inputs: int, n_outputs: int
) -> PropertySpec:
    """Check a property against the catalogue and the atom's arities."""
    shape = PROPERTY_PARAMS.get(ptype)
    token = " ".join([ptype] + [str(p) for p in params])
    if shape is None:
        raise MalformedPropertyTagError(token, "unknown property type")
    required = [k for k in shape if not k.endswith("?")]
    if not (len(required) <= len(params) <= len(shape)):
        raise MalformedPropertyTagError(
            token, f"expected {len(required)}..{len(shape)} parameters, got {len(params)}"
        )
    for kind, param in zip(shape, params):
        kind = kind.rstrip("?")
        if kind == "sym":
            if not isinstance(param, str):
                raise MalformedPropertyTagError(token, "expected a predicate name")
        else:
            if not isinstance(param, int) or param < 0:
                raise MalformedPropertyTagError(token, "expected a non-negative index")
            bound = n_inputs if kind == "in" else n_outputs
            what = "input" if kind == "in" else "output"
            if param >= bound:
                raise MalformedPropertyTagError(
                    token, f"{what} index {param} out of range (arity {bound})"
                )
    return PropertySpec(ptype, tuple(params))


def parse_program(text: str) -> Program:
    """Parse program text into an AST; facts and constraints are rules."""
    return _Parser(text).parse_program()


def unparse(program: Program) -> str:
    """Deterministic text form; parse(unparse(p)) is structurally equal to p."""
    if not program.rules:
        return ""
    return "\n".join(str(r) for r in program.rules) + "\n"
