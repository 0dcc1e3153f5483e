"""Textual syntax for terms, rule packages and proof scripts.

Terms use infix ``+ - * / ^`` with the usual precedence, ``f(a, b)``
applications and ``[a, b]`` lists.  An identifier with a trailing underscore
is a pattern variable (``f_(x)`` is a head variable), a lone ``_`` is the
hole of a linearity template, and a bare ``Oeps`` asks for a fresh O(epsilon).
``#`` starts a comment.

Statements end with ``;``::

    IntegralLinearity := [Integral(A_ + B_, C_), Integral(A, C) + Integral(B, C)];
    TimesOeps := [Z_ * Oeps(i_), Oeps] where bounded(Z);
    r2 := Linearity(1, +, T(_));
    r_epsilon := OuterContext(ApproximationB2, multContext);
    S := Normalizer(TopDown(Transform(IntegralLinearity)));
    bounded u, v;
    constant Y;
    step "Step 1";
    apply S to Integral(v(x) + w(x), [x]);
    expect Integral(v(x), [x]) + Integral(w(x), [x]) modulo oeps;
    expect-exact Integral(v(x), [x]) + Integral(w(x), [x]);
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .terms import (
    FRESH_OEPS,
    LIST,
    OEPS,
    PLUS,
    POW,
    TIMES,
    App,
    Num,
    Term,
    Var,
    make,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class UnknownName(LookupError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*|_)
  | (?P<number>[0-9]+)
  | (?P<string>"[^"\n]*")
  | (?P<op>:=|[-+*/^()\[\],;])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int
    end: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1, m.end()))
        for k, ch in enumerate(m.group()):
            if ch == "\n":
                line += 1
                line_start = pos + k + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1, pos))
    return tokens


# ---------------------------------------------------------------- AST nodes


@dataclass(frozen=True)
class RuleRef:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class InlineRule:
    lhs: Term
    rhs: Term
    guard: Optional[Tuple[str, Tuple[str, ...]]] = None

    def __str__(self):
        text = f"[{render_term(self.lhs)}, {render_term(self.rhs)}]"
        if self.guard:
            text += f" where {self.guard[0]}({', '.join(self.guard[1])})"
        return text


@dataclass(frozen=True)
class LinearityExpr:
    position: int
    op: str
    template: Term

    def __str__(self):
        op = {PLUS: "+", TIMES: "*"}.get(self.op, self.op)
        return f"Linearity({self.position}, {op}, {render_term(self.template)})"


@dataclass(frozen=True)
class OuterContextExpr:
    rule: "RuleExpr"
    context: "RuleExpr"

    def __str__(self):
        return f"OuterContext({self.rule}, {self.context})"


RuleExpr = Union[RuleRef, InlineRule, LinearityExpr, OuterContextExpr]


@dataclass(frozen=True)
class StrategyExpr:
    """A combinator applied to its arguments, or a reference (no args)."""

    name: str
    args: tuple = ()

    def __str__(self):
        if self.name in _NULLARY or self.name not in COMBINATORS:
            return self.name
        parts = []
        for a in self.args:
            if isinstance(a, tuple):
                parts.append("[" + ", ".join(str(s) for s in a) + "]")
            elif isinstance(a, Term):
                parts.append(render_term(a))
            else:
                parts.append(str(a))
        return f"{self.name}({', '.join(parts)})"


_NULLARY = {"Identity", "Fail", "ConvergenceStrategy", "Simplify", "EvalRule"}
_UNARY = {"IdentityAsFail", "FailAsIdentity", "All", "TopDown", "BottomUp", "Normalizer"}
_LISTED = {"LeftChoice", "Comp"}
COMBINATORS = _NULLARY | _UNARY | _LISTED | {"Transform", "InnerContext"}
_RULE_BUILDERS = {"Linearity", "OuterContext"}


@dataclass
class RuleDecl:
    name: str
    expr: RuleExpr
    line: int = 0


@dataclass
class StrategyDecl:
    name: str
    expr: StrategyExpr
    line: int = 0


@dataclass
class Directive:
    kind: str
    names: Tuple[str, ...]
    line: int = 0


@dataclass
class Apply:
    strategy: StrategyExpr
    term: Optional[Term] = None
    line: int = 0


@dataclass
class Expect:
    term: Term
    exact: bool = False
    line: int = 0


@dataclass
class Step:
    label: str
    line: int = 0


Statement = Union[RuleDecl, StrategyDecl, Directive, Apply, Expect, Step]


@dataclass
class Script:
    statements: List[Statement] = field(default_factory=list)


# ------------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.allow_hole = False

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k=1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col)

    def next(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def at(self, text, kind=None) -> bool:
        tok = self.tok
        return tok.text == text and (kind is None or tok.kind == kind) and tok.kind != "string"

    def expect(self, text) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.next()

    def ident(self) -> str:
        if self.tok.kind != "ident" or self.tok.text == "_":
            raise self.error(f"expected a name, found {self.tok.text or 'end of input'!r}")
        return self.next().text

    # terms

    def term(self, allow_hole=False) -> Term:
        saved = self.allow_hole
        self.allow_hole = allow_hole
        try:
            return self._sum()
        finally:
            self.allow_hole = saved

    def _sum(self):
        t = self._product()
        while self.at("+", "op") or self.at("-", "op"):
            op = self.next().text
            u = self._product()
            t = make(PLUS, t, u if op == "+" else make(TIMES, Num(-1), u))
        return t

    def _product(self):
        t = self._unary()
        while self.at("*", "op") or self.at("/", "op"):
            op = self.next().text
            u = self._unary()
            t = make(TIMES, t, u if op == "*" else make(POW, u, Num(-1)))
        return t

    def _unary(self):
        if self.at("-", "op"):
            self.next()
            return make(TIMES, Num(-1), self._unary())
        return self._power()

    def _power(self):
        base = self._atom()
        if self.at("^", "op"):
            self.next()
            return make(POW, base, self._unary())
        return base

    def _args(self, close):
        args = []
        if not self.at(close):
            args.append(self._sum())
            while self.at(","):
                self.next()
                args.append(self._sum())
        self.expect(close)
        return args

    def _atom(self) -> Term:
        tok = self.tok
        if tok.kind == "number":
            self.next()
            return Num(int(tok.text))
        if self.at("("):
            self.next()
            t = self._sum()
            self.expect(")")
            return t
        if self.at("["):
            self.next()
            return make(LIST, *self._args("]"))
        if tok.kind == "ident":
            self.next()
            name = tok.text
            if name == "_":
                if not self.allow_hole:
                    raise self.error("the hole '_' is only allowed in linearity templates", tok)
                return Var("_")
            call = self.at("(") and self.tok.line == tok.line and self.tok.col == tok.col + len(name)
            if name.endswith("_"):
                if call:
                    self.next()
                    return make(name[:-1], *self._args(")"), head_var=True)
                return Var(name[:-1])
            if call:
                self.next()
                return make(name, *self._args(")"))
            if name == OEPS:
                return FRESH_OEPS
            return App(name)
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    # rules and strategies

    def rule_expr(self) -> RuleExpr:
        if self.at("["):
            self.next()
            lhs = self.term()
            self.expect(",")
            rhs = self.term()
            self.expect("]")
            guard = None
            if self.at("where", "ident"):
                self.next()
                pred = self.ident()
                self.expect("(")
                names = [self.ident()]
                while self.at(","):
                    self.next()
                    names.append(self.ident())
                self.expect(")")
                guard = (pred, tuple(n.rstrip("_") for n in names))
            return InlineRule(lhs, rhs, guard)
        name = self.ident()
        if name == "Linearity":
            self.expect("(")
            tok = self.tok
            if tok.kind != "number":
                raise self.error("expected an argument position")
            self.next()
            self.expect(",")
            if self.at("+", "op") or self.at("*", "op"):
                op = PLUS if self.next().text == "+" else TIMES
            else:
                op = self.ident()
            self.expect(",")
            template = self.term(allow_hole=True)
            self.expect(")")
            return LinearityExpr(int(tok.text), op, template)
        if name == "OuterContext":
            self.expect("(")
            r = self.rule_expr()
            self.expect(",")
            ctx = self.rule_expr()
            self.expect(")")
            return OuterContextExpr(r, ctx)
        return RuleRef(name)

    def strategy(self) -> StrategyExpr:
        tok = self.tok
        name = self.ident()
        has_args = self.at("(")
        if name in _NULLARY:
            if has_args:
                self.next()
                self.expect(")")
            return StrategyExpr(name)
        if name not in COMBINATORS:
            if has_args:
                raise self.error(f"unknown combinator {name!r}", tok)
            return StrategyExpr(name)
        self.expect("(")
        if name == "Transform":
            args = (self.rule_expr(),)
        elif name == "InnerContext":
            pattern = self.term()
            self.expect(",")
            args = (pattern, self.strategy())
        elif name in _LISTED:
            self.expect("[")
            items = []
            if not self.at("]"):
                items.append(self.strategy())
                while self.at(","):
                    self.next()
                    items.append(self.strategy())
            self.expect("]")
            args = (tuple(items),)
        else:
            args = (self.strategy(),)
        self.expect(")")
        return StrategyExpr(name, args)

    # statements

    def statement(self) -> Statement:
        tok = self.tok
        line = tok.line
        if tok.kind != "ident":
            raise self.error(f"expected a statement, found {tok.text!r}")
        if self.peek().text == ":=":
            name = self.next().text
            self.next()
            nxt, after = self.tok, self.peek()
            if nxt.text == "[" or (nxt.text in _RULE_BUILDERS and after.text == "("):
                stmt = RuleDecl(name, self.rule_expr(), line)
            else:
                stmt = StrategyDecl(name, self.strategy(), line)
        elif tok.text in ("bounded", "constant"):
            self.next()
            names = [self.ident()]
            while self.at(","):
                self.next()
                names.append(self.ident())
            stmt = Directive(tok.text, tuple(names), line)
        elif tok.text == "step":
            self.next()
            if self.tok.kind != "string":
                raise self.error("expected a quoted step label")
            stmt = Step(self.next().text[1:-1], line)
        elif tok.text == "apply":
            self.next()
            strategy = self.strategy()
            term = None
            if self.at("to", "ident"):
                self.next()
                term = self.term()
            stmt = Apply(strategy, term, line)
        elif tok.text == "expect":
            self.next()
            exact = False
            dash = self.tok
            if dash.text == "-" and self.peek().text == "exact" and self.peek().col == dash.col + 1:
                self.next()
                self.next()
                exact = True
            term = self.term()
            if not exact:
                if not self.at("modulo", "ident"):
                    raise self.error("expected 'modulo oeps'")
                self.next()
                if not self.at("oeps", "ident"):
                    raise self.error("expected 'oeps'")
                self.next()
            stmt = Expect(term, exact, line)
        else:
            raise self.error(f"unknown statement {tok.text!r}")
        self.expect(";")
        return stmt

    def script(self) -> Script:
        statements = []
        while self.tok.kind != "eof":
            statements.append(self.statement())
        return Script(statements)

    def finish(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected trailing {self.tok.text!r}")


def parse_term(text: str, allow_hole: bool = False) -> Term:
    p = _Parser(text)
    t = p.term(allow_hole=allow_hole)
    p.finish()
    return t


def parse_strategy(text: str) -> StrategyExpr:
    p = _Parser(text)
    s = p.strategy()
    p.finish()
    return s


def parse_rule_expr(text: str) -> RuleExpr:
    p = _Parser(text)
    r = p.rule_expr()
    p.finish()
    return r


def parse_script(text: str) -> Script:
    return _Parser(text).script()


# ----------------------------------------------------------------- renderer

_SUM, _PROD, _UNARY_P, _POW_P, _ATOM = 1, 2, 3, 4, 5


def _is_negative(t: Term) -> bool:
    if isinstance(t, Num):
        return t.value < 0
    return (isinstance(t, App) and t.head == TIMES and not t.head_var
            and isinstance(t.args[0], Num) and t.args[0].value < 0)


def _is_reciprocal(t: Term) -> bool:
    """``b^-1``, rendered as a division."""
    return (isinstance(t, App) and t.head == POW and not t.head_var and len(t.args) == 2
            and t.args[1] == Num(-1))


def _negate(t: Term) -> Term:
    return make(TIMES, Num(-1), t)


def _num(value: Fraction) -> Tuple[str, int]:
    if value.denominator == 1:
        return str(value.numerator), (_UNARY_P if value < 0 else _ATOM)
    return f"{value.numerator}/{value.denominator}", _PROD


def _wrap(part: Tuple[str, int], need: int) -> str:
    text, prec = part
    return text if prec >= need else f"({text})"


def _render(t: Term) -> Tuple[str, int]:
    if isinstance(t, Num):
        return _num(t.value)
    if isinstance(t, Var):
        return t.name + "_", _ATOM
    if t.head_var:
        return f"{t.head}_({', '.join(_render(a)[0] for a in t.args)})", _ATOM
    if t == FRESH_OEPS:
        return OEPS, _ATOM
    if t.head == LIST:
        return "[" + ", ".join(_render(a)[0] for a in t.args) + "]", _ATOM
    if t.head == PLUS and len(t.args) >= 2:
        out = _render(t.args[0])[0]
        for a in t.args[1:]:
            if _is_negative(a):
                out += " - " + _wrap(_render(_negate(a)), _PROD)
            else:
                out += " + " + _wrap(_render(a), _PROD)
        return out, _SUM
    if t.head == TIMES and len(t.args) >= 2:
        coeff = None
        numer, denom = [], []
        for a in t.args:
            if isinstance(a, Num):
                coeff = a.value
            elif _is_reciprocal(a):
                denom.append(a.args[0])
            else:
                numer.append(a)
        prefix = ""
        parts = [_wrap(_render(a), _UNARY_P) for a in numer]
        if coeff == -1:
            prefix = "-"
        elif coeff is not None:
            parts.insert(0, _num(coeff)[0])
        if not parts:
            parts = ["1"]
        out = prefix + "*".join(parts)
        for d in denom:
            out += "/" + _wrap(_render(d), _POW_P)
        return out, _PROD
    if t.head == POW and len(t.args) == 2:
        base, exp = t.args
        exp_text, exp_prec = _render(exp)
        if not (isinstance(exp, Num) and exp.value >= 0 and exp.value.denominator == 1) and exp_prec < _ATOM:
            exp_text = f"({exp_text})"
        return f"{_wrap(_render(base), _ATOM)}^{exp_text}", _POW_P
    if not t.args:
        return t.head, _ATOM
    return f"{t.head}({', '.join(_render(a)[0] for a in t.args)})", _ATOM


def render_term(t: Term) -> str:
    return _render(t)[0]


def render_rule(rule) -> str:
    text = f"[{render_term(rule.lhs)}, {render_term(rule.rhs)}]"
    if rule.guard is not None:
        text += f" where {rule.guard}"
    return text


# -------------------------------------------------------------- environment


class Environment:
    """Named rules and strategies plus the session they run in.

    Rules are built when declared; strategy declarations are kept as
    expressions and resolved when used, so a missing rule surfaces at the
    first action that needs it.
    """

    def __init__(self, session=None):
        from .convergence import Session

        self.session = session if session is not None else Session()
        self.rules: Dict[str, object] = {}
        self.strategies: Dict[str, StrategyExpr] = {}
        self.constants: set = set()
        self._building: set = set()

    def declare(self, stmt: Statement):
        from .rules import Rule

        if isinstance(stmt, RuleDecl):
            rule = self.rule(stmt.expr, name=stmt.name)
            self.rules[stmt.name] = Rule(stmt.name, rule.lhs, rule.rhs, rule.guard, rule.is_oeps)
        elif isinstance(stmt, StrategyDecl):
            self.strategies[stmt.name] = stmt.expr
        elif isinstance(stmt, Directive):
            if stmt.kind == "bounded":
                self.session.declare_bounded(stmt.names)
            else:
                self.constants.update(stmt.names)
        else:
            raise TypeError(f"not a declaration: {stmt!r}")

    def rule(self, expr: RuleExpr, name: str = "<inline>"):
        from .contextual import outer_context
        from .rules import Guard, linearity, make_rule

        if isinstance(expr, RuleRef):
            try:
                return self.rules[expr.name]
            except KeyError:
                raise UnknownName(f"unknown rule {expr.name!r}") from None
        if isinstance(expr, InlineRule):
            guard = Guard(*expr.guard) if expr.guard else None
            return make_rule(name, expr.lhs, expr.rhs, guard, frozenset(self.constants))
        if isinstance(expr, LinearityExpr):
            return linearity(expr.position, expr.op, expr.template, name)
        if isinstance(expr, OuterContextExpr):
            return outer_context(self.rule(expr.rule), self.rule(expr.context), name)
        raise TypeError(f"not a rule expression: {expr!r}")

    def strategy(self, expr: StrategyExpr):
        from . import strategies as st
        from .algebra import simplify
        from .contextual import InnerContext
        from .convergence import convergence_strategy, eval_fresh, transform

        name, args = expr.name, expr.args
        if name not in COMBINATORS:
            if name not in self.strategies:
                raise UnknownName(f"unknown strategy {name!r}")
            if name in self._building:
                raise UnknownName(f"strategy {name!r} refers to itself")
            self._building.add(name)
            try:
                return self.strategy(self.strategies[name])
            finally:
                self._building.discard(name)
        if name == "Identity":
            return st.Identity()
        if name == "Fail":
            return st.Fail()
        if name == "ConvergenceStrategy":
            return convergence_strategy(self.session)
        if name == "EvalRule":
            return eval_fresh(self.session)
        if name == "Simplify":
            return st.FunctionStrategy(simplify, "Simplify")
        if name == "Transform":
            return transform(self.rule(args[0]), self.session)
        if name == "InnerContext":
            return InnerContext(args[0], self.strategy(args[1]))
        if name in _LISTED:
            return getattr(st, name)([self.strategy(s) for s in args[0]])
        return getattr(st, name)(self.strategy(args[0]))


def parse_rule_file(text: str, env: Optional[Environment] = None) -> Environment:
    """Load a rule package into ``env`` (a fresh one by default).

    Only declarations and directives are allowed; actions raise ParseError.
    """
    env = env if env is not None else Environment()
    for stmt in parse_script(text).statements:
        if isinstance(stmt, (Apply, Expect, Step)):
            raise ParseError("actions are not allowed in a rule file", stmt.line)
        env.declare(stmt)
    return env
