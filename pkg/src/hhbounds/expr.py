"""
Parser and evaluator for the univariate function language.

Grammar (``^`` is right-associative and binds tighter than unary minus)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ['-'] power
    power  := atom ['^' factor]
    atom   := number | 'x' | 'pi' | 'e'
            | ident '(' expr [',' expr] ')'
            | '(' expr ')'

Functions: exp, ln, abs, sqrt, sin, cos (unary) and max2 (binary).

Evaluation is plain IEEE double arithmetic.  Any domain violation or
non-finite intermediate result raises :class:`EvalError`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

__all__ = [
    "Num", "Var", "Const", "BinOp", "Neg", "Call", "ExprAst",
    "ParseError", "EvalError", "parse", "evaluate", "compile_expr",
    "to_source", "FUNCTIONS", "CONSTANTS",
]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Neg:
    operand: "ExprAst"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple

    def __post_init__(self):
        want = FUNCTIONS.get(self.name)
        if want is None:
            raise ValueError(f"unknown function {self.name!r}")
        if len(self.args) != want:
            raise ValueError(f"{self.name} takes {want} argument(s), got {len(self.args)}")


ExprAst = Union[Num, Var, Const, BinOp, Neg, Call]

FUNCTIONS = {"exp": 1, "ln": 1, "abs": 1, "sqrt": 1, "sin": 1, "cos": 1, "max2": 2}
CONSTANTS = {"pi": math.pi, "e": math.e}


class ParseError(ValueError):
    """Malformed source text.  ``offset`` is a byte offset into the UTF-8 source."""

    def __init__(self, offset: int, message: str, expected: str | None = None):
        self.offset = offset
        self.message = message
        self.expected = expected
        hint = f" (expected {expected})" if expected else ""
        super().__init__(f"at offset {offset}: {message}{hint}")


class EvalError(ArithmeticError):
    """Evaluation left the domain of an operation or produced a non-finite value."""

    def __init__(self, message: str, x: float | None = None):
        self.x = x
        self.message = message
        where = f" at x={x!r}" if x is not None else ""
        super().__init__(f"{message}{where}")


# ----------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'num', 'ident', 'op', 'eof'
    text: str
    offset: int  # byte offset


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    byte_pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(byte_pos, f"unexpected character {source[pos]!r}")
        text = m.group()
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, text, byte_pos))
        pos = m.end()
        byte_pos += len(text.encode("utf-8"))
    tokens.append(_Token("eof", "", byte_pos))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _is_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def _expect_op(self, op: str) -> None:
        if not self._is_op(op):
            raise ParseError(self.tok.offset, f"unexpected {self._describe()}", repr(op))
        self._advance()

    def _describe(self) -> str:
        return "end of input" if self.tok.kind == "eof" else repr(self.tok.text)

    def parse(self) -> ExprAst:
        node = self.expr()
        if self.tok.kind != "eof":
            raise ParseError(self.tok.offset, f"unexpected {self._describe()}", "operator or end of input")
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while self._is_op("+", "-"):
            op = self._advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> ExprAst:
        node = self.factor()
        while self._is_op("*", "/"):
            op = self._advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> ExprAst:
        if self._is_op("-"):
            self._advance()
            return Neg(self.power())
        return self.power()

    def power(self) -> ExprAst:
        base = self.atom()
        if self._is_op("^"):
            self._advance()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> ExprAst:
        tok = self.tok
        if tok.kind == "num":
            self._advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError(tok.offset, f"numeric literal {tok.text!r} overflows a double")
            return Num(value)
        if tok.kind == "ident":
            self._advance()
            name = tok.text
            if name in FUNCTIONS:
                self._expect_op("(")
                args = [self.expr()]
                if self._is_op(","):
                    self._advance()
                    args.append(self.expr())
                if len(args) != FUNCTIONS[name]:
                    raise ParseError(tok.offset, f"{name} takes {FUNCTIONS[name]} argument(s), got {len(args)}")
                self._expect_op(")")
                return Call(name, tuple(args))
            if name == "x":
                return Var()
            if name in CONSTANTS:
                return Const(name)
            raise ParseError(tok.offset, f"unknown identifier {name!r}", "x, pi, e or a function name")
        if self._is_op("("):
            self._advance()
            node = self.expr()
            self._expect_op(")")
            return node
        raise ParseError(tok.offset, f"unexpected {self._describe()}", "number, identifier or '('")


def parse(source: str) -> ExprAst:
    """Parse ``source`` into an expression tree, raising :class:`ParseError` on malformed input."""
    return _Parser(source).parse()


# ----------------------------------------------------------------------------
# Evaluation


def _finite(v: float, x: float) -> float:
    if not math.isfinite(v):
        raise EvalError("non-finite result", x)
    return v


def _pow(base: float, exp: float, x: float) -> float:
    if base < 0.0 and not float(exp).is_integer():
        raise EvalError(f"negative base {base!r} with non-integer exponent {exp!r}", x)
    if base == 0.0 and exp < 0.0:
        raise EvalError("zero raised to a negative power", x)
    try:
        return _finite(math.pow(base, exp), x)
    except (OverflowError, ValueError) as err:
        raise EvalError(f"invalid power {base!r}^{exp!r}: {err}", x) from None


def _div(num: float, den: float, x: float) -> float:
    if den == 0.0:
        raise EvalError("division by zero", x)
    return _finite(num / den, x)


def _ln(v: float, x: float) -> float:
    if v <= 0.0:
        raise EvalError(f"ln of non-positive argument {v!r}", x)
    return math.log(v)


def _sqrt(v: float, x: float) -> float:
    if v < 0.0:
        raise EvalError(f"sqrt of negative argument {v!r}", x)
    return math.sqrt(v)


def _exp(v: float, x: float) -> float:
    try:
        return _finite(math.exp(v), x)
    except OverflowError:
        raise EvalError(f"exp overflow at argument {v!r}", x) from None


_UNARY = {
    "exp": _exp,
    "ln": _ln,
    "sqrt": _sqrt,
    "abs": lambda v, x: abs(v),
    "sin": lambda v, x: math.sin(v),
    "cos": lambda v, x: math.cos(v),
}


def _binop(op: str, lhs: float, rhs: float, x: float) -> float:
    if op == "+":
        return _finite(lhs + rhs, x)
    if op == "-":
        return _finite(lhs - rhs, x)
    if op == "*":
        return _finite(lhs * rhs, x)
    if op == "/":
        return _div(lhs, rhs, x)
    return _pow(lhs, rhs, x)


def evaluate(ast: ExprAst, x: float) -> float:
    """Evaluate ``ast`` at ``x`` by direct recursion over the tree."""
    if isinstance(ast, Num):
        return ast.value
    if isinstance(ast, Var):
        return float(x)
    if isinstance(ast, Const):
        return CONSTANTS[ast.name]
    if isinstance(ast, Neg):
        return -evaluate(ast.operand, x)
    if isinstance(ast, BinOp):
        return _binop(ast.op, evaluate(ast.left, x), evaluate(ast.right, x), x)
    if isinstance(ast, Call):
        if ast.name == "max2":
            return max(evaluate(ast.args[0], x), evaluate(ast.args[1], x))
        return _UNARY[ast.name](evaluate(ast.args[0], x), x)
    raise TypeError(f"not an expression node: {ast!r}")


def compile_expr(ast: ExprAst) -> Callable[[float], float]:
    """Turn ``ast`` into a closure computing exactly what :func:`evaluate` computes.

    Avoids the per-node isinstance dispatch, which dominates the cost of
    quadrature and sampling loops.
    """
    if isinstance(ast, Num):
        v = ast.value
        return lambda x: v
    if isinstance(ast, Var):
        return float
    if isinstance(ast, Const):
        c = CONSTANTS[ast.name]
        return lambda x: c
    if isinstance(ast, Neg):
        g = compile_expr(ast.operand)
        return lambda x: -g(x)
    if isinstance(ast, BinOp):
        lf, rf = compile_expr(ast.left), compile_expr(ast.right)
        op = ast.op
        if op == "^":
            if isinstance(ast.right, Num):
                e = ast.right.value
                return lambda x: _pow(lf(x), e, x)
            return lambda x: _pow(lf(x), rf(x), x)
        return lambda x: _binop(op, lf(x), rf(x), x)
    if isinstance(ast, Call):
        if ast.name == "max2":
            g0, g1 = compile_expr(ast.args[0]), compile_expr(ast.args[1])
            return lambda x: max(g0(x), g1(x))
        fn = _UNARY[ast.name]
        g = compile_expr(ast.args[0])
        return lambda x: fn(g(x), x)
    raise TypeError(f"not an expression node: {ast!r}")


# ----------------------------------------------------------------------------
# Printing


def _is_atomic(ast: ExprAst) -> bool:
    return isinstance(ast, (Num, Var, Const, Call))


def _wrap(ast: ExprAst) -> str:
    text = to_source(ast)
    return text if _is_atomic(ast) else f"({text})"


def to_source(ast: ExprAst) -> str:
    """Render ``ast`` as source text that parses back to an identical tree."""
    if isinstance(ast, Num):
        return repr(ast.value)
    if isinstance(ast, Var):
        return "x"
    if isinstance(ast, Const):
        return ast.name
    if isinstance(ast, Neg):
        return "-" + _wrap(ast.operand)
    if isinstance(ast, BinOp):
        return f"{_wrap(ast.left)} {ast.op} {_wrap(ast.right)}"
    if isinstance(ast, Call):
        return f"{ast.name}({', '.join(to_source(a) for a in ast.args)})"
    raise TypeError(f"not an expression node: {ast!r}")
