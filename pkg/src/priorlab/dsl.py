"""A small arithmetic language for densities.

Grammar (lowest precedence first)::

    expression := sum [ ("<" | "<=" | ">" | ">=" | "≤" | "≥") sum ]
    sum        := product { ("+" | "-") product }
    product    := unary { ("*" | "/") unary }
    unary      := "-" unary | power
    power      := primary [ "^" unary ]
    primary    := NUMBER | NAME | NAME "(" expression { "," expression } ")"
                | "(" expression ")"

``^`` is right-associative and binds tighter than unary minus, so ``-2^2`` is
-4 and ``2^3^2`` is 512. ``pi`` and ``e`` are constants; every other name is a
variable. A comparison evaluates to 1.0 or 0.0.

Evaluation is vectorized: bindings may hold floats or numpy arrays.
"""

from __future__ import annotations

import math
import re
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from .errors import ArityMismatch, DomainError, DSLSyntaxError, UnboundVariable, UnknownFunction

CONSTANTS = {"pi": math.pi, "e": math.e}
COMPARISONS = {"<": "<", "<=": "<=", ">": ">", ">=": ">=", "≤": "<=", "≥": ">="}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: Expr


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Compare:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Expr, ...]


Expr = Union[Num, Var, Const, Neg, BinOp, Compare, Call]

Value = Union[float, np.ndarray]
Binding = Mapping[str, Value]


# --- tokenizer ---------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<cmp><=|>=|<|>|≤|≥)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _describe(tok: _Token) -> str:
    if tok.kind == "eof":
        return "end of input"
    return repr(tok.text)


def _tokenize(source: str) -> list[_Token]:
    byte_at = [0]
    for ch in source:
        byte_at.append(byte_at[-1] + len(ch.encode("utf-8")))
    tokens: list[_Token] = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise DSLSyntaxError(
                byte_at[pos], frozenset({"number", "name", "operator", "("}), repr(source[pos])
            )
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), byte_at[pos]))
        pos = m.end()
    tokens.append(_Token("eof", "", byte_at[len(source)]))
    return tokens


# --- parser ------------------------------------------------------------------

_PRIMARY_START = frozenset({"number", "name", "(", "-"})
_BINARY_FOLLOW = frozenset({"+", "-", "*", "/", "^"})
_CMP_FOLLOW = frozenset({"<", "<=", ">", ">="})

_ARITY = {
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "abs": 1,
    "gamma_fn": 1,
    "factorial": 1,
    "indicator": 1,
}


class _Parser:
    def __init__(self, tokens: list[_Token]) -> None:
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: frozenset[str]) -> DSLSyntaxError:
        return DSLSyntaxError(self.tok.offset, expected, _describe(self.tok))

    def expect_op(self, text: str, alternatives: frozenset[str]) -> None:
        if self.tok.kind == "op" and self.tok.text == text:
            self.advance()
            return
        raise self.fail(alternatives | {text})

    def parse(self) -> Expr:
        expr = self.expression()
        if self.tok.kind != "eof":
            follow = _BINARY_FOLLOW | {"end of input"}
            if not isinstance(expr, Compare):
                follow |= _CMP_FOLLOW
            raise self.fail(follow)
        return expr

    def expression(self) -> Expr:
        left = self.sum()
        if self.tok.kind == "cmp":
            op = COMPARISONS[self.advance().text]
            right = self.sum()
            return Compare(op, left, right)
        return left

    def sum(self) -> Expr:
        left = self.product()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            left = BinOp(op, left, self.product())
        return left

    def product(self) -> Expr:
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                return self.call(tok)
            if tok.text in CONSTANTS:
                return Const(tok.text)
            return Var(tok.text)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            inner = self.expression()
            self.expect_op(")", _BINARY_FOLLOW | _CMP_FOLLOW)
            return inner
        raise self.fail(_PRIMARY_START)

    def call(self, name_tok: _Token) -> Expr:
        self.advance()
        args = [self.expression()]
        while self.tok.kind == "op" and self.tok.text == ",":
            self.advance()
            args.append(self.expression())
        self.expect_op(")", _BINARY_FOLLOW | _CMP_FOLLOW | {","})
        name = name_tok.text
        if name not in _ARITY:
            raise UnknownFunction(name, name_tok.offset)
        if len(args) != _ARITY[name]:
            raise ArityMismatch(name, _ARITY[name], len(args), name_tok.offset)
        return Call(name, tuple(args))


def parse(source: str | bytes) -> Expr:
    """Parse a density expression.

    Raises:
        DSLSyntaxError: Malformed input; carries the byte offset and the set
            of tokens that would have been accepted there.
        UnknownFunction: A call to a name outside the built-in set.
        ArityMismatch: A built-in called with the wrong number of arguments.
    """
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DSLSyntaxError(exc.start, frozenset({"valid UTF-8"}), "undecodable byte") from None
    return _Parser(_tokenize(source)).parse()


# --- evaluation --------------------------------------------------------------


def _first_bad(x: np.ndarray, mask: np.ndarray) -> float:
    return float(np.asarray(x)[mask].ravel()[0]) if np.ndim(x) else float(x)


def _check(name: str, x: np.ndarray, bad: np.ndarray) -> None:
    if np.any(bad):
        raise DomainError(name, _first_bad(x, bad))


def _log(x: np.ndarray) -> np.ndarray:
    _check("log", x, ~(x > 0))
    return np.log(x)


def _sqrt(x: np.ndarray) -> np.ndarray:
    _check("sqrt", x, ~(x >= 0))
    return np.sqrt(x)


def _gamma(x: np.ndarray) -> np.ndarray:
    _check("gamma_fn", x, (x <= 0) & (x == np.floor(x)) | np.isnan(x))
    return special.gamma(x)


def _factorial(x: np.ndarray) -> np.ndarray:
    k = np.round(x)
    _check("factorial", x, ~((np.abs(x - k) <= 1e-9) & (k >= 0)))
    return special.gamma(k + 1.0)


def _indicator(x: np.ndarray) -> np.ndarray:
    return np.where(x != 0, 1.0, 0.0)


_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "exp": np.exp,
    "log": _log,
    "sqrt": _sqrt,
    "abs": np.abs,
    "gamma_fn": _gamma,
    "factorial": _factorial,
    "indicator": _indicator,
}


def _power(base: np.ndarray, exponent: np.ndarray) -> np.ndarray:
    base, exponent = np.broadcast_arrays(base, exponent)
    bad = (base < 0) & (exponent != np.floor(exponent))
    _check("^", base, bad)
    return np.power(base, exponent)


def _eval(expr: Expr, b: Binding) -> np.ndarray:
    if isinstance(expr, Num):
        return np.float64(expr.value)
    if isinstance(expr, Const):
        return np.float64(CONSTANTS[expr.name])
    if isinstance(expr, Var):
        if expr.name not in b:
            raise UnboundVariable(expr.name)
        return np.asarray(b[expr.name], dtype=float)
    if isinstance(expr, Neg):
        return -_eval(expr.operand, b)
    if isinstance(expr, BinOp):
        left = _eval(expr.left, b)
        right = _eval(expr.right, b)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if expr.op == "/":
            return np.true_divide(left, right)
        return _power(left, right)
    if isinstance(expr, Compare):
        left = _eval(expr.left, b)
        right = _eval(expr.right, b)
        if expr.op == "<":
            out = left < right
        elif expr.op == "<=":
            out = left <= right
        elif expr.op == ">":
            out = left > right
        else:
            out = left >= right
        return np.where(out, 1.0, 0.0)
    if isinstance(expr, Call):
        return _FUNCTIONS[expr.name](*(_eval(a, b) for a in expr.args))
    raise TypeError(f"not an expression node: {expr!r}")


def evaluate(expr: Expr, b: Binding) -> Value:
    """Evaluate with IEEE semantics for arithmetic and strict function domains.

    Returns a float when every bound value is scalar, otherwise an array.

    Raises:
        UnboundVariable: A free variable is missing from the binding.
        DomainError: log, sqrt, gamma_fn, factorial or a fractional power of a
            negative base was applied outside its domain.
    """
    with np.errstate(all="ignore"):
        out = _eval(expr, b)
    if np.ndim(out) == 0:
        return float(out)
    return out


def free_variables(expr: Expr) -> frozenset[str]:
    if isinstance(expr, Var):
        return frozenset({expr.name})
    if isinstance(expr, (Num, Const)):
        return frozenset()
    if isinstance(expr, Neg):
        return free_variables(expr.operand)
    if isinstance(expr, (BinOp, Compare)):
        return free_variables(expr.left) | free_variables(expr.right)
    if isinstance(expr, Call):
        names: frozenset[str] = frozenset()
        for arg in expr.args:
            names |= free_variables(arg)
        return names
    raise TypeError(f"not an expression node: {expr!r}")


def _literal(x: float) -> str:
    if math.isinf(x):
        return "1e999"
    text = repr(x)
    return text[:-2] if text.endswith(".0") else text


def pretty(expr: Expr) -> str:
    """Fully parenthesized source text that parses back to an equivalent tree."""
    if isinstance(expr, Num):
        return _literal(expr.value)
    if isinstance(expr, (Var, Const)):
        return expr.name
    if isinstance(expr, Neg):
        return f"(-{pretty(expr.operand)})"
    if isinstance(expr, (BinOp, Compare)):
        return f"({pretty(expr.left)} {expr.op} {pretty(expr.right)})"
    if isinstance(expr, Call):
        return f"{expr.name}({', '.join(pretty(a) for a in expr.args)})"
    raise TypeError(f"not an expression node: {expr!r}")


def compile_density(
    source: str | Expr,
    variable: str = "theta",
    params: Mapping[str, float] | None = None,
) -> Callable[[np.ndarray], np.ndarray]:
    """Turn an expression into a vectorized function of one variable.

    Raises:
        UnboundVariable: The expression mentions a name that is neither the
            variable nor one of ``params``.
    """
    expr = parse(source) if isinstance(source, (str, bytes)) else source
    fixed = dict(params or {})
    missing = free_variables(expr) - {variable} - set(fixed)
    if missing:
        raise UnboundVariable(sorted(missing)[0])

    def density(x: np.ndarray) -> np.ndarray:
        binding = dict(fixed)
        binding[variable] = x
        out = evaluate(expr, binding)
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(x)).copy() if np.ndim(x) else out

    return density


def substitute(expr: Expr, replacements: Mapping[str, Expr | float]) -> Expr:
    """Replace variables by expressions or numbers."""
    if isinstance(expr, Var):
        if expr.name not in replacements:
            return expr
        new = replacements[expr.name]
        return Num(float(new)) if isinstance(new, (int, float)) else new
    if isinstance(expr, (Num, Const)):
        return expr
    if isinstance(expr, Neg):
        return Neg(substitute(expr.operand, replacements))
    if isinstance(expr, BinOp):
        return BinOp(expr.op, substitute(expr.left, replacements), substitute(expr.right, replacements))
    if isinstance(expr, Compare):
        return Compare(expr.op, substitute(expr.left, replacements), substitute(expr.right, replacements))
    if isinstance(expr, Call):
        return Call(expr.name, tuple(substitute(a, replacements) for a in expr.args))
    raise TypeError(f"not an expression node: {expr!r}")
