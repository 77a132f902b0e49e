"""Small expression language for source terms and tube profiles.

Grammar (EBNF, whitespace between tokens ignored):

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?
    atom   := NUMBER | "t" | "u" | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := "sin" | "cos" | "exp" | "sqrt" | "abs"

"^" is right-associative and binds tighter than unary minus, so
``-2^2 = -4`` and ``2^3^2 = 512``.  There is no implicit multiplication.
Numbers accept decimal and scientific notation.  Parse errors are
positioned by byte offset; evaluation errors (division by zero, sqrt of a
negative, overflow) carry the source span of the offending subexpression
instead of leaking NaNs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "BinOp",
    "Call",
    "EvalError",
    "Expr",
    "Neg",
    "Num",
    "ParseError",
    "Var",
    "eval_expr",
    "parse_expr",
]

_FUNCS_MATH = {"sin": math.sin, "cos": math.cos, "exp": math.exp, "sqrt": math.sqrt, "abs": abs}
_FUNCS_NUMPY = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt, "abs": np.abs}
_VARIABLES = ("t", "u")


class ParseError(ValueError):
    """Syntax error with a byte offset into the source text."""

    def __init__(self, offset: int, expected: str, found: str):
        self.offset = offset
        self.expected = expected
        self.found = found
        super().__init__(f"parse error at byte {offset}: expected {expected}, found {found}")


class EvalError(ValueError):
    """Domain error during evaluation, tagged with the source span."""

    def __init__(self, span: tuple[int, int], snippet: str, detail: str):
        self.span = span
        self.snippet = snippet
        super().__init__(
            f"evaluation error at bytes {span[0]}..{span[1]} ('{snippet}'): {detail}"
        )


@dataclass(frozen=True)
class _Ctx:
    t: object
    u: object
    source: str
    scalar: bool


# precedence levels used for minimal re-parenthesisation
_LEVEL_ADD, _LEVEL_MUL, _LEVEL_NEG, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4, 5


class Expr:
    """Parsed expression in the variables t and u."""

    span: tuple[int, int]
    source: str

    def __call__(self, t, u):
        """Evaluate at scalars or broadcastable numpy arrays."""
        scalar = not (isinstance(t, np.ndarray) or isinstance(u, np.ndarray))
        out = self._eval(_Ctx(t, u, self.source, scalar))
        return float(out) if scalar else out

    def _eval(self, ctx: _Ctx):
        raise NotImplementedError

    def _level(self) -> int:
        raise NotImplementedError

    def to_source(self) -> str:
        """Render back to text that reparses to a structurally equal tree."""
        raise NotImplementedError

    @property
    def uses_u(self) -> bool:
        return any(isinstance(node, Var) and node.name == "u" for node in self._walk())

    def _walk(self):
        yield self

    def _check(self, ctx: _Ctx, value, detail: str):
        if ctx.scalar:
            ok = isinstance(value, float) and math.isfinite(value)
        else:
            ok = bool(np.all(np.isfinite(value)))
        if not ok:
            lo, hi = self.span
            raise EvalError((lo, hi), ctx.source[lo:hi], detail)
        return value

    def _wrap(self, child: "Expr", min_level: int) -> str:
        text = child.to_source()
        return f"({text})" if child._level() < min_level else text


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float
    span: tuple[int, int] = field(default=(0, 0), compare=False)
    source: str = field(default="", compare=False)

    def _eval(self, ctx: _Ctx):
        return self.value if ctx.scalar else np.float64(self.value)

    def _level(self) -> int:
        return _LEVEL_ATOM if self.value >= 0 else _LEVEL_NEG

    def to_source(self) -> str:
        return repr(self.value)


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str
    span: tuple[int, int] = field(default=(0, 0), compare=False)
    source: str = field(default="", compare=False)

    def _eval(self, ctx: _Ctx):
        val = ctx.t if self.name == "t" else ctx.u
        return float(val) if ctx.scalar else val

    def _level(self) -> int:
        return _LEVEL_ATOM

    def to_source(self) -> str:
        return self.name


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    operand: Expr
    span: tuple[int, int] = field(default=(0, 0), compare=False)
    source: str = field(default="", compare=False)

    def _eval(self, ctx: _Ctx):
        return self._check(ctx, -self.operand._eval(ctx), "negation overflowed")

    def _level(self) -> int:
        return _LEVEL_NEG

    def to_source(self) -> str:
        return "-" + self._wrap(self.operand, _LEVEL_NEG)

    def _walk(self):
        yield self
        yield from self.operand._walk()


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr
    span: tuple[int, int] = field(default=(0, 0), compare=False)
    source: str = field(default="", compare=False)

    def _eval(self, ctx: _Ctx):
        lv = self.left._eval(ctx)
        rv = self.right._eval(ctx)
        if ctx.scalar:
            try:
                if self.op == "+":
                    out = lv + rv
                elif self.op == "-":
                    out = lv - rv
                elif self.op == "*":
                    out = lv * rv
                elif self.op == "/":
                    out = lv / rv
                else:
                    out = math.pow(lv, rv)
            except ZeroDivisionError:
                out = math.nan
            except (ValueError, OverflowError):
                out = math.nan
            out = float(out)
        else:
            with np.errstate(all="ignore"):
                if self.op == "+":
                    out = lv + rv
                elif self.op == "-":
                    out = lv - rv
                elif self.op == "*":
                    out = lv * rv
                elif self.op == "/":
                    out = np.divide(lv, rv)
                else:
                    out = np.power(lv, rv)
        detail = {
            "+": "addition overflowed",
            "-": "subtraction overflowed",
            "*": "multiplication overflowed",
            "/": "division by zero or overflow",
            "^": "power left the real domain or overflowed",
        }[self.op]
        return self._check(ctx, out, detail)

    def _level(self) -> int:
        if self.op in "+-":
            return _LEVEL_ADD
        if self.op in "*/":
            return _LEVEL_MUL
        return _LEVEL_POW

    def to_source(self) -> str:
        if self.op in "+-":
            return f"{self._wrap(self.left, _LEVEL_ADD)} {self.op} {self._wrap(self.right, _LEVEL_MUL)}"
        if self.op in "*/":
            return f"{self._wrap(self.left, _LEVEL_MUL)}{self.op}{self._wrap(self.right, _LEVEL_NEG)}"
        # right-associative power: the left side must be an atom
        return f"{self._wrap(self.left, _LEVEL_ATOM)}^{self._wrap(self.right, _LEVEL_NEG)}"

    def _walk(self):
        yield self
        yield from self.left._walk()
        yield from self.right._walk()


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    arg: Expr
    span: tuple[int, int] = field(default=(0, 0), compare=False)
    source: str = field(default="", compare=False)

    def _eval(self, ctx: _Ctx):
        av = self.arg._eval(ctx)
        if ctx.scalar:
            try:
                out = float(_FUNCS_MATH[self.func](av))
            except (ValueError, OverflowError):
                out = math.nan
        else:
            with np.errstate(all="ignore"):
                out = _FUNCS_NUMPY[self.func](av)
        return self._check(ctx, out, f"{self.func} left its domain or overflowed")

    def _level(self) -> int:
        return _LEVEL_ATOM

    def to_source(self) -> str:
        return f"{self.func}({self.arg.to_source()})"

    def _walk(self):
        yield self
        yield from self.arg._walk()


_NUMBER_RE = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_OPERATORS = set("+-*/^()")


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "ident" | "op" | "end"
    text: str
    pos: int

    def describe(self) -> str:
        if self.kind == "number":
            return f"number '{self.text}'"
        if self.kind == "ident":
            return f"identifier '{self.text}'"
        if self.kind == "end":
            return "end of input"
        return f"'{self.text}'"


def _tokenize(src: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    while i < len(src):
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPERATORS:
            tokens.append(_Token("op", c, i))
            i += 1
            continue
        m = _NUMBER_RE.match(src, i)
        if m:
            tokens.append(_Token("number", m.group(), i))
            i = m.end()
            continue
        m = _IDENT_RE.match(src, i)
        if m:
            tokens.append(_Token("ident", m.group(), i))
            i = m.end()
            continue
        raise ParseError(i, "a number, name, operator, or parenthesis", f"character '{c}'")
    tokens.append(_Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: str) -> ParseError:
        tok = self.peek()
        return ParseError(tok.pos, expected, tok.describe())

    def at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in ops

    def expect_op(self, op: str, expected: str) -> _Token:
        if not self.at_op(op):
            raise self.fail(expected)
        return self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        if self.peek().kind != "end":
            raise self.fail("end of input or an operator")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            rhs = self.term()
            node = BinOp(op, node, rhs, span=(node.span[0], rhs.span[1]), source=self.src)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.at_op("*", "/"):
            op = self.advance().text
            rhs = self.factor()
            node = BinOp(op, node, rhs, span=(node.span[0], rhs.span[1]), source=self.src)
        return node

    def factor(self) -> Expr:
        if self.at_op("-"):
            minus = self.advance()
            operand = self.factor()
            return Neg(operand, span=(minus.pos, operand.span[1]), source=self.src)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at_op("^"):
            self.advance()
            exponent = self.factor()
            return BinOp("^", base, exponent, span=(base.span[0], exponent.span[1]), source=self.src)
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Num(float(tok.text), span=(tok.pos, tok.pos + len(tok.text)), source=self.src)
        if tok.kind == "ident":
            self.advance()
            if tok.text in _VARIABLES:
                return Var(tok.text, span=(tok.pos, tok.pos + len(tok.text)), source=self.src)
            if tok.text in _FUNCS_MATH:
                self.expect_op("(", f"'(' after function name '{tok.text}'")
                arg = self.expr()
                close = self.expect_op(")", "')'")
                return Call(tok.text, arg, span=(tok.pos, close.pos + 1), source=self.src)
            raise ParseError(
                tok.pos,
                "a variable (t, u) or function name (sin, cos, exp, sqrt, abs)",
                tok.describe(),
            )
        if self.at_op("("):
            opener = self.advance()
            node = self.expr()
            close = self.expect_op(")", "')'")
            # widen the span over the parens so error snippets stay balanced
            return replace(node, span=(opener.pos, close.pos + 1))
        raise self.fail("an operand")


def parse_expr(src: str) -> Expr:
    """Parse ``src`` into an expression tree.

    Raises ParseError with the byte offset of the first offending token.
    """
    return _Parser(src).parse()


def eval_expr(e: Expr, t: float, u: float) -> float:
    """Evaluate a parsed expression at scalar (t, u)."""
    return float(e(float(t), float(u)))
