"""Expression language for one-variable real maps.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = power { ("*" | "/") power } ;
    power   = unary [ "^" power ] ;              (* right-associative *)
    unary   = "-" unary | atom ;
    atom    = number | "x" | "e" | "pi"
            | name "(" expr { "," expr } ")"
            | "(" expr ")" ;
    number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
            | "." digits [ exponent ] ;
    name    = "sqrt" | "ln" | "exp" | "abs" | "min" | "max" | "pow" ;

Unary minus binds tighter than ``^``, so ``-2^2`` is ``(-2)^2 = 4``.
There is no implicit multiplication: ``4x`` is a lexical error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

__all__ = [
    "ExprError",
    "ExprSyntaxError",
    "DomainError",
    "Token",
    "Constant",
    "Variable",
    "UnaryOp",
    "BinaryOp",
    "Call",
    "ExprNode",
    "RealMap",
    "FUNCTIONS",
    "CONSTANTS",
    "tokenize",
    "parse",
    "parse_source",
    "evaluate",
    "to_source",
]

FUNCTIONS = {"sqrt": 1, "ln": 1, "exp": 1, "abs": 1, "min": 2, "max": 2, "pow": 2}
CONSTANTS = {"e": math.e, "pi": math.pi}
VARIABLE = "x"
OPERATORS = "+-*/^"


class ExprError(ValueError):
    """Base class for expression errors; ``offset`` is a 0-based source index."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.message = message
        self.offset = offset


class ExprSyntaxError(ExprError):
    pass


class DomainError(ExprError, ArithmeticError):
    """Raised when an expression is evaluated outside its mathematical domain."""


@dataclass(frozen=True)
class Token:
    kind: str  # number | identifier | operator | left-paren | right-paren | comma
    lexeme: str
    position: int


_PUNCT = {"(": "left-paren", ")": "right-paren", ",": "comma"}


def tokenize(source: str) -> list[Token]:
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0)
    tokens: list[Token] = []
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
        elif c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            j = _scan_number(source, i)
            tokens.append(Token("number", source[i:j], i))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(Token("identifier", source[i:j], i))
            i = j
        elif c in OPERATORS:
            tokens.append(Token("operator", c, i))
            i += 1
        elif c in _PUNCT:
            tokens.append(Token(_PUNCT[c], c, i))
            i += 1
        else:
            raise ExprSyntaxError(f"unknown character {c!r}", i)
    return tokens


def _scan_number(s: str, i: int) -> int:
    n = len(s)
    start = i
    while i < n and s[i].isdigit():
        i += 1
    if i < n and s[i] == ".":
        i += 1
        if not (i < n and s[i].isdigit()) and i - 1 == start:
            raise ExprSyntaxError("malformed number literal", start)
        while i < n and s[i].isdigit():
            i += 1
    if i < n and s[i] in "eE":
        j = i + 1
        if j < n and s[j] in "+-":
            j += 1
        if not (j < n and s[j].isdigit()):
            raise ExprSyntaxError("malformed number literal", start)
        i = j
        while i < n and s[i].isdigit():
            i += 1
    # "4x", "1.2.3", "3e" and friends
    if i < n and (s[i].isalnum() or s[i] in "._"):
        raise ExprSyntaxError("malformed number literal", start)
    return i


# --- AST -------------------------------------------------------------------
# ``offset`` is excluded from equality so that structural comparison ignores
# whitespace and formatting differences.


@dataclass(frozen=True)
class Constant:
    value: float
    name: str | None = None
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Variable:
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class UnaryOp:
    op: str
    child: "ExprNode"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "ExprNode"
    right: "ExprNode"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["ExprNode", ...]
    offset: int = field(default=0, compare=False)


ExprNode = Union[Constant, Variable, UnaryOp, BinaryOp, Call]


class _Parser:
    def __init__(self, tokens: Sequence[Token]):
        self.tokens = list(tokens)
        self.i = 0

    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def end_offset(self) -> int:
        if not self.tokens:
            return 0
        last = self.tokens[-1]
        return last.position + len(last.lexeme)

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of input", self.end_offset())
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.take()
        if tok.kind != kind:
            raise ExprSyntaxError(f"expected {kind}, got {tok.lexeme!r}", tok.position)
        return tok

    def at_op(self, ops: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "operator" and tok.lexeme in ops

    def expr(self) -> ExprNode:
        node = self.term()
        while self.at_op("+-"):
            tok = self.take()
            node = BinaryOp(tok.lexeme, node, self.term(), tok.position)
        return node

    def term(self) -> ExprNode:
        node = self.power()
        while self.at_op("*/"):
            tok = self.take()
            node = BinaryOp(tok.lexeme, node, self.power(), tok.position)
        return node

    def power(self) -> ExprNode:
        base = self.unary()
        if self.at_op("^"):
            tok = self.take()
            return BinaryOp("^", base, self.power(), tok.position)
        return base

    def unary(self) -> ExprNode:
        if self.at_op("-"):
            tok = self.take()
            return UnaryOp("-", self.unary(), tok.position)
        return self.atom()

    def atom(self) -> ExprNode:
        tok = self.take()
        if tok.kind == "number":
            return Constant(float(tok.lexeme), None, tok.position)
        if tok.kind == "left-paren":
            node = self.expr()
            self.expect("right-paren")
            return node
        if tok.kind == "identifier":
            name = tok.lexeme
            nxt = self.peek()
            if nxt is not None and nxt.kind == "left-paren":
                return self.call(tok)
            if name == VARIABLE:
                return Variable(tok.position)
            if name in CONSTANTS:
                return Constant(CONSTANTS[name], name, tok.position)
            if name in FUNCTIONS:
                raise ExprSyntaxError(f"function {name!r} requires arguments", tok.position)
            raise ExprSyntaxError(f"unknown identifier {name!r}", tok.position)
        raise ExprSyntaxError(f"unexpected token {tok.lexeme!r}", tok.position)

    def call(self, name_tok: Token) -> ExprNode:
        name = name_tok.lexeme
        if name not in FUNCTIONS:
            raise ExprSyntaxError(f"unknown function {name!r}", name_tok.position)
        self.expect("left-paren")
        args = [self.expr()]
        while (tok := self.peek()) is not None and tok.kind == "comma":
            self.take()
            args.append(self.expr())
        self.expect("right-paren")
        if len(args) != FUNCTIONS[name]:
            raise ExprSyntaxError(
                f"{name} takes {FUNCTIONS[name]} argument(s), got {len(args)}",
                name_tok.position,
            )
        return Call(name, tuple(args), name_tok.position)


def parse(tokens: Sequence[Token]) -> ExprNode:
    p = _Parser(tokens)
    node = p.expr()
    tok = p.peek()
    if tok is not None:
        raise ExprSyntaxError(f"trailing input {tok.lexeme!r}", tok.position)
    return node


def parse_source(source: str) -> ExprNode:
    return parse(tokenize(source))


# --- pretty printing ---------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


def to_source(node: ExprNode) -> str:
    """Render ``node`` back to source text, fully parenthesizing compound operands."""
    if isinstance(node, Constant):
        if node.name is not None:
            return node.name
        text = repr(node.value)
        return text if node.value >= 0 else f"({text})"
    if isinstance(node, Variable):
        return VARIABLE
    if isinstance(node, UnaryOp):
        return f"-{_operand(node.child)}"
    if isinstance(node, BinaryOp):
        return f"{_operand(node.left)}{node.op}{_operand(node.right)}"
    if isinstance(node, Call):
        return f"{node.name}({','.join(to_source(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def _operand(node: ExprNode) -> str:
    text = to_source(node)
    if isinstance(node, (BinaryOp, UnaryOp)):
        return f"({text})"
    return text


# --- evaluation --------------------------------------------------------------

Compiled = Callable[[float], float]


def _finite(value: float, what: str, offset: int) -> float:
    if not math.isfinite(value):
        raise DomainError(f"{what} is not finite", offset)
    return value


def _compile(node: ExprNode) -> Compiled:
    # Closures keep evaluation out of an isinstance dispatch loop; the certifier
    # evaluates these maps tens of thousands of times.
    if isinstance(node, Constant):
        v = node.value
        return lambda x: v
    if isinstance(node, Variable):
        return lambda x: x
    off = node.offset
    if isinstance(node, UnaryOp):
        c = _compile(node.child)
        return lambda x: -c(x)
    if isinstance(node, BinaryOp):
        a, b = _compile(node.left), _compile(node.right)
        if node.op == "+":
            return lambda x: _finite(a(x) + b(x), "sum", off)
        if node.op == "-":
            return lambda x: _finite(a(x) - b(x), "difference", off)
        if node.op == "*":
            return lambda x: _finite(a(x) * b(x), "product", off)
        if node.op == "/":
            def div(x: float) -> float:
                den = b(x)
                if den == 0.0:
                    raise DomainError("division by zero", off)
                return _finite(a(x) / den, "quotient", off)
            return div
        return lambda x: _power(a(x), b(x), off)
    if isinstance(node, Call):
        fns = [_compile(arg) for arg in node.args]
        name = node.name
        if name == "sqrt":
            (f,) = fns

            def sqrt(x: float) -> float:
                v = f(x)
                if v < 0.0:
                    raise DomainError("sqrt of negative value", off)
                return math.sqrt(v)
            return sqrt
        if name == "ln":
            (f,) = fns

            def ln(x: float) -> float:
                v = f(x)
                if v <= 0.0:
                    raise DomainError("ln of non-positive value", off)
                return math.log(v)
            return ln
        if name == "exp":
            (f,) = fns

            def exp(x: float) -> float:
                try:
                    return math.exp(f(x))
                except OverflowError:
                    raise DomainError("exp overflow", off) from None
            return exp
        if name == "abs":
            (f,) = fns
            return lambda x: abs(f(x))
        if name == "min":
            f, g = fns
            return lambda x: min(f(x), g(x))
        if name == "max":
            f, g = fns
            return lambda x: max(f(x), g(x))
        if name == "pow":
            f, g = fns
            return lambda x: _power(f(x), g(x), off)
    raise TypeError(f"not an expression node: {node!r}")


def _power(base: float, exponent: float, offset: int) -> float:
    if base == 0.0 and exponent < 0.0:
        raise DomainError("zero raised to a negative power", offset)
    if base < 0.0 and not float(exponent).is_integer():
        raise DomainError("negative base with non-integer exponent", offset)
    try:
        value = math.pow(base, exponent)
    except OverflowError:
        raise DomainError("power overflow", offset) from None
    return _finite(value, "power", offset)


@dataclass(frozen=True, eq=False)
class RealMap:
    """A parsed expression in ``x``; call it like a function."""

    source: str
    root: ExprNode
    _fn: Compiled = field(repr=False, compare=False)

    @classmethod
    def parse(cls, source: str) -> "RealMap":
        root = parse_source(source)
        return cls(source, root, _compile(root))

    @classmethod
    def identity(cls) -> "RealMap":
        return cls.parse(VARIABLE)

    @property
    def is_identity(self) -> bool:
        return isinstance(self.root, Variable)

    @property
    def is_constant(self) -> bool:
        return not _uses_variable(self.root)

    def __call__(self, x: float) -> float:
        if not math.isfinite(x):
            raise DomainError(f"argument {x!r} is not finite", 0)
        return self._fn(float(x))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RealMap) and self.root == other.root

    def __hash__(self) -> int:
        return hash(self.root)


def _uses_variable(node: ExprNode) -> bool:
    if isinstance(node, Variable):
        return True
    if isinstance(node, UnaryOp):
        return _uses_variable(node.child)
    if isinstance(node, BinaryOp):
        return _uses_variable(node.left) or _uses_variable(node.right)
    if isinstance(node, Call):
        return any(_uses_variable(a) for a in node.args)
    return False


def evaluate(map: RealMap | str, x: float) -> float:
    if isinstance(map, str):
        map = RealMap.parse(map)
    return map(x)
