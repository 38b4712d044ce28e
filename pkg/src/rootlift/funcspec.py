"""Tiny expression language for coefficient functions and self-maps.

Grammar (EBNF, documented in README):

    expr      = term { ("+" | "-") term } ;
    term      = factor { ("*" | "/") factor } ;
    factor    = "-" factor | power ;
    power     = atom [ "^" UINT ] ;
    atom      = NUMBER | IMAG | VAR | FUNC "(" expr { "," expr } ")"
              | "piecewise" "(" cond "," expr "," expr ")" | "(" expr ")" ;
    cond      = VAR ("<=" | ">=") [ "-" ] NUMBER ;

Numbers are decimal with optional exponent; an ``i`` suffix makes an
imaginary literal (``1i``, ``0.5i``).  Variables are ``x`` on the
interval, ``theta`` on the circle and ``theta1``/``theta2`` on the
torus.  Functions: sin, cos, exp, sqrt (principal branch), abs.
Exponents must be nonnegative integer literals.  Evaluation is pure;
the same AST and coordinate always give the bit-identical value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VARIABLES = ("x", "theta", "theta1", "theta2")
FUNCTIONS = ("sin", "cos", "exp", "sqrt", "abs")


class ParseError(ValueError):
    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class EvalError(ValueError):
    pass


# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class Bin:
    op: str
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


@dataclass(frozen=True)
class Piecewise:
    var: str
    rel: str          # "<=" or ">="
    threshold: float
    then: object
    other: object


Expr = (Num, Var, Neg, Bin, Pow, Call, Piecewise)


# -- lexer -------------------------------------------------------------------

_TOKEN_CHARS = {"+", "-", "*", "/", "^", "(", ")", ","}


@dataclass(frozen=True)
class _Tok:
    kind: str          # num | imag | ident | op | cmp | end
    text: str
    value: object
    line: int
    col: int


def _lex(text):
    toks = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c in _TOKEN_CHARS:
            toks.append(_Tok("op", c, c, line, col))
            i += 1
            col += 1
            continue
        if c in "<>":
            if i + 1 < n and text[i + 1] == "=":
                toks.append(_Tok("cmp", c + "=", c + "=", line, col))
                i += 2
                col += 2
                continue
            raise ParseError(f"unexpected character {c!r}", line, col)
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            value = float(text[i:j])
            if j < n and text[j] == "i":
                toks.append(_Tok("imag", text[i : j + 1], value, line, col))
                j += 1
            else:
                toks.append(_Tok("num", text[i:j], value, line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Tok("ident", text[i:j], text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(_Tok("end", "", None, line, col))
    return toks


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text):
        tok = self.next()
        if tok.kind != "op" or tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        return tok

    def parse_expr(self):
        node = self.parse_term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next().text
            node = Bin(op, node, self.parse_term())
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.next().text
            node = Bin(op, node, self.parse_factor())
        return node

    def parse_factor(self):
        if self.peek().kind == "op" and self.peek().text == "-":
            self.next()
            inner = self.parse_factor()
            if isinstance(inner, Num):           # fold literal negation
                return Num(-inner.value)
            return Neg(inner)
        return self.parse_power()

    def parse_power(self):
        node = self.parse_atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.next()
            tok = self.next()
            if tok.kind != "num" or tok.value != int(tok.value):
                raise ParseError("exponent must be a nonnegative integer literal",
                                 tok.line, tok.col)
            node = Pow(node, int(tok.value))
            if self.peek().kind == "op" and self.peek().text == "^":
                tok = self.peek()
                raise ParseError("repeated exponent operator", tok.line, tok.col)
        return node

    def parse_atom(self):
        tok = self.next()
        if tok.kind == "num":
            return Num(complex(tok.value, 0.0))
        if tok.kind == "imag":
            return Num(complex(0.0, tok.value))
        if tok.kind == "op" and tok.text == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        if tok.kind == "ident":
            name = tok.text
            if name == "piecewise":
                return self.parse_piecewise(tok)
            if name in FUNCTIONS:
                self.expect_op("(")
                arg = self.parse_expr()
                closing = self.next()
                if closing.kind == "op" and closing.text == ",":
                    raise ParseError(f"{name} takes exactly one argument",
                                     closing.line, closing.col)
                if closing.kind != "op" or closing.text != ")":
                    raise ParseError("expected ')'", closing.line, closing.col)
                return Call(name, arg)
            if name in VARIABLES:
                if self.peek().kind == "op" and self.peek().text == "(":
                    raise ParseError(f"{name!r} is a variable, not a function",
                                     tok.line, tok.col)
                return Var(name)
            raise ParseError(f"unknown identifier {name!r}", tok.line, tok.col)
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.line, tok.col)

    def parse_piecewise(self, tok):
        self.expect_op("(")
        var = self.next()
        if var.kind != "ident" or var.text not in VARIABLES:
            raise ParseError("piecewise condition must start with a variable",
                             var.line, var.col)
        rel = self.next()
        if rel.kind != "cmp":
            raise ParseError("piecewise condition needs '<=' or '>='",
                             rel.line, rel.col)
        sign = 1.0
        num = self.next()
        if num.kind == "op" and num.text == "-":
            sign = -1.0
            num = self.next()
        if num.kind != "num":
            raise ParseError("piecewise threshold must be a number literal",
                             num.line, num.col)
        self.expect_op(",")
        then = self.parse_expr()
        self.expect_op(",")
        other = self.parse_expr()
        self.expect_op(")")
        return Piecewise(var.text, rel.text, sign * num.value, then, other)


def parse(text: str):
    """Parse ``text`` into an AST; raises :class:`ParseError` with position."""
    parser = _Parser(_lex(text))
    node = parser.parse_expr()
    tail = parser.peek()
    if tail.kind != "end":
        raise ParseError(f"unexpected trailing {tail.text!r}", tail.line, tail.col)
    return node


# -- printing ----------------------------------------------------------------


def to_text(node) -> str:
    """Canonical rendering: print -> parse -> print is the identity."""
    if isinstance(node, Num):
        v = node.value
        if v.imag == 0.0:
            return _fmt(v.real)
        if v.real == 0.0:
            return f"{_fmt(v.imag)}i"
        sign = "+" if v.imag > 0 else "-"
        return f"({_fmt(v.real)}{sign}{_fmt(abs(v.imag))}i)"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner, flips = node.operand, 1
        while isinstance(inner, Neg):            # printer mirrors parser folding
            inner = inner.operand
            flips += 1
        if isinstance(inner, Num):
            return to_text(Num(inner.value if flips % 2 == 0 else -inner.value))
        return f"(-{to_text(node.operand)})"
    if isinstance(node, Bin):
        return f"({to_text(node.lhs)}{node.op}{to_text(node.rhs)})"
    if isinstance(node, Pow):
        return f"(({to_text(node.base)})^{node.exponent})"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Piecewise):
        thr = _fmt(node.threshold)
        return (f"piecewise({node.var}{node.rel}{thr},"
                f"{to_text(node.then)},{to_text(node.other)})")
    raise TypeError(f"not an expression node: {node!r}")


def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


# -- evaluation ---------------------------------------------------------------


def _eval(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name not in env:
            raise EvalError(f"variable {node.name!r} is not defined on this base")
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, Bin):
        a = _eval(node.lhs, env)
        b = _eval(node.rhs, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        with np.errstate(divide="ignore", invalid="ignore"):
            return a / b
    if isinstance(node, Pow):
        base = _eval(node.base, env)
        out = np.ones_like(base) if isinstance(base, np.ndarray) else 1.0 + 0.0j
        for _ in range(node.exponent):
            out = out * base
        return out
    if isinstance(node, Call):
        arg = _eval(node.arg, env)
        arg = np.asarray(arg, dtype=complex) if isinstance(arg, np.ndarray) else complex(arg)
        if node.func == "sin":
            return np.sin(arg)
        if node.func == "cos":
            return np.cos(arg)
        if node.func == "exp":
            return np.exp(arg)
        if node.func == "sqrt":
            return np.sqrt(arg)
        if node.func == "abs":
            return np.abs(arg)
        raise EvalError(f"unknown function {node.func!r}")
    if isinstance(node, Piecewise):
        if node.var not in env:
            raise EvalError(f"variable {node.var!r} is not defined on this base")
        v = np.real(env[node.var])
        cond = v <= node.threshold if node.rel == "<=" else v >= node.threshold
        then = _eval(node.then, env)
        other = _eval(node.other, env)
        if isinstance(cond, np.ndarray):
            return np.where(cond, then, other)
        return then if cond else other
    raise TypeError(f"not an expression node: {node!r}")


def eval_scalar(node, env: dict) -> complex:
    """Evaluate at one coordinate; raises on non-finite results."""
    out = complex(_eval(node, env))
    if not (np.isfinite(out.real) and np.isfinite(out.imag)):
        raise EvalError(f"expression is not finite at {env}")
    return out


# -- sampled functions ---------------------------------------------------------


@dataclass
class SampledFunction:
    """A complex-valued function given by its values on a base's samples."""

    base: object
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if len(self.values) != self.base.n_samples:
            raise EvalError("values length differs from base sample count")
        if not np.all(np.isfinite(self.values)):
            bad = int(np.flatnonzero(~np.isfinite(self.values))[0])
            raise EvalError(f"non-finite value at sample {bad}")


def _base_env(base, coords):
    if base.kind == "interval":
        return {"x": coords}
    if base.kind == "circle":
        return {"theta": coords}
    if base.kind == "torus2":
        return {"theta1": coords[..., 0], "theta2": coords[..., 1]}
    raise EvalError(f"expressions take no variables on base kind {base.kind!r}; "
                    "supply sampled values directly")


def evaluate(expr, base) -> SampledFunction:
    """Evaluate an expression at every sample of ``base``."""
    env = _base_env(base, np.asarray(base.coords))
    values = np.broadcast_to(np.asarray(_eval(expr, env), dtype=complex),
                             (base.n_samples,)).copy()
    return SampledFunction(base, values)


def eval_at(expr, base, location) -> complex:
    """Exact evaluation at a location's coordinate (no value interpolation)."""
    coord = base.location_coordinate(location)
    return eval_at_coord(expr, base.kind, coord)


def eval_at_coord(expr, kind: str, coord) -> complex:
    if kind == "interval":
        env = {"x": coord}
    elif kind == "circle":
        env = {"theta": coord}
    elif kind == "torus2":
        env = {"theta1": coord[0], "theta2": coord[1]}
    else:
        raise EvalError(f"expressions take no variables on base kind {kind!r}")
    return eval_scalar(expr, env)
