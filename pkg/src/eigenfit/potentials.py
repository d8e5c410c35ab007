"""Built-in target potentials and a small arithmetic expression grammar.

The named potentials are the synthesis targets used throughout the examples
and the CLI; ``parse_expression`` accepts a one-line formula in the variable
x (or t) with +, -, *, /, ^, parentheses, unary minus, the functions exp,
sin, cos, abs, and the constant pi, and returns a vectorized callable.
"""

from __future__ import annotations

import math
import re
from typing import Callable

import numpy as np

_PI = math.pi


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _gaussian_bump(x):
    x = np.asarray(x, dtype=float)
    return 1.0 - np.exp(-20.0 * (x - 0.5) ** 2)


def _triangle(x):
    x = np.asarray(x, dtype=float)
    return np.where(x <= 0.5,
                    1.0 - np.abs(x - 0.25),
                    1.0 - np.abs(x - 0.75))


def _even_poly6(x):
    u = 2.0 * np.asarray(x, dtype=float) - 1.0
    return u**6 - 3.0 * u**4 + u**2 - 1.0


def _trig_mix(x):
    x = np.asarray(x, dtype=float)
    return (1.0 + x + 0.3 * np.cos(2 * _PI * x) - 0.1 * np.sin(2 * _PI * x)
            + np.cos(4 * _PI * x) + 0.56 * np.sin(4 * _PI * x))


def _poly65(x):
    x = np.asarray(x, dtype=float)
    return x**6 + x**5 - x


def _sin4pi(x):
    x = np.asarray(x, dtype=float)
    return 1.0 + 0.5 * np.sin(4 * _PI * x)


def _final_mix(x):
    x = np.asarray(x, dtype=float)
    return 1.0 + (x - 0.5) ** 2 + 0.5 * np.sin(4 * _PI * x)


BUILTINS: dict[str, Callable] = {
    "zero": _zero,
    "gaussian-bump": _gaussian_bump,
    "triangle": _triangle,
    "even-poly6": _even_poly6,
    "trig-mix": _trig_mix,
    "poly65": _poly65,
    "sin4pi": _sin4pi,
    "final-mix": _final_mix,
}


# ---------------------------------------------------------------------------
# Expression grammar
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"
                       r"|([A-Za-z_][A-Za-z_0-9]*)"
                       r"|(\*\*|[-+*/^()]))")

_FUNCTIONS = {"exp": np.exp, "sin": np.sin, "cos": np.cos, "abs": np.abs}


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            if text[pos:].strip() == "":
                break
            raise ValueError(f"bad character in expression at: "
                             f"{text[pos:pos + 10]!r}")
        end = match.end()
        tok = text[pos:end].strip()
        # Keep the exponent glued to the mantissa for numbers like 1e-3.
        tokens.append("**" if tok == "**" else tok)
        pos = end
    return tokens


class _Parser:
    """Recursive descent over: expr -> term -> power -> unary -> atom."""

    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, tok: str):
        got = self.take()
        if got != tok:
            raise ValueError(f"expected {tok!r}, got {got!r}")

    def parse(self):
        node = self.expr()
        if self.peek() is not None:
            raise ValueError(f"trailing input from {self.peek()!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            node = (lambda a, b: (lambda x: a(x) + b(x)))(node, rhs) \
                if op == "+" else \
                (lambda a, b: (lambda x: a(x) - b(x)))(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            node = (lambda a, b: (lambda x: a(x) * b(x)))(node, rhs) \
                if op == "*" else \
                (lambda a, b: (lambda x: a(x) / b(x)))(node, rhs)
        return node

    def unary(self):
        if self.peek() == "-":
            self.take()
            inner = self.unary()
            return lambda x: -inner(x)
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() in ("^", "**"):
            self.take()
            expo = self.unary()     # right-associative, allows -2 exponents
            return lambda x: base(x) ** expo(x)
        return base

    def atom(self):
        tok = self.take()
        if tok == "(":
            node = self.expr()
            self.expect(")")
            return node
        if re.fullmatch(r"(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?", tok):
            val = float(tok)
            return lambda x: np.full_like(np.asarray(x, dtype=float), val)
        if tok in ("x", "t"):
            return lambda x: np.asarray(x, dtype=float)
        if tok == "pi":
            return lambda x: np.full_like(np.asarray(x, dtype=float), _PI)
        if tok in _FUNCTIONS:
            fn = _FUNCTIONS[tok]
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return lambda x: fn(arg(x))
        raise ValueError(f"unknown token {tok!r} in expression")


def parse_expression(text: str) -> Callable:
    """Compile a formula in x (or t) to a vectorized callable on [0, 1]."""
    tokens = _tokenize(text)
    if not tokens:
        raise ValueError("empty expression")
    node = _Parser(tokens).parse()
    with np.errstate(all="ignore"):   # poles are the caller's business
        node(np.array([0.0, 0.5]))    # surface structural errors early
    return node


def resolve(descriptor: str) -> Callable:
    """A potential from a built-in name, else from the expression grammar."""
    if descriptor in BUILTINS:
        return BUILTINS[descriptor]
    try:
        return parse_expression(descriptor)
    except ValueError as exc:
        raise ValueError(
            f"{descriptor!r} is neither a built-in potential "
            f"({', '.join(sorted(BUILTINS))}) nor a valid expression: {exc}"
        ) from exc
