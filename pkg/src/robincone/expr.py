"""Minimal arithmetic expression grammar for cross-section profiles.

Grammar accepted (and nothing more):

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('+' | '-')* primary
    primary := NUMBER | 'phi' | ('sin' | 'cos') '(' expr ')' | '(' expr ')'

Expressions are compiled to a vectorized callable of the azimuth ``phi``,
e.g. ``"0.7853981633974483 + 0.1*cos(2*phi)"``. No ``eval`` is involved.
"""

from __future__ import annotations

import re
from typing import Callable, Union

import numpy as np

from .errors import ConfigError

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]+)"
    r"|(?P<op>[()+\-*/]))"
)

ArrayLike = Union[float, np.ndarray]


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ConfigError(f"unexpected character {text[pos]!r} at position {pos} in {text!r}")
        if m.group("num") is not None:
            tokens.append(("num", m.group("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ConfigError(f"expected {op!r} in {self.text!r}, got {val!r}")

    def parse(self) -> Callable[[ArrayLike], ArrayLike]:
        fn = self.expr()
        kind, val = self.peek()
        if kind != "end":
            raise ConfigError(f"trailing input {val!r} in {self.text!r}")
        return fn

    def expr(self):
        left = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            right = self.term()
            if op == "+":
                left = (lambda a, b: lambda p: a(p) + b(p))(left, right)
            else:
                left = (lambda a, b: lambda p: a(p) - b(p))(left, right)
        return left

    def term(self):
        left = self.unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.take()
            right = self.unary()
            if op == "*":
                left = (lambda a, b: lambda p: a(p) * b(p))(left, right)
            else:
                left = (lambda a, b: lambda p: a(p) / b(p))(left, right)
        return left

    def unary(self):
        sign = 1.0
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            if op == "-":
                sign = -sign
        inner = self.primary()
        if sign < 0:
            return (lambda a: lambda p: -a(p))(inner)
        return inner

    def primary(self):
        kind, val = self.take()
        if kind == "num":
            c = float(val)
            return lambda p, _c=c: _c * np.ones_like(np.asarray(p, dtype=float))
        if kind == "name":
            if val == "phi":
                return lambda p: np.asarray(p, dtype=float)
            if val in ("sin", "cos"):
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                fn = np.sin if val == "sin" else np.cos
                return (lambda f, a: lambda p: f(a(p)))(fn, arg)
            raise ConfigError(f"unknown name {val!r} in {self.text!r} (allowed: phi, sin, cos)")
        if (kind, val) == ("op", "("):
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ConfigError(f"unexpected token {val!r} in {self.text!r}")


def compile_profile(text: str) -> Callable[[ArrayLike], ArrayLike]:
    """Compile a profile expression in the azimuth variable ``phi``.

    Returns a callable mapping scalars or arrays to the same shape.
    Raises ConfigError on any token or syntax the grammar does not cover.
    """
    fn = _Parser(text).parse()
    fn(0.0)  # fail fast on structural problems
    return fn
