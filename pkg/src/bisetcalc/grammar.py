"""Tokenizer and recursive-descent parser shared by the word and twist-word grammars.

Both grammars are products of atoms with postfix exponents::

    expr   := factor ( ['*'] factor )*
    factor := primary ( '^' exponent )*
    exponent := ['-'] INT | '(' expr ')'
    primary := atom | '(' expr ')' | '1'

The atom syntax is supplied by the caller, which also supplies the group
operations used to evaluate the parse.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Generic, TypeVar

T = TypeVar("T")


class ParseError(ValueError):
    """Syntax error carrying the character offset where parsing failed."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position} in {text!r}")


_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[*^()\-,]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "op", "end"
    value: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), start))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


@dataclass
class Algebra(Generic[T]):
    """Operations used to evaluate a parse tree into group elements."""

    identity: Callable[[], T]
    multiply: Callable[[T, T], T]
    power: Callable[[T, int], T]
    conjugate: Callable[[T, T], T]


class Parser(Generic[T]):
    """Parse ``text`` into a value of type T.

    ``atom`` receives the parser and must consume the tokens of one atom,
    returning its value, or return None if the current token does not start
    an atom.
    """

    def __init__(
        self,
        text: str,
        algebra: Algebra[T],
        atom: Callable[["Parser[T]"], T | None],
    ):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.algebra = algebra
        self.atom = atom

    @property
    def current(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> Token:
        tok = self.current
        if tok.value != value or tok.kind == "end":
            self.fail(f"expected {value!r}")
        return self.advance()

    def fail(self, message: str):
        tok = self.current
        found = "end of input" if tok.kind == "end" else repr(tok.value)
        raise ParseError(f"{message}, found {found}", self.text, tok.pos)

    def parse(self) -> T:
        if self.current.kind == "end":
            self.fail("empty expression")
        value = self.expr()
        if self.current.kind != "end":
            self.fail("unexpected token")
        return value

    def expr(self) -> T:
        value = self.factor()
        while True:
            tok = self.current
            if tok.value == "*" and tok.kind == "op":
                self.advance()
                value = self.algebra.multiply(value, self.factor())
            elif tok.kind in ("name", "int") or tok.value == "(":
                value = self.algebra.multiply(value, self.factor())
            else:
                return value

    def factor(self) -> T:
        value = self.primary()
        while self.current.value == "^" and self.current.kind == "op":
            self.advance()
            tok = self.current
            if tok.value == "(":
                self.advance()
                conj = self.expr()
                self.expect(")")
                value = self.algebra.conjugate(value, conj)
            else:
                sign = 1
                if tok.value == "-":
                    self.advance()
                    sign = -1
                if self.current.kind != "int":
                    self.fail("expected integer exponent or '('")
                value = self.algebra.power(value, sign * int(self.advance().value))
        return value

    def primary(self) -> T:
        tok = self.current
        if tok.value == "(" and tok.kind == "op":
            self.advance()
            value = self.expr()
            self.expect(")")
            return value
        if tok.kind == "int" and tok.value == "1":
            self.advance()
            return self.algebra.identity()
        value = self.atom(self)
        if value is None:
            self.fail("expected a generator")
        return value

    def integer(self) -> int:
        sign = 1
        if self.current.value == "-":
            self.advance()
            sign = -1
        if self.current.kind != "int":
            self.fail("expected integer")
        return sign * int(self.advance().value)
