"""Parsing and printing for the program and query syntax.

Syntax (UTF-8, a subset of Edinburgh notation):

* ``Head :- B1, ..., Bn.`` and ``Head.`` clauses, ``%`` line comments;
* ``( Cond -> Then ; Else )`` commit constructs in rule bodies;
* ``:- block p(m1,...,mk).`` delay directives with ``-``/``?`` masks;
* uppercase-initial (or ``_``) identifiers are variables;
* ``-`` is a right-associative infix binary functor, ``=`` an infix predicate;
* ``[a,b|T]`` list sugar; parenthesized compounds.
"""
from __future__ import annotations

from typing import Optional

from .terms import (
    Compound,
    Term,
    Var,
    format_term,
    mklist,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__("%s (line %d, column %d)" % (message, line, column))
        self.line = line
        self.column = column


_PUNCT = (":-", "->", "(", ")", "[", "]", ",", "|", ";", "=", "-", "?", ".")


class _Token:
    __slots__ = ("kind", "text", "line", "column")

    def __init__(self, kind, text, line, column):
        self.kind = kind  # "var" | "name" | "punct" | "end"
        self.text = text
        self.line = line
        self.column = column

    def __repr__(self):
        return "%s(%r)" % (self.kind, self.text)


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    line = 1
    col = 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c.isalnum() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "var" if (c.isupper() or c == "_") else "name"
            tokens.append(_Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        two = text[i:i + 2]
        if two in (":-", "->"):
            tokens.append(_Token("punct", two, line, col))
            i += 2
            col += 2
            continue
        if c in "()[],|;=-?.":
            tokens.append(_Token("punct", c, line, col))
            i += 1
            col += 1
            continue
        raise ParseError("unexpected character %r" % c, line, col)
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: Optional[_Token] = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.column)

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text or tok.kind == "end":
            self.fail("expected %r, found %r" % (text, tok.text or "end of input"), tok)
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == text

    # term := pairterm ('=' pairterm)?
    def term(self) -> Term:
        left = self.pair_term()
        if self.at("="):
            self.next()
            right = self.pair_term()
            return Compound("=", (left, right))
        return left

    # pairterm := primary ('-' pairterm)?   (right-associative)
    def pair_term(self) -> Term:
        left = self.primary()
        if self.at("-"):
            self.next()
            right = self.pair_term()
            return Compound("-", (left, right))
        return left

    def primary(self) -> Term:
        tok = self.peek()
        if tok.kind == "var":
            self.next()
            return Var(tok.text)
        if tok.kind == "punct" and tok.text == "=" and self.tokens[self.pos + 1].text == "(":
            # canonical form =(A,B)
            self.next()
            self.next()
            left = self.term()
            self.expect(",")
            right = self.term()
            self.expect(")")
            return Compound("=", (left, right))
        if tok.kind == "name":
            self.next()
            if self.at("("):
                self.next()
                args = [self.term()]
                while self.at(","):
                    self.next()
                    args.append(self.term())
                self.expect(")")
                return Compound(tok.text, tuple(args))
            return Compound(tok.text)
        if self.at("["):
            self.next()
            if self.at("]"):
                self.next()
                return Compound("[]")
            items = [self.term()]
            while self.at(","):
                self.next()
                items.append(self.term())
            tail: Term = Compound("[]")
            if self.at("|"):
                self.next()
                tail = self.term()
            self.expect("]")
            return mklist(items, tail)
        if self.at("("):
            self.next()
            inner = self.term()
            self.expect(")")
            return inner
        self.fail("expected a term, found %r" % (tok.text or "end of input"), tok)


def parse_term(text: str) -> Term:
    """Parse a single term; raises ParseError on leftovers or bad syntax."""
    p = _Parser(text)
    t = p.term()
    tok = p.peek()
    if tok.kind != "end":
        p.fail("unexpected input after term: %r" % tok.text, tok)
    return t


def parse_query(text: str) -> tuple[Compound, ...]:
    """Parse a comma-separated conjunction of atoms."""
    p = _Parser(text)
    atoms = [p.term()]
    while p.at(","):
        p.next()
        atoms.append(p.term())
    tok = p.peek()
    if tok.kind != "end":
        p.fail("unexpected input after query: %r" % tok.text, tok)
    for a in atoms:
        if type(a) is Var:
            raise ParseError("a query atom cannot be a variable", 1, 1)
    return tuple(atoms)


def format_atom(a) -> str:
    return format_term(a)


def format_query(atoms) -> str:
    return ", ".join(format_term(a) for a in atoms)
