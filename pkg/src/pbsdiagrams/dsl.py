"""Text syntax for diagrams and contexts.

Grammar (``+`` binds tighter than ``;``, both associate to the left)::

    seq   := par (';' par)*
    par   := atom ('+' atom)*
    atom  := 'empty' | 'id' | 'neg' | 'swap' | 'pbs' | 'hole'
           | 'gate' '[' label ']' | 'tr' '(' seq ')' | '(' seq ')'

``A ; B`` runs ``A`` then ``B``.  ``#`` starts a comment running to the end of
the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagram import (
    Empty,
    Gate,
    Hole,
    Neg,
    Par,
    Pbs,
    Seq,
    Swap,
    Term,
    Trace,
    Wire,
    typecheck,
)

_TOKEN = re.compile(r"\s+|#[^\n]*|[A-Za-z_][A-Za-z0-9_]*|[;+()\[\]]|.")
_LABEL = re.compile(r"[A-Za-z0-9_]+")
_ATOMS = {"empty": Empty, "id": Wire, "neg": Neg, "swap": Swap, "pbs": Pbs, "hole": Hole}


class DslSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    for m in _TOKEN.finditer(src):
        text = m.group(0)
        if not (text.isspace() or text.startswith("#")):
            tokens.append(Token(text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
    tokens.append(Token("", line, col))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.peek
        raise DslSyntaxError(message, tok.line, tok.column)

    def expect(self, text: str) -> Token:
        tok = self.peek
        if tok.text != text:
            found = repr(tok.text) if tok.text else "end of input"
            self.fail(f"expected {text!r}, found {found}")
        self.i += 1
        return tok

    def parse(self) -> Term:
        term = self.seq()
        if self.peek.text:
            self.fail(f"unexpected {self.peek.text!r}")
        return term

    def seq(self) -> Term:
        term = self.par()
        while self.peek.text == ";":
            self.i += 1
            term = Seq(term, self.par())
        return term

    def par(self) -> Term:
        term = self.atom()
        while self.peek.text == "+":
            self.i += 1
            term = Par(term, self.atom())
        return term

    def atom(self) -> Term:
        tok = self.peek
        if tok.text in _ATOMS:
            self.i += 1
            return _ATOMS[tok.text]()
        if tok.text == "gate":
            self.i += 1
            self.expect("[")
            lab = self.peek
            if not _LABEL.fullmatch(lab.text or " "):
                self.fail("expected a gate label")
            self.i += 1
            self.expect("]")
            return Gate(lab.text)
        if tok.text == "tr":
            self.i += 1
            self.expect("(")
            body = self.seq()
            self.expect(")")
            return Trace(body)
        if tok.text == "(":
            self.i += 1
            body = self.seq()
            self.expect(")")
            return body
        if not tok.text:
            self.fail("unexpected end of input")
        self.fail(f"unexpected {tok.text!r}")


def parse(src: str, check: bool = True) -> Term:
    """Parse a diagram or context; with ``check`` the term is also typechecked."""
    term = _Parser(src).parse()
    if check:
        typecheck(term)
    return term


def pretty(term: Term) -> str:
    """Fully parenthesised text; ``parse(pretty(t)) == t``."""
    if isinstance(term, Seq):
        return f"({pretty(term.first)} ; {pretty(term.second)})"
    if isinstance(term, Par):
        return f"({pretty(term.top)} + {pretty(term.bottom)})"
    if isinstance(term, Trace):
        return f"tr({pretty(term.body)})"
    if isinstance(term, Gate):
        return f"gate[{term.label}]"
    for name, cls in _ATOMS.items():
        if isinstance(term, cls):
            return name
    raise TypeError(f"not a term: {term!r}")
