"""Word-path semantics of bare PBS-diagrams.

A particle entering a diagram with polarisation ``c`` at position ``p`` is
followed through the port graph: a PBS reflects ``H`` (same port index) and
transmits ``V`` (other port index), a negation flips the polarisation and a
gate appends its label to the word.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .diagram import DiagramError, PortGraph, Term, to_port_graph, typecheck


class Pol(str, Enum):
    """Polarisation; ``H`` is reflected by a PBS, ``V`` transmitted."""

    H = "H"
    V = "V"

    @property
    def flipped(self) -> "Pol":
        return Pol.V if self is Pol.H else Pol.H

    @property
    def index(self) -> int:
        return 0 if self is Pol.H else 1


# enumeration order used by tables, synthesis and the quantum basis
POLS = (Pol.H, Pol.V)


class PathError(DiagramError):
    pass


class LoopDetected(PathError):
    pass


class Arity0(PathError):
    pass


Word = tuple[str, ...]


@dataclass(frozen=True)
class PathResult:
    word: Word
    out_pol: Pol
    out_pos: int


WordPathTable = dict[tuple[Pol, int], PathResult]


def _simulate(g: PortGraph, c: Pol, p: int) -> PathResult:
    endpoint = g.link[("in", p)]
    word: list[str] = []
    visited: set[tuple] = set()
    while endpoint[0] != "bout":
        state = (endpoint, c)
        if state in visited:
            raise LoopDetected(f"particle revisits {endpoint} with polarisation {c.value}")
        visited.add(state)
        _, k, port = endpoint
        node = g.nodes[k]
        if node.kind == "neg":
            c = c.flipped
            out = 0
        elif node.kind == "pbs":
            out = port if c is Pol.H else 1 - port
        elif node.kind == "gate":
            word.append(node.label)
            out = 0
        else:
            raise PathError("diagram contains a hole; substitute it first")
        endpoint = g.link[("out", k, out)]
    return PathResult(tuple(word), c, endpoint[1])


def trace_path(d: Term, c: Pol, p: int) -> PathResult:
    t = typecheck(d)
    if t.arity == 0:
        raise Arity0("no word path semantics for diagrams of arity 0")
    if t.holes:
        raise PathError("diagram contains a hole; substitute it first")
    if not 0 <= p < t.arity:
        raise PathError(f"position {p} out of range for arity {t.arity}")
    return _simulate(to_port_graph(d), Pol(c), p)


def path_table(d: Term) -> WordPathTable:
    t = typecheck(d)
    if t.holes:
        raise PathError("diagram contains a hole; substitute it first")
    g = to_port_graph(d)
    return {(c, p): _simulate(g, c, p) for c in POLS for p in range(t.arity)}


def is_bijective(table: WordPathTable) -> bool:
    outs = {(r.out_pol, r.out_pos) for r in table.values()}
    return outs == set(table.keys())


def occurrence_counts(words: Iterable[Word]) -> Counter:
    total: Counter = Counter()
    for w in words:
        total.update(w)
    return total


def check_occurrence_bounds(
    table: Mapping[tuple[Pol, int], PathResult | Word], neg_free: bool = False
) -> bool:
    """Every label occurs at most twice overall and, for ``neg_free``, at most
    once per polarisation."""
    words = {k: (v.word if isinstance(v, PathResult) else tuple(v)) for k, v in table.items()}
    if any(n > 2 for n in occurrence_counts(words.values()).values()):
        return False
    if neg_free:
        for c in POLS:
            per_pol = occurrence_counts(w for (pol, _), w in words.items() if pol == c)
            if any(n > 1 for n in per_pol.values()):
                return False
    return True


# ---------------------------------------------------------------------------
# Text format: ``pol,pos -> word pol',pos'``


def format_word(word: Word) -> str:
    if not word:
        return "-"
    if all(len(a) == 1 for a in word):
        return "".join(word)
    return ".".join(word)


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "-"):
        return ()
    if "." in text:
        parts = tuple(text.split("."))
        if any(not p for p in parts):
            raise ValueError(f"empty label in word {text!r}")
        return parts
    return tuple(text)


def format_table(table: WordPathTable) -> str:
    lines = []
    for (c, p) in sorted(table, key=lambda k: (k[0].index, k[1])):
        r = table[(c, p)]
        lines.append(f"{c.value},{p} -> {format_word(r.word)} {r.out_pol.value},{r.out_pos}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_table(text: str) -> WordPathTable:
    table: WordPathTable = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            lhs, rhs = line.split("->")
            pol, pos = lhs.strip().split(",")
            word, out = rhs.split()
            opol, opos = out.split(",")
            table[(Pol(pol), int(pos))] = PathResult(parse_word(word), Pol(opol), int(opos))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from exc
    return table
