"""Synthesis of bare diagrams from word families.

Given words ``w[c, p]`` in which every label occurs at most twice, build a
diagram ``D`` with ``(D, c, p) => w[c, p] (c, p)`` for every input.  The
construction follows the induction on total word length: the first nonempty
word (scanning ``V`` before ``H``, positions ascending) is split as ``u.a`` on
its last letter, and the position of the other occurrence of ``a`` selects
one of the gadgets below.  Negations only appear when a label occurs twice for
the same polarisation, so neg-free admissible families give neg-free
diagrams.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .diagram import (
    Gate,
    Neg,
    Pbs,
    Swap,
    Term,
    Trace,
    identity,
    on_wires,
    pad,
    seq,
)
from .pathsem import Pol, Word, occurrence_counts, parse_word, format_word


class Inadmissible(ValueError):
    def __init__(self, label: str, message: str):
        super().__init__(message)
        self.label = label


@dataclass(frozen=True)
class WordFamily:
    n: int
    words: Mapping[tuple[Pol, int], Word]

    def word(self, c: Pol, p: int) -> Word:
        return tuple(self.words.get((c, p), ()))

    def normalized(self) -> dict[tuple[Pol, int], Word]:
        return {(c, p): self.word(c, p) for c in (Pol.H, Pol.V) for p in range(self.n)}

    @classmethod
    def from_dict(cls, n: int, words: Mapping) -> "WordFamily":
        out = {}
        for (c, p), w in words.items():
            if not 0 <= p < n:
                raise ValueError(f"position {p} out of range for arity {n}")
            out[(Pol(c), p)] = parse_word(w) if isinstance(w, str) else tuple(w)
        return cls(n, out)


def check_admissible(f: WordFamily) -> tuple[bool, bool]:
    """Return ``(admissible, neg_free_admissible)``."""
    words = f.normalized()
    admissible = all(k <= 2 for k in occurrence_counts(words.values()).values())
    neg_free = admissible and all(
        k <= 1
        for c in (Pol.H, Pol.V)
        for k in occurrence_counts(w for (pol, _), w in words.items() if pol == c).values()
    )
    return admissible, neg_free


def _first_offender(f: WordFamily, neg_free: bool) -> str:
    words = f.normalized()
    for a, k in sorted(occurrence_counts(words.values()).items()):
        if k > 2:
            return a
    if neg_free:
        for c in (Pol.H, Pol.V):
            per = occurrence_counts(w for (pol, _), w in words.items() if pol == c)
            for a, k in sorted(per.items()):
                if k > 1:
                    return a
    return ""


def _filter_gadget(label: str, c: Pol) -> Term:
    """Arity-1 diagram sending polarisation ``c`` through the gate, the other
    polarisation straight through."""
    if c is Pol.V:
        inner = seq(Pbs(), pad(Gate(label), 1, 0), Pbs())
    else:
        inner = seq(Pbs(), pad(Gate(label), 0, 1), Pbs())
    return Trace(inner)


def synthesize(f: WordFamily, neg_free: bool = False) -> Term:
    """Diagram realising the family ``f`` with every input a fixed point."""
    admissible, nf_admissible = check_admissible(f)
    if not admissible:
        a = _first_offender(f, False)
        raise Inadmissible(a, f"label {a!r} occurs more than twice")
    if neg_free and not nf_admissible:
        a = _first_offender(f, True)
        raise Inadmissible(a, f"label {a!r} occurs twice for the same polarisation")
    return _realise(f.n, f.normalized())


def _scan_order(n: int):
    for c in (Pol.V, Pol.H):
        for p in range(n):
            yield c, p


def _realise(n: int, words: dict[tuple[Pol, int], Word]) -> Term:
    start = next(((c, p) for c, p in _scan_order(n) if words[(c, p)]), None)
    if start is None:
        return identity(n)
    c0, p0 = start
    w0 = words[start]
    u, a = w0[:-1], w0[-1]

    if occurrence_counts(words.values())[a] == 1:
        rest = dict(words)
        rest[start] = u
        return seq(_realise(n, rest), pad(_filter_gadget(a, c0), p0, n - p0 - 1))

    N = n + 1
    z = n
    sub = {(c, p): w for (c, p), w in words.items()}
    for c in (Pol.H, Pol.V):
        sub[(c, z)] = ()

    if a in u:
        # the same particle crosses ``a`` twice: w0 = v a wt a
        i = u.index(a)
        v, wt = u[:i], u[i + 1 :]
        sub[start] = v
        sub[(c0, z)] = wt
        sub[(c0.flipped, z)] = ()
        x = p0
        if c0 is Pol.V:
            tail = seq(
                on_wires(Neg(), [z], N),
                on_wires(Pbs(), [x, z], N),
                on_wires(Gate(a), [z], N),
            )
        else:
            tail = seq(
                on_wires(Neg(), [z], N),
                on_wires(Pbs(), [x, z], N),
                on_wires(Gate(a), [x], N),
                on_wires(Swap(), [x, z], N),
            )
        return Trace(seq(_realise(N, sub), tail))

    c1, p1 = next(
        (c, p) for c, p in _scan_order(n) if (c, p) != start and a in words[(c, p)]
    )
    w1 = words[(c1, p1)]
    j = w1.index(a)
    v, w = w1[:j], w1[j + 1 :]
    sub[start] = u
    sub[(c1, p1)] = v
    x, y = p0, p1

    if p1 == p0:
        # both polarisations of one wire, c1 = not c0
        sub[(c0, z)] = ()
        sub[(c1, z)] = w
        tail = seq(on_wires(Gate(a), [x], N), on_wires(Swap(), [x, z], N))
    elif c1 is not c0:
        sub[(c0, z)] = ()
        sub[(c1, z)] = w
        # after the pbs, the two gate-bound particles share one wire
        hub = y if c0 is Pol.V else x
        tail = seq(
            on_wires(Pbs(), [x, y], N),
            on_wires(Gate(a), [hub], N),
            on_wires(Swap(), [hub, z], N),
            on_wires(Pbs(), [x, y], N),
        )
    else:
        # same polarisation on two wires: flip one so a pbs can merge them
        sub[(c0, z)] = ()
        sub[(c0.flipped, z)] = w
        hub = y if c0 is Pol.V else x
        tail = seq(
            on_wires(Neg(), [y], N),
            on_wires(Pbs(), [x, y], N),
            on_wires(Gate(a), [hub], N),
            on_wires(Swap(), [hub, z], N),
            on_wires(Pbs(), [x, y], N),
            on_wires(Neg(), [y], N),
        )
    return Trace(seq(_realise(N, sub), tail))


# ---------------------------------------------------------------------------
# Text format: ``V,0: abab`` / ``H,0: -``


def parse_family(text: str, n: int | None = None) -> WordFamily:
    words: dict[tuple[Pol, int], Word] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            key, word = line.split(":", 1)
            pol, pos = key.strip().split(",")
            k = (Pol(pol.strip()), int(pos))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from exc
        if k in words:
            raise ValueError(f"line {lineno}: duplicate entry for {k[0].value},{k[1]}")
        if k[1] < 0:
            raise ValueError(f"line {lineno}: negative position")
        words[k] = parse_word(word)
    if n is None:
        n = 1 + max((p for _, p in words), default=-1)
    return WordFamily.from_dict(n, words)


def format_family(f: WordFamily) -> str:
    lines = [
        f"{c.value},{p}: {format_word(f.word(c, p))}" for c in (Pol.V, Pol.H) for p in range(f.n)
    ]
    return "\n".join(lines) + "\n"


def family_of_table(table) -> WordFamily:
    n = 1 + max((p for _, p in table), default=-1)
    return WordFamily(n, {k: r.word for k, r in table.items()})
