"""Bare PBS-diagram terms, linear typing, port graphs and contexts.

Terms are immutable dataclasses.  ``Seq(first, second)`` runs ``first`` then
``second`` (written ``second o first`` in composition order), ``Par(top,
bottom)`` stacks two diagrams and ``Trace(body)`` feeds the last output of
``body`` back into its last input.

A context is an ordinary term holding exactly one :class:`Hole`.

Structural congruence is decided by building a :class:`PortGraph` (the free
traced-PROP model in which every deformation axiom holds on the nose) and
comparing canonical encodings.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union


class DiagramError(ValueError):
    pass


class TypeCheckError(DiagramError):
    pass


class ArityMismatch(TypeCheckError):
    pass


class DuplicateLabel(TypeCheckError):
    pass


class MultipleHoles(TypeCheckError):
    pass


class NoHole(DiagramError):
    pass


class LabelClash(DiagramError):
    pass


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Wire:
    pass


@dataclass(frozen=True)
class Neg:
    pass


@dataclass(frozen=True)
class Swap:
    pass


@dataclass(frozen=True)
class Pbs:
    pass


@dataclass(frozen=True)
class Gate:
    label: str


@dataclass(frozen=True)
class Hole:
    pass


@dataclass(frozen=True)
class Seq:
    first: "Term"
    second: "Term"


@dataclass(frozen=True)
class Par:
    top: "Term"
    bottom: "Term"


@dataclass(frozen=True)
class Trace:
    body: "Term"


Term = Union[Empty, Wire, Neg, Swap, Pbs, Gate, Hole, Seq, Par, Trace]

HOLE_KEY = "<hole>"

_ATOM_ARITY = {Empty: 0, Wire: 1, Neg: 1, Swap: 2, Pbs: 2, Gate: 1, Hole: 1}


@dataclass(frozen=True)
class Typing:
    arity: int
    alphabet: frozenset[str]
    holes: int = 0


def typecheck(term: Term) -> Typing:
    """Linear typing judgement ``Gamma |- D : n``.

    Returns the arity, the alphabet of gate labels and the number of holes.
    """
    if isinstance(term, Gate):
        return Typing(1, frozenset([term.label]))
    if isinstance(term, Hole):
        return Typing(1, frozenset(), 1)
    if type(term) in _ATOM_ARITY:
        return Typing(_ATOM_ARITY[type(term)], frozenset())
    if isinstance(term, (Seq, Par)):
        left, right = (term.first, term.second) if isinstance(term, Seq) else (term.top, term.bottom)
        t1, t2 = typecheck(left), typecheck(right)
        shared = t1.alphabet & t2.alphabet
        if shared:
            raise DuplicateLabel(f"label(s) used twice: {', '.join(sorted(shared))}")
        holes = t1.holes + t2.holes
        if holes > 1:
            raise MultipleHoles("a context may contain only one hole")
        if isinstance(term, Seq):
            if t1.arity != t2.arity:
                raise ArityMismatch(
                    f"sequential composition of arities {t1.arity} and {t2.arity}"
                )
            arity = t1.arity
        else:
            arity = t1.arity + t2.arity
        return Typing(arity, t1.alphabet | t2.alphabet, holes)
    if isinstance(term, Trace):
        t = typecheck(term.body)
        if t.arity < 1:
            raise ArityMismatch("trace of a diagram of arity 0")
        return Typing(t.arity - 1, t.alphabet, t.holes)
    raise TypeCheckError(f"not a diagram term: {term!r}")


def arity(term: Term) -> int:
    return typecheck(term).arity


def subterms(term: Term) -> Iterator[Term]:
    yield term
    if isinstance(term, Seq):
        yield from subterms(term.first)
        yield from subterms(term.second)
    elif isinstance(term, Par):
        yield from subterms(term.top)
        yield from subterms(term.bottom)
    elif isinstance(term, Trace):
        yield from subterms(term.body)


def contains(term: Term, kind: type) -> bool:
    return any(isinstance(t, kind) for t in subterms(term))


def is_context(term: Term) -> bool:
    return typecheck(term).holes == 1


def gate_labels(term: Term) -> list[str]:
    return [t.label for t in subterms(term) if isinstance(t, Gate)]


def size(term: Term) -> int:
    return sum(1 for _ in subterms(term))


# ---------------------------------------------------------------------------
# Derived constructions


def seq(*terms: Term) -> Term:
    if not terms:
        raise DiagramError("seq() needs at least one term")
    out = terms[0]
    for t in terms[1:]:
        out = Seq(out, t)
    return out


def par(*terms: Term) -> Term:
    if not terms:
        return Empty()
    out = terms[0]
    for t in terms[1:]:
        out = Par(out, t)
    return out


def identity(n: int) -> Term:
    """``I_n``: ``n`` parallel wires (``Empty`` for ``n == 0``)."""
    if n == 0:
        return Empty()
    return par(*[Wire() for _ in range(n)])


def pad(term: Term, before: int, after: int) -> Term:
    parts = []
    if before:
        parts.append(identity(before))
    parts.append(term)
    if after:
        parts.append(identity(after))
    return par(*parts)


def sigma(n: int) -> Term:
    """First-wire-goes-last permutation on ``n + 1`` wires."""
    out: Term = Wire()
    for k in range(n):
        out = Seq(Par(out, Wire()), pad(Swap(), k, 0))
    return out


def trace_power(term: Term, m: int) -> Term:
    for _ in range(m):
        term = Trace(term)
    return term


def adjacent_swap(i: int, n: int) -> Term:
    """Swap of wires ``i`` and ``i + 1`` inside ``n`` wires."""
    return pad(Swap(), i, n - i - 2)


def permutation(perm: list[int]) -> Term:
    """Wiring sending input wire ``k`` to output wire ``perm[k]``.

    Built from adjacent swaps (bubble sort) so it stays inside the grammar.
    """
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise DiagramError(f"not a permutation: {perm}")
    # current[j] = destination of the token now sitting at position j
    current = list(perm)
    steps: list[Term] = []
    for i in range(n):
        for j in range(n - 1 - i):
            if current[j] > current[j + 1]:
                current[j], current[j + 1] = current[j + 1], current[j]
                steps.append(adjacent_swap(j, n))
    if not steps:
        return identity(n)
    return seq(*steps)


def on_wires(op: Term, wires: list[int], n: int) -> Term:
    """Apply ``op`` (arity ``len(wires)``) to the given wires of an ``n``-wire bundle."""
    k = len(wires)
    if len(set(wires)) != k or any(w < 0 or w >= n for w in wires):
        raise DiagramError(f"bad wire selection {wires} for {n} wires")
    rest = [w for w in range(n) if w not in wires]
    order = list(wires) + rest
    # bring wire order[j] to position j
    to_front = [0] * n
    for j, w in enumerate(order):
        to_front[w] = j
    back = [0] * n
    for w, j in enumerate(to_front):
        back[j] = w
    if order == list(range(n)):
        return pad(op, 0, n - k)
    return seq(permutation(to_front), pad(op, 0, n - k), permutation(back))


# ---------------------------------------------------------------------------
# Contexts


def substitute(context: Term, label: str) -> Term:
    """Replace the hole of ``context`` by ``Gate(label)``."""
    t = typecheck(context)
    if t.holes != 1:
        raise NoHole("term has no hole")
    if label in t.alphabet:
        raise LabelClash(f"label {label!r} already used in the context")

    def go(term: Term) -> Term:
        if isinstance(term, Hole):
            return Gate(label)
        if isinstance(term, Seq):
            return Seq(go(term.first), go(term.second))
        if isinstance(term, Par):
            return Par(go(term.top), go(term.bottom))
        if isinstance(term, Trace):
            return Trace(go(term.body))
        return term

    return go(context)


class ContextClass(str, Enum):
    C0 = "C0"
    C1 = "C1"
    C2 = "C2"


def classify_context(context: Term) -> frozenset[ContextClass]:
    """Set of context classes the arity-1 context belongs to.

    ``C0`` is pbs-free, ``C1`` neg-free, ``C2`` everything.
    """
    t = typecheck(context)
    if t.arity != 1:
        raise DiagramError(f"contexts are classified at arity 1, got {t.arity}")
    if t.holes != 1:
        raise NoHole("term has no hole")
    classes = {ContextClass.C2}
    if not contains(context, Pbs):
        classes.add(ContextClass.C0)
    if not contains(context, Neg):
        classes.add(ContextClass.C1)
    return frozenset(classes)


# ---------------------------------------------------------------------------
# Port graphs
#
# Endpoints are tuples.  Sources (where a wire starts):
#   ("in", i)            boundary input i
#   ("out", node, port)  output port of a node
# Targets (where a wire ends):
#   ("out", i) is avoided to keep the two families apart; instead
#   ("bout", i)          boundary output i
#   ("in", node, port)   input port of a node

NODE_PORTS = {"neg": 1, "pbs": 2, "gate": 1, "hole": 1}


@dataclass(frozen=True)
class Node:
    kind: str
    label: str | None = None

    @property
    def ports(self) -> int:
        return NODE_PORTS[self.kind]

    @property
    def key(self) -> str | None:
        if self.kind == "gate":
            return self.label
        if self.kind == "hole":
            return HOLE_KEY
        return None


@dataclass
class PortGraph:
    """Open graph of generator occurrences.

    ``link`` maps every source endpoint to the unique target endpoint it is
    wired to; swaps, identities and traces leave no nodes behind.  ``loops``
    counts closed wires carrying no node at all.
    """

    arity: int
    nodes: list[Node] = field(default_factory=list)
    link: dict[tuple, tuple] = field(default_factory=dict)
    loops: int = 0

    def sources(self) -> Iterator[tuple]:
        for i in range(self.arity):
            yield ("in", i)
        for k, node in enumerate(self.nodes):
            for p in range(node.ports):
                yield ("out", k, p)

    def reverse(self) -> dict[tuple, tuple]:
        return {t: s for s, t in self.link.items()}

    def node_of_label(self, key: str) -> int | None:
        for k, node in enumerate(self.nodes):
            if node.key == key:
                return k
        return None


def _shift_source(s: tuple, node_off: int, in_off: int) -> tuple:
    if s[0] == "in":
        return ("in", s[1] + in_off)
    return ("out", s[1] + node_off, s[2])


def _shift_target(t: tuple, node_off: int, out_off: int) -> tuple:
    if t[0] == "bout":
        return ("bout", t[1] + out_off)
    return ("in", t[1] + node_off, t[2])


def to_port_graph(term: Term) -> PortGraph:
    """Structural interpretation of a (type-correct) term as a port graph."""
    typecheck(term)
    return _build(term)


def _atom(kind: str, label: str | None = None) -> PortGraph:
    node = Node(kind, label)
    g = PortGraph(arity=node.ports, nodes=[node])
    for p in range(node.ports):
        g.link[("in", p)] = ("in", 0, p)
        g.link[("out", 0, p)] = ("bout", p)
    return g


def _build(term: Term) -> PortGraph:
    if isinstance(term, Empty):
        return PortGraph(0)
    if isinstance(term, Wire):
        return PortGraph(1, link={("in", 0): ("bout", 0)})
    if isinstance(term, Swap):
        return PortGraph(2, link={("in", 0): ("bout", 1), ("in", 1): ("bout", 0)})
    if isinstance(term, Neg):
        return _atom("neg")
    if isinstance(term, Pbs):
        return _atom("pbs")
    if isinstance(term, Gate):
        return _atom("gate", term.label)
    if isinstance(term, Hole):
        return _atom("hole")
    if isinstance(term, Par):
        a, b = _build(term.top), _build(term.bottom)
        off = len(a.nodes)
        g = PortGraph(a.arity + b.arity, a.nodes + b.nodes, dict(a.link), a.loops + b.loops)
        for s, t in b.link.items():
            g.link[_shift_source(s, off, a.arity)] = _shift_target(t, off, a.arity)
        return g
    if isinstance(term, Seq):
        a, b = _build(term.first), _build(term.second)
        off = len(a.nodes)
        g = PortGraph(a.arity, a.nodes + b.nodes, {}, a.loops + b.loops)
        b_link = {
            _shift_source(s, off, 0): _shift_target(t, off, 0) for s, t in b.link.items()
        }
        for s, t in a.link.items():
            if t[0] == "bout":
                t = b_link[("in", t[1])]
            g.link[s] = t
        for s, t in b_link.items():
            if s[0] == "out":
                g.link[s] = t
        return g
    if isinstance(term, Trace):
        a = _build(term.body)
        n = a.arity - 1
        g = PortGraph(n, list(a.nodes), {}, a.loops)
        fed = a.link[("in", n)]
        if fed == ("bout", n):
            g.loops += 1
        for s, t in a.link.items():
            if s == ("in", n):
                continue
            if t == ("bout", n):
                t = fed
            g.link[s] = t
        return g
    raise TypeCheckError(f"not a diagram term: {term!r}")


# ---------------------------------------------------------------------------
# Canonical form


def _traverse(g: PortGraph, rev: dict, roots: list, seen: dict[int, int], code: list) -> None:
    """Breadth-first numbering of nodes reachable from ``roots``.

    ``roots`` is a list of endpoints (sources or targets) to explore in order.
    Records the wiring encountered in ``code`` using canonical numbers.
    """
    queue: deque = deque(roots)

    def name(endpoint: tuple) -> tuple:
        kind = endpoint[0]
        if kind in ("in", "bout") and len(endpoint) == 2:
            return ("B" + kind, endpoint[1])
        node = endpoint[1]
        if node not in seen:
            seen[node] = len(seen)
            queue.append(("node", node))
        n = g.nodes[node]
        return (kind, seen[node], n.kind, n.key or "", endpoint[2])

    while queue:
        item = queue.popleft()
        if item[0] == "node":
            k = item[1]
            node = g.nodes[k]
            for p in range(node.ports):
                code.append((name(("out", k, p)), name(g.link[("out", k, p)])))
            for p in range(node.ports):
                code.append((name(rev[("in", k, p)]), name(("in", k, p))))
        elif item[0] == "in" and len(item) == 2:
            code.append((name(item), name(g.link[item])))
        elif item[0] == "bout":
            code.append((name(rev[item]), name(item)))
        else:
            raise AssertionError(item)


def canonical_form(g: PortGraph) -> tuple:
    """Isomorphism-invariant encoding of a port graph.

    Nodes connected to the boundary are numbered by a deterministic traversal
    from boundary input 0 upward (then outputs); remaining labelled nodes seed
    further traversals in label order; closed label-free components are
    encoded by the minimum traversal code over all starting nodes.
    """
    rev = g.reverse()
    seen: dict[int, int] = {}
    code: list = []
    roots = [("in", i) for i in range(g.arity)] + [("bout", i) for i in range(g.arity)]
    _traverse(g, rev, roots, seen, code)
    labelled = sorted(
        (node.key, k) for k, node in enumerate(g.nodes) if node.key is not None
    )
    for _, k in labelled:
        if k not in seen:
            seen[k] = len(seen)
            _traverse(g, rev, [("node", k)], seen, code)
    closed = []
    remaining = [k for k in range(len(g.nodes)) if k not in seen]
    while remaining:
        start = remaining[0]
        component: dict[int, int] = {start: 0}
        _traverse(g, rev, [("node", start)], component, [])
        best = None
        for k in component:
            local: dict[int, int] = {k: 0}
            c: list = []
            _traverse(g, rev, [("node", k)], local, c)
            enc = tuple(c)
            if best is None or enc < best:
                best = enc
        closed.append(best)
        remaining = [k for k in remaining if k not in component]
    return (g.arity, tuple(code), tuple(sorted(closed)), g.loops)


def congruent(d1: Term, d2: Term) -> bool:
    """Structural congruence (deformation equivalence) of two terms."""
    t1, t2 = typecheck(d1), typecheck(d2)
    if t1.arity != t2.arity:
        return False
    return canonical_form(to_port_graph(d1)) == canonical_form(to_port_graph(d2))


# ---------------------------------------------------------------------------
# Back to terms


def from_port_graph(g: PortGraph) -> Term:
    """A term whose port graph is congruent to ``g``.

    Every node is placed in parallel, followed by a permutation wiring node
    outputs back to node inputs through traces.
    """
    ports = [node.ports for node in g.nodes]
    total = sum(ports)
    atoms: list[Term] = []
    for node in g.nodes:
        atoms.append(
            {"neg": Neg(), "pbs": Pbs(), "gate": Gate(node.label or ""), "hole": Hole()}[
                node.kind
            ]
        )
    offsets = []
    acc = 0
    for p in ports:
        offsets.append(acc)
        acc += p
    n = g.arity
    # Layout: wires [0, n) boundary, [n, n + total) node ports.
    # Stage 1 (permutation): route every source to the position of its target.
    # Sources: boundary inputs at [0, n) and node outputs at [n, n + total).
    # Targets: boundary outputs at [0, n) and node inputs at [n, n + total).
    def src_pos(s):
        return s[1] if s[0] == "in" else n + offsets[s[1]] + s[2]

    def tgt_pos(t):
        return t[1] if t[0] == "bout" else n + offsets[t[1]] + t[2]

    perm = [0] * (n + total)
    for s, t in g.link.items():
        perm[src_pos(s)] = tgt_pos(t)
    body = seq(permutation(perm), pad(par(*atoms), n, 0)) if atoms else permutation(perm)
    out = trace_power(body, total)
    for _ in range(g.loops):
        out = Par(out, Trace(Wire()))
    return out


# ---------------------------------------------------------------------------
# Random terms


def random_diagram(
    n: int,
    rng,
    max_gates: int = 5,
    allow_pbs: bool = True,
    allow_neg: bool = True,
    max_traced: int = 2,
    max_depth: int = 4,
    hole: bool = False,
    labels: list[str] | None = None,
) -> Term:
    """Random well-typed term of arity ``n``.

    The term is ``Tr^k`` of a sequence of at most ``max_depth`` layers over
    ``n + k`` wires; each layer is a parallel stack of generators.  With
    ``hole`` exactly one :class:`Hole` is placed.  ``rng`` is a
    ``numpy.random.Generator``.
    """
    if n < 1:
        raise DiagramError("random diagrams need arity >= 1")
    if labels is None:
        labels = [chr(ord("a") + i) for i in range(max_gates)]
    k = int(rng.integers(0, max_traced + 1))
    width = n + k
    depth = int(rng.integers(1, max_depth + 1))
    hole_at = (int(rng.integers(0, depth)), int(rng.integers(0, width))) if hole else None
    budget = min(max_gates, len(labels))
    used = 0
    kinds = ["wire", "swap"]
    if allow_neg:
        kinds.append("neg")
    if allow_pbs:
        kinds.append("pbs")
    layers = []
    for layer in range(depth):
        blocks: list[Term] = []
        i = 0
        while i < width:
            if hole_at == (layer, i):
                blocks.append(Hole())
                i += 1
                continue
            options = list(kinds)
            if used < budget:
                options += ["gate", "gate"]
            nxt_hole = hole_at is not None and hole_at == (layer, i + 1)
            if i + 1 >= width or nxt_hole:
                options = [o for o in options if o not in ("swap", "pbs")]
            kind = options[int(rng.integers(0, len(options)))]
            if kind == "gate":
                blocks.append(Gate(labels[used]))
                used += 1
                i += 1
            elif kind in ("swap", "pbs"):
                blocks.append(Swap() if kind == "swap" else Pbs())
                i += 2
            else:
                blocks.append(Wire() if kind == "wire" else Neg())
                i += 1
        layers.append(par(*blocks))
    return trace_power(seq(*layers), k)
