"""Observational equivalence of purified channels.

``equiv0``, ``equiv1`` and ``equiv2`` decide the equivalences induced by
contexts without PBS, without negation and unrestricted contexts, by comparing
the first and second level superoperators and transformation matrices.  A
non-equivalent verdict carries a :class:`DistinguishingWitness`: a context,
channels for its other gates and an input operator on which the two extended
diagrams give different outputs.

The iso-preorder is not decided.  :func:`check_iso_witness` verifies a given
intertwining isometry and :func:`iso_refute_moments` compares generalised
moments, a necessary condition only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .channels import (
    PurifiedChannel,
    moment,
    random_channel,
    s1,
    s2,
    t1,
    t2,
    v_contraction,
)
from .diagram import (
    ContextClass,
    Gate,
    Hole,
    Neg,
    Pbs,
    Term,
    Trace,
    Wire,
    par,
    random_diagram,
    seq,
    substitute,
    typecheck,
)
from .linalg import (
    DEFAULT_TOL,
    PAULI_X,
    dagger,
    hermitian_eigs,
    is_isometry,
    ket,
    max_abs_diff,
    swap_operator,
    unitary_completion,
    weyl_heisenberg,
)
from .qsem import apply_semantics, particle_operator

HOLE_LABEL = "x"
CRITERIA = ("S1", "T1", "S2", "T2")


class NoWitness(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


@dataclass(eq=False)
class DistinguishingWitness:
    context: Term
    assignment: dict[str, PurifiedChannel]
    input_operator: np.ndarray
    separation: float
    criterion: str = ""

    @property
    def arity(self) -> int:
        return typecheck(self.context).arity

    def outputs(self, a: PurifiedChannel, b: PurifiedChannel) -> tuple[np.ndarray, np.ndarray]:
        return (
            witness_output(self.context, self.assignment, a, self.input_operator),
            witness_output(self.context, self.assignment, b, self.input_operator),
        )


@dataclass(eq=False)
class Verdict:
    level: int
    equivalent: bool
    failed_criteria: list[str] = field(default_factory=list)
    witness: DistinguishingWitness | None = None


def plug(context: Term, assignment: Mapping[str, PurifiedChannel], ch: PurifiedChannel):
    """Extended diagram ``context[ch]`` as a (term, gate assignment) pair."""
    d = substitute(context, HOLE_LABEL)
    g = dict(assignment)
    g[HOLE_LABEL] = ch
    return d, g


def witness_output(
    context: Term,
    assignment: Mapping[str, PurifiedChannel],
    ch: PurifiedChannel,
    rho: np.ndarray,
) -> np.ndarray:
    d, g = plug(context, assignment, ch)
    return apply_semantics(d, g, rho)


def _check_dims(a: PurifiedChannel, b: PurifiedChannel) -> None:
    if a.dim_h != b.dim_h:
        raise DimensionMismatch(f"data dimensions differ: {a.dim_h} vs {b.dim_h}")


def _make_witness(context, assignment, rho, a, b, criterion) -> DistinguishingWitness:
    w = DistinguishingWitness(context, dict(assignment), rho, 0.0, criterion)
    out_a, out_b = w.outputs(a, b)
    w.separation = max_abs_diff(out_a, out_b)
    return w


# ---------------------------------------------------------------------------
# Contexts used by the witnesses


def trivial_context() -> Term:
    return Hole()


def loop_context() -> Term:
    """``V`` crosses the hole once, ``H`` bypasses it."""
    return Trace(seq(Pbs(), par(Wire(), Hole()), Pbs()))


def s2_context() -> Term:
    """``V`` runs ``v0 . x . v1`` twice, with a negation closing the loop."""
    arm = seq(Gate("v0"), Hole(), Gate("v1"), Neg())
    return Trace(seq(Pbs(), par(Wire(), arm), Pbs()))


def t2_context() -> Term:
    """``V`` runs ``x . v . x``, ``H`` bypasses everything."""
    inner = Trace(seq(Pbs(), par(Wire(), Gate("v")), Pbs()))
    arm = seq(Hole(), inner, Neg())
    return Trace(seq(Pbs(), par(Wire(), arm), Pbs()))


def _controlled(w: np.ndarray) -> np.ndarray:
    """``W (x) |0><0| + I (x) |1><1|`` with the control qubit last."""
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    return np.kron(w, p0) + np.kron(np.eye(w.shape[0]), p1)


def s2_gadgets(w0: np.ndarray, w1: np.ndarray, dim_h: int) -> tuple[PurifiedChannel, PurifiedChannel]:
    """Channels ``v0`` and ``v1`` of the S2 context.

    Each has environment ``H (x) C^2`` in state ``|0>|0>``.  ``v0`` applies
    ``W0`` to data and environment on its first use only, ``v1`` applies
    ``W1`` on its second use only; both swap data and environment and flip
    the control qubit on every use.
    """
    swap_x = np.kron(swap_operator(dim_h), PAULI_X)
    v0 = swap_x @ _controlled(w0)
    v1 = _controlled(w1) @ swap_x
    eta = ket(2 * dim_h, 0)
    return (
        PurifiedChannel(dim_h, 2 * dim_h, v0, eta),
        PurifiedChannel(dim_h, 2 * dim_h, v1, eta),
    )


def unitary_gate(v: np.ndarray) -> PurifiedChannel:
    return PurifiedChannel(v.shape[0], 1, v, np.ones(1))


# ---------------------------------------------------------------------------
# Witnesses per criterion


def _s1_witness(a, b, tol) -> DistinguishingWitness:
    d = a.dim_h
    diff = s1(a).matrix - s1(b).matrix
    candidates = []
    vals, vecs = hermitian_eigs(diff, max(tol, 1e-9))
    top = vecs[int(np.argmax(np.abs(vals)))].reshape(d, d)
    u, _, _ = np.linalg.svd(top)
    x = np.conj(u[:, 0])
    candidates.append(np.outer(x, np.conj(x)))
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            candidates.append(e)
    best = None
    for data in candidates:
        rho = particle_operator("H", 0, "H", 0, data, 1)
        w = _make_witness(trivial_context(), {}, rho, a, b, "S1")
        if best is None or w.separation > best.separation + 1e-12:
            best = w
    return best


def _t1_witness(a, b) -> DistinguishingWitness:
    rho = particle_operator("V", 0, "H", 0, np.eye(a.dim_h), 1)
    return _make_witness(loop_context(), {}, rho, a, b, "T1")


def _product_candidates(d: int) -> list[np.ndarray]:
    """States ``|i>``, ``|i>+|j>`` and ``|i>+i|j>``; their projectors span
    all operators."""
    out = []
    for i in range(d):
        out.append(ket(d, i))
    for i in range(d):
        for j in range(i + 1, d):
            for phase in (1.0, 1j):
                out.append((ket(d, i) + phase * ket(d, j)) / np.sqrt(2))
    return out


def find_s2_witness(
    a: PurifiedChannel, b: PurifiedChannel, tol: float = DEFAULT_TOL, seed: int = 0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(phi, W0, W1)`` with ``W0|00> = phi`` separating the S2 outputs and
    ``W1`` rotating their difference onto the first data factor."""
    _check_dims(a, b)
    d = a.dim_h
    sa, sb = s2(a), s2(b)
    diff = sa.matrix - sb.matrix
    if np.max(np.abs(diff)) <= tol:
        raise NoWitness("second-level superoperators agree")
    candidates = []
    vals, vecs = hermitian_eigs(diff, max(tol, 1e-9))
    for k in np.argsort(-np.abs(vals))[:4]:
        u, _, _ = np.linalg.svd(vecs[k].reshape(d * d, d * d))
        candidates.append(np.conj(u[:, 0]))
    candidates += _product_candidates(d * d)
    best, best_gap = None, -1.0
    for phi in candidates:
        phi = phi / np.linalg.norm(phi)
        rho = np.outer(phi, np.conj(phi))
        gap = max_abs_diff(sa.apply(rho), sb.apply(rho))
        if gap > best_gap + 1e-12:
            best, best_gap = phi, gap
    if best_gap <= tol:
        raise NoWitness("no separating input state found")
    rho = np.outer(best, np.conj(best))
    delta = sa.apply(rho) - sb.apply(rho)
    w0 = unitary_completion(best)
    # The d leading eigenvectors of delta go to |0>|k>: the trace of delta
    # against that rank-d projector is a sum of top eigenvalues, hence > 0.
    _, evecs = hermitian_eigs(delta, max(tol, 1e-9))
    w1 = dagger(np.stack(evecs, axis=1))
    if _w1_gap(delta, w1, d) <= tol:
        rng = np.random.default_rng(seed)
        from .linalg import random_unitary

        for _ in range(64):
            w1 = random_unitary(d * d, rng)
            if _w1_gap(delta, w1, d) > tol:
                break
        else:
            raise NoWitness("no separating measurement rotation found")
    return best, w0, w1


def _w1_gap(delta: np.ndarray, w1: np.ndarray, d: int) -> float:
    proj = np.kron(np.diag(ket(d, 0).real), np.eye(d))
    return abs(np.trace(delta @ dagger(w1) @ proj @ w1))


def _s2_witness(a, b, tol, seed) -> DistinguishingWitness:
    d = a.dim_h
    _, w0, w1 = find_s2_witness(a, b, tol, seed)
    v0, v1 = s2_gadgets(w0, w1, d)
    data = np.zeros((d, d), dtype=complex)
    data[0, 0] = 1.0
    rho = particle_operator("V", 0, "V", 0, data, 1)
    return _make_witness(s2_context(), {"v0": v0, "v1": v1}, rho, a, b, "S2")


def find_t2_witness(
    a: PurifiedChannel, b: PurifiedChannel, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """A Weyl-Heisenberg unitary ``V`` on which the V-contractions differ."""
    _check_dims(a, b)
    if max_abs_diff(t2(a), t2(b)) <= tol:
        raise NoWitness("second-level transformation matrices agree")
    best, best_gap = None, -1.0
    for _, v in weyl_heisenberg(a.dim_h):
        gap = max_abs_diff(v_contraction(a, v), v_contraction(b, v))
        if gap > best_gap + 1e-12:
            best, best_gap = v, gap
    if best_gap <= tol:
        raise NoWitness("no separating V found")
    return best


def _t2_witness(a, b, tol) -> DistinguishingWitness:
    v = find_t2_witness(a, b, tol)
    rho = particle_operator("V", 0, "H", 0, np.eye(a.dim_h), 1)
    return _make_witness(t2_context(), {"v": unitary_gate(v)}, rho, a, b, "T2")


# ---------------------------------------------------------------------------
# Deciders


def _differ(x: np.ndarray, y: np.ndarray, tol: float) -> bool:
    return max_abs_diff(x, y) > tol


def criteria(a: PurifiedChannel, b: PurifiedChannel, tol: float = DEFAULT_TOL) -> dict[str, bool]:
    """Which of S1, T1, S2, T2 hold (True = the two channels agree)."""
    _check_dims(a, b)
    return {
        "S1": not _differ(s1(a).matrix, s1(b).matrix, tol),
        "T1": not _differ(t1(a), t1(b), tol),
        "S2": not _differ(s2(a).matrix, s2(b).matrix, tol),
        "T2": not _differ(t2(a), t2(b), tol),
    }


LEVEL_CRITERIA = {0: ("S1",), 1: ("S1", "T1"), 2: ("T1", "S2", "T2")}


def _decide(level, a, b, tol, seed) -> Verdict:
    _check_dims(a, b)
    checks = {
        "S1": lambda: _differ(s1(a).matrix, s1(b).matrix, tol),
        "T1": lambda: _differ(t1(a), t1(b), tol),
        "S2": lambda: _differ(s2(a).matrix, s2(b).matrix, tol),
        "T2": lambda: _differ(t2(a), t2(b), tol),
    }
    failed = [c for c in LEVEL_CRITERIA[level] if checks[c]()]
    if not failed:
        return Verdict(level, True, [], None)
    first = failed[0]
    if first == "S1":
        witness = _s1_witness(a, b, tol)
    elif first == "T1":
        witness = _t1_witness(a, b)
    elif first == "S2":
        witness = _s2_witness(a, b, tol, seed)
    else:
        witness = _t2_witness(a, b, tol)
    return Verdict(level, False, failed, witness)


def equiv0(a, b, tol: float = DEFAULT_TOL, seed: int = 0) -> Verdict:
    return _decide(0, a, b, tol, seed)


def equiv1(a, b, tol: float = DEFAULT_TOL, seed: int = 0) -> Verdict:
    return _decide(1, a, b, tol, seed)


def equiv2(a, b, tol: float = DEFAULT_TOL, seed: int = 0) -> Verdict:
    return _decide(2, a, b, tol, seed)


def equiv(level: int, a, b, tol: float = DEFAULT_TOL, seed: int = 0) -> Verdict:
    if level not in LEVEL_CRITERIA:
        raise ValueError(f"level must be 0, 1 or 2, got {level}")
    return _decide(level, a, b, tol, seed)


REQUIRED_CLASS = {0: ContextClass.C0, 1: ContextClass.C1, 2: ContextClass.C2}


# ---------------------------------------------------------------------------
# Iso-preorder


def check_iso_witness(
    a: PurifiedChannel, b: PurifiedChannel, w: np.ndarray, tol: float = DEFAULT_TOL
) -> bool:
    """Whether ``W`` is an isometry with ``W eps_a = eps_b`` and
    ``(I (x) W) U_a = U_b (I (x) W)``."""
    _check_dims(a, b)
    w = np.asarray(w, dtype=complex)
    if w.ndim == 1:
        w = w.reshape(-1, 1)
    if w.shape != (b.dim_e, a.dim_e):
        raise DimensionMismatch(f"W has shape {w.shape}, expected {(b.dim_e, a.dim_e)}")
    if not is_isometry(w, tol):
        return False
    if max_abs_diff(w @ a.env_state, b.env_state) > tol:
        return False
    lift = np.kron(np.eye(a.dim_h), w)
    return max_abs_diff(lift @ a.unitary, b.unitary @ lift) <= tol


@dataclass
class MomentRefutation:
    refuted: bool
    k: int | None
    moment_a: np.ndarray | None = None
    moment_b: np.ndarray | None = None


def iso_refute_moments(
    a: PurifiedChannel, b: PurifiedChannel, kmax: int, tol: float = DEFAULT_TOL
) -> MomentRefutation:
    """Compare ``(I (x) <eps|) U^k (I (x) |eps>)`` for ``k = 0..kmax``.

    Iso-related channels have equal moments, so a difference refutes the
    relation.  Equal moments are inconclusive.
    """
    _check_dims(a, b)
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    for k in range(kmax + 1):
        ma, mb = moment(a, k), moment(b, k)
        if max_abs_diff(ma, mb) > tol:
            return MomentRefutation(True, k, ma, mb)
    return MomentRefutation(False, None)


# ---------------------------------------------------------------------------
# Random contexts


def sample_context(
    cls: ContextClass | str,
    arity: int = 1,
    budget: int = 3,
    seed: int = 0,
    dim_h: int = 2,
    max_dim_e: int = 2,
) -> tuple[Term, dict[str, PurifiedChannel]]:
    """Random context of the given class with random channels on its gates.

    Classes are enforced while generating: no PBS for ``C0``, no negation
    for ``C1``.  At most four layers, ``budget`` gates (capped at three) and
    two traced wires.
    """
    cls = ContextClass(cls)
    rng = np.random.default_rng(seed)
    labels = [f"g{i}" for i in range(min(budget, 3))]
    context = random_diagram(
        arity,
        rng,
        max_gates=len(labels),
        allow_pbs=cls is not ContextClass.C0,
        allow_neg=cls is not ContextClass.C1,
        max_traced=2,
        max_depth=4,
        hole=True,
        labels=labels,
    )
    used = typecheck(context).alphabet
    assignment = {
        a: random_channel(dim_h, int(rng.integers(1, max_dim_e + 1)), rng) for a in sorted(used)
    }
    return context, assignment
