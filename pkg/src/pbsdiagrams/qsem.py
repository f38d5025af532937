"""Quantum semantics of extended PBS-diagrams.

Basis order of the particle space: polarisation (``H`` = 0, ``V`` = 1), then
position ``0..n-1``, then the data space ``H``.  The global environment is the
tensor product of the gate environments in ascending label order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .channels import PurifiedChannel
from .diagram import Term, typecheck
from .linalg import ChoiMatrix, LinalgError, apply_kraus, choi_from_kraus
from .pathsem import Pol, Word, path_table

MAX_DIM = 4096
BASIS_ORDER = "pol,pos,data"

GateAssignment = Mapping[str, PurifiedChannel]


class SemanticsError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GlobalEnv:
    labels: tuple[str, ...]
    dims: tuple[int, ...]
    eps: np.ndarray

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=int)) if self.dims else 1


def global_env(g: GateAssignment, labels) -> GlobalEnv:
    ordered = tuple(sorted(labels))
    eps = np.ones(1, dtype=complex)
    for a in ordered:
        eps = np.kron(eps, g[a].env_state)
    return GlobalEnv(ordered, tuple(g[a].dim_e for a in ordered), eps)


def _check(d: Term, g: GateAssignment, dim_h: int | None) -> tuple[int, int, GlobalEnv]:
    t = typecheck(d)
    if t.holes:
        raise SemanticsError("diagram contains a hole; substitute it first")
    if t.arity == 0:
        raise SemanticsError("no quantum semantics for diagrams of arity 0")
    missing = sorted(t.alphabet - set(g))
    if missing:
        raise SemanticsError(f"no channel assigned to gate(s) {', '.join(missing)}")
    dims_h = {g[a].dim_h for a in t.alphabet}
    if dim_h is not None:
        dims_h.add(dim_h)
    if len(dims_h) > 1:
        raise SemanticsError("gate channels act on different data spaces")
    if not dims_h:
        raise SemanticsError("cannot infer the data dimension of a gate-free diagram")
    dim_h = dims_h.pop()
    env = global_env(g, t.alphabet)
    total = 2 * t.arity * dim_h * env.dim
    if total > MAX_DIM:
        raise SemanticsError(f"global unitary of size {total} exceeds the cap {MAX_DIM}")
    return t.arity, dim_h, env


def padded_unitary(g: GateAssignment, env: GlobalEnv, label: str, dim_h: int) -> np.ndarray:
    """``V_a``: the gate unitary acting on the data and its own environment
    factor of the global environment, identity elsewhere."""
    k = env.labels.index(label)
    before = int(np.prod(env.dims[:k], dtype=int))
    after = int(np.prod(env.dims[k + 1 :], dtype=int))
    de = env.dims[k]
    u = g[label].unitary.reshape(dim_h, de, dim_h, de)
    # index layout (h, e_before, e_a, e_after)
    eye_b = np.eye(before)
    eye_a = np.eye(after)
    full = np.einsum("iajb,xy,zw->ixazjybw", u, eye_b, eye_a)
    size = dim_h * env.dim
    return full.reshape(size, size)


def word_unitary(g: GateAssignment, env: GlobalEnv, word: Word, dim_h: int, cache=None) -> np.ndarray:
    """``V_w`` with ``V_{aw} = V_w V_a``: the first letter acts first."""
    size = dim_h * env.dim
    out = np.eye(size, dtype=complex)
    for a in word:
        if cache is not None:
            if a not in cache:
                cache[a] = padded_unitary(g, env, a, dim_h)
            va = cache[a]
        else:
            va = padded_unitary(g, env, a, dim_h)
        out = va @ out
    return out


def global_unitary(d: Term, g: GateAssignment, dim_h: int | None = None) -> np.ndarray:
    """The block matrix ``sum |c'><c| (x) |p'><p| (x) V_w`` over the word-path table.

    ``dim_h`` is only needed for gate-free diagrams.
    """
    n, dim_h, env = _check(d, g, dim_h)
    table = path_table(d)
    block = dim_h * env.dim
    size = 2 * n * block
    u = np.zeros((size, size), dtype=complex)
    cache: dict = {}
    for (c, p), r in table.items():
        col = (c.index * n + p) * block
        row = (r.out_pol.index * n + r.out_pos) * block
        u[row : row + block, col : col + block] = word_unitary(g, env, r.word, dim_h, cache)
    return u


def semantic_kraus(d: Term, g: GateAssignment, dim_h: int | None = None) -> list[np.ndarray]:
    n, dim_h, env = _check(d, g, dim_h)
    u = global_unitary(d, g, dim_h)
    sys_dim = 2 * n * dim_h
    v = u @ np.kron(np.eye(sys_dim), env.eps.reshape(-1, 1))
    v = v.reshape(sys_dim, env.dim, sys_dim)
    return [v[:, e, :] for e in range(env.dim)]


def semantics_choi(d: Term, g: GateAssignment, dim_h: int | None = None) -> ChoiMatrix:
    """Choi matrix of ``rho -> Tr_E(U (rho (x) |eps><eps|) U^dag)`` on pol (x) pos (x) H."""
    return choi_from_kraus(semantic_kraus(d, g, dim_h))


def apply_semantics(
    d: Term, g: GateAssignment, rho: np.ndarray, dim_h: int | None = None
) -> np.ndarray:
    kraus = semantic_kraus(d, g, dim_h)
    dim = kraus[0].shape[1]
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise LinalgError(f"input operator of shape {rho.shape}, expected {dim}x{dim}")
    return apply_kraus(kraus, rho)


def basis_index(pol_index: int, pos: int, data: int, n: int, dim_h: int) -> int:
    return (pol_index * n + pos) * dim_h + data


def particle_operator(
    c_out, p_out: int, c_in, p_in: int, data: np.ndarray, n: int
) -> np.ndarray:
    """``|c_out, p_out><c_in, p_in| (x) data`` in the particle basis."""
    ctrl = np.zeros((2 * n, 2 * n), dtype=complex)
    ctrl[Pol(c_out).index * n + p_out, Pol(c_in).index * n + p_in] = 1.0
    return np.kron(ctrl, np.asarray(data, dtype=complex))


def block(m: np.ndarray, c_out, p_out: int, c_in, p_in: int, n: int, dim_h: int) -> np.ndarray:
    """Data block ``(<c_out,p_out| (x) I) m (|c_in,p_in> (x) I)``."""
    r = (Pol(c_out).index * n + p_out) * dim_h
    c = (Pol(c_in).index * n + p_in) * dim_h
    return m[r : r + dim_h, c : c + dim_h]
