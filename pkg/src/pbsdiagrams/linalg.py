"""Dense complex linear algebra kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Every composite
index is row-major over the declared tensor order, with the more significant
factor written on the left, so ``tensor(a, b)[i*rb + k, j*cb + l] ==
a[i, j] * b[k, l]``.

Choi matrices use the input factor as the more significant one::

    J = sum_ij |i><j| (x) Phi(|i><j|)

so that tracing out the (trailing) output factor of a trace-preserving map
gives the identity on the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9
UNITARY_TOL = 1e-10


class LinalgError(ValueError):
    """Raised on dimension mismatches and violated matrix preconditions."""


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise LinalgError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LinalgError("matrix has non-finite entries")
    return a


def as_ket(v) -> np.ndarray:
    a = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(a)):
        raise LinalgError("ket has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with ``a`` as the more significant factor."""
    return np.kron(as_matrix(a), as_matrix(b))


def tensor_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def ket(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def ketbra(dim: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def max_abs_diff(a: np.ndarray, b: np.ndarray) -> float:
    """Entrywise max of ``|a - b|``.

    This is the single comparison primitive behind every equality check in the
    package.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise LinalgError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return max_abs_diff(dagger(u) @ u, np.eye(u.shape[0])) <= tol


def is_isometry(w: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    w = np.asarray(w, dtype=complex)
    if w.ndim != 2 or w.shape[0] < w.shape[1]:
        return False
    return max_abs_diff(dagger(w) @ w, np.eye(w.shape[1])) <= tol


def is_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and max_abs_diff(m, dagger(m)) <= tol


def partial_trace_last(m: np.ndarray, keep_dim: int, traced_dim: int) -> np.ndarray:
    """Trace out the trailing (least significant) tensor factor of ``m``."""
    m = as_matrix(m)
    n = keep_dim * traced_dim
    if m.shape != (n, n):
        raise LinalgError(
            f"matrix of shape {m.shape} is not square of size {keep_dim}*{traced_dim}"
        )
    return np.trace(m.reshape(keep_dim, traced_dim, keep_dim, traced_dim), axis1=1, axis2=3)


def partial_trace_first(m: np.ndarray, traced_dim: int, keep_dim: int) -> np.ndarray:
    m = as_matrix(m)
    n = keep_dim * traced_dim
    if m.shape != (n, n):
        raise LinalgError(
            f"matrix of shape {m.shape} is not square of size {traced_dim}*{keep_dim}"
        )
    return np.trace(m.reshape(traced_dim, keep_dim, traced_dim, keep_dim), axis1=0, axis2=2)


def hermitian_eigs(m: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, list[np.ndarray]]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns eigenvalues in descending order and the matching orthonormal
    eigenvectors as a list of kets.
    """
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise LinalgError("matrix is not Hermitian")
    herm = 0.5 * (m + dagger(m))
    vals, vecs = np.linalg.eigh(herm)
    order = np.argsort(vals)[::-1]
    return vals[order], [vecs[:, k].copy() for k in order]


def unitary_completion(phi: np.ndarray) -> np.ndarray:
    """Unitary ``W`` with ``W|0> = phi`` built from a Householder reflection."""
    phi = as_ket(phi)
    norm = np.linalg.norm(phi)
    if norm == 0:
        raise LinalgError("cannot complete the zero vector")
    phi = phi / norm
    d = phi.size
    # Rotate the phase of phi[0] away so the reflection maps e0 to phi exactly.
    phase = phi[0] / abs(phi[0]) if abs(phi[0]) > 1e-15 else 1.0
    target = phi / phase
    e0 = ket(d, 0)
    v = e0 - target
    nv = np.linalg.norm(v)
    if nv < 1e-15:
        house = np.eye(d, dtype=complex)
    else:
        v = v / nv
        house = np.eye(d, dtype=complex) - 2.0 * np.outer(v, np.conj(v))
    return house * phase


# ---------------------------------------------------------------------------
# Choi matrices


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Choi matrix of a linear map ``L(C^in_dim) -> L(C^out_dim)``."""

    in_dim: int
    out_dim: int
    matrix: np.ndarray

    def __post_init__(self):
        size = self.in_dim * self.out_dim
        if self.matrix.shape != (size, size):
            raise LinalgError(
                f"Choi matrix shape {self.matrix.shape} does not match "
                f"in_dim={self.in_dim}, out_dim={self.out_dim}"
            )

    def is_hermitian(self, tol: float = DEFAULT_TOL) -> bool:
        return is_hermitian(self.matrix, tol)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + dagger(self.matrix)))[0])

    def is_psd(self, tol: float = DEFAULT_TOL) -> bool:
        return self.is_hermitian(tol) and self.min_eigenvalue() >= -tol

    def is_trace_preserving(self, tol: float = DEFAULT_TOL) -> bool:
        reduced = partial_trace_last(self.matrix, self.in_dim, self.out_dim)
        return max_abs_diff(reduced, np.eye(self.in_dim)) <= tol

    def is_cptp(self, tol: float = DEFAULT_TOL) -> bool:
        return self.is_psd(tol) and self.is_trace_preserving(tol)

    def rank(self, tol: float = DEFAULT_TOL) -> int:
        vals = np.linalg.eigvalsh(0.5 * (self.matrix + dagger(self.matrix)))
        return int(np.sum(np.abs(vals) > tol))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Contract the Choi matrix against an input operator."""
        rho = as_matrix(rho)
        if rho.shape != (self.in_dim, self.in_dim):
            raise LinalgError(f"input of shape {rho.shape}, expected {self.in_dim}")
        j = self.matrix.reshape(self.in_dim, self.out_dim, self.in_dim, self.out_dim)
        # Phi(rho) = sum_ij rho[i, j] Phi(|i><j|)
        return np.einsum("ij,iajb->ab", rho, j)

    def distance(self, other: "ChoiMatrix") -> float:
        if (self.in_dim, self.out_dim) != (other.in_dim, other.out_dim):
            raise LinalgError("Choi matrices act on different spaces")
        return max_abs_diff(self.matrix, other.matrix)


def apply_kraus(kraus: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    rho = as_matrix(rho)
    out = np.zeros((kraus[0].shape[0],) * 2, dtype=complex)
    for k in kraus:
        out += k @ rho @ dagger(k)
    return out


def choi_from_kraus(
    kraus: Sequence[np.ndarray], tol: float = DEFAULT_TOL, check: bool = True
) -> ChoiMatrix:
    """Choi matrix of ``rho -> sum_K K rho K^dagger``.

    Raises ``LinalgError`` if the family is empty, has inconsistent shapes, or
    (with ``check``) is not trace preserving.
    """
    if len(kraus) == 0:
        raise LinalgError("empty Kraus family")
    ks = [as_matrix(k) for k in kraus]
    out_dim, in_dim = ks[0].shape
    if any(k.shape != (out_dim, in_dim) for k in ks):
        raise LinalgError("Kraus operators have inconsistent shapes")
    if check:
        total = sum(dagger(k) @ k for k in ks)
        if max_abs_diff(total, np.eye(in_dim)) > tol:
            raise LinalgError("Kraus family is not trace preserving")
    # Column (i*out + o) of the stacked vectorisation holds K|i> at slot o.
    vecs = np.stack([k.T.reshape(-1) for k in ks], axis=1)
    return ChoiMatrix(in_dim, out_dim, vecs @ dagger(vecs))


def kraus_from_choi(choi: ChoiMatrix, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    vals, vecs = hermitian_eigs(choi.matrix, tol)
    kraus = []
    for lam, v in zip(vals, vecs):
        if lam <= tol:
            continue
        kraus.append(np.sqrt(lam) * v.reshape(choi.in_dim, choi.out_dim).T)
    return kraus


# ---------------------------------------------------------------------------
# Named constants

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SQRT_Z = np.array([[1, 0], [0, 1j]], dtype=complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
# |x> -> |x - 1 mod 3>
QUTRIT_SHIFT = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=complex)
# |x> -> (-1)^x |x>
QUTRIT_SIGN = np.diag([1, -1, 1]).astype(complex)


def swap_operator(d: int) -> np.ndarray:
    """The swap on ``C^d (x) C^d``."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def shift_operator(d: int) -> np.ndarray:
    """Generalised Pauli ``X``: ``|x> -> |x + 1 mod d>``."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock_operator(d: int) -> np.ndarray:
    """Generalised Pauli ``Z``: ``|x> -> w^x |x>``."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def weyl_heisenberg(d: int) -> list[tuple[tuple[int, int], np.ndarray]]:
    """The ``d**2`` unitaries ``X^a Z^b``; they form a basis of ``L(C^d)``."""
    x = shift_operator(d)
    z = clock_operator(d)
    out = []
    for a in range(d):
        for b in range(d):
            out.append(
                ((a, b), np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b))
            )
    return out


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_isometry(d_in: int, d_out: int, rng: np.random.Generator) -> np.ndarray:
    if d_out < d_in:
        raise LinalgError("an isometry needs d_out >= d_in")
    return random_unitary(d_out, rng)[:, :d_in]


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (z + dagger(z))
