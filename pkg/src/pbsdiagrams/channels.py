"""Purified channels ``[U, |eps>, E]`` and their first/second-level functionals.

``U`` acts on ``H (x) E`` with ``H`` the more significant factor, so the
composite index of ``|h>|e>`` is ``h * dim_e + e``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    CNOT,
    DEFAULT_TOL,
    PAULI_X,
    PAULI_Z,
    QUTRIT_SHIFT,
    QUTRIT_SIGN,
    SQRT_Z,
    ChoiMatrix,
    LinalgError,
    as_ket,
    as_matrix,
    choi_from_kraus,
    is_unitary,
    random_isometry,
    random_state,
    random_unitary,
    swap_operator,
    dagger,
)


class ChannelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PurifiedChannel:
    dim_h: int
    dim_e: int
    unitary: np.ndarray
    env_state: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "unitary", as_matrix(self.unitary))
        object.__setattr__(self, "env_state", as_ket(self.env_state))
        if self.dim_h < 1 or self.dim_e < 1:
            raise ChannelError("dimensions must be positive")
        size = self.dim_h * self.dim_e
        if self.unitary.shape != (size, size):
            raise ChannelError(
                f"unitary has shape {self.unitary.shape}, expected {size}x{size}"
            )
        if self.env_state.shape != (self.dim_e,):
            raise ChannelError(
                f"environment state has dimension {self.env_state.size}, expected {self.dim_e}"
            )

    def validate(self, tol: float = DEFAULT_TOL) -> "PurifiedChannel":
        if not is_unitary(self.unitary, max(tol, 1e-10)):
            raise ChannelError("U is not unitary")
        if abs(np.linalg.norm(self.env_state) - 1.0) > tol:
            raise ChannelError("environment state is not normalised")
        return self

    @property
    def env_embedding(self) -> np.ndarray:
        """``I_H (x) |eps>`` as a ``(dim_h*dim_e) x dim_h`` matrix."""
        return np.kron(np.eye(self.dim_h), self.env_state.reshape(-1, 1))

    def __repr__(self) -> str:
        return f"PurifiedChannel(dim_h={self.dim_h}, dim_e={self.dim_e})"


def channel(unitary, env_state, dim_h: int | None = None) -> PurifiedChannel:
    """Convenience constructor inferring the dimensions."""
    eps = as_ket(env_state)
    u = as_matrix(unitary)
    dim_e = eps.size
    if dim_h is None:
        if u.shape[0] % dim_e:
            raise ChannelError("unitary size is not a multiple of the environment dimension")
        dim_h = u.shape[0] // dim_e
    return PurifiedChannel(dim_h, dim_e, u, eps).validate()


def _kraus(u: np.ndarray, eps: np.ndarray, dim_sys: int, dim_e: int) -> list[np.ndarray]:
    # column block of U (I (x) |eps>), rows indexed (sys, env)
    v = u @ np.kron(np.eye(dim_sys), eps.reshape(-1, 1))
    v = v.reshape(dim_sys, dim_e, dim_sys)
    return [v[:, e, :] for e in range(dim_e)]


def kraus_ops(ch: PurifiedChannel) -> list[np.ndarray]:
    """``K_e = (I (x) <e|) U (I (x) |eps>)`` over the computational basis of E."""
    return _kraus(ch.unitary, ch.env_state, ch.dim_h, ch.dim_e)


def s1(ch: PurifiedChannel) -> ChoiMatrix:
    """First-level superoperator ``rho -> Tr_E(U (rho (x) |eps><eps|) U^dag)``."""
    ch.validate()
    return choi_from_kraus(kraus_ops(ch))


def t1(ch: PurifiedChannel) -> np.ndarray:
    """First-level transformation matrix ``(I (x) <eps|) U (I (x) |eps>)``."""
    ch.validate()
    emb = ch.env_embedding
    return dagger(emb) @ ch.unitary @ emb


def u2(ch: PurifiedChannel) -> np.ndarray:
    """``(I_H (x) U)(Swap (x) I_E)(I_H (x) U)`` on ``H (x) H (x) E``.

    The first application of ``U`` acts on the second ``H`` factor.
    """
    ch.validate()
    lift = np.kron(np.eye(ch.dim_h), ch.unitary)
    swap = np.kron(swap_operator(ch.dim_h), np.eye(ch.dim_e))
    return lift @ swap @ lift


def s2(ch: PurifiedChannel) -> ChoiMatrix:
    """Second-level superoperator on ``L(H (x) H)``."""
    return choi_from_kraus(_kraus(u2(ch), ch.env_state, ch.dim_h**2, ch.dim_e))


def t2(ch: PurifiedChannel) -> np.ndarray:
    """Second-level transformation matrix on ``H (x) H``."""
    emb = np.kron(np.eye(ch.dim_h**2), ch.env_state.reshape(-1, 1))
    return dagger(emb) @ u2(ch) @ emb


def apply_s2(ch: PurifiedChannel, rho: np.ndarray) -> np.ndarray:
    out = np.zeros((ch.dim_h**2,) * 2, dtype=complex)
    for k in _kraus(u2(ch), ch.env_state, ch.dim_h**2, ch.dim_e):
        out += k @ rho @ dagger(k)
    return out


def v_contraction(ch: PurifiedChannel, v: np.ndarray) -> np.ndarray:
    """``(I (x) <eps|) U (V (x) I_E) U (I (x) |eps>)``.

    This is the block produced by a particle crossing the channel, then ``V``,
    then the channel again; it vanishes identically in ``V`` iff the
    second-level transformation matrices agree.
    """
    emb = ch.env_embedding
    mid = np.kron(as_matrix(v), np.eye(ch.dim_e))
    return dagger(emb) @ ch.unitary @ mid @ ch.unitary @ emb


def moment(ch: PurifiedChannel, k: int) -> np.ndarray:
    """Generalised moment ``(I (x) <eps|) U^k (I (x) |eps>)``."""
    emb = ch.env_embedding
    return dagger(emb) @ np.linalg.matrix_power(ch.unitary, k) @ emb


# ---------------------------------------------------------------------------
# Fixtures and random channels


def identity_channel(dim_h: int, sign: complex = 1.0) -> PurifiedChannel:
    """``[sign * I_H, 1, C]``."""
    return PurifiedChannel(dim_h, 1, sign * np.eye(dim_h, dtype=complex), np.ones(1))


def fixture_pairs() -> dict[str, tuple[PurifiedChannel, PurifiedChannel]]:
    """Named pairs separating the criteria one at a time."""
    e0 = np.array([1.0, 0.0])
    i2 = np.eye(2)
    f3 = np.array([1.0, 0.0, 0.0])
    return {
        "I_vs_minusI": (identity_channel(2), identity_channel(2, -1.0)),
        "IX_vs_XX": (
            PurifiedChannel(2, 2, np.kron(i2, PAULI_X), e0),
            PurifiedChannel(2, 2, np.kron(PAULI_X, PAULI_X), e0),
        ),
        "CNOT_vs_sqrtZZ_CNOT": (
            PurifiedChannel(2, 2, CNOT, e0),
            PurifiedChannel(2, 2, np.kron(SQRT_Z, PAULI_Z) @ CNOT, e0),
        ),
        "IX_vs_IZX": (
            PurifiedChannel(2, 2, np.kron(i2, PAULI_X), e0),
            PurifiedChannel(2, 2, np.kron(i2, PAULI_Z @ PAULI_X), e0),
        ),
        "qutrit_X_vs_XN": (
            PurifiedChannel(1, 3, QUTRIT_SHIFT, f3),
            PurifiedChannel(1, 3, QUTRIT_SHIFT @ QUTRIT_SIGN, f3),
        ),
    }


def random_channel(
    dim_h: int, dim_e: int, rng: np.random.Generator
) -> PurifiedChannel:
    return PurifiedChannel(
        dim_h, dim_e, random_unitary(dim_h * dim_e, rng), random_state(dim_e, rng)
    )


def iso_extension(ch: PurifiedChannel, w: np.ndarray) -> PurifiedChannel:
    """Channel ``[U', W|eps>, E']`` with ``(I (x) W) U = U' (I (x) W)``.

    ``U'`` acts as the conjugated ``U`` on the range of ``W`` and as the
    identity on its orthogonal complement.
    """
    w = as_matrix(w)
    if w.shape[1] != ch.dim_e:
        raise LinalgError("isometry domain does not match the environment")
    dim_e2 = w.shape[0]
    lift = np.kron(np.eye(ch.dim_h), w)
    perp = np.kron(np.eye(ch.dim_h), np.eye(dim_e2) - w @ dagger(w))
    u = lift @ ch.unitary @ dagger(lift) + perp
    return PurifiedChannel(ch.dim_h, dim_e2, u, w @ ch.env_state)


def random_iso_pair(
    dim_h: int, dim_e: int, dim_e2: int, rng: np.random.Generator
) -> tuple[PurifiedChannel, PurifiedChannel, np.ndarray]:
    a = random_channel(dim_h, dim_e, rng)
    w = random_isometry(dim_e, dim_e2, rng)
    return a, iso_extension(a, w), w
