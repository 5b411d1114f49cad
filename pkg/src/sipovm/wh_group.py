"""Weyl-Heisenberg displacement operators and their coefficient algebra.

Conventions
-----------
``tau = -exp(i*pi/d)`` so that ``tau**(d*d) == 1`` for every ``d``.  The clock
and shift operators act as ``T|r> = tau**(2r)|r>`` and ``S|r> = |r+1 mod d>``,
and the displacement operator at the integer pair ``p = (p1, p2)`` is
``D_p = tau**(p1*p2) S**p1 T**p2``.

A *coefficient table* is a complex array of shape ``(d, d)`` holding the
expansion ``A = sum_p A[p1, p2] D_p`` over reduced indices, with
``A[p1, p2] = Tr(D_p^dagger A) / d``.  Flattening it in C order gives the
row-major (p1 then p2) serialization order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np


def default_tol(d: int) -> float:
    """Entrywise tolerance for operator identities at dimension ``d``."""
    return 1e-12 if d <= 16 else 1e-10


@dataclass(frozen=True)
class GroupContext:
    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.d!r}")

    @property
    def tau(self) -> complex:
        return complex(-np.exp(1j * np.pi / self.d))

    def tau_pow(self, k):
        """``tau**k`` for integer (array) ``k``, reduced modulo ``2d`` first."""
        return _tau_powers(self.d)[np.mod(k, 2 * self.d)]

    @property
    def operators(self) -> np.ndarray:
        """All ``D_p`` for reduced ``p`` as a read-only ``(d, d, d, d)`` array."""
        return _displacement_table(self.d)


def as_context(ctx) -> GroupContext:
    return ctx if isinstance(ctx, GroupContext) else GroupContext(int(ctx))


@lru_cache(maxsize=None)
def _tau_powers(d: int) -> np.ndarray:
    k = np.arange(2 * d)
    # exact signs; the phase is evaluated on the reduced exponent only
    out = np.where(k % 2 == 0, 1.0, -1.0) * np.exp(1j * np.pi * k / d)
    out.setflags(write=False)
    return out


# ----------------------------------------------------------------------------
# index arithmetic


class IndexArith(NamedTuple):
    sum: tuple[int, int]
    diff: tuple[int, int]
    neg: tuple[int, int]
    symplectic: int


def reduce_index(p, d: int) -> tuple[int, int]:
    return (int(p[0]) % d, int(p[1]) % d)


def symplectic(p, q):
    """``<p, q> = p2*q1 - p1*q2`` on unreduced integer pairs (array friendly)."""
    return p[1] * q[0] - p[0] * q[1]


def index_arith(p, q, ctx) -> IndexArith:
    d = as_context(ctx).d
    return IndexArith(
        sum=reduce_index((p[0] + q[0], p[1] + q[1]), d),
        diff=reduce_index((p[0] - q[0], p[1] - q[1]), d),
        neg=reduce_index((-p[0], -p[1]), d),
        symplectic=int(symplectic(p, q)),
    )


def sign(p, ctx):
    """Sign factor ``s_p``.

    Identically 1 for odd ``d``; for even ``d`` it is
    ``(-1)**(<p, [p]> / d)`` with ``[p]`` the reduction of ``p`` mod ``d``.
    Accepts a pair of ints or a pair of integer arrays.
    """
    d = as_context(ctx).d
    p1 = np.asarray(p[0], dtype=np.int64)
    p2 = np.asarray(p[1], dtype=np.int64)
    if d % 2 == 1:
        out = np.ones(np.broadcast(p1, p2).shape, dtype=np.int64)
    else:
        w = symplectic((p1, p2), (np.mod(p1, d), np.mod(p2, d)))
        out = 1 - 2 * (np.floor_divide(w, d) % 2)
    return int(out) if out.ndim == 0 else out


# ----------------------------------------------------------------------------
# operators


def clock(ctx) -> np.ndarray:
    ctx = as_context(ctx)
    return np.diag(ctx.tau_pow(2 * np.arange(ctx.d)))


def shift(ctx) -> np.ndarray:
    d = as_context(ctx).d
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def displacement(p, ctx) -> np.ndarray:
    """``D_p`` for an arbitrary integer pair ``p`` (reduced or not)."""
    ctx = as_context(ctx)
    d = ctx.d
    p1, p2 = int(p[0]), int(p[1])
    r = np.arange(d)
    out = np.zeros((d, d), dtype=complex)
    # S^p1 T^p2 |r> = tau^(2 r p2) |r + p1>
    out[(r + p1) % d, r] = ctx.tau_pow(p1 * p2 + 2 * r * p2)
    return out


@lru_cache(maxsize=64)
def _displacement_table(d: int) -> np.ndarray:
    ctx = GroupContext(d)
    table = np.empty((d, d, d, d), dtype=complex)
    for p1 in range(d):
        for p2 in range(d):
            table[p1, p2] = displacement((p1, p2), ctx)
    table.setflags(write=False)
    return table


def _check_square(A, d: int) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} matrix, got shape {A.shape}")
    return A


def _check_table(c, d: int) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if c.shape != (d, d):
        raise ValueError(f"expected a ({d}, {d}) coefficient table, got shape {c.shape}")
    return c


def expand(A, ctx) -> np.ndarray:
    """Coefficient table ``A_p = Tr(D_p^dagger A) / d``."""
    ctx = as_context(ctx)
    A = _check_square(A, ctx.d)
    return np.einsum("abij,ij->ab", ctx.operators.conj(), A) / ctx.d


def reconstruct(c, ctx) -> np.ndarray:
    ctx = as_context(ctx)
    c = _check_table(c, ctx.d)
    return np.einsum("ab,abij->ij", c, ctx.operators)


def is_hermitian_table(c, ctx, tol: float | None = None) -> bool:
    """Check ``A_{-p mod d} == s_{-p} * conj(A_p)`` for every reduced ``p``."""
    ctx = as_context(ctx)
    d = ctx.d
    c = _check_table(c, d)
    tol = default_tol(d) if tol is None else tol
    p1, p2 = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    partner = c[(-p1) % d, (-p2) % d]
    return bool(np.max(np.abs(partner - sign((-p1, -p2), ctx) * c.conj())) <= tol * max(1.0, np.max(np.abs(c))))


# ----------------------------------------------------------------------------
# products in coefficient space


def _grid(d: int):
    p1, p2 = np.divmod(np.arange(d * d), d)
    return p1, p2


def _double(A, B, ctx: GroupContext) -> np.ndarray:
    d = ctx.d
    p1, p2 = _grid(d)
    P1, Q1 = p1[:, None], p1[None, :]
    P2, Q2 = p2[:, None], p2[None, :]
    # (AB)_p = sum_q s_{p-q} tau^<q,p> A_q B_{p-q mod d}
    kernel = sign((P1 - Q1, P2 - Q2), ctx) * ctx.tau_pow(symplectic((Q1, Q2), (P1, P2)))
    terms = kernel * A.ravel()[None, :] * B[(P1 - Q1) % d, (P2 - Q2) % d]
    return terms.sum(axis=1).reshape(d, d)


def _triple(A, B, C, ctx: GroupContext) -> np.ndarray:
    d = ctx.d
    q1, q2 = _grid(d)
    Q1, Q2 = q1[:, None], q2[:, None]
    R1, R2 = q1[None, :], q2[None, :]
    qr = ctx.tau_pow(symplectic((Q1, Q2), (R1, R2)))
    AB = A.ravel()[:, None] * B.ravel()[None, :]
    out = np.empty(d * d, dtype=complex)
    for k in range(d * d):
        p1, p2 = q1[k], q2[k]
        # s_{p-q-r} tau^(<q+r,p> + <q,r>) A_q B_r C_{p-q-r mod d}
        w1, w2 = p1 - Q1 - R1, p2 - Q2 - R2
        kernel = sign((w1, w2), ctx) * ctx.tau_pow(symplectic((Q1 + R1, Q2 + R2), (p1, p2))) * qr
        out[k] = np.sum(kernel * AB * C[w1 % d, w2 % d])
    return out.reshape(d, d)


def convolve_coefficients(tables: Sequence, ctx) -> np.ndarray:
    """Coefficient table of the product of two or three operators."""
    ctx = as_context(ctx)
    if len(tables) not in (2, 3):
        raise ValueError(f"expected 2 or 3 coefficient tables, got {len(tables)}")
    ts = [_check_table(t, ctx.d) for t in tables]
    return _double(*ts, ctx) if len(ts) == 2 else _triple(*ts, ctx)


def trace_product(tables: Sequence, ctx, hermitian: bool | None = None) -> complex:
    """Trace of the product of two or three operators given as coefficient tables.

    With ``hermitian=True`` the conjugate forms valid for Hermitian operators
    are used.  ``None`` picks them whenever every table passes
    :func:`is_hermitian_table`.
    """
    ctx = as_context(ctx)
    d = ctx.d
    if len(tables) not in (2, 3):
        raise ValueError(f"expected 2 or 3 coefficient tables, got {len(tables)}")
    ts = [_check_table(t, d) for t in tables]
    if hermitian is None:
        hermitian = all(is_hermitian_table(t, ctx, tol=1e-10) for t in ts)

    q1, q2 = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    if len(ts) == 2:
        A, B = ts
        if hermitian:
            return complex(d * np.sum(A * B.conj()))
        return complex(d * np.sum(sign((-q1, -q2), ctx) * A * B[(-q1) % d, (-q2) % d]))

    A, B, C = ts
    Q1, Q2 = q1.ravel()[:, None], q2.ravel()[:, None]
    R1, R2 = q1.ravel()[None, :], q2.ravel()[None, :]
    AB = A.ravel()[:, None] * B.ravel()[None, :]
    phase = ctx.tau_pow(symplectic((Q1, Q2), (R1, R2)))
    if hermitian:
        kernel = sign((Q1 + R1, Q2 + R2), ctx) * phase
        return complex(d * np.sum(kernel * AB * C.conj()[(Q1 + R1) % d, (Q2 + R2) % d]))
    kernel = sign((-Q1 - R1, -Q2 - R2), ctx) * phase
    return complex(d * np.sum(kernel * AB * C[(-Q1 - R1) % d, (-Q2 - R2) % d]))
