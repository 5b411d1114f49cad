"""Weyl-Heisenberg covariant regular simplices and SI-POVMs.

A unit-norm ``B`` in su(d) generates a covariant regular simplex
``{D_p B D_p^dagger}`` exactly when every nonzero displacement coefficient of
``B`` has modulus ``1/sqrt(d+1)``.  Such generators are parametrized by phases
``theta_q`` on the nonzero indices, subject to Hermiticity:

    exp(i theta_{-q}) = s_{-q} exp(-i theta_q)

Free chart: one angle per unordered pair ``{q, -q}`` with ``q != -q`` (stored
on the lexicographically smaller index) plus, for even ``d``, a binary choice
on each of the three self-paired indices (``2q = 0 mod d``), whose angle must
solve ``exp(2 i theta) = s_{-q}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import bloch
from .povm import Povm
from .wh_group import GroupContext, as_context, reconstruct, sign

PAIRING_TOL = 1e-10
SIMPLEX_TOL = 1e-10


@dataclass(frozen=True)
class PhaseChart:
    d: int
    pairs: tuple  # ((q, qbar), ...) with q < qbar lexicographically
    self_paired: tuple  # (q, ...)

    @property
    def n_free(self) -> int:
        return len(self.pairs)


def phase_chart(ctx) -> PhaseChart:
    d = as_context(ctx).d
    pairs, single = [], []
    for p1 in range(d):
        for p2 in range(d):
            q = (p1, p2)
            if q == (0, 0):
                continue
            qbar = ((-p1) % d, (-p2) % d)
            if qbar == q:
                single.append(q)
            elif q < qbar:
                pairs.append((q, qbar))
    return PhaseChart(d, tuple(pairs), tuple(single))


def _self_paired_base(q, ctx) -> float:
    # exp(2 i theta) = s_{-q} = +-1  ->  theta in {0, pi} or {pi/2, 3pi/2}
    return 0.0 if sign((-q[0], -q[1]), ctx) == 1 else np.pi / 2


@dataclass
class PhaseVector:
    """Angles ``theta[p1, p2]`` on the nonzero indices; ``theta[0, 0]`` is unused."""

    theta: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float)
        if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
            raise ValueError(f"theta must have shape (d, d), got {theta.shape}")
        theta[0, 0] = 0.0
        self.theta = theta

    @property
    def d(self) -> int:
        return self.theta.shape[0]

    def pairing_violation(self) -> float:
        d = self.d
        q1, q2 = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
        lhs = np.exp(1j * self.theta[(-q1) % d, (-q2) % d])
        rhs = sign((-q1, -q2), d) * np.exp(-1j * self.theta)
        dev = np.abs(lhs - rhs)
        dev[0, 0] = 0.0
        return float(dev.max())

    def is_valid(self, tol: float = PAIRING_TOL) -> bool:
        return self.pairing_violation() <= tol

    def items(self):
        """``((p1, p2), theta)`` over the nonzero indices in row-major order."""
        d = self.d
        for p1 in range(d):
            for p2 in range(d):
                if (p1, p2) != (0, 0):
                    yield (p1, p2), float(self.theta[p1, p2])


def make_phase_vector(angles: Mapping, ctx, tol: float = PAIRING_TOL) -> PhaseVector:
    """Complete a partial angle assignment using the pairing constraint.

    ``angles`` maps index pairs to radians and must cover at least one member
    of every pair ``{q, -q}``.  Entries given for both members, and entries on
    self-paired indices, are validated; a violation raises ``ValueError``.
    """
    ctx = as_context(ctx)
    d = ctx.d
    given = {}
    for q, t in angles.items():
        qr = (int(q[0]) % d, int(q[1]) % d)
        if qr == (0, 0):
            raise ValueError("no angle belongs to the zero index")
        given[qr] = float(t)

    theta = np.zeros((d, d))
    chart = phase_chart(ctx)
    for q, qbar in chart.pairs:
        s = sign((-q[0], -q[1]), ctx)
        if q in given:
            theta[q] = given[q]
            want = np.angle(s * np.exp(-1j * given[q]))
            if qbar in given:
                if abs(np.exp(1j * given[qbar]) - np.exp(1j * want)) > tol:
                    raise ValueError(
                        f"angles at {q} and {qbar} violate exp(i theta_qbar) = s_(-q) exp(-i theta_q) with s_(-q) = {s}"
                    )
                theta[qbar] = given[qbar]
            else:
                theta[qbar] = want
        elif qbar in given:
            theta[qbar] = given[qbar]
            theta[q] = np.angle(s * np.exp(-1j * given[qbar]))
        else:
            raise ValueError(f"missing angle for the pair {q} / {qbar}")
    for q in chart.self_paired:
        if q not in given:
            raise ValueError(f"missing angle for self-paired index {q}")
        s = sign((-q[0], -q[1]), ctx)
        if abs(np.exp(2j * given[q]) - s) > tol:
            raise ValueError(f"self-paired angle at {q} must satisfy exp(2 i theta) = {s}")
        theta[q] = given[q]
    return PhaseVector(theta)


def constant_phases(ctx, value: float) -> PhaseVector:
    """Every nonzero index gets the same angle (e.g. 0 or pi for odd ``d``)."""
    ctx = as_context(ctx)
    d = ctx.d
    return make_phase_vector({(a, b): value for a in range(d) for b in range(d) if (a, b) != (0, 0)}, ctx)


def phases_from_chart(ctx, free, choices=None) -> PhaseVector:
    """Build a valid :class:`PhaseVector` from free-chart coordinates.

    ``free`` holds one angle per pair of :func:`phase_chart`; ``choices`` one
    bit per self-paired index selecting the root ``base`` or ``base + pi``.
    """
    ctx = as_context(ctx)
    chart = phase_chart(ctx)
    free = np.asarray(free, dtype=float)
    if free.shape != (chart.n_free,):
        raise ValueError(f"expected {chart.n_free} free angles, got shape {free.shape}")
    choices = np.zeros(len(chart.self_paired), dtype=int) if choices is None else np.asarray(choices, dtype=int)
    if choices.shape != (len(chart.self_paired),):
        raise ValueError(f"expected {len(chart.self_paired)} binary choices, got shape {choices.shape}")
    theta = np.zeros((ctx.d, ctx.d))
    for (q, qbar), t in zip(chart.pairs, free):
        theta[q] = t
        # exp(i theta_qbar) = s exp(-i theta_q); s = -1 contributes pi
        theta[qbar] = -t + (0.0 if sign((-q[0], -q[1]), ctx) == 1 else np.pi)
    for q, c in zip(chart.self_paired, choices):
        theta[q] = _self_paired_base(q, ctx) + np.pi * (c % 2)
    return PhaseVector(theta)


def chart_coordinates(phi: PhaseVector):
    """Inverse of :func:`phases_from_chart` (angles mod 2 pi)."""
    ctx = GroupContext(phi.d)
    chart = phase_chart(ctx)
    free = np.array([phi.theta[q] for q, _ in chart.pairs])
    choices = []
    for q in chart.self_paired:
        delta = np.angle(np.exp(1j * (phi.theta[q] - _self_paired_base(q, ctx))))
        choices.append(int(abs(delta) > np.pi / 2))
    return free, np.array(choices, dtype=int)


def random_phase_vector(ctx, rng: np.random.Generator) -> PhaseVector:
    chart = phase_chart(ctx)
    free = rng.uniform(0.0, 2 * np.pi, chart.n_free)
    choices = rng.integers(0, 2, len(chart.self_paired))
    return phases_from_chart(ctx, free, choices)


def generating_vector(phi: PhaseVector) -> np.ndarray:
    """``B = (d+1)^(-1/2) sum_{q != 0} exp(i theta_q) D_q``."""
    d = phi.d
    c = np.exp(1j * phi.theta) / np.sqrt(d + 1)
    c[0, 0] = 0.0
    B = reconstruct(c, d)
    return (B + B.conj().T) / 2


@dataclass
class CovariantOrbit:
    generator: np.ndarray
    members: np.ndarray  # (d, d, d, d): members[p1, p2] = D_p B D_p^dagger


@dataclass
class OrbitCheck:
    orbit: CovariantOrbit
    is_generating_simplex: bool
    max_deviation: float


def conjugate_orbit(B) -> CovariantOrbit:
    B = np.asarray(B, dtype=complex)
    D = GroupContext(B.shape[0]).operators
    members = D @ B @ np.conj(np.swapaxes(D, -1, -2))
    return CovariantOrbit(generator=B, members=members)


def orbit_and_check(B, tol: float = SIMPLEX_TOL) -> OrbitCheck:
    """Build the WH orbit of unit-norm ``B`` and test the regular-simplex condition."""
    B = np.asarray(B, dtype=complex)
    d = B.shape[0]
    n = bloch.norm(B)
    if abs(n - 1) > bloch.SPHERE_TOL:
        raise ValueError(f"generator must have unit norm, got {n:.12g}")
    orbit = conjugate_orbit(B)
    ips = np.einsum("ij,abji->ab", B, orbit.members).real / (d * (d - 1))
    target = np.full((d, d), -1.0 / (d * d - 1))
    target[0, 0] = 1.0
    dev = float(np.max(np.abs(ips - target)))
    return OrbitCheck(orbit=orbit, is_generating_simplex=dev <= tol, max_deviation=dev)


def covariant_kappa(B) -> float:
    """``kappa = -1 / lambda_min(B)``; conjugation keeps the spectrum, so one solve serves the orbit."""
    return float(-1.0 / np.linalg.eigvalsh(bloch.hermitian_part(B))[0])


def covariant_si_povm(phi: PhaseVector) -> Povm:
    """The SI-POVM ``E_p = (1 + kappa B_p) / d^2`` for the generator of ``phi``."""
    if not phi.is_valid():
        raise ValueError(f"phase vector violates the pairing constraint by {phi.pairing_violation():.3e}")
    d = phi.d
    B = generating_vector(phi)
    kappa = covariant_kappa(B)
    members = conjugate_orbit(B).members.reshape(d * d, d, d)
    E = (np.eye(d)[None] + kappa * members) / (d * d)
    return Povm((E + np.conj(np.swapaxes(E, -1, -2))) / 2)
