"""POVMs: symmetric informational-completeness certification and friends.

A :class:`Povm` is an ordered stack of ``n`` positive ``d x d`` matrices.
Every element can be written ``E_r = (t_r / d)(1 + B_r)`` with ``t_r =
Tr(E_r)`` and ``B_r`` in the Bloch body.  The POVM is symmetric and
informationally complete (SI) exactly when ``n = d^2``, every ``t_r = 1/d``
and the Bloch vectors form a regular simplex of squared radius
``kappa^2`` with ``0 < kappa <= 1``; ``kappa`` is the efficiency parameter.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg

from . import bloch

PSD_TOL = 1e-10
OVERLAP_TOL = 1e-6
RANK_TOL = 1e-9


@dataclass
class Povm:
    elements: np.ndarray

    def __post_init__(self):
        E = np.asarray(self.elements, dtype=complex)
        if E.ndim != 3 or E.shape[1] != E.shape[2]:
            raise ValueError(f"POVM elements must have shape (n, d, d), got {E.shape}")
        if E.shape[1] < 2:
            raise ValueError("dimension must be at least 2")
        self.elements = E

    @property
    def n(self) -> int:
        return self.elements.shape[0]

    @property
    def d(self) -> int:
        return self.elements.shape[1]

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, r):
        return self.elements[r]


@dataclass
class SiReport:
    n: int
    d: int
    is_povm: bool
    is_symmetric: bool
    alpha: float
    beta: float
    kappa: float
    gram_rank: int
    is_informationally_complete: bool
    is_rank_one_sic: bool
    max_residual: float
    is_si: bool = False
    max_overlap_deviation: float | None = None
    gram_spectrum_residual: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _pairwise_traces(E: np.ndarray) -> np.ndarray:
    # Tr(E_r E_s) = sum_ij E_r[i, j] E_s[j, i]
    flat = E.reshape(E.shape[0], -1)
    flatT = np.transpose(E, (0, 2, 1)).reshape(E.shape[0], -1)
    return flat @ flatT.T


def verify_si(povm: Povm, tol: float | None = None, overlap_tol: float = OVERLAP_TOL) -> SiReport:
    """Certify whether ``povm`` is SI and, additionally, a rank-one SIC.

    ``tol`` bounds the identity-sum error, the symmetry residual and the Gram
    spectrum deviation; it defaults to ``1e-9 * d``.  A malformed input is
    reported through ``is_povm = False`` rather than raised.
    """
    E = povm.elements
    n, d = povm.n, povm.d
    tol = 1e-9 * d if tol is None else tol
    notes: list[str] = []

    herm = np.max(np.abs(E - np.conj(np.transpose(E, (0, 2, 1)))))
    evals = np.linalg.eigvalsh((E + np.conj(np.transpose(E, (0, 2, 1)))) / 2)
    sum_err = float(np.max(np.abs(E.sum(axis=0) - np.eye(d))))
    traces = np.trace(E, axis1=1, axis2=2).real
    is_povm = True
    if herm > tol:
        is_povm = False
        notes.append(f"elements not Hermitian (max deviation {herm:.3e})")
    if evals[:, 0].min() < -PSD_TOL:
        is_povm = False
        notes.append(f"element not positive semidefinite (min eigenvalue {evals[:, 0].min():.3e})")
    if sum_err > tol:
        is_povm = False
        notes.append(f"elements do not sum to identity (max deviation {sum_err:.3e})")
    if np.any(np.abs(evals).max(axis=1) <= PSD_TOL):
        is_povm = False
        notes.append("POVM contains a zero element")

    G = _pairwise_traces(E).real
    off = ~np.eye(n, dtype=bool)
    alpha = float(G[off].mean()) if n > 1 else 0.0
    beta = float(np.diag(G).mean() - alpha)
    residual = float(np.max(np.abs(G - alpha - beta * np.eye(n))))
    is_symmetric = residual <= tol

    # operator span rank decides informational completeness
    span_rank = int(np.linalg.matrix_rank(E.reshape(n, -1), tol=1e-8 / d))
    is_ic = span_rank == d * d

    t = np.where(np.abs(traces) > PSD_TOL, traces, np.nan)
    B = (d / t)[:, None, None] * E - np.eye(d)[None]
    if np.isnan(t).any():
        B = np.nan_to_num(B)
    flat = B.reshape(n, -1)
    flatT = np.transpose(B, (0, 2, 1)).reshape(n, -1)
    M = (flat @ flatT.T).real / (d * (d - 1))
    kappa = float(np.sqrt(max(np.diag(M).mean(), 0.0)))
    mevals = np.linalg.eigvalsh((M + M.T) / 2)
    gram_rank = int(np.sum(np.abs(mevals) > 1e-8 * max(1.0, np.abs(mevals).max())))

    is_si = is_povm and is_symmetric and is_ic and n == d * d
    spectrum_residual = None
    if n == d * d:
        if np.max(np.abs(traces - 1.0 / d)) > tol:
            is_si = False
            notes.append("element traces differ from 1/d")
        target = np.full(n, kappa**2 * d * d / (d * d - 1))
        target[0] = 0.0
        spectrum_residual = float(np.max(np.abs(mevals - target)))
        if spectrum_residual > tol:
            is_si = False
            notes.append(f"Bloch Gram spectrum off by {spectrum_residual:.3e}")
    else:
        notes.append(f"n = {n} elements, an SI-POVM needs d^2 = {d * d}")
    if not (0 < kappa <= 1 + tol):
        is_si = False
        notes.append(f"efficiency parameter {kappa:.6g} outside (0, 1]")

    is_sic = False
    max_overlap_dev = None
    if is_si:
        # rank one: a single eigenvalue 1/d per element
        rank_one = bool(np.all(np.abs(evals[:, :-1]) <= RANK_TOL) and np.all(np.abs(evals[:, -1] - 1.0 / d) <= RANK_TOL))
        overlaps = d * d * G
        target = (1 + d * np.eye(n)) / (d + 1)
        max_overlap_dev = float(np.max(np.abs(overlaps - target)))
        is_sic = rank_one and max_overlap_dev <= overlap_tol

    return SiReport(
        n=n,
        d=d,
        is_povm=is_povm,
        is_symmetric=is_symmetric,
        alpha=alpha,
        beta=beta,
        kappa=kappa,
        gram_rank=gram_rank,
        is_informationally_complete=is_ic,
        is_rank_one_sic=is_sic,
        max_residual=residual,
        is_si=is_si,
        max_overlap_deviation=max_overlap_dev,
        gram_spectrum_residual=spectrum_residual,
        notes=notes,
    )


def bloch_vectors(povm: Povm) -> np.ndarray:
    """``B_r = (d / Tr E_r) E_r - 1`` for every element."""
    d = povm.d
    t = np.trace(povm.elements, axis1=1, axis2=2).real
    return (d / t)[:, None, None] * povm.elements - np.eye(d)[None]


# ----------------------------------------------------------------------------
# random SI-POVMs


def canonical_simplex(n: int) -> np.ndarray:
    """Rows are ``n`` unit vectors in R^(n-1) with pairwise dot ``-1/(n-1)``."""
    # Helmert rows are orthonormal and orthogonal to (1, ..., 1)
    H = scipy.linalg.helmert(n)
    V = H.T
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def random_rotation(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar orthogonal matrix from the QR factor of a Gaussian matrix."""
    Q, R = np.linalg.qr(rng.standard_normal((m, m)))
    return Q * np.sign(np.diag(R))


def random_si_povm(d: int, seed: int) -> Povm:
    """Shrink a randomly rotated regular simplex on the outer sphere into the Bloch body.

    Uses ``numpy.random.default_rng(seed)`` (PCG64).  The resulting SI-POVM has
    efficiency ``kappa = min_r 1/m_minus(B_r) >= 1/(d-1)``.
    """
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    rng = np.random.default_rng(seed)
    n = d * d
    X = canonical_simplex(n) @ random_rotation(n - 1, rng).T
    B = bloch.from_coordinates(X, d)
    B = (B + np.conj(np.transpose(B, (0, 2, 1)))) / 2
    kappa = bloch.shrink_factor(B)
    return Povm((np.eye(d)[None] + kappa * B) / n)


# ----------------------------------------------------------------------------
# measurement and linear inversion


def _check_density(rho, d: int, tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} density matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol or abs(np.trace(rho) - 1) > tol:
        raise ValueError("density matrix must be Hermitian with unit trace")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0] < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def probabilities(povm: Povm, rho) -> np.ndarray:
    rho = _check_density(rho, povm.d)
    p = np.einsum("rij,ji->r", povm.elements, rho)
    if np.max(np.abs(p.imag)) > 1e-10:
        raise ValueError("probabilities have an imaginary part; POVM elements are not Hermitian")
    return p.real


@dataclass
class Reconstruction:
    rho: np.ndarray
    min_eigenvalue: float
    residual: float = 0.0

    @property
    def is_psd(self) -> bool:
        return self.min_eigenvalue >= -PSD_TOL


class NotInformationallyComplete(ValueError):
    pass


def reconstruct_state(povm: Povm, probs, tol: float = 1e-9) -> Reconstruction:
    """Unweighted least-squares inversion of ``p_r = Tr(E_r rho)``.

    ``rho`` is parametrized as ``1/d + (traceless Hermitian)`` so unit trace
    and Hermiticity hold by construction.  No positivity projection is done;
    check :attr:`Reconstruction.is_psd`.
    """
    d, n = povm.d, povm.n
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (n,):
        raise ValueError(f"expected {n} probabilities, got shape {probs.shape}")
    if abs(probs.sum() - 1) > tol:
        raise ValueError(f"probabilities sum to {probs.sum():.12g}, expected 1")
    G = bloch.gell_mann_basis(d)
    A = np.einsum("rij,kji->rk", povm.elements, G).real
    b = probs - np.trace(povm.elements, axis1=1, axis2=2).real / d
    x, _, rank, sv = np.linalg.lstsq(A, b, rcond=None)
    if rank < d * d - 1 or sv[-1] <= 1e-10 * sv[0]:
        raise NotInformationallyComplete(f"measurement matrix has rank {rank} < {d * d - 1}; POVM is not informationally complete")
    rho = np.eye(d) / d + np.tensordot(x, G, axes=1)
    rho = (rho + rho.conj().T) / 2
    return Reconstruction(
        rho=rho,
        min_eigenvalue=float(np.linalg.eigvalsh(rho)[0]),
        residual=float(np.max(np.abs(A @ x - b))),
    )


# ----------------------------------------------------------------------------
# mutually unbiased bases


@dataclass(frozen=True)
class MubReport:
    is_mub: bool
    max_deviation: float
    overlap_deviation: float
    bloch_deviation: float


def verify_mub(bases, tol: float = 1e-9) -> MubReport:
    """Check mutual unbiasedness of a family of orthonormal bases.

    ``bases`` has shape ``(m, d, d)``; ``bases[r, a]`` is the ``a``-th vector of
    basis ``r``.
    """
    F = np.asarray(bases, dtype=complex)
    if F.ndim != 3 or F.shape[1] != F.shape[2]:
        raise ValueError(f"bases must have shape (m, d, d), got {F.shape}")
    m, d = F.shape[0], F.shape[1]
    if m < 2:
        raise ValueError("need at least two bases")
    for r in range(m):
        err = np.max(np.abs(F[r].conj() @ F[r].T - np.eye(d)))
        if err > tol:
            raise ValueError(f"basis {r} is not orthonormal (deviation {err:.3e})")

    overlap_dev = 0.0
    bloch_dev = 0.0
    for r in range(m):
        for s in range(r + 1, m):
            ov = np.abs(F[r].conj() @ F[s].T)
            overlap_dev = max(overlap_dev, float(np.max(np.abs(ov - 1 / np.sqrt(d)))))
            # <B_a, B_b> = (d |<a|b>|^2 - 1) / (d - 1) for B = d P - 1
            bloch_dev = max(bloch_dev, float(np.max(np.abs((d * ov**2 - 1) / (d - 1)))))
    worst = max(overlap_dev, bloch_dev)
    return MubReport(is_mub=worst <= tol, max_deviation=worst, overlap_deviation=overlap_dev, bloch_deviation=bloch_dev)
