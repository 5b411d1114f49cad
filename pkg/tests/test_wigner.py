import numpy as np
import pytest

from conftest import random_density
from sipovm.povm import probabilities, verify_si
from sipovm.wh_covariant import constant_phases, covariant_si_povm
from sipovm.wh_group import GroupContext, displacement, symplectic
from sipovm.wigner import (
    WignerFunction,
    displaced_parities,
    parity_operator,
    state_from_wigner,
    wigner_coefficients,
    wigner_from_coefficients,
    wigner_function,
    wigner_povm,
)


def test_parity_examples():
    U = parity_operator(3)
    w = np.round(np.linalg.eigvalsh(U), 12)
    assert list(w).count(1.0) == 2 and list(w).count(-1.0) == 1
    ket1 = np.array([0, 1, 0])
    assert np.allclose(U @ ket1, [0, 0, 1], atol=1e-14)
    assert np.trace(parity_operator(5)) == pytest.approx(1, abs=1e-13)


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_parity_is_reflection(d):
    U = parity_operator(d)
    R = np.zeros((d, d))
    R[(-np.arange(d)) % d, np.arange(d)] = 1
    assert np.max(np.abs(U - R)) <= 1e-12
    assert np.max(np.abs(U @ U - np.eye(d))) <= 1e-12


def test_even_dimension_rejected():
    for f in (parity_operator, wigner_povm):
        with pytest.raises(ValueError):
            f(4)


def test_wigner_povm_examples():
    r = verify_si(wigner_povm(3))
    assert r.kappa == pytest.approx(0.5, abs=1e-12)
    ev = np.linalg.eigvalsh(wigner_povm(3).elements)
    assert np.all(np.sum(ev > 1e-6, axis=1) == 2)
    assert np.max(np.abs(wigner_povm(3).elements.sum(axis=0) - np.eye(3))) <= 1e-12
    assert verify_si(wigner_povm(5)).kappa == pytest.approx(1 / np.sqrt(6), abs=1e-12)


@pytest.mark.parametrize("d", [3, 5, 7])
def test_wigner_povm_is_zero_phase_covariant(d):
    assert np.max(np.abs(wigner_povm(d).elements - covariant_si_povm(constant_phases(d, 0.0)).elements)) <= 1e-12


@pytest.mark.parametrize("d", [3, 5, 7])
def test_displaced_parity_expansion(d):
    ctx = GroupContext(d)
    Up = displaced_parities(ctx)
    for p in [(0, 0), (1, 2), (d - 1, 1)]:
        want = sum(
            ctx.tau_pow(2 * symplectic(p, (a, b))) * displacement((a, b), ctx) for a in range(d) for b in range(d)
        ) / d
        assert np.max(np.abs(Up[p] - want)) <= 1e-12


def test_wigner_function_examples():
    for d in (3, 5):
        W = wigner_function(d, rho=np.eye(d) / d)
        assert np.allclose(W.values, 1 / d**2, atol=1e-14)
    rho = np.zeros((3, 3))
    rho[0, 0] = 1
    W = wigner_function(3, rho=rho).values
    want = np.zeros((3, 3))
    want[0, :] = 1 / 3
    assert np.max(np.abs(W - want)) <= 1e-14
    back = state_from_wigner(WignerFunction(want))
    assert np.max(np.abs(back.rho - rho)) <= 1e-12


def test_wigner_function_needs_exactly_one_input():
    with pytest.raises(ValueError):
        wigner_function(3)
    with pytest.raises(ValueError):
        wigner_function(3, rho=np.eye(3) / 3, probabilities=np.full(9, 1 / 9))


def test_uniform_wigner_gives_maximally_mixed():
    rec = state_from_wigner(WignerFunction(np.full((5, 5), 1 / 25)))
    assert np.max(np.abs(rec.rho - np.eye(5) / 5)) <= 1e-14


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_probability_bridge_and_round_trip(d, rng):
    P = wigner_povm(d)
    for _ in range(5):
        rho = random_density(d, rng)
        W = wigner_function(d, rho=rho)
        p = probabilities(P, rho)
        assert np.max(np.abs((d + 1) * p - 1 / d - W.values.reshape(-1))) <= 1e-12
        Wp = wigner_function(d, probabilities=p)
        assert np.max(np.abs(Wp.values - W.values)) <= 1e-12
        assert W.total() == pytest.approx(1, abs=1e-12)
        assert np.max(np.abs(state_from_wigner(W).rho - rho)) <= 1e-12


@pytest.mark.parametrize("d", [3, 5])
def test_fourier_forms(d, rng):
    rho = random_density(d, rng)
    W = wigner_function(d, rho=rho)
    c = wigner_coefficients(rho, d)
    # coefficients Tr(D_q^dagger rho)/d, computed one by one
    for a in range(d):
        for b in range(d):
            assert abs(c[a, b] - np.trace(displacement((a, b), d).conj().T @ rho) / d) <= 1e-13
    assert np.max(np.abs(wigner_from_coefficients(c, d).values - W.values)) <= 1e-12


@pytest.mark.parametrize("d", [3, 5, 7])
def test_covariance(d, rng):
    rho = random_density(d, rng)
    W = wigner_function(d, rho=rho).values
    r = tuple(int(x) for x in rng.integers(0, d, 2))
    Dr = displacement(r, d)
    W2 = wigner_function(d, rho=Dr @ rho @ Dr.conj().T).values
    shifted = np.roll(W, shift=r, axis=(0, 1))  # shifted[p] = W[p - r]
    assert np.max(np.abs(W2 - shifted)) <= 1e-12
