import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_density, random_ket
from sipovm.bloch import (
    Verdict,
    bloch_to_density,
    classify_by_trace_cube,
    density_to_bloch,
    eigen_extremes,
    from_coordinates,
    gell_mann_basis,
    inner,
    is_bloch_vector,
    norm,
    random_unit_bloch,
    scaling_membership,
    shrink_factor,
    to_coordinates,
    trace_cube_bound,
)

Z = np.diag([1.0, -1.0])
X = np.array([[0.0, 1.0], [1.0, 0.0]])


def pure_bloch(d, rng):
    v = random_ket(d, rng)
    return d * np.outer(v, v.conj()) - np.eye(d)


def test_norm_and_inner_examples(rng):
    assert norm(Z) == pytest.approx(1.0, abs=1e-15)
    assert inner(Z, X) == 0
    for d in range(2, 7):
        assert norm(pure_bloch(d, rng)) == pytest.approx(1.0, abs=1e-12)


def test_inner_rejects_mismatch():
    with pytest.raises(ValueError):
        inner(Z, np.eye(3))


@pytest.mark.parametrize("d", range(2, 7))
def test_gell_mann_is_orthonormal(d):
    G = gell_mann_basis(d)
    assert G.shape == (d * d - 1, d, d)
    gram = np.array([[inner(a, b) for b in G] for a in G])
    assert np.max(np.abs(gram - np.eye(d * d - 1))) <= 1e-12
    assert np.allclose(np.trace(G, axis1=1, axis2=2), 0, atol=1e-14)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_inner_is_positive_definite_on_random_basis(d, rng):
    M = rng.normal(size=(d * d - 1, d * d - 1))
    basis = [from_coordinates(row, d) for row in M]
    gram = np.array([[inner(a, b) for b in basis] for a in basis])
    assert np.allclose(gram, gram.T, atol=1e-12)
    assert np.linalg.eigvalsh(gram)[0] > 0


def test_coordinates_round_trip(rng):
    for d in (2, 3, 4):
        x = rng.normal(size=d * d - 1)
        assert np.allclose(to_coordinates(from_coordinates(x, d)), x, atol=1e-12)


def test_eigen_extremes_examples(rng):
    v = random_ket(3, rng)
    P = np.outer(v, v.conj())
    m = eigen_extremes(3 * P - np.eye(3))
    assert (m.m_minus, m.m_plus) == pytest.approx((1, 2), abs=1e-12)
    assert eigen_extremes(Z) == pytest.approx((1, 1), abs=1e-15)
    v = random_ket(4, rng)
    m = eigen_extremes(np.eye(4) - 4 * np.outer(v, v.conj()))
    assert (m.m_minus, m.m_plus) == pytest.approx((3, 1), abs=1e-12)


@pytest.mark.parametrize("d", range(2, 7))
def test_eigen_extremes_range_on_sphere(d, rng):
    for _ in range(200):
        m = eigen_extremes(random_unit_bloch(d, rng))
        assert 1 - 1e-9 <= m.m_minus <= d - 1 + 1e-9
        assert 1 - 1e-9 <= m.m_plus <= d - 1 + 1e-9
    for B in (pure_bloch(d, rng), -pure_bloch(d, rng)):
        m = eigen_extremes(B)
        assert (abs(m.m_minus - 1) <= 1e-9) == (abs(m.m_plus - (d - 1)) <= 1e-9)


def test_scaling_membership_examples(rng):
    for d in (2, 3, 4):
        B = random_unit_bloch(d, rng)
        assert scaling_membership(B, 0.0)
    B = pure_bloch(3, rng)
    assert scaling_membership(B, 1.0)
    assert not scaling_membership(B, 1 + 1e-6)
    for _ in range(50):
        assert scaling_membership(random_unit_bloch(4, rng), 1 / 3)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6), st.floats(-3, 3), st.integers(0, 2**32 - 1))
def test_scaling_membership_matches_min_eigenvalue(d, x, seed):
    B = random_unit_bloch(d, np.random.default_rng(seed))
    lo = np.linalg.eigvalsh(x * B)[0]
    if abs(lo + 1) > 1e-8:  # stay off the boundary
        assert scaling_membership(B, x) == (lo >= -1 - 1e-9)


def test_trace_cube_examples(rng):
    for _ in range(20):
        c = classify_by_trace_cube(random_unit_bloch(2, rng))
        assert abs(c.value) <= 1e-14 and c.bound == 0
        assert c.verdict is Verdict.PURE_PLUS and c.also_pure_minus
    v = np.zeros(3)
    v[0] = 1
    P = np.outer(v, v)
    c = classify_by_trace_cube(3 * P - np.eye(3))
    assert c.value == pytest.approx(6, abs=1e-12) and c.verdict is Verdict.PURE_PLUS
    c = classify_by_trace_cube(np.eye(3) - 3 * P)
    assert c.value == pytest.approx(-6, abs=1e-12) and c.verdict is Verdict.PURE_MINUS


@pytest.mark.parametrize("d", range(3, 7))
def test_trace_cube_agrees_with_eigenvalue_criterion(d, rng):
    samples = [random_unit_bloch(d, rng) for _ in range(300)]
    samples += [pure_bloch(d, rng) for _ in range(20)] + [-pure_bloch(d, rng) for _ in range(20)]
    for B in samples:
        c = classify_by_trace_cube(B)
        m = eigen_extremes(B)
        assert (c.verdict is Verdict.PURE_PLUS) == (abs(m.m_minus - 1) <= 1e-9)
        assert (c.verdict is Verdict.PURE_MINUS) == (abs(m.m_plus - 1) <= 1e-9)
        assert abs(c.value) <= trace_cube_bound(d) + 1e-9


def test_density_bloch_examples(rng):
    assert np.allclose(density_to_bloch(np.eye(3) / 3), 0, atol=1e-15)
    assert np.allclose(density_to_bloch(np.diag([1.0, 0.0])), Z)
    rho = random_density(3, rng)
    assert np.max(np.abs(bloch_to_density(density_to_bloch(rho)) - rho)) <= 1e-14


def test_density_bloch_rejects_invalid():
    with pytest.raises(ValueError):
        density_to_bloch(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        density_to_bloch(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        bloch_to_density(np.diag([2.0, -2.0]))
    assert is_bloch_vector(Z) and not is_bloch_vector(2 * Z)


def test_shrink_factor_examples(rng):
    assert shrink_factor([pure_bloch(4, rng) for _ in range(5)]) == pytest.approx(1, abs=1e-12)
    Bs = [pure_bloch(4, rng), -pure_bloch(4, rng)]
    assert shrink_factor(Bs) == pytest.approx(1 / 3, abs=1e-12)
    k = shrink_factor([random_unit_bloch(4, rng) for _ in range(16)])
    assert 1 / 3 - 1e-12 <= k <= 1 + 1e-12
    with pytest.raises(ValueError):
        shrink_factor([])
