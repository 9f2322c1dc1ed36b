import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gausswork.errors import InvalidModeSet, NonPositiveDefinite, NonPositiveDeterminant, SingularConditioning
from gausswork.symplectic import (
    as_covariance,
    condition_on_measurement,
    is_physical,
    partial_transpose,
    renyi2_entropy,
    rotation,
    submatrix,
    symplectic_eigenvalues,
    symplectic_form,
    symplectic_invariants,
)

from .conftest import random_symplectic, williamson_state


def test_symplectic_form_blocks():
    om = symplectic_form(2)
    assert om.shape == (4, 4)
    assert np.array_equal(om[:2, :2], [[0, 1], [-1, 0]])
    assert np.array_equal(om @ om, -np.eye(4))


def test_vacuum_spectrum():
    for n in (1, 2, 3):
        assert np.allclose(symplectic_eigenvalues(0.5 * np.eye(2 * n)), 0.5)
        assert is_physical(0.5 * np.eye(2 * n))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_spectrum_matches_williamson_construction(rng, n):
    for _ in range(50):
        sigma, nus = williamson_state(rng, n)
        assert np.allclose(symplectic_eigenvalues(sigma), nus, rtol=1e-9, atol=1e-10)


def test_two_mode_spectrum_from_invariants(rng):
    # nu_pm^2 = (Delta +- sqrt(Delta^2 - 4 I4)) / 2
    for _ in range(50):
        sigma, _ = williamson_state(rng, 2)
        inv = symplectic_invariants(sigma)
        disc = np.sqrt(inv.Delta**2 - 4 * inv.I4)
        expected = np.sqrt([(inv.Delta + disc) / 2, (inv.Delta - disc) / 2])
        assert np.allclose(symplectic_eigenvalues(sigma), expected, rtol=1e-9)


def test_spectrum_is_batched(rng):
    stack = np.stack([williamson_state(rng, 2)[0] for _ in range(7)])
    out = symplectic_eigenvalues(stack)
    assert out.shape == (7, 2)
    for s, row in zip(stack, out):
        assert np.allclose(symplectic_eigenvalues(s), row)


def test_descending_order(rng):
    sigma, _ = williamson_state(rng, 3)
    nu = symplectic_eigenvalues(sigma)
    assert np.all(np.diff(nu) <= 0)


@given(st.integers(0, 10_000))
def test_spectrum_invariant_under_symplectic_congruence(seed):
    rng = np.random.default_rng(seed)
    sigma, _ = williamson_state(rng, 2)
    s = random_symplectic(rng, 2, scale=0.3)
    assert np.allclose(symplectic_eigenvalues(s @ sigma @ s.T), symplectic_eigenvalues(sigma), rtol=1e-8)


def test_not_positive_definite_raises():
    with pytest.raises(NonPositiveDefinite):
        symplectic_eigenvalues(np.diag([1.0, -1.0, 1.0, 1.0]))


def test_is_physical_rejects_sub_vacuum_and_indefinite():
    assert not is_physical(0.49 * np.eye(2))
    assert not is_physical(np.diag([1.0, -1.0]))
    assert is_physical(np.diag([0.5 - 1e-10, 0.5]))  # within tolerance
    flags = is_physical(np.stack([0.5 * np.eye(2), 0.3 * np.eye(2)]))
    assert flags.tolist() == [True, False]


def test_partial_transpose_flips_momenta():
    sigma = np.arange(16.0).reshape(4, 4)
    sigma = sigma + sigma.T
    pt = partial_transpose(sigma, [1])
    flip = np.array([1, 1, 1, -1])
    assert np.array_equal(pt, sigma * np.outer(flip, flip))
    assert np.array_equal(partial_transpose(pt, [1]), sigma)


@pytest.mark.parametrize("modes", [[], [0, 1], [2], [-1]])
def test_partial_transpose_invalid_sets(modes):
    with pytest.raises(InvalidModeSet):
        partial_transpose(np.eye(4), modes)


def test_partial_transpose_of_complement_has_same_spectrum(rng):
    sigma, _ = williamson_state(rng, 3)
    assert np.allclose(
        symplectic_eigenvalues(partial_transpose(sigma, [0])),
        symplectic_eigenvalues(partial_transpose(sigma, [1, 2])),
    )


def test_renyi2_entropy():
    assert renyi2_entropy(0.5 * np.eye(4)) == pytest.approx(0.5 * np.log(1 / 16))
    with pytest.raises(NonPositiveDeterminant):
        renyi2_entropy(np.diag([1.0, -1.0]))


def test_as_covariance_validation():
    with pytest.raises(ValueError):
        as_covariance([[1.0, 0.2], [0.0, 1.0]])
    with pytest.raises(ValueError):
        as_covariance(np.eye(3))
    with pytest.raises(ValueError):
        as_covariance(np.eye(8))
    with pytest.raises(ValueError):
        as_covariance([[np.nan, 0], [0, 1]])
    out = as_covariance([[1.0, 0.2], [0.2 + 1e-15, 1.0]])
    assert np.array_equal(out, out.T)


def test_submatrix_selects_modes():
    sigma = np.arange(36.0).reshape(6, 6)
    assert np.array_equal(submatrix(sigma, [0, 2]), sigma[np.ix_([0, 1, 4, 5], [0, 1, 4, 5])])
    assert np.array_equal(submatrix(sigma, [1], [2]), sigma[2:4, 4:6])


def test_rotation_is_orthogonal():
    r = rotation(0.7)
    assert np.allclose(r @ r.T, np.eye(2))
    assert np.linalg.det(r) == pytest.approx(1.0)


def _dense_schur(sigma, mode, gamma):
    n = sigma.shape[-1] // 2
    rest = [m for m in range(n) if m != mode]
    a = submatrix(sigma, rest)
    c = submatrix(sigma, rest, [mode])
    b = submatrix(sigma, [mode])
    return a - c @ np.linalg.inv(b + gamma) @ c.T


def test_conditioning_matches_dense_schur(rng):
    for _ in range(30):
        sigma, _ = williamson_state(rng, 3)
        g, _ = williamson_state(rng, 1, nus=[0.5])
        for mode in range(3):
            assert np.allclose(condition_on_measurement(sigma, mode, gamma=g), _dense_schur(sigma, mode, g), atol=1e-12)


def test_homodyne_branch_is_limit_of_squeezed_seed(rng):
    sigma, _ = williamson_state(rng, 2)
    phi = 0.3
    r = rotation(phi)
    eps = 1e-9
    gamma = r @ np.diag([eps, 1 / (4 * eps)]) @ r.T
    assert np.allclose(condition_on_measurement(sigma, 1, homodyne_angle=phi),
                       condition_on_measurement(sigma, 1, gamma=gamma), atol=1e-6)  # fmt: skip


def test_conditioning_broadcasts_angles(rng):
    sigma, _ = williamson_state(rng, 2)
    phis = np.linspace(0, np.pi, 5)
    stacked = condition_on_measurement(sigma[None], 1, homodyne_angle=phis)
    assert stacked.shape == (5, 2, 2)
    for k, phi in enumerate(phis):
        assert np.allclose(stacked[k], condition_on_measurement(sigma, 1, homodyne_angle=phi))


def test_conditioning_errors():
    with pytest.raises(ValueError):
        condition_on_measurement(np.eye(4), 1)
    with pytest.raises(ValueError):
        condition_on_measurement(np.eye(4), 1, gamma=np.eye(2), homodyne_angle=0.0)
    with pytest.raises(InvalidModeSet):
        condition_on_measurement(np.eye(4), 2, gamma=np.eye(2))
    with pytest.raises(InvalidModeSet):
        condition_on_measurement(np.eye(2), 0, gamma=np.eye(2))
    singular = np.zeros((4, 4))
    with pytest.raises(SingularConditioning):
        condition_on_measurement(singular, 1, homodyne_angle=0.0)
    with pytest.raises(SingularConditioning):
        condition_on_measurement(singular, 1, gamma=np.zeros((2, 2)))


def test_conditioning_keeps_states_physical(rng):
    for _ in range(30):
        sigma, _ = williamson_state(rng, 3)
        out = condition_on_measurement(sigma, 2, homodyne_angle=rng.uniform(0, np.pi))
        assert is_physical(out)
        assert np.array_equal(out, out.T)
