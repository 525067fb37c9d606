"""Tests for the three-ring network composition and the mode-swap algebra."""

import numpy as np
import pytest

from ringsim import (
    NetworkParams,
    PoleError,
    RESONANT_THETA,
    SingularPivotError,
    T1_OPTIMAL,
    T2_OPTIMAL,
    block_transfer,
    build_coupler,
    closed_form_resonant,
    compose_scattering,
    invert_effective,
    mode_swap3,
    on_resonance_transfer,
    transfer_matrix,
    unitarity_residual,
)
from ringsim.errors import DomainError


def random_matrix(rng, good_pivots=False):
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    if good_pivots:
        while np.min(np.abs(np.diag(g))) <= 0.1:
            g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return g


def resonant_ring(t, rng):
    tau = rng.uniform(0.0, 0.9)
    return build_coupler(tau, invert_effective(t, tau), RESONANT_THETA)


def random_params(rng):
    rings = tuple(
        build_coupler(rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95),
                      rng.uniform(0.0, 2.0 * np.pi))
        for _ in range(3)
    )
    return NetworkParams(rings=rings, deltas=tuple(rng.uniform(0.0, 2.0 * np.pi, 3)))


def test_mode_swap_identity_fixed_point():
    for j in (1, 2, 3):
        assert np.allclose(mode_swap3(np.eye(3), j), np.eye(3), atol=1e-15)


def test_mode_swap_is_involution():
    rng = np.random.default_rng(101)
    for _ in range(1000):
        g = random_matrix(rng, good_pivots=True)
        j = int(rng.integers(1, 4))
        back = mode_swap3(mode_swap3(g, j), j)
        assert np.max(np.abs(back - g)) < 1e-10 * max(1.0, np.max(np.abs(g)))


def test_mode_swap_exchange_relation():
    # If y = G x, the swapped matrix must map the vector with y_j in slot j
    # to the vector with x_j in slot j, other components untouched.
    rng = np.random.default_rng(103)
    for _ in range(200):
        g = random_matrix(rng, good_pivots=True)
        x = rng.normal(size=3) + 1j * rng.normal(size=3)
        y = g @ x
        for j in (1, 2, 3):
            p = j - 1
            x_swapped = x.copy()
            x_swapped[p] = y[p]
            y_swapped = mode_swap3(g, j) @ x_swapped
            expected = y.copy()
            expected[p] = x[p]
            assert np.max(np.abs(y_swapped - expected)) < 1e-10


def test_mode_swap_singular_pivot():
    g = np.eye(3, dtype=complex)
    g[1, 1] = 0.0
    with pytest.raises(SingularPivotError) as info:
        mode_swap3(g, 2)
    assert info.value.mode == 2


def test_mode_swap_rejects_bad_input():
    with pytest.raises(DomainError):
        mode_swap3(np.eye(4), 1)
    with pytest.raises(DomainError):
        mode_swap3(np.eye(3), 0)


def test_block_transfer_examples():
    swap = on_resonance_transfer(0.0, 1)
    assert np.allclose(block_transfer(1, swap, 0.0),
                       [[1, 0, 0], [0, 0, 1], [0, 1, 0]], atol=1e-15)
    ident = on_resonance_transfer(1.0, 2)
    b2 = block_transfer(2, ident, np.pi)
    assert np.allclose(b2, np.diag([-1.0, 1.0, -1.0]), atol=1e-12)
    b3 = block_transfer(3, swap, 0.0)
    assert np.allclose(b3, [[1, 0, 0], [0, 0, 1], [0, 1, 0]], atol=1e-15)


def test_block_transfer_bad_block():
    with pytest.raises(DomainError):
        block_transfer(4, on_resonance_transfer(0.5, 1), 0.0)


def test_compose_optimal_entries():
    rng = np.random.default_rng(7)
    params = NetworkParams(rings=(
        resonant_ring(T1_OPTIMAL, rng),
        resonant_ring(T2_OPTIMAL, rng),
        resonant_ring(T1_OPTIMAL, rng),
    ))
    s = compose_scattering(params)
    assert np.isclose(s[0, 0], 1.0 - np.sqrt(2.0), atol=1e-12)
    assert np.isclose(s[1, 1], 0.5, atol=1e-12)


def test_compose_matches_closed_form():
    rng = np.random.default_rng(211)
    for _ in range(200):
        t = rng.uniform(0.05, 0.95, size=3)
        params = NetworkParams(rings=tuple(resonant_ring(ti, rng) for ti in t))
        s = compose_scattering(params)
        ref = closed_form_resonant(*t)
        assert np.max(np.abs(s - ref)) < 1e-12


def test_compose_unitary_off_resonance():
    rng = np.random.default_rng(307)
    for _ in range(200):
        s = compose_scattering(random_params(rng))
        assert unitarity_residual(s) < 1e-12
        assert np.isclose(abs(np.linalg.det(s)), 1.0, atol=1e-12)


def test_compose_singular_block_pivot():
    # A ring with equal transmissions has zero resonant through amplitude,
    # so its block cannot be swapped.
    rng = np.random.default_rng(5)
    bad = build_coupler(0.4, 0.4, RESONANT_THETA)
    with pytest.raises(SingularPivotError) as info:
        compose_scattering(NetworkParams(rings=(
            bad, resonant_ring(0.5, rng), resonant_ring(0.5, rng))))
    assert info.value.block == 1


def test_closed_form_optimal_row():
    s = closed_form_resonant(T1_OPTIMAL, T2_OPTIMAL, T1_OPTIMAL)
    assert np.isclose(s[0, 0], -0.4142136, atol=1e-7)
    assert np.isclose(s[1, 1], 0.5, atol=1e-7)
    assert np.isclose(s[0, 1], 0.8408964, atol=1e-7)
    assert np.isclose(s[1, 0], 0.8408964, atol=1e-7)
    assert np.isclose(s[1, 2], 0.2071068, atol=1e-7)
    assert np.isclose(s[2, 1], 0.2071068, atol=1e-7)


def test_closed_form_permutation_limit():
    s = closed_form_resonant(0.0, 0.7, 0.0)
    assert np.allclose(s, [[1, 0, 0], [0, 0, 1], [0, 1, 0]], atol=1e-15)


def test_closed_form_determinant():
    rng = np.random.default_rng(17)
    for _ in range(300):
        t = rng.uniform(-0.9, 0.9, size=3)
        s = closed_form_resonant(*t)
        assert np.isclose(np.linalg.det(s), -1.0, atol=1e-12)
        assert unitarity_residual(s) < 1e-12


def test_closed_form_pole():
    with pytest.raises(PoleError):
        closed_form_resonant(0.0, 1.0, 0.0)


def test_unitarity_residual_values():
    assert unitarity_residual(np.eye(3)) == 0.0
    bumped = np.eye(3, dtype=complex)
    bumped[0, 1] = 1e-3
    assert unitarity_residual(bumped) >= 1e-3
