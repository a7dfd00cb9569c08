"""Transform layer: unitarity, inversion, translation covariance."""

import numpy as np
import pytest

from coronaop import (Cyclic, GroupSpec, band_limit, character, dual_norm,
                      fourier, inv_fourier, space_norm, translate_samples)
from conftest import random_band_limited


def test_constant_maps_to_unit_indicator(t1z3):
    w = fourier(t1z3, np.ones(t1z3.grid_size))
    j = t1z3.window_index(np.zeros((1, 2), dtype=int))[0]
    expected = np.zeros(t1z3.window_size)
    expected[j] = 1.0
    assert np.abs(w - expected).max() < 1e-12


def test_character_maps_to_indicator(t1):
    xi0 = np.array([[4]])
    u = t1.characters_at(xi0)[:, 0]
    w = fourier(t1, u)
    j = t1.window_index(xi0)[0]
    assert w[j] == pytest.approx(1.0)
    w[j] = 0.0
    assert np.abs(w).max() < 1e-12


def test_two_point_transform():
    spec = GroupSpec([Cyclic(2)])
    w = fourier(spec, np.array([1.0, 0.0]))
    assert np.allclose(w, [0.5, 0.5])


def test_inverse_examples(t1):
    w = np.zeros(t1.window_size, dtype=complex)
    j = t1.window_index(np.array([[0]]))[0]
    w[j] = 1.0
    assert np.abs(inv_fourier(t1, w) - 1.0).max() < 1e-12
    w[:] = 0
    w[t1.window_index(np.array([[2]]))[0]] = 1.0
    u = inv_fourier(t1, w)
    assert np.abs(u - t1.characters_at(np.array([[2]]))[:, 0]).max() < 1e-12


def test_roundtrip_band_limited(t1z3, rng):
    for _ in range(10):
        u, w = random_band_limited(t1z3, rng)
        assert np.abs(inv_fourier(t1z3, fourier(t1z3, u)) - u).max() < 1e-10
        assert np.abs(fourier(t1z3, u) - w).max() < 1e-10


def test_plancherel(t1z3, rng):
    for _ in range(20):
        u, _ = random_band_limited(t1z3, rng)
        assert abs(space_norm(t1z3, u) - dual_norm(fourier(t1z3, u))) < 1e-10


def test_translation_modulation_covariance(t1, rng):
    u, _ = random_band_limited(t1, rng)
    x0 = t1.grid_point(5)
    lhs = fourier(t1, translate_samples(t1, u, x0))
    chars = np.array([character(t1.window_point(j), x0)
                      for j in range(t1.window_size)])
    assert np.abs(lhs - np.conj(chars) * fourier(t1, u)).max() < 1e-10


def test_band_limit_is_projection(t1, rng):
    u = rng.standard_normal(t1.grid_size) + 1j * rng.standard_normal(t1.grid_size)
    p = band_limit(t1, u)
    assert np.abs(band_limit(t1, p) - p).max() < 1e-10


def test_tight_grid_transform_is_unitary(t1_tight, rng):
    # grid size equals window size: every grid vector is band-limited
    u = rng.standard_normal(t1_tight.grid_size) + 1j * rng.standard_normal(t1_tight.grid_size)
    assert np.abs(band_limit(t1_tight, u) - u).max() < 1e-10


def test_shape_errors(t1):
    with pytest.raises(ValueError):
        fourier(t1, np.ones(3))
    with pytest.raises(ValueError):
        inv_fourier(t1, np.ones(3))
