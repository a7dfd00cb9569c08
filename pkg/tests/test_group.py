"""Group layer: characters, Haar means, dual arithmetic, serialization."""

import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coronaop import (Cyclic, GroupSpec, Torus, character, haar_integrate,
                      negate, translate, translate_samples)


def test_character_trivial_is_one(t1z3):
    x = t1z3.group_point((0.3125, 2))
    assert character(t1z3.unit_dual, x) == pytest.approx(1.0)


def test_character_torus_quarter_turn():
    spec = GroupSpec([Torus(grid=16, window=5)])
    val = character(spec.dual_point((1,)), spec.group_point((0.25,)))
    assert val == pytest.approx(1j)


def test_character_cyclic_direct_evaluation():
    # independent oracle: direct cmath evaluation of exp(2 pi i * 3 * 2 / 4)
    spec = GroupSpec([Cyclic(4)])
    val = character(spec.dual_point((3,)), spec.group_point((2,)))
    assert val == pytest.approx(cmath.exp(2j * cmath.pi * 3 * 2 / 4))
    assert val == pytest.approx(-1.0)


def test_character_spec_mismatch_raises(z8, t1):
    with pytest.raises(ValueError):
        character(z8.dual_point((1,)), t1.group_point((0.5,)))


def test_character_multiplicative_in_dual(t1z3, rng):
    x = t1z3.group_point((0.4375, 1))
    for _ in range(50):
        a = t1z3.dual_point((int(rng.integers(-4, 5)), int(rng.integers(3))))
        b = t1z3.dual_point((int(rng.integers(-4, 5)), int(rng.integers(3))))
        lhs = character(translate(a, b), x)
        rhs = character(a, x) * character(b, x)
        assert abs(lhs - rhs) < 1e-12


def test_character_negation_inverse(t1z3, rng):
    x = t1z3.group_point((0.125, 2))
    for _ in range(50):
        a = t1z3.dual_point((int(rng.integers(-4, 5)), int(rng.integers(3))))
        assert abs(character(a, x) * character(negate(a), x) - 1) < 1e-12


def test_haar_normalization(t1z3):
    assert haar_integrate(t1z3, np.ones(t1z3.grid_size)) == pytest.approx(1.0)


def test_haar_character_orthogonality(t1):
    xi = t1.dual_point((3,))
    samples = t1.characters_at(np.array([[3]]))[:, 0]
    assert abs(haar_integrate(t1, samples)) < 1e-12
    assert xi.coords == (3,)


def test_haar_two_term_mean():
    spec = GroupSpec([Cyclic(2)])
    assert haar_integrate(spec, np.array([1.0, 0.0])) == pytest.approx(0.5)


def test_haar_shape_mismatch(t1):
    with pytest.raises(ValueError):
        haar_integrate(t1, np.ones(t1.grid_size + 1))


def test_window_orthonormality(t1z3):
    # grid mean of products of window characters is the Kronecker delta
    C = t1z3.char_matrix
    gram = C.conj().T @ C / t1z3.grid_size
    assert np.abs(gram - np.eye(t1z3.window_size)).max() < 1e-10


def test_translate_identity_and_addition(t1):
    a = t1.dual_point((3,))
    assert translate(a, t1.unit_dual).coords == (3,)
    assert translate(a, t1.dual_point((-5,))).coords == (-2,)


def test_translate_cyclic_wraps():
    spec = GroupSpec([Cyclic(4)])
    assert translate(spec.dual_point((3,)), spec.dual_point((2,))).coords == (1,)
    assert negate(spec.dual_point((1,))).coords == (3,)


def test_window_contains_unit_and_negations(t1z3):
    idx = t1z3.window_index(np.zeros((1, 2), dtype=int))
    assert idx[0] >= 0
    neg = t1z3.window_negation_index
    assert sorted(neg) == list(range(t1z3.window_size))
    assert np.array_equal(t1z3.window_coords[neg],
                          t1z3.reduce_dual_coords(-t1z3.window_coords))


def test_nyquist_validation():
    with pytest.raises(ValueError):
        Torus(grid=10, window=5)
    with pytest.raises(ValueError):
        Torus(grid=8, window=0)
    with pytest.raises(ValueError):
        Cyclic(0)


def test_point_validation(t1):
    with pytest.raises(ValueError):
        t1.dual_point((1, 2))
    with pytest.raises(ValueError):
        t1.dual_point((0.5,))
    assert t1.group_point((1.25,)).coords == (0.25,)


def test_grid_index_roundtrip(t1z3):
    for i in (0, 5, t1z3.grid_size - 1):
        assert t1z3.grid_index(t1z3.grid_point(i)) == i
    with pytest.raises(ValueError):
        t1z3.grid_index(t1z3.group_point((0.12345, 0)))


def test_translate_samples_matches_pointwise(t1z3, rng):
    u = rng.standard_normal(t1z3.grid_size) + 1j * rng.standard_normal(t1z3.grid_size)
    x0 = t1z3.grid_point(7)
    shifted = translate_samples(t1z3, u, x0)
    # oracle: index arithmetic per grid point
    for i in (0, 3, 11, t1z3.grid_size - 1):
        gx = t1z3.grid_coords[i]
        g0 = t1z3.grid_coords[7]
        src = (gx - g0) % np.asarray(t1z3.grid_shape)
        j = int(np.ravel_multi_index(tuple(src), t1z3.grid_shape))
        assert shifted[i] == pytest.approx(u[j])


def test_json_roundtrip_documented_schema():
    text = '{"factors":[{"torus":{"grid":64,"window":31}},{"cyclic":8}]}'
    spec = GroupSpec.from_json(text)
    assert spec.factors == (Torus(grid=64, window=31), Cyclic(8))
    again = GroupSpec.from_json(spec.to_json())
    assert again == spec


@settings(max_examples=50, deadline=None)
@given(k=st.integers(-5, 5), l=st.integers(-5, 5), g=st.integers(0, 15))
def test_character_bilinear_hypothesis(k, l, g):
    spec = GroupSpec([Torus(grid=16, window=5)])
    x = spec.grid_point(g)
    lhs = character(spec.dual_point((k + l,)), x)
    rhs = character(spec.dual_point((k,)), x) * character(spec.dual_point((l,)), x)
    assert abs(lhs - rhs) < 1e-12
