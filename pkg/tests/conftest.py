import numpy as np
import pytest

from coronaop import Cyclic, GroupSpec, Torus


@pytest.fixture
def z8():
    return GroupSpec([Cyclic(8)])


@pytest.fixture
def t1():
    return GroupSpec([Torus(grid=16, window=5)])


@pytest.fixture
def t1_tight():
    # grid exactly 2M+1: grid frequencies coincide with the window
    return GroupSpec([Torus(grid=11, window=5)])


@pytest.fixture
def t1z3():
    return GroupSpec([Torus(grid=16, window=4), Cyclic(3)])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_band_limited(spec, rng):
    w = rng.standard_normal(spec.window_size) + 1j * rng.standard_normal(spec.window_size)
    from coronaop import inv_fourier
    return inv_fourier(spec, w), w
