"""Fourier transforms between grid samples on X and window coefficients.

Conventions: the space side carries the grid-mean (Haar) norm, the dual side
the plain counting norm; with these the transform is unitary on band-limited
inputs.  Inputs whose spectrum exceeds the window alias onto it -- every
internal construction uses window characters only, so all algebraic
identities stay exact rather than approximate.

Reference implementation is direct summation through the cached character
matrix; anything faster must agree with it to 1e-10.
"""

from __future__ import annotations

import numpy as np


def as_space_vec(spec, values):
    """Validate and flatten grid samples to a (grid_size,) complex array."""
    arr = np.asarray(values, dtype=complex)
    if arr.shape == spec.grid_shape:
        arr = arr.reshape(-1)
    if arr.shape != (spec.grid_size,):
        raise ValueError("sample shape %r does not match grid %r"
                         % (np.shape(values), spec.grid_shape))
    return arr


def as_dual_vec(spec, values):
    """Validate and flatten window coefficients to a (window_size,) complex array."""
    arr = np.asarray(values, dtype=complex)
    if arr.shape == spec.window_shape:
        arr = arr.reshape(-1)
    if arr.shape != (spec.window_size,):
        raise ValueError("coefficient shape %r does not match window %r"
                         % (np.shape(values), spec.window_shape))
    return arr


def space_norm(spec, u):
    """L2 norm with the normalized Haar measure: sqrt(mean |u|^2)."""
    u = as_space_vec(spec, u)
    return float(np.linalg.norm(u) / np.sqrt(spec.grid_size))


def dual_norm(w):
    """Counting l2 norm on window coefficients."""
    return float(np.linalg.norm(np.asarray(w)))


def fourier(spec, u):
    """(F u)(xi) = mean_x conj(xi(x)) u(x) over the window."""
    u = as_space_vec(spec, u)
    return spec.char_matrix.conj().T @ u / spec.grid_size


def inv_fourier(spec, w):
    """(F^{-1} w)(x) = sum_xi xi(x) w(xi)."""
    w = as_dual_vec(spec, w)
    return spec.char_matrix @ w


def band_limit(spec, u):
    """Projection onto the span of window characters."""
    return inv_fourier(spec, fourier(spec, u))
