"""Quantization of phase-space symbols into concrete window operators.

The dense window-by-window matrix is the source of truth for every operator;
matrix-free shortcuts (diagonal multipliers, closures) are optimizations
checked against it.  Truncation semantics: quantizing f at window M is
exactly quantizing f restricted to the window -- no implicit smoothing, so
finite-support symbols give finite-rank operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fourier import as_space_vec, fourier, inv_fourier
from .symbols import Symbol


@dataclass
class NormEstimate:
    """Largest-singular-value estimate with convergence bookkeeping."""

    value: float
    iterations: int
    converged: bool

    def __float__(self):
        return float(self.value)


class LinOp:
    """Bounded operator on the truncated dual window.

    The matrix always indexes Window x Window (Fourier side).  `side`
    records whether the operator is conceptually acting on grid samples
    ("space", via conjugation with the transform) or directly on dual
    coefficients ("dual"); norms agree either way by Plancherel.
    """

    def __init__(self, spec, matrix, side="dual", apply_fn=None, tag="",
                 diagonal=None):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (spec.window_size, spec.window_size):
            raise ValueError("operator matrix shape %r, window size is %d"
                             % (matrix.shape, spec.window_size))
        if side not in ("dual", "space"):
            raise ValueError("side must be 'dual' or 'space'")
        self.spec = spec
        self.matrix = matrix
        self.side = side
        self.apply_fn = apply_fn
        self.tag = tag
        self._diagonal = diagonal
        self.meta = {}

    @property
    def is_diagonal(self):
        if self._diagonal is None:
            off = self.matrix.copy()
            np.fill_diagonal(off, 0.0)
            self._diagonal = not off.any()
        return self._diagonal

    def apply(self, w):
        """Matrix action on dual coefficients."""
        w = np.asarray(w, dtype=complex)
        if self.is_diagonal and w.ndim == 1:
            return np.diagonal(self.matrix) * w
        return self.matrix @ w

    def apply_cols(self, cols):
        """Action on a (window, K) block of coefficient columns."""
        if self.is_diagonal:
            return np.diagonal(self.matrix)[:, None] * cols
        return self.matrix @ cols

    def apply_space(self, u):
        """Action on grid samples, through the transform."""
        return inv_fourier(self.spec, self.apply(fourier(self.spec, u)))

    def adjoint(self):
        return LinOp(self.spec, self.matrix.conj().T, side=self.side,
                     tag=self.tag + "*", diagonal=self._diagonal)

    def __sub__(self, other):
        diag = None
        if self._diagonal and other._diagonal:
            diag = True
        return LinOp(self.spec, self.matrix - other.matrix, side=self.side,
                     tag="(%s-%s)" % (self.tag, other.tag), diagonal=diag)

    def __add__(self, other):
        diag = None
        if self._diagonal and other._diagonal:
            diag = True
        return LinOp(self.spec, self.matrix + other.matrix, side=self.side,
                     tag="(%s+%s)" % (self.tag, other.tag), diagonal=diag)

    def validate_apply(self, rng=None, probes=5, tol=1e-10):
        """Check the matrix-free apply against the dense matrix on probes."""
        if self.apply_fn is None:
            return 0.0
        rng = rng or np.random.default_rng(0)
        worst = 0.0
        for _ in range(probes):
            w = rng.standard_normal(self.spec.window_size) \
                + 1j * rng.standard_normal(self.spec.window_size)
            worst = max(worst, float(np.linalg.norm(self.apply_fn(w) - self.matrix @ w)))
        if worst > tol:
            raise AssertionError("matrix-free apply disagrees with the dense "
                                 "matrix by %.3e" % worst)
        return worst

    def to_csv(self, path):
        """Row-major dump; each entry written as a re,im pair."""
        with open(path, "w") as fh:
            for row in self.matrix:
                fh.write(",".join("%.17g,%.17g" % (z.real, z.imag) for z in row))
                fh.write("\n")


def op_quantize(f: Symbol) -> LinOp:
    """Dual-side matrix A(xi, eta) = mean_x character(eta - xi, x) f(x, eta).

    x-independent symbols collapse to diag(psi) exactly (character
    orthogonality kills every off-diagonal quadrature); the general case is
    the literal grid-mean of the defining integral, assembled as one matrix
    product.
    """
    spec = f.spec
    if f.x_constant:
        return LinOp(spec, np.diag(f.grid[0].astype(complex)), side="dual",
                     tag="op[%s]" % f.name, diagonal=True)
    C = spec.char_matrix
    A = C.conj().T @ (C * f.grid) / spec.grid_size
    return LinOp(spec, A, side="dual", tag="op[%s]" % f.name)


def Op_apply(f: Symbol, u) -> np.ndarray:
    """[Op(f) u](x) = sum_xi xi(x) f(x, xi) (F u)(xi) on the grid."""
    spec = f.spec
    u = as_space_vec(spec, u)
    what = fourier(spec, u)
    if f.x_constant:
        return inv_fourier(spec, f.grid[0] * what)
    return np.einsum("xw,xw,w->x", spec.char_matrix, f.grid, what, optimize=True)


def Op_matrix(f: Symbol) -> LinOp:
    """The space-side operator, carried by its Fourier-side matrix."""
    out = op_quantize(f)
    return LinOp(f.spec, out.matrix, side="space", tag="Op[%s]" % f.name,
                 diagonal=out._diagonal)


def kernel_of(f: Symbol) -> np.ndarray:
    """Integral kernel kappa(x, y) = (inverse transform of f in xi)(x, x - y).

    Integrating u against the kernel over y (Haar mean) reproduces Op_apply
    exactly.  Builds an (N, N) table; meant for desk-scale grids.
    """
    spec = f.spec
    C = spec.char_matrix
    full = f.grid @ C.T                      # full[x, z] = sum_xi xi(z) f(x, xi)
    shape = np.asarray(spec.grid_shape)
    gx = spec.grid_coords[:, None, :]
    gy = spec.grid_coords[None, :, :]
    diff = (gx - gy) % shape[None, None, :]
    didx = np.ravel_multi_index(np.moveaxis(diff, -1, 0), spec.grid_shape)
    return np.take_along_axis(full, didx, axis=1)


def kernel_apply(spec, kappa, u) -> np.ndarray:
    """Haar-mean integration of the kernel against grid samples."""
    u = as_space_vec(spec, u)
    return kappa @ u / spec.grid_size


def mu_inverse(x, xi):
    """(x, xi) -> (xi, x^{-1}): the coordinate swap behind right quantization."""
    spec = x.spec
    inv = spec.group_point(tuple(-c for c in x.coords))
    return xi, inv


def mu(eta, y):
    """(eta, y) -> (y^{-1}, eta): inverse of mu_inverse on sampled pairs."""
    spec = y.spec
    inv = spec.group_point(tuple(-c for c in y.coords))
    return inv, eta


def right_quantize(spec, g) -> LinOp:
    """Right quantization on the discrete dual: quantize the pulled-back
    symbol f(x, xi) = g(xi, x^{-1}).

    `g` is given gridded as a (window_size, grid_size) array, or as a
    vectorized callable g(window_coords, grid) -> that array.
    """
    if callable(g):
        g = g(spec.window_coords, spec.grid_coords)
    g = np.asarray(g, dtype=complex)
    if g.shape != (spec.window_size, spec.grid_size):
        raise ValueError("right symbol shape %r, expected %r"
                         % (g.shape, (spec.window_size, spec.grid_size)))
    pulled = g.T[spec.grid_negation_index, :]
    out = op_quantize(Symbol.from_grid(spec, pulled, name="right"))
    out.tag = "opR"
    return out


def hs_norm(A: LinOp) -> float:
    """Hilbert-Schmidt (Frobenius) norm of the window matrix."""
    return float(np.linalg.norm(A.matrix))


def symbol_l2_norm(f: Symbol) -> float:
    """L2(X x Xi) norm: Haar mean in x, counting measure on the window."""
    if f.x_constant:
        return float(np.linalg.norm(f.grid[0]))
    return float(np.linalg.norm(f.grid) / np.sqrt(f.spec.grid_size))


def operator_norm(A, tol: float = 1e-10, max_iter: int = 5000,
                  seed: int = 0) -> NormEstimate:
    """Largest singular value by power iteration on A*A.

    Deterministic seeded start; stops when the Rayleigh estimate stabilizes
    to relative `tol`.  Exactly diagonal matrices short-circuit to the
    largest entry modulus (power iteration is needlessly slow on tied
    diagonal spectra, and the value is exact).  Non-convergence returns the
    best estimate with converged=False.
    """
    if isinstance(A, LinOp):
        if A.is_diagonal:
            return NormEstimate(float(np.max(np.abs(np.diagonal(A.matrix)))), 0, True)
        mat = A.matrix
    else:
        mat = np.asarray(A, dtype=complex)
    n = mat.shape[1]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    prev = None
    for it in range(1, max_iter + 1):
        w = mat @ v
        sigma = float(np.linalg.norm(w))
        if sigma == 0.0:
            return NormEstimate(0.0, it, True)
        v = mat.conj().T @ w
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return NormEstimate(sigma, it, True)
        v /= nv
        if prev is not None and abs(sigma - prev) <= tol * max(sigma, 1e-300):
            return NormEstimate(sigma, it, True)
        prev = sigma
    return NormEstimate(prev if prev is not None else 0.0, max_iter, False)
