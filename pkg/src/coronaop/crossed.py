"""Finite-support crossed-product elements and their window representation.

An element Psi assigns to each support point xi (a dual point, with
support and negated support inside the window) a bounded fiber function
zeta -> Psi(xi, zeta).  Composition is the twisted convolution

    (Phi <> Psi)(xi, zeta) = sum_eta Phi(xi - eta, zeta + eta) Psi(eta, zeta),

the involution is Psi~(xi, zeta) = conj(Psi(-xi, zeta + xi)), and `sch`
represents everything as matrices B(xi, eta) = Psi(xi - eta, eta) on the
window.  Fibers backed by window arrays extend by zero off the window; with
that convention sch is exactly multiplicative and adjoint-preserving on the
window (the dropped translate terms match the matrix product's truncated
summation range term by term).  On purely cyclic specs translation wraps
and nothing is ever dropped.

Enveloping C*-norm machinery is not modeled; the operator norm of sch(Psi)
is the computable stand-in.
"""

from __future__ import annotations

import numpy as np

from .quantize import LinOp, op_quantize
from .symbols import DualFunction, Symbol


class WindowEscapeError(RuntimeError):
    """Composition support left the dual window; result not representable."""

    def __init__(self, escaped):
        self.escaped = [tuple(int(v) for v in row) for row in np.atleast_2d(escaped)]
        super().__init__("composition support escapes the window at %s"
                         % (self.escaped[:8],))


def _canonical_support(spec, coords):
    coords = spec.reduce_dual_coords(coords)
    coords = np.unique(coords, axis=0)
    return coords


class CrossedElement:
    """Finitely supported map from dual points to bounded fiber functions."""

    def __init__(self, spec, support_coords, fibers):
        support_coords = np.atleast_2d(np.asarray(support_coords, dtype=np.int64))
        if support_coords.shape[0] != len(fibers):
            raise ValueError("support size %d does not match %d fibers"
                             % (support_coords.shape[0], len(fibers)))
        order = np.lexsort(support_coords.T[::-1])
        self.spec = spec
        self.support = spec.reduce_dual_coords(support_coords[order])
        self.fibers = [fibers[i] if isinstance(fibers[i], DualFunction)
                       else DualFunction.from_values(spec, fibers[i])
                       for i in order]
        both = np.vstack([self.support, -self.support])
        inside = spec.window_index(both) >= 0
        if not inside.all():
            raise ValueError("support (with negation) must sit inside the window; "
                             "offending points %s" % both[~inside][:8].tolist())
        self._index = {tuple(c): i for i, c in enumerate(self.support.tolist())}

    @classmethod
    def delta(cls, spec, coords, fiber):
        """delta_xi (x) fiber, the building block of the twisted group algebra."""
        return cls(spec, np.asarray(coords, dtype=np.int64)[None, :], [fiber])

    @classmethod
    def from_pairs(cls, spec, pairs):
        coords = np.asarray([p[0] for p in pairs], dtype=np.int64)
        return cls(spec, coords, [p[1] for p in pairs])

    def fiber_at(self, coords):
        i = self._index.get(tuple(int(c) for c in coords))
        return self.fibers[i] if i is not None else None

    def fiber_matrix(self):
        """(support, window) array of cached fiber values."""
        return np.vstack([f.values[None, :] for f in self.fibers])

    def scaled(self, a):
        return CrossedElement(self.spec, self.support,
                              [a * f for f in self.fibers])

    def __add__(self, other):
        pairs = {tuple(c): f for c, f in zip(self.support.tolist(), self.fibers)}
        for c, f in zip(other.support.tolist(), other.fibers):
            key = tuple(c)
            pairs[key] = pairs[key] + f if key in pairs else f
        return CrossedElement.from_pairs(self.spec, list(pairs.items()))


def compose(phi: CrossedElement, psi: CrossedElement) -> CrossedElement:
    """Twisted convolution; raises WindowEscapeError when the product
    support (or its negation) is not representable on the window."""
    spec = phi.spec
    sums = (phi.support[:, None, :] + psi.support[None, :, :]).reshape(-1, spec.num_factors)
    out_support = _canonical_support(spec, sums)
    both = np.vstack([out_support, -out_support])
    outside = spec.window_index(both) < 0
    if outside.any():
        raise WindowEscapeError(both[outside])

    fibers = []
    for sigma in out_support:
        terms = []
        for b, psi_fib in zip(psi.support, psi.fibers):
            a = spec.reduce_dual_coords((sigma - b)[None, :])[0]
            phi_fib = phi.fiber_at(a)
            if phi_fib is not None:
                terms.append((np.array(b), phi_fib, psi_fib))
        fibers.append(_composed_fiber(spec, terms))
    return CrossedElement(spec, out_support, fibers)


def _composed_fiber(spec, terms):
    def ev(coords):
        coords = spec.reduce_dual_coords(coords)
        out = np.zeros(coords.shape[0], dtype=complex)
        for b, phi_fib, psi_fib in terms:
            out += phi_fib.eval_at(coords + b) * psi_fib.eval_at(coords)
        return out
    return DualFunction(spec, ev)


def involution(psi: CrossedElement) -> CrossedElement:
    """Psi~(xi, zeta) = conj(Psi(-xi, zeta + xi)); involutive by construction."""
    spec = psi.spec
    out_support = spec.reduce_dual_coords(-psi.support)
    fibers = []
    for xi_new in out_support:
        src = psi.fiber_at(spec.reduce_dual_coords((-xi_new)[None, :])[0])
        fibers.append(_involuted_fiber(spec, src, np.array(xi_new)))
    return CrossedElement(spec, out_support, fibers)


def _involuted_fiber(spec, src, shift):
    def ev(coords):
        coords = spec.reduce_dual_coords(coords)
        return np.conj(src.eval_at(coords + shift))
    return DualFunction(spec, ev)


def sch(psi: CrossedElement) -> LinOp:
    """The window matrix B(xi, eta) = Psi(xi - eta, eta)."""
    spec = psi.spec
    W = spec.window_size
    B = np.zeros((W, W), dtype=complex)
    cols = np.arange(W)
    wc = spec.window_coords
    for a, fib in zip(psi.support, psi.fibers):
        rows = spec.window_index(wc + a)
        ok = rows >= 0
        B[rows[ok], cols[ok]] = fib.values[ok]
    return LinOp(spec, B, side="dual", tag="sch")


def partial_fourier(psi: CrossedElement) -> Symbol:
    """Inverse transform in the first variable: f(x, zeta) = sum_a a(x) Psi(a, zeta)."""
    spec = psi.spec
    chars = spec.characters_at(psi.support)          # (grid, support)
    fib = psi.fiber_matrix()                          # (support, window)
    grid = chars @ fib
    fibers = psi.fibers

    def ev(coords):
        coords = spec.reduce_dual_coords(coords)
        vals = np.vstack([f.eval_at(coords)[None, :] for f in fibers])
        return chars @ vals

    return Symbol(spec, ev, grid=grid, name="partial_fourier")


def partial_fourier_inv(f: Symbol, support_coords):
    """Recover fibers by character analysis in x over the declared support.

    Returns (element, residual): the sup distance between f's grid and the
    reconstruction.  A nonzero residual means f's x-spectrum exceeds the
    declared support.
    """
    spec = f.spec
    support = _canonical_support(spec, np.asarray(support_coords, dtype=np.int64))
    chars = spec.characters_at(support)               # (grid, support)
    coeffs = chars.conj().T @ f.grid / spec.grid_size  # (support, window)

    fibers = []
    for a, cached in zip(support, coeffs):
        fibers.append(_analyzed_fiber(spec, f, np.array(a), cached))
    element = CrossedElement(spec, support, fibers)
    residual = float(np.max(np.abs(f.grid - chars @ coeffs)))
    return element, residual


def _analyzed_fiber(spec, f, a, cached):
    chi = spec.characters_at(a[None, :])[:, 0]

    def ev(coords):
        return chi.conj() @ f.eval_cols(coords) / spec.grid_size

    return DualFunction(spec, ev, values=np.asarray(cached, dtype=complex))


def bridge_residual(psi: CrossedElement) -> float:
    """Max entry deviation between op(partial transform) and sch."""
    lhs = op_quantize(partial_fourier(psi)).matrix
    rhs = sch(psi).matrix
    return float(np.max(np.abs(lhs - rhs)))
