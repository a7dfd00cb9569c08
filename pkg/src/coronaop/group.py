"""Compact abelian groups as finite products of circle and cyclic factors.

The group X is a product of torus factors (each sampled on a uniform grid
of ``grid`` points, with characters truncated to the symmetric window
``[-window, window]``) and finite cyclic factors Z_m (whose dual is all of
Z_m).  Every other module indexes grid samples and dual coefficients by the
flat C-order enumerations fixed here, so that matrices built in different
places line up.

All values are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

TWO_PI_I = 2j * np.pi


@dataclass(frozen=True)
class Torus:
    """Circle factor: `grid` sample points, dual window radius `window`.

    `grid >= 2*window + 1` so every pair of window characters is resolved
    exactly by the grid mean (discrete orthogonality).
    """

    grid: int
    window: int

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("torus window radius must be a positive integer")
        if self.grid < 2 * self.window + 1:
            raise ValueError(
                "torus grid %d cannot resolve window radius %d (need grid >= %d)"
                % (self.grid, self.window, 2 * self.window + 1))


@dataclass(frozen=True)
class Cyclic:
    """Finite cyclic factor Z_order; its dual is again Z_order (no window)."""

    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("cyclic order must be a positive integer")


def _cartesian(ranges):
    grids = np.meshgrid(*ranges, indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=-1)


class GroupSpec:
    """A concrete compact abelian group with sampling grid and dual window."""

    def __init__(self, factors):
        factors = tuple(factors)
        if not factors:
            raise ValueError("GroupSpec needs at least one factor")
        for f in factors:
            if not isinstance(f, (Torus, Cyclic)):
                raise TypeError("factors must be Torus or Cyclic, got %r" % (f,))
        self.factors = factors

    def __eq__(self, other):
        return isinstance(other, GroupSpec) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        parts = []
        for f in self.factors:
            if isinstance(f, Torus):
                parts.append("T(grid=%d,window=%d)" % (f.grid, f.window))
            else:
                parts.append("Z_%d" % f.order)
        return "GroupSpec(%s)" % " x ".join(parts)

    # -- shapes and enumerations -------------------------------------------

    @property
    def num_factors(self):
        return len(self.factors)

    @cached_property
    def torus_axes(self):
        return tuple(i for i, f in enumerate(self.factors) if isinstance(f, Torus))

    @cached_property
    def cyclic_axes(self):
        return tuple(i for i, f in enumerate(self.factors) if isinstance(f, Cyclic))

    @cached_property
    def grid_shape(self):
        return tuple(f.grid if isinstance(f, Torus) else f.order for f in self.factors)

    @cached_property
    def window_shape(self):
        return tuple(2 * f.window + 1 if isinstance(f, Torus) else f.order
                     for f in self.factors)

    @property
    def grid_size(self):
        return int(np.prod(self.grid_shape))

    @property
    def window_size(self):
        return int(np.prod(self.window_shape))

    @cached_property
    def window_coords(self):
        """(window_size, num_factors) integer coordinates, C-order enumeration."""
        ranges = [np.arange(-f.window, f.window + 1) if isinstance(f, Torus)
                  else np.arange(f.order) for f in self.factors]
        out = _cartesian(ranges)
        out.setflags(write=False)
        return out

    @cached_property
    def grid_coords(self):
        """(grid_size, num_factors) integer grid labels (torus label g means t = g/n)."""
        out = _cartesian([np.arange(n) for n in self.grid_shape])
        out.setflags(write=False)
        return out

    @cached_property
    def char_matrix(self):
        """(grid_size, window_size) matrix of character values xi(x)."""
        mats = []
        for ax, f in enumerate(self.factors):
            if isinstance(f, Torus):
                g = np.arange(f.grid)
                k = np.arange(-f.window, f.window + 1)
                mats.append(np.exp(TWO_PI_I * np.outer(g, k) / f.grid))
            else:
                r = np.arange(f.order)
                mats.append(np.exp(TWO_PI_I * np.outer(r, r) / f.order))
        out = reduce(np.kron, mats)
        out.setflags(write=False)
        return out

    # -- coordinate utilities ----------------------------------------------

    def reduce_dual_coords(self, coords):
        """Canonical dual coordinates: cyclic axes reduced mod their order."""
        coords = np.atleast_2d(np.asarray(coords, dtype=np.int64))
        if coords.shape[-1] != self.num_factors:
            raise ValueError("dual coordinates have %d components, spec has %d factors"
                             % (coords.shape[-1], self.num_factors))
        if self.cyclic_axes:
            coords = coords.copy()
            for ax in self.cyclic_axes:
                coords[..., ax] %= self.factors[ax].order
        return coords

    def window_index(self, coords):
        """Flat window indices for dual coordinates; -1 where outside the window."""
        coords = self.reduce_dual_coords(coords)
        idx = np.zeros(coords.shape[0], dtype=np.int64)
        ok = np.ones(coords.shape[0], dtype=bool)
        for ax, f in enumerate(self.factors):
            if isinstance(f, Torus):
                off = coords[:, ax] + f.window
                ok &= (off >= 0) & (off < 2 * f.window + 1)
            else:
                off = coords[:, ax]
            idx = idx * self.window_shape[ax] + np.where(ok, off, 0)
        return np.where(ok, idx, -1)

    def characters_at(self, dual_coords):
        """(grid_size, K) character values for K arbitrary dual coordinates."""
        dual_coords = self.reduce_dual_coords(dual_coords)
        out = np.ones((self.grid_size, dual_coords.shape[0]), dtype=complex)
        for ax, f in enumerate(self.factors):
            den = f.grid if isinstance(f, Torus) else f.order
            g = self.grid_coords[:, ax].astype(float)
            k = dual_coords[:, ax].astype(float)
            out *= np.exp(TWO_PI_I * g[:, None] * k[None, :] / den)
        return out

    @cached_property
    def window_negation_index(self):
        """Permutation sending each window point to its group inverse."""
        idx = self.window_index(-self.window_coords)
        if (idx < 0).any():
            raise AssertionError("window is not closed under negation")
        idx.setflags(write=False)
        return idx

    @cached_property
    def grid_negation_index(self):
        """Permutation of grid indices realizing x -> x^{-1}."""
        neg = (-self.grid_coords) % np.asarray(self.grid_shape)[None, :]
        idx = np.ravel_multi_index(neg.T, self.grid_shape)
        idx.setflags(write=False)
        return idx

    # -- points --------------------------------------------------------------

    def group_point(self, coords):
        """Build a GroupPoint; torus coordinates reduced mod 1, cyclic mod m."""
        coords = tuple(coords)
        if len(coords) != self.num_factors:
            raise ValueError("point has %d coordinates, spec has %d factors"
                             % (len(coords), self.num_factors))
        norm = []
        for c, f in zip(coords, self.factors):
            if isinstance(f, Torus):
                norm.append(float(c) % 1.0)
            else:
                norm.append(int(c) % f.order)
        return GroupPoint(self, tuple(norm))

    def dual_point(self, coords):
        """Build a DualPoint; integer coordinates, cyclic reduced mod m."""
        coords = tuple(coords)
        if len(coords) != self.num_factors:
            raise ValueError("dual point has %d coordinates, spec has %d factors"
                             % (len(coords), self.num_factors))
        norm = []
        for c, f in zip(coords, self.factors):
            ci = int(c)
            if ci != c:
                raise ValueError("dual coordinates must be integers, got %r" % (c,))
            norm.append(ci % f.order if isinstance(f, Cyclic) else ci)
        return DualPoint(self, tuple(norm))

    @property
    def unit_dual(self):
        return self.dual_point((0,) * self.num_factors)

    @property
    def identity_point(self):
        return self.group_point((0,) * self.num_factors)

    def grid_point(self, flat_index):
        """The GroupPoint sitting at a flat grid index."""
        labels = self.grid_coords[int(flat_index)]
        coords = []
        for lab, f in zip(labels, self.factors):
            coords.append(lab / f.grid if isinstance(f, Torus) else int(lab))
        return GroupPoint(self, tuple(coords))

    def grid_index(self, point):
        """Flat grid index of an on-grid point; raises if off-grid."""
        _check_same_spec(point.spec, self)
        labels = []
        for c, f in zip(point.coords, self.factors):
            if isinstance(f, Torus):
                lab = c * f.grid
                snapped = int(round(lab))
                if abs(lab - snapped) > 1e-9:
                    raise ValueError("point coordinate %r is not on the grid of %r" % (c, f))
                labels.append(snapped % f.grid)
            else:
                labels.append(int(c))
        return int(np.ravel_multi_index(tuple(labels), self.grid_shape))

    def window_point(self, flat_index):
        return DualPoint(self, tuple(int(c) for c in self.window_coords[int(flat_index)]))

    # -- serialization ---------------------------------------------------------

    def to_config(self):
        out = []
        for f in self.factors:
            if isinstance(f, Torus):
                out.append({"torus": {"grid": f.grid, "window": f.window}})
            else:
                out.append({"cyclic": f.order})
        return {"factors": out}

    def to_json(self):
        return json.dumps(self.to_config())

    @staticmethod
    def from_config(config):
        factors = []
        for entry in config["factors"]:
            if "torus" in entry:
                t = entry["torus"]
                factors.append(Torus(grid=int(t["grid"]), window=int(t["window"])))
            elif "cyclic" in entry:
                factors.append(Cyclic(order=int(entry["cyclic"])))
            else:
                raise ValueError("unknown factor entry %r" % (entry,))
        return GroupSpec(factors)

    @staticmethod
    def from_json(text):
        return GroupSpec.from_config(json.loads(text))


@dataclass(frozen=True)
class GroupPoint:
    """A point of X: float in [0,1) per torus factor, residue per cyclic factor."""

    spec: GroupSpec
    coords: tuple


@dataclass(frozen=True)
class DualPoint:
    """A character label: integer per torus factor, residue per cyclic factor."""

    spec: GroupSpec
    coords: tuple

    def as_array(self):
        return np.asarray(self.coords, dtype=np.int64)


def _check_same_spec(a, b):
    if a != b:
        raise ValueError("points belong to different group specs")


def character(xi, x):
    """The duality pairing xi(x): modulus-one, multiplicative in both slots."""
    _check_same_spec(xi.spec, x.spec)
    spec = xi.spec
    out = 1.0 + 0.0j
    for k, t, f in zip(xi.coords, x.coords, spec.factors):
        if isinstance(f, Torus):
            out *= np.exp(TWO_PI_I * k * t)
        else:
            out *= np.exp(TWO_PI_I * k * t / f.order)
    return complex(out)


def haar_integrate(spec, values):
    """Integral against the normalized Haar measure: the grid mean."""
    arr = np.asarray(values)
    if arr.shape == (spec.grid_size,):
        return complex(arr.mean())
    if arr.shape == spec.grid_shape:
        return complex(arr.mean())
    raise ValueError("sample array shape %r does not match grid %r"
                     % (arr.shape, spec.grid_shape))


def translate(xi, eta):
    """Componentwise group law on the dual (integer / mod-m addition)."""
    _check_same_spec(xi.spec, eta.spec)
    return xi.spec.dual_point(tuple(a + b for a, b in zip(xi.coords, eta.coords)))


def negate(xi):
    """The dual group inverse."""
    return xi.spec.dual_point(tuple(-a for a in xi.coords))


def translate_samples(spec, u, x0):
    """Samples of x -> u(x - x0) for an on-grid x0 (exact index shift)."""
    _check_same_spec(x0.spec, spec)
    u = np.asarray(u)
    if u.shape != (spec.grid_size,):
        raise ValueError("sample array shape %r does not match grid size %d"
                         % (u.shape, spec.grid_size))
    shifted = u.reshape(spec.grid_shape)
    for ax, f in enumerate(spec.factors):
        lab = x0.coords[ax] * f.grid if isinstance(f, Torus) else x0.coords[ax]
        snapped = int(round(lab))
        if isinstance(f, Torus) and abs(lab - snapped) > 1e-9:
            raise ValueError("translation point is off-grid in factor %d" % ax)
        shifted = np.roll(shifted, snapped, axis=ax)
    return shifted.reshape(-1)
