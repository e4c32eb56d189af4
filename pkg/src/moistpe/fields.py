"""Triply periodic scalar fields and the transforms that act on them.

A Field3D is a value: operations return new fields and never mutate their
inputs.  Physical data has shape grid.shape; spectral data holds normalized
Fourier coefficients c_k (f = sum_k c_k exp(i k.x)) in the half-spectrum
layout of a real FFT over the last (pressure) axis, shape grid.spectral_shape.
With this normalization a constant field c has a single nonzero coefficient c
at k = 0, and cos(2*pi*x) carries amplitude 1/2 in each conjugate slot.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

from .errors import DataError
from .grid import Grid

PHYSICAL = "physical"
SPECTRAL = "spectral"


def _workers() -> int:
    # thread count is the only environment-variable control in the package
    try:
        return max(1, int(os.environ.get("MOISTPE_THREADS", "1")))
    except ValueError:
        return 1


class ParityClass(enum.Enum):
    """Symmetry class about the mid-pressure level p_tilde = 0."""

    EVEN = "even"
    ODD = "odd"
    NONE = "none"


@dataclass(frozen=True)
class Field3D:
    """A scalar field on a Grid, in physical or spectral representation."""

    grid: Grid
    data: np.ndarray
    rep: str

    def __post_init__(self):
        if self.rep == PHYSICAL:
            if self.data.shape != self.grid.shape:
                raise DataError(f"physical data shape {self.data.shape} != grid shape {self.grid.shape}")
            if not np.isrealobj(self.data):
                raise DataError("physical data must be real")
        elif self.rep == SPECTRAL:
            if self.data.shape != self.grid.spectral_shape:
                raise DataError(
                    f"spectral data shape {self.data.shape} != spectral shape {self.grid.spectral_shape}"
                )
            if not np.iscomplexobj(self.data):
                raise DataError("spectral data must be complex")
        else:
            raise DataError(f"unknown representation {self.rep!r}")

    # --- constructors -----------------------------------------------------

    @classmethod
    def physical(cls, grid: Grid, data: np.ndarray) -> "Field3D":
        return cls(grid, np.asarray(data, dtype=np.float64), PHYSICAL)

    @classmethod
    def spectral(cls, grid: Grid, coeff: np.ndarray) -> "Field3D":
        return cls(grid, np.asarray(coeff, dtype=np.complex128), SPECTRAL)

    @classmethod
    def zeros(cls, grid: Grid, rep: str = PHYSICAL) -> "Field3D":
        if rep == PHYSICAL:
            return cls(grid, np.zeros(grid.shape), PHYSICAL)
        return cls(grid, np.zeros(grid.spectral_shape, dtype=np.complex128), SPECTRAL)

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field3D":
        """Sample fn(x, y, p) on the collocation grid (broadcasting arguments)."""
        X, Y, P = grid.mesh()
        return cls.physical(grid, np.broadcast_to(fn(X, Y, P), grid.shape).copy())

    # --- conversions ------------------------------------------------------

    def as_physical(self) -> "Field3D":
        return self if self.rep == PHYSICAL else backward(self)

    def as_spectral(self) -> "Field3D":
        return self if self.rep == SPECTRAL else forward(self)

    def require(self, rep: str, op: str) -> "Field3D":
        if self.rep != rep:
            raise DataError(f"{op} requires a {rep} field, got {self.rep}")
        return self

    def copy(self) -> "Field3D":
        return Field3D(self.grid, self.data.copy(), self.rep)


# --- raw-array transforms used by the hot paths ---------------------------


def rfftn_norm(grid: Grid, data: np.ndarray) -> np.ndarray:
    """Forward real FFT over the trailing three axes, normalized coefficients."""
    scale = 1.0 / (grid.nx * grid.ny * grid.np)
    return _fft.rfftn(data, axes=(-3, -2, -1), workers=_workers()) * scale


def irfftn_norm(grid: Grid, coeff: np.ndarray) -> np.ndarray:
    """Inverse of rfftn_norm; returns real samples on the collocation grid."""
    scale = grid.nx * grid.ny * grid.np
    return _fft.irfftn(coeff * scale, s=grid.shape, axes=(-3, -2, -1), workers=_workers())


def forward(field: Field3D) -> Field3D:
    """Physical samples -> normalized spectral coefficients.

    Non-finite input is rejected: NaN/Inf would silently poison every
    subsequent spectral operation.
    """
    field.require(PHYSICAL, "forward")
    if not np.all(np.isfinite(field.data)):
        raise DataError("forward: non-finite values in physical data")
    return Field3D.spectral(field.grid, rfftn_norm(field.grid, field.data))


def backward(field: Field3D) -> Field3D:
    """Normalized spectral coefficients -> physical samples."""
    field.require(SPECTRAL, "backward")
    if not np.all(np.isfinite(field.data)):
        raise DataError("backward: non-finite values in spectral data")
    return Field3D.physical(field.grid, irfftn_norm(field.grid, field.data))


_AXES = {"x": 0, "y": 1, "p": 2}


def derivative(field: Field3D, axis: str) -> Field3D:
    """Spectral derivative along 'x', 'y' or 'p'.

    Accepts either representation and returns the same representation it was
    given.  Differentiation is the exact derivative of the trigonometric
    interpolant: multiplication by i*k mode by mode.
    """
    if axis not in _AXES:
        raise DataError(f"derivative: unknown axis {axis!r}")
    g = field.grid
    spec = field.as_spectral()
    k = (g.KX, g.KY, g.KP)[_AXES[axis]]
    out = Field3D.spectral(g, spec.data * (1j * k))
    return out if field.rep == SPECTRAL else backward(out)


def dealias(field: Field3D) -> Field3D:
    """Zero all modes with index |j| > floor(n/3) in any direction (2/3 rule)."""
    field.require(SPECTRAL, "dealias")
    return Field3D.spectral(field.grid, field.data * field.grid.dealias_mask)


def band_limit(field: Field3D, band: int) -> Field3D:
    """Zero all modes with index |j| > band in any direction."""
    spec = field.as_spectral()
    out = Field3D.spectral(field.grid, spec.data * field.grid.band_mask(band))
    return out if field.rep == SPECTRAL else backward(out)


def _flip_p(data: np.ndarray) -> np.ndarray:
    """Reflect samples about p_tilde = 0: index j -> (np - j) mod np on the last axis."""
    return np.roll(data[..., ::-1], 1, axis=-1)


def parity_project(field: Field3D, parity: ParityClass) -> Field3D:
    """Project onto the even or odd class about p_tilde = 0.

    The reflection is an exact index permutation of the p axis, so the
    projection is exactly idempotent and even/odd parts sum to the input.
    """
    if parity is ParityClass.NONE:
        return field
    phys = field.as_physical()
    flipped = _flip_p(phys.data)
    if parity is ParityClass.EVEN:
        out = Field3D.physical(field.grid, 0.5 * (phys.data + flipped))
    else:
        out = Field3D.physical(field.grid, 0.5 * (phys.data - flipped))
    return out if field.rep == PHYSICAL else forward(out)


def parity_violation(field: Field3D, parity: ParityClass) -> float:
    """Max-modulus deviation of the field from its parity class."""
    if parity is ParityClass.NONE:
        return 0.0
    phys = field.as_physical()
    proj = parity_project(phys, parity)
    return float(np.max(np.abs(phys.data - proj.data)))
