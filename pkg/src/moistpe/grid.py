"""Collocation grid for the periodic cylinder (0,1)^2 x (p0,p1).

The domain is periodic in all three directions: period 1 in x and y, period
Lp = p1 - p0 in the pressure coordinate.  Sample points are

    x_i = i/nx,  y_j = j/ny,  p_k = p0 + k*Lp/np,

so p1 is identified with p0.  Arrays are laid out C-order with shape
(nx, ny, np): the pressure index varies fastest, and the real FFT therefore
halves the p axis, giving spectral shape (nx, ny, np//2 + 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class Grid:
    """Grid sizes and pressure bounds.

    nx, ny, np are the number of collocation points per direction; all must be
    even and at least 8 so the 2/3-rule dealiasing band is nonempty.
    """

    nx: int
    ny: int
    np: int
    p0: float
    p1: float

    # horizontal periods are fixed by the model's nondimensionalization
    Lx: float = 1.0
    Ly: float = 1.0

    def __post_init__(self):
        for name in ("nx", "ny", "np"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or n < 8 or n % 2 != 0:
                raise ParameterError(f"grid.{name} must be an even integer >= 8, got {n!r}")
        if not (0.0 < self.p0 < self.p1):
            raise ParameterError(f"pressure bounds must satisfy 0 < p0 < p1, got p0={self.p0}, p1={self.p1}")
        if self.Lx != 1.0 or self.Ly != 1.0:
            raise ParameterError("horizontal periods are fixed at 1")

    @property
    def Lp(self) -> float:
        return self.p1 - self.p0

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.np)

    @property
    def spectral_shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.np // 2 + 1)

    @property
    def volume(self) -> float:
        return self.Lx * self.Ly * self.Lp

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * (self.Lx / self.nx)

    @cached_property
    def y(self) -> np.ndarray:
        return np.arange(self.ny) * (self.Ly / self.ny)

    @cached_property
    def p(self) -> np.ndarray:
        return self.p0 + np.arange(self.np) * (self.Lp / self.np)

    @cached_property
    def p_tilde(self) -> np.ndarray:
        """Centered pressure coordinate p - (p0+p1)/2; zero lies on the grid."""
        return self.p - 0.5 * (self.p0 + self.p1)

    # --- wavenumbers ------------------------------------------------------

    @cached_property
    def kx(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.nx, d=self.Lx / self.nx)

    @cached_property
    def ky(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.ny, d=self.Ly / self.ny)

    @cached_property
    def kp(self) -> np.ndarray:
        # half-spectrum axis
        return 2.0 * np.pi * np.fft.rfftfreq(self.np, d=self.Lp / self.np)

    @cached_property
    def KX(self) -> np.ndarray:
        return self.kx[:, None, None]

    @cached_property
    def KY(self) -> np.ndarray:
        return self.ky[None, :, None]

    @cached_property
    def KP(self) -> np.ndarray:
        return self.kp[None, None, :]

    @cached_property
    def kh2(self) -> np.ndarray:
        """Horizontal |k|^2 = kx^2 + ky^2, broadcast to spectral shape."""
        return np.broadcast_to(self.KX**2 + self.KY**2, self.spectral_shape)

    @cached_property
    def k2(self) -> np.ndarray:
        """Full |k|^2 = kx^2 + ky^2 + kp^2, broadcast to spectral shape."""
        return np.broadcast_to(self.KX**2 + self.KY**2 + self.KP**2, self.spectral_shape)

    @cached_property
    def parseval_weights(self) -> np.ndarray:
        """Multiplicity of each stored p-mode under conjugate symmetry.

        Interior p-modes represent a +/- pair; the mean and the Nyquist mode
        are their own conjugates.
        """
        w = np.full(self.np // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        return w[None, None, :]

    # --- mode-index masks -------------------------------------------------

    @cached_property
    def mode_index(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Integer mode indices |j| along each axis, broadcastable."""
        jx = np.abs(np.fft.fftfreq(self.nx, d=1.0 / self.nx)).astype(int)
        jy = np.abs(np.fft.fftfreq(self.ny, d=1.0 / self.ny)).astype(int)
        jp = np.arange(self.np // 2 + 1)
        return jx[:, None, None], jy[None, :, None], jp[None, None, :]

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: modes with |j| > floor(n/3) in any direction are zeroed."""
        jx, jy, jp = self.mode_index
        keep = (jx <= self.nx // 3) & (jy <= self.ny // 3) & (jp <= self.np // 3)
        return keep

    def band_mask(self, band: int) -> np.ndarray:
        """Mask keeping modes with |j| <= band in every direction."""
        jx, jy, jp = self.mode_index
        return (jx <= band) & (jy <= band) & (jp <= band)

    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable physical coordinates (X, Y, P)."""
        return (
            self.x[:, None, None],
            self.y[None, :, None],
            self.p[None, None, :],
        )
