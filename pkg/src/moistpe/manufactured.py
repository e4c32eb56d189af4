"""Manufactured solutions for convergence measurement.

An exact trajectory is imposed as u*(x,t) = m(t) U(x) with a scalar
modulation m(t) = (1 + alpha t) cos(sigma t) and fixed band-limited spatial
profiles U.  The compensating forcing splits by homogeneity in m:

    f(t) = m'(t) U - m(t) L[U] - m(t)^2 Q[U] - S

where L collects the linear operator response (viscosity, Coriolis, pressure
gradient, with the static contribution S of theta_h and Phi_s removed), and
Q the quadratic advective response.  L and S are evaluated through the
production tendency with advection switched off, so every truncation the
solver applies to linear terms is reproduced exactly and contributes no
error.  Q is evaluated with truncation disabled: the profiles have per-axis
mode index at most four, their advective products at most seven, and a
16-point axis represents index seven cleanly (collocation alias images of a
band-7 product land outside the bin range), so the stored forcing is exact
on every grid used here.  The solver's own advection, by contrast, is cut at
the dealias radius n//3: at n = 16 that radius is five, so the product
content at indices six and seven becomes a genuine spatial truncation
residual, while any grid with n//3 >= 7 (n >= 21, so 24 and 32) reproduces
the trajectory to the time-discretization floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .fields import Field3D, SPECTRAL
from .grid import Grid
from .model import FAITHFUL, ModelVariant, tendency
from .params import PhysParams
from .state import State


@dataclass(frozen=True)
class ManufacturedCase:
    """Named modulation profile; the spatial structure is shared by all cases."""

    name: str
    sigma: float
    alpha: float
    amplitude: float = 0.1
    band: int = 4


CASES = {
    "steady": ManufacturedCase("steady", sigma=0.0, alpha=0.0),
    "gentle": ManufacturedCase("gentle", sigma=3.0, alpha=0.5),
    "brisk": ManufacturedCase("brisk", sigma=40.0, alpha=1.0),
}


def get_case(name: str) -> ManufacturedCase:
    try:
        return CASES[name]
    except KeyError:
        raise ConfigError(
            f"unknown manufactured case {name!r}; choose from {sorted(CASES)}"
        ) from None


def _profiles(case: ManufacturedCase, grid: Grid):
    """Spatial factors U = (v1, v2, theta, q), per-axis mode index <= 4.

    The horizontal velocity is a divergence-free barotropic part (from a
    streamfunction) plus baroclinic parts of zero vertical mean, so the
    vertically-averaged divergence vanishes and the exact trajectory is a
    fixed point of the projection.  The index-4 term sits in theta: paired
    with the index-2 and index-3 velocity content it pushes the advective
    products v.grad(theta) out to horizontal index seven, which is what the
    spatial convergence study truncates at coarse resolution.
    """
    a = case.amplitude
    tau = 2.0 * math.pi
    p0, Lp = grid.p0, grid.Lp

    def P(p):
        return tau * (p - p0) / Lp

    def v1(x, y, p):
        bt = -np.sin(tau * x) * np.cos(tau * y) + 0.3 * np.cos(2 * tau * x) * np.sin(tau * y)
        bc = 0.8 * np.sin(tau * x) * np.sin(P(p)) + 0.5 * np.cos(3 * tau * y) * np.cos(P(p))
        return a * (bt + bc)

    def v2(x, y, p):
        bt = np.cos(tau * x) * np.sin(tau * y) - 0.6 * np.sin(2 * tau * x) * np.cos(tau * y)
        bc = 0.7 * np.cos(tau * y) * np.cos(P(p)) + 0.4 * np.sin(3 * tau * x) * np.sin(P(p))
        return a * (bt + bc)

    def theta(x, y, p):
        return a * (0.9 * np.sin(tau * x) * np.cos(tau * y) * np.sin(P(p))
                    + 0.5 * np.cos(tau * x) * np.sin(3 * P(p))
                    + 0.3 * np.cos(2 * tau * y) * np.cos(2 * P(p))
                    + 0.35 * np.sin(4 * tau * x) * np.cos(tau * y) * np.sin(2 * P(p)))

    def q(x, y, p):
        return a * (0.8 * np.cos(tau * x) * np.sin(tau * y) * np.cos(P(p))
                    + 0.4 * np.sin(2 * tau * x) * np.sin(2 * P(p))
                    + 0.3 * np.sin(tau * y) * np.cos(3 * P(p)))

    return tuple(Field3D.from_function(grid, fn).as_spectral()
                 for fn in (v1, v2, theta, q))


class ManufacturedSolution:
    """Precomputed forcing and exact states for one case on one grid."""

    def __init__(self, case: ManufacturedCase, grid: Grid, params: PhysParams):
        if grid.nx // 3 < case.band or grid.ny // 3 < case.band or grid.np // 3 < case.band:
            raise ConfigError(
                f"grid {grid.shape} cannot carry band-{case.band} profiles inside "
                "the dealiased ball")
        self.case = case
        self.grid = grid
        self.params = params
        self.U = _profiles(case, grid)
        ustate = State(*self.U, t=0.0)

        zero = State.zeros(grid, SPECTRAL)
        static = tendency(zero, params, variant=FAITHFUL)
        lin_full = tendency(ustate, params, variant=FAITHFUL.with_(advection=False))
        quad = tendency(ustate, params, variant=ModelVariant(
            advection=True, coriolis=False, pressure=False,
            viscosity=False, dealias=False))

        self._S = tuple(f.data for f in
                        (static.v1, static.v2, static.theta, static.q))
        self._L = tuple(lf.data - sf for lf, sf in zip(
            (lin_full.v1, lin_full.v2, lin_full.theta, lin_full.q), self._S))
        self._Q = tuple(f.data for f in (quad.v1, quad.v2, quad.theta, quad.q))
        self._Uhat = tuple(f.data for f in self.U)

    def modulation(self, t: float) -> tuple[float, float]:
        c, s = math.cos(self.case.sigma * t), math.sin(self.case.sigma * t)
        env = 1.0 + self.case.alpha * t
        m = env * c
        mdot = self.case.alpha * c - self.case.sigma * env * s
        return m, mdot

    def forcing(self, t: float):
        m, mdot = self.modulation(t)
        return tuple(
            mdot * u - m * l - (m * m) * qq - s
            for u, l, qq, s in zip(self._Uhat, self._L, self._Q, self._S)
        )

    def exact_state(self, t: float) -> State:
        m, _ = self.modulation(t)
        fields = tuple(Field3D.spectral(self.grid, m * u) for u in self._Uhat)
        return State(*fields, t=t)

    def initial_state(self) -> State:
        return self.exact_state(0.0)

    def error(self, state: State) -> float:
        """Largest per-field L2 distance to the exact state at state.t."""
        from .norms import sobolev_norm
        exact = self.exact_state(state.t)
        st = state.as_spectral()
        worst = 0.0
        for num, ref in zip(st.fields, exact.fields):
            diff = Field3D.spectral(self.grid, num.data - ref.data)
            worst = max(worst, sobolev_norm(diff, 0))
        return worst
