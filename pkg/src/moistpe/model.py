"""Spatial operators of the moist primitive-equation system.

Prognostic equations (pressure coordinates, gradient and Laplacian horizontal):

    dv/dt  = -(v.grad)v - omega dv/dp - grad(Phi) - f_cor v_perp - A_v v + f_v
    dth/dt = -(v.grad)th - omega dth/dp - A_th th + f_th
    dq/dt  = -(v.grad)q - omega dq/dp - A_q q + f_q

with v_perp = (-v2, v1) and the viscosity operators

    A_v f  = -mu_v Lap f - nu_v d/dp( c(p) df/dp ),          c = (g p / (R theta_bar))^2
    A_q f  = -mu_q Lap f - nu_q d/dp( c(p) df/dp )
    A_th f = -mu_th Lap f - nu_th (p0/p)^kappa d/dp( c(p) d/dp( (p0/p)^kappa f ) )

where kappa = R/cp.  The diagnostic fields are recovered from the prognostic
ones: omega by vertical antidifferentiation of -div(v), Phi by hydrostatic
integration of R T / p down from the top pressure p1.

Both diagnostics need care on a periodic pressure grid.  omega is periodic
because the projected velocity has pointwise-zero vertical-mean divergence.
Phi is not: the vertical mean of R T / p contributes a piece linear in p.
That ramp is carried analytically (its horizontal gradient is still exact),
and only the fluctuating part goes through spectral antidifferentiation.
Differentiating the raw Phi samples in p would differentiate a sawtooth, so
consistency monitors use the same ramp/fluctuation split.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import ConstraintError, DataError
from .fields import PHYSICAL, SPECTRAL, Field3D, irfftn_norm, rfftn_norm
from .grid import Grid
from .norms import vector_sobolev_norm, weight_profile
from .params import PhysParams
from .state import State


@dataclass(frozen=True)
class ModelVariant:
    """Term toggles and deliberate defects for verification runs.

    The defaults are the faithful model.  The toggles isolate operator groups
    (pure diffusion runs, advection-only probes).  The two defect switches
    exist for mutation testing of the verification suite:

      coriolis_bug   replaces v_perp = (-v2, v1) by (v2, v1), the classic
                     transcription slip; unlike a global sign flip it breaks
                     the antisymmetry that makes Coriolis work vanish.
      dealias=False  skips every 2/3-rule truncation.
    """

    advection: bool = True
    coriolis: bool = True
    pressure: bool = True
    viscosity: bool = True
    dealias: bool = True
    coriolis_bug: bool = False

    def with_(self, **kwargs) -> "ModelVariant":
        return replace(self, **kwargs)


FAITHFUL = ModelVariant()


@dataclass(frozen=True)
class Diagnostics:
    omega: Field3D
    phi: Field3D
    temperature: Field3D


@dataclass(frozen=True)
class Tendency:
    """Spectral time derivatives of the prognostic fields."""

    v1: Field3D
    v2: Field3D
    theta: Field3D
    q: Field3D


class Coefficients:
    """Pressure-profile coefficients sampled on the grid (1D along p)."""

    def __init__(self, grid: Grid, params: PhysParams):
        params.check_grid(grid)
        p = grid.p
        self.p = p
        self.inv_p = 1.0 / p
        theta_bar = params.theta_bar.evaluate(p)
        if np.any(theta_bar <= 0.0):
            raise DataError("theta_bar must be positive on the pressure grid")
        self.theta_bar = theta_bar
        self.theta_h = params.theta_h.evaluate(p)
        self.c = (params.g * p / (params.R * theta_bar)) ** 2
        kappa = params.kappa
        self.kappa = kappa
        self.pk = (params.p0 / p) ** kappa      # (p0/p)^kappa
        self.pk_inv = (p / params.p0) ** kappa  # (p/p0)^kappa
        # constant-coefficient split used by the implicit time integrator
        self.c_mean = float(np.mean(self.c))
        if params.phi_s is None:
            self.phi_s = np.zeros((grid.nx, grid.ny))
        else:
            phi_s = np.asarray(params.phi_s, dtype=np.float64)
            if phi_s.shape != (grid.nx, grid.ny):
                raise DataError(f"phi_s must have shape {(grid.nx, grid.ny)}, got {phi_s.shape}")
            self.phi_s = phi_s


def coefficients(grid: Grid, params: PhysParams) -> Coefficients:
    return Coefficients(grid, params)


# --- potential temperature <-> temperature --------------------------------


def temperature_from_theta(theta: Field3D, params: PhysParams) -> Field3D:
    """T = (theta + theta_h) * (p/p0)^kappa, evaluated pointwise."""
    theta.require(PHYSICAL, "temperature_from_theta")
    co = Coefficients(theta.grid, params)
    return Field3D.physical(theta.grid, (theta.data + co.theta_h) * co.pk_inv)


def theta_from_temperature(T: Field3D, params: PhysParams) -> Field3D:
    """theta = T * (p0/p)^kappa - theta_h, the inverse of temperature_from_theta."""
    T.require(PHYSICAL, "theta_from_temperature")
    co = Coefficients(T.grid, params)
    return Field3D.physical(T.grid, T.data * co.pk - co.theta_h)


# --- vertical velocity ----------------------------------------------------


def _divergence_hat(grid: Grid, V1: np.ndarray, V2: np.ndarray) -> np.ndarray:
    return 1j * grid.KX * V1 + 1j * grid.KY * V2


def _omega_hat_parts(grid: Grid, D: np.ndarray) -> np.ndarray:
    """Spectral antiderivative (in p, from p0) of the fluctuating part of -D."""
    G = np.zeros_like(D)
    kp = grid.kp
    G[..., 1:] = D[..., 1:] / (1j * kp[1:])
    return G


def divergence_residual(v1: Field3D, v2: Field3D) -> float:
    """Spectral max modulus of the divergence of the vertical average of v."""
    V1 = v1.as_spectral().data
    V2 = v2.as_spectral().data
    D = _divergence_hat(v1.grid, V1, V2)
    return float(np.max(np.abs(D[:, :, 0])))


def diagnose_omega(v1: Field3D, v2: Field3D, check: bool = True) -> Field3D:
    """omega(x,y,p) = -integral from p0 to p of div(v) dp'.

    Requires the vertically-averaged divergence to vanish; otherwise the
    reconstruction is not periodic and a ConstraintError reports the offending
    residual (the state was not projected).  omega(p0) = 0 holds exactly by
    construction.
    """
    g = v1.grid
    V1 = v1.as_spectral().data
    V2 = v2.as_spectral().data
    D = _divergence_hat(g, V1, V2)
    if check:
        residual = float(np.max(np.abs(D[:, :, 0])))
        vnorm = vector_sobolev_norm((v1, v2), 1)
        if residual > 1e-11 * vnorm:
            raise ConstraintError(
                f"vertically-averaged divergence residual {residual:.3e} exceeds "
                f"1e-11 * ||v||_H1 = {1e-11 * vnorm:.3e}; project the state first",
                residual,
            )
    G = irfftn_norm(g, _omega_hat_parts(g, D))
    om = G[:, :, :1] - G
    return Field3D.physical(g, om)


def omega_top_residual(v1: Field3D, v2: Field3D) -> float:
    """|omega(p1)| = Lp * (max modulus of the vertically-averaged divergence)."""
    return v1.grid.Lp * divergence_residual(v1, v2)


# --- geopotential ---------------------------------------------------------


def _integrand_parts(grid: Grid, params: PhysParams, co: Coefficients,
                     theta_phys: np.ndarray):
    """(gfield, gbar, fluct_hat) for g = R*T/p built from theta samples.

    fluct_hat holds the zero-p-mean part of g with the p-Nyquist plane
    removed: the antiderivative of the Nyquist cosine is a sine that
    vanishes at every node, so the discrete vertical calculus cannot see
    that mode.  Dropping it up front makes antidifferentiation followed by
    differentiation an exact identity on the retained modes; the discarded
    residue is ordinary spectral truncation of the non-band-limited
    integrand, which the convergence suite measures instead.
    """
    T = (theta_phys + co.theta_h) * co.pk_inv
    gfield = params.R * T * co.inv_p
    gbar = gfield.mean(axis=2)
    fluct_hat = rfftn_norm(grid, gfield - gbar[:, :, None])
    if grid.np % 2 == 0:
        fluct_hat[..., -1] = 0.0
    return gfield, gbar, fluct_hat


def _phi_parts(grid: Grid, params: PhysParams, co: Coefficients, theta_phys: np.ndarray):
    """Compute (phi_phys, gbar, gfield) for theta samples.

    phi = phi_s + gbar*(p1 - p) + Gg(p0) - Gg(p), where g = R*T/p and Gg is
    the spectral antiderivative of the zero-mean part of g.
    """
    gfield, gbar, Ghat = _integrand_parts(grid, params, co, theta_phys)
    A = np.zeros_like(Ghat)
    A[..., 1:] = Ghat[..., 1:] / (1j * grid.kp[1:])
    Gg = irfftn_norm(grid, A)
    ramp = gbar[:, :, None] * (params.p1 - grid.p)[None, None, :]
    phi = co.phi_s[:, :, None] + ramp + Gg[:, :, :1] - Gg
    return phi, gbar, gfield


def diagnose_phi(theta: Field3D, params: PhysParams) -> Field3D:
    """Phi = Phi_s + integral from p to p1 of R T / p' dp', T from theta."""
    theta.require(PHYSICAL, "diagnose_phi")
    g = theta.grid
    co = Coefficients(g, params)
    phi, _, _ = _phi_parts(g, params, co, theta.data)
    return Field3D.physical(g, phi)


def hydrostatic_residual(phi: Field3D, theta: Field3D, params: PhysParams) -> float:
    """|| d(phi)/dp + R T / p ||_{L2}, differentiating phi structurally.

    The ramp gbar*(p1-p) is rebuilt from theta and subtracted before the
    spectral p-derivative (the raw samples contain that non-periodic piece);
    the comparison term R T / p is rebuilt from theta as the interpolant the
    vertical calculus acts on (zero-mean part Nyquist-free, see
    _integrand_parts), so the residual measures consistency of the supplied
    phi samples rather than truncation of the integrand.
    """
    phi.require(PHYSICAL, "hydrostatic_residual")
    theta.require(PHYSICAL, "hydrostatic_residual")
    g = phi.grid
    co = Coefficients(g, params)
    _, gbar, fluct_hat = _integrand_parts(g, params, co, theta.data)
    ramp = gbar[:, :, None] * (params.p1 - g.p)[None, None, :]
    periodic = phi.data - ramp
    Phat = rfftn_norm(g, periodic)
    dphi = irfftn_norm(g, 1j * g.KP * Phat) - gbar[:, :, None]
    g_used = gbar[:, :, None] + irfftn_norm(g, fluct_hat)
    res = dphi + g_used
    return float(np.sqrt(g.volume * np.mean(res**2)))


def hydrostatic_gradient_residual(theta: Field3D, params: PhysParams) -> float:
    """Relative size of d/dp(grad Phi) + (R/p) grad T.

    Route one differentiates the assembled Phi (ramp split off before the
    spectral p-derivative); route two forms (R/p) grad T from theta as the
    interpolant the vertical calculus acts on (see _integrand_parts).  The
    two routes traverse independent code paths and must agree to roundoff.
    """
    theta.require(PHYSICAL, "hydrostatic_gradient_residual")
    g = theta.grid
    co = Coefficients(g, params)
    phi, gbar, _ = _phi_parts(g, params, co, theta.data)
    _, _, fluct_hat = _integrand_parts(g, params, co, theta.data)
    ramp = gbar[:, :, None] * (params.p1 - g.p)[None, None, :]
    Pper = rfftn_norm(g, phi - ramp)
    Gb = np.ascontiguousarray(np.broadcast_to(gbar[:, :, None], g.shape))
    Gbhat = rfftn_norm(g, Gb)
    Ghat = Gbhat + fluct_hat
    worst = 0.0
    scale = 0.0
    for K in (g.KX, g.KY):
        dp_grad_per = irfftn_norm(g, 1j * K * 1j * g.KP * Pper)
        grad_gbar = irfftn_norm(g, 1j * K * Gbhat)
        route_one = dp_grad_per - grad_gbar
        route_two = -irfftn_norm(g, 1j * K * Ghat)
        diff = route_one - route_two
        worst = max(worst, float(np.sqrt(g.volume * np.mean(diff**2))))
        scale = max(scale, float(np.sqrt(g.volume * np.mean(route_two**2))))
    if scale == 0.0:
        return worst
    return worst / scale


# --- viscosity operators --------------------------------------------------


def _mask_of(grid: Grid, variant: ModelVariant):
    return grid.dealias_mask if variant.dealias else 1.0


def apply_viscosity_v(field: Field3D, params: PhysParams, variant: ModelVariant = FAITHFUL) -> Field3D:
    """A_v f = -mu_v Lap f - nu_v d/dp(c df/dp); the product c*df/dp is dealiased."""
    return _apply_viscosity_plain(field, params, params.mu_v, params.nu_v, variant)


def apply_viscosity_q(field: Field3D, params: PhysParams, variant: ModelVariant = FAITHFUL) -> Field3D:
    """A_q f, identical in form to A_v with the humidity coefficients."""
    return _apply_viscosity_plain(field, params, params.mu_q, params.nu_q, variant)


def _apply_viscosity_plain(field, params, mu, nu, variant):
    g = field.grid
    co = Coefficients(g, params)
    F = field.as_spectral().data
    mask = _mask_of(g, variant)
    dpf = irfftn_norm(g, 1j * g.KP * F)
    W = rfftn_norm(g, co.c * dpf) * mask
    out = mu * g.kh2 * F - nu * (1j * g.KP) * W
    spec = Field3D.spectral(g, out)
    return spec if field.rep == SPECTRAL else spec.as_physical()


def apply_viscosity_theta(field: Field3D, params: PhysParams, variant: ModelVariant = FAITHFUL) -> Field3D:
    """A_th f = -mu_th Lap f - nu_th (p0/p)^kappa d/dp(c d/dp((p0/p)^kappa f)).

    The composite coefficient chain is evaluated pointwise on the grid with
    every product dealiased.  At kappa = 0 this reduces to the plain operator.
    """
    g = field.grid
    co = Coefficients(g, params)
    mask = _mask_of(g, variant)
    F = field.as_spectral().data
    f_phys = irfftn_norm(g, F)
    S = rfftn_norm(g, co.pk * f_phys) * mask
    dps = irfftn_norm(g, 1j * g.KP * S)
    W = rfftn_norm(g, co.c * dps) * mask
    inner = irfftn_norm(g, 1j * g.KP * W)
    outer = rfftn_norm(g, co.pk * inner) * mask
    out = params.mu_theta * g.kh2 * F - params.nu_theta * outer
    spec = Field3D.spectral(g, out)
    return spec if field.rep == SPECTRAL else spec.as_physical()


# --- barotropic projection ------------------------------------------------


def barotropic_project(v1: Field3D, v2: Field3D) -> tuple[Field3D, Field3D]:
    """Remove the gradient part of the vertical average of v.

    Solves Lap(phi) = div(vbar) on the horizontal torus (phi of zero mean) and
    subtracts grad(phi).  In the half-spectrum layout the vertical average is
    exactly the kp = 0 plane, so only that plane changes; the projection is
    idempotent and an L2 contraction.
    """
    g = v1.grid
    V1 = v1.as_spectral().data.copy()
    V2 = v2.as_spectral().data.copy()
    kx = g.kx[:, None]
    ky = g.ky[None, :]
    kh2 = kx**2 + ky**2
    kh2_safe = kh2.copy()
    kh2_safe[0, 0] = 1.0  # mean mode has no gradient part
    u = V1[:, :, 0]
    w = V2[:, :, 0]
    proj = (kx * u + ky * w) / kh2_safe
    proj[0, 0] = 0.0
    V1[:, :, 0] = u - kx * proj
    V2[:, :, 0] = w - ky * proj
    out1 = Field3D.spectral(g, V1)
    out2 = Field3D.spectral(g, V2)
    if v1.rep == PHYSICAL:
        return out1.as_physical(), out2.as_physical()
    return out1, out2


def project_state(state: State) -> State:
    pv1, pv2 = barotropic_project(state.v1, state.v2)
    return State(pv1, pv2, state.theta, state.q, t=state.t)


# --- advection and work integrals (probes / budgets) ----------------------


def advection_work(v1: Field3D, v2: Field3D, omega: Field3D, s: Field3D) -> float:
    """integral of (v.grad(s) + omega ds/dp) * s over M, collocation quadrature."""
    g = s.grid
    S = s.as_spectral()
    dxs = irfftn_norm(g, 1j * g.KX * S.data)
    dys = irfftn_norm(g, 1j * g.KY * S.data)
    dps = irfftn_norm(g, 1j * g.KP * S.data)
    sp = s.as_physical().data
    v1p = v1.as_physical().data
    v2p = v2.as_physical().data
    omp = omega.as_physical().data
    integrand = (v1p * dxs + v2p * dys + omp * dps) * sp
    return float(g.volume * np.mean(integrand))


# --- full tendency --------------------------------------------------------

ForcingFn = Callable[[float], tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]


def tendency(
    state: State,
    params: PhysParams,
    forcing: ForcingFn | None = None,
    variant: ModelVariant = FAITHFUL,
    return_diagnostics: bool = False,
):
    """Evaluate the semi-discrete right-hand side at the state's time.

    All operator terms are truncated by the 2/3 mask (variant permitting), so
    evolved states stay inside the dealiased ball; supplied forcing is added
    untruncated.  Returns a Tendency of spectral fields, optionally with the
    freshly diagnosed omega and Phi.
    """
    g = state.grid
    co = Coefficients(g, params)
    st = state.as_spectral()
    V1, V2, TH, Q = (f.data for f in st.fields)
    iKX, iKY, iKP = 1j * g.KX, 1j * g.KY, 1j * g.KP

    stack = np.stack([
        V1, V2, TH, Q,
        iKX * V1, iKY * V1, iKP * V1,
        iKX * V2, iKY * V2, iKP * V2,
        iKX * TH, iKY * TH, iKP * TH,
        iKX * Q, iKY * Q, iKP * Q,
    ])
    (v1, v2, th, q,
     dxv1, dyv1, dpv1,
     dxv2, dyv2, dpv2,
     dxth, dyth, dpth,
     dxq, dyq, dpq) = irfftn_norm(g, stack)

    # vertical velocity from the divergence (fluctuating part only; the
    # projected state carries no vertical-mean divergence)
    D = iKX * V1 + iKY * V2
    Ghat = _omega_hat_parts(g, D)

    # temperature -> hydrostatic geopotential
    T = (th + co.theta_h) * co.pk_inv
    gfield = params.R * T * co.inv_p
    gbar = gfield.mean(axis=2)
    s_conj = co.pk * th  # conjugated theta for A_theta

    Ghat_g, Shat = rfftn_norm(g, np.stack([gfield - gbar[:, :, None], s_conj]))
    if g.np % 2 == 0:
        Ghat_g[..., -1] = 0.0  # p-Nyquist antiderivative vanishes at the nodes
    A = np.zeros_like(Ghat_g)
    A[..., 1:] = Ghat_g[..., 1:] / (1j * g.kp[1:])
    mask = _mask_of(g, variant)
    Shat = Shat * mask

    G_om, Gg, dps = irfftn_norm(g, np.stack([Ghat, A, iKP * Shat]))
    om = G_om[:, :, :1] - G_om
    ramp = gbar[:, :, None] * (params.p1 - g.p)[None, None, :]
    phi = co.phi_s[:, :, None] + ramp + Gg[:, :, :1] - Gg

    Phat, Wth, Wv1, Wv2, Wq = rfftn_norm(g, np.stack([
        phi, co.c * dps, co.c * dpv1, co.c * dpv2, co.c * dpq,
    ]))
    Wth = Wth * mask

    dxphi, dyphi, inner_th = irfftn_norm(g, np.stack([
        iKX * Phat, iKY * Phat, iKP * Wth,
    ]))

    zeros = np.zeros_like(v1)
    adv1 = (v1 * dxv1 + v2 * dyv1 + om * dpv1) if variant.advection else zeros
    adv2 = (v1 * dxv2 + v2 * dyv2 + om * dpv2) if variant.advection else zeros
    advt = (v1 * dxth + v2 * dyth + om * dpth) if variant.advection else zeros
    advq = (v1 * dxq + v2 * dyq + om * dpq) if variant.advection else zeros

    if variant.coriolis:
        f = params.f_cor
        if variant.coriolis_bug:
            cor1, cor2 = f * v2, f * v1
        else:
            cor1, cor2 = -f * v2, f * v1
    else:
        cor1 = cor2 = zeros

    if variant.pressure:
        pr1, pr2 = dxphi, dyphi
    else:
        pr1 = pr2 = zeros

    if variant.viscosity:
        visc_t_vert = params.nu_theta * (co.pk * inner_th)
    else:
        visc_t_vert = zeros

    P1 = adv1 + pr1 + cor1
    P2 = adv2 + pr2 + cor2
    Pt = advt - visc_t_vert
    Pq = advq
    H1, H2, Ht, Hq = rfftn_norm(g, np.stack([P1, P2, Pt, Pq]))

    if variant.viscosity:
        F1 = -H1 - params.mu_v * g.kh2 * V1 + params.nu_v * iKP * (Wv1 * mask)
        F2 = -H2 - params.mu_v * g.kh2 * V2 + params.nu_v * iKP * (Wv2 * mask)
        Ft = -Ht - params.mu_theta * g.kh2 * TH
        Fq = -Hq - params.mu_q * g.kh2 * Q + params.nu_q * iKP * (Wq * mask)
    else:
        F1, F2, Ft, Fq = -H1, -H2, -Ht, -Hq

    F1 = F1 * mask
    F2 = F2 * mask
    Ft = Ft * mask
    Fq = Fq * mask

    if forcing is not None:
        fv1, fv2, fth, fq = forcing(state.t)
        F1 = F1 + fv1
        F2 = F2 + fv2
        Ft = Ft + fth
        Fq = Fq + fq

    out = Tendency(
        Field3D.spectral(g, F1),
        Field3D.spectral(g, F2),
        Field3D.spectral(g, Ft),
        Field3D.spectral(g, Fq),
    )
    if return_diagnostics:
        diag = Diagnostics(
            Field3D.physical(g, om),
            Field3D.physical(g, phi),
            Field3D.physical(g, T),
        )
        return out, diag
    return out


def diagnose(state: State, params: PhysParams) -> Diagnostics:
    """Fresh omega, Phi and T for the given state (with the constraint check)."""
    phys = state.as_physical()
    omega = diagnose_omega(phys.v1, phys.v2)
    phi = diagnose_phi(phys.theta, params)
    temperature = temperature_from_theta(phys.theta, params)
    return Diagnostics(omega, phi, temperature)


# --- energy pairings used by the budget monitor ---------------------------


def vertical_dissipation(field: Field3D, params: PhysParams, which: str,
                         variant: ModelVariant = FAITHFUL) -> float:
    """The discrete pairing -<u, vertical part of (-A u)> for one variable.

    For v and q this equals nu * || du/dp ||_w^2 exactly (no conjugation, the
    field lives inside the dealiased ball).  For theta the conjugated form
    nu * <dps, dealias(c dps)> with s = (p0/p)^kappa theta is the quantity the
    discrete dynamics actually dissipates.
    """
    g = field.grid
    co = Coefficients(g, params)
    mask = g.dealias_mask if variant.dealias else 1.0
    F = field.as_spectral().data
    if which in ("v", "q"):
        nu = params.nu_v if which == "v" else params.nu_q
        dpf = irfftn_norm(g, 1j * g.KP * F)
        W = rfftn_norm(g, co.c * dpf) * mask
        dpf_hat = rfftn_norm(g, dpf)
        total = _pair(g, dpf_hat, W)
        return nu * total
    if which == "theta":
        f_phys = irfftn_norm(g, F)
        S = rfftn_norm(g, co.pk * f_phys) * mask
        dps = irfftn_norm(g, 1j * g.KP * S)
        W = rfftn_norm(g, co.c * dps) * mask
        return params.nu_theta * _pair(g, rfftn_norm(g, dps), W)
    raise DataError(f"unknown variable {which!r}")


def _pair(grid: Grid, Ahat: np.ndarray, Bhat: np.ndarray) -> float:
    """<a, b> = |M| * sum_k w_k Re(a_k conj(b_k)) over the half spectrum."""
    prod = (Ahat.real * Bhat.real + Ahat.imag * Bhat.imag) * grid.parseval_weights
    return float(grid.volume * prod.sum())


# --- CFL ------------------------------------------------------------------


def cfl_dt(state: State, cfl_target: float, dt_max: float = np.inf) -> float:
    """Advective CFL step: cfl_target / max(|v1|/dx + |v2|/dy + |omega|/dp).

    An all-zero velocity field returns dt_max.
    """
    if not (0.0 < cfl_target <= 1.0):
        raise DataError(f"cfl_target must lie in (0, 1], got {cfl_target}")
    g = state.grid
    phys = state.as_physical()
    pv1, pv2 = barotropic_project(phys.v1, phys.v2)
    om = diagnose_omega(pv1, pv2, check=False)
    dx = g.Lx / g.nx
    dy = g.Ly / g.ny
    dp = g.Lp / g.np
    speed = np.abs(pv1.data) / dx + np.abs(pv2.data) / dy + np.abs(om.data) / dp
    peak = float(speed.max())
    if peak == 0.0:
        return dt_max
    return min(cfl_target / peak, dt_max)
