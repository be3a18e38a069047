"""Monge-Ampere mass by three routes, the Pohozaev identity and the mass bounds.

Form convention: d^c = (i/2)(dbar - d), so dd^c u = i dd-bar u and
(dd^c u)^2 = 8 det(u_{j kbar}) dV.  For real tangent vectors written as
complex 2-vectors a, b, c:

    d^c u(a)     = Im(sum_j u_j a_j)
    dd^c u(a, b) = -2 Im(a^T H conj(b))
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from math import comb

import numpy as np

from .core import ScalarField, to_real
from .errors import NodeSingular, RestrictionSingular
from .hessian import sasaki_hessian_hopf
from .hopf import HopfPoint, basic_h, embed_principal, frame_apply
from .quad import (QuadratureSpec, ball_nodes, chunked_map, fsum_weighted, gauss_legendre,
                   sphere_nodes)

PI2 = math.pi ** 2


def _nodes(field: ScalarField, R: float, spec: QuadratureSpec):
    if field.sphere_rule is not None:
        return field.sphere_rule(R, spec)
    focus = field.focus(R) if field.focus is not None else None
    return sphere_nodes(spec, field.symmetry, focus)


def ma_density(field: ScalarField, z, engine: str = "auto") -> np.ndarray:
    """8 det(u_{j kbar}): the density of (dd^c u)^2 against Lebesgue measure."""
    return 8.0 * field.jet(z, engine).det_h()


def ma_volume(field: ScalarField, R: float, spec: QuadratureSpec | None = None,
              r_min: float | None = None, engine: str = "auto") -> float:
    """Absolutely continuous mass of (dd^c u)^2 in the shell r_min < |z| < R."""
    spec = spec or QuadratureSpec()
    r_min = 1e-3 * R if r_min is None else r_min
    z, w = ball_nodes(R, r_min, spec, field.symmetry)
    vals = chunked_map(lambda a, b: ma_density(field, np.stack([a, b], -1), engine), z[:, 0], z[:, 1])
    return fsum_weighted(vals, w)


def _dc(jet, a):
    return np.imag(np.sum(jet.du * a, axis=-1))


def _ddc(jet, a, b):
    return -2.0 * np.imag(np.einsum("...j,...jk,...k->...", a, jet.hess_h, np.conj(b)))


def dc_ddc(jet, a, b, c) -> np.ndarray:
    """(d^c u ^ dd^c u)(a, b, c)."""
    return _dc(jet, a) * _ddc(jet, b, c) - _dc(jet, b) * _ddc(jet, a, c) + _dc(jet, c) * _ddc(jet, a, b)


def boundary_density(field: ScalarField, R: float, theta, eta, phi, engine: str = "auto"):
    """Pull-back of d^c u ^ dd^c u to (theta, eta, phi) on S_R, with the boundary
    orientation of B_R."""
    zeta = np.tan(eta / 2) * np.exp(1j * phi)
    z = embed_principal(R, theta, zeta)
    jet = field.jet(z, engine)
    z0, z1 = z[..., 0], z[..., 1]
    d_th = 0.5j * z
    d_phi = np.stack([-0.5j * z0, 0.5j * z1], axis=-1)
    d_eta = np.stack([-0.5 * np.tan(eta / 2) * z0, 0.5 * z1 / np.tan(eta / 2)], axis=-1)
    frame = np.stack([to_real(z / R), to_real(d_th), to_real(d_eta), to_real(d_phi)], axis=-1)
    sign = np.sign(np.linalg.det(frame))
    return sign * dc_ddc(jet, d_th, d_eta, d_phi)


def ma_boundary(field: ScalarField, R: float, spec: QuadratureSpec | None = None,
                engine: str = "auto") -> float:
    """Integral of d^c u ^ dd^c u over S_R: the full mass of (dd^c u)^2 on B_R."""
    spec = spec or QuadratureSpec()
    n = _nodes(field, R, spec)
    vals = chunked_map(lambda t, e, p: boundary_density(field, R, t, e, p, engine), n.theta, n.eta, n.phi)
    return fsum_weighted(vals, n.w_raw)


@dataclass(frozen=True)
class Decomposition:
    total: float
    term_theta: float  # 2 * int u_t Theta dtheta ^ (i dzeta ^ dzetabar)
    term_fibre: float  # int (u_t^2 - 4 u_theta^2) dtheta ^ omega_FS


def ma_decomposition(field: ScalarField, R: float, spec: QuadratureSpec | None = None,
                     engine: str = "auto") -> Decomposition:
    """Mass through the fibre/base splitting (term_theta - term_fibre) / 4."""
    spec = spec or QuadratureSpec()
    n = _nodes(field, R, spec)

    def integrands(theta, zeta):
        fj = frame_apply(field, HopfPoint(np.full(theta.shape, float(R)), theta, zeta), engine)
        s11 = sasaki_hessian_hopf(fj).s11
        hzz = basic_h(zeta).h_zetazetabar
        # i dzeta ^ dzetabar = 2 omega_FS / h_{zeta zetabar}
        t1 = 4.0 * fj.u_t * s11 / hzz
        t2 = fj.u_t ** 2 - 4.0 * fj.u_theta ** 2
        return np.stack([t1, t2], axis=-1)

    vals = chunked_map(integrands, n.theta, n.zeta)
    a = fsum_weighted(vals[:, 0], n.w)
    b = fsum_weighted(vals[:, 1], n.w)
    return Decomposition((a - b) / 4.0, a, b)


def decomp_coefficients(n: int) -> list[tuple[int, int, str]]:
    """C(n+1, k+1) (-1)^k for k = 0..n, as (k, |coefficient|, sign)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [(k, comb(n + 1, k + 1), "+" if k % 2 == 0 else "-") for k in range(n + 1)]


def sphere_mean_ut(field: ScalarField, R: float, spec: QuadratureSpec | None = None,
                   engine: str = "auto") -> float:
    """Average of u_t = r u_r over S_R for the uniform probability measure."""
    spec = spec or QuadratureSpec()
    n = _nodes(field, R, spec)
    vals = chunked_map(lambda t, z: field.jet(embed_principal(R, t, z), engine).radial(), n.theta, n.zeta)
    return fsum_weighted(vals, n.w) / fsum_weighted(np.ones_like(n.w), n.w)


# ---- Pohozaev identity on a complex line ----

@dataclass(frozen=True)
class Pohozaev:
    lhs: float
    rhs: float
    residual: float


def pohozaev_residual(field: ScalarField, zeta: complex | None, R: float, n_r: int = 48,
                      n_angle: int = 64, r_min: float = 0.0, engine: str = "auto") -> Pohozaev:
    """2 int_{D_R} (r g_r) Lap g dA  versus  int_0^{2pi} (g_t^2 - g_theta^2) dtheta at |lambda| = R,

    where g(lambda) = u(lambda w) on the line through w = (1, zeta)/|(1, zeta)|
    (zeta = None selects the z^1-axis).
    """
    w = np.array([0.0, 1.0], complex) if zeta is None else np.array([1.0, zeta], complex)
    w = w / np.linalg.norm(w)
    ang = 2 * np.pi * np.arange(n_angle) / n_angle
    wa = 2 * np.pi / n_angle
    rr, wr = gauss_legendre(n_r, r_min, R)
    lam = rr[:, None] * np.exp(1j * ang)[None, :]
    jet = field.jet(lam[..., None] * w, engine)
    rg = 2 * np.real(lam * np.sum(jet.du * w, axis=-1))
    lap = 4 * np.real(np.einsum("j,...jk,k->...", w, jet.hess_h, np.conj(w)))
    dens = rg * lap
    if not np.all(np.isfinite(dens)):
        raise RestrictionSingular("restriction is singular inside the disk")
    lhs = 2 * math.fsum((dens * (wr * rr)[:, None] * wa).ravel().tolist())
    lamb = R * np.exp(1j * ang)
    jb = field.jet(lamb[:, None] * w, engine)
    s = lamb * np.sum(jb.du * w, axis=-1)
    g_t, g_th = 2 * np.real(s), -2 * np.imag(s)
    rhs = math.fsum(((g_t ** 2 - g_th ** 2) * wa).tolist())
    return Pohozaev(lhs, rhs, lhs - rhs)


# ---- inequalities ----

@dataclass(frozen=True)
class BoundRecord:
    R: float
    lhs: float
    rhs: float
    slack: float
    L_A: float
    mean_ut: float


def theorem_bound(field: ScalarField, R: float, spec: QuadratureSpec | None = None,
                  L_A: float | None = None, engine: str = "auto") -> BoundRecord:
    """lhs = mass(B_R)/pi^2 against rhs = 4 L_A * mean_{S_R} u_t."""
    from .lelong import lipschitz_sup

    lhs = ma_boundary(field, R, spec, engine) / PI2
    L = lipschitz_sup(field, R) if L_A is None else L_A
    mu = sphere_mean_ut(field, R, spec, engine)
    rhs = 4 * L * mu
    return BoundRecord(R, lhs, rhs, rhs - lhs, L, mu)


@dataclass(frozen=True)
class VolumeComparison:
    R: float
    ratio: float
    bound: float
    holds: bool


def volume_comparison(field: ScalarField, R: float, spec: QuadratureSpec | None = None,
                      L_A: float | None = None, tol: float = 1e-6, engine: str = "auto") -> VolumeComparison:
    """mass(B_R) / int_{B_R} omega_{|z|^2/2}^2  against  8 R^{-3} L_A mean_{S_R} u_r."""
    from .lelong import lipschitz_sup

    num = ma_boundary(field, R, spec, engine)
    den = PI2 * R ** 4
    L = lipschitz_sup(field, R) if L_A is None else L_A
    mean_ur = sphere_mean_ut(field, R, spec, engine) / R
    bound = 8 * L * mean_ur / R ** 3
    ratio = num / den
    return VolumeComparison(R, ratio, bound, bool(ratio <= bound + tol))


# ---- reports ----

@dataclass
class MassReport:
    fn: str
    R: float
    ma_volume: float | None = None
    ma_boundary: float | None = None
    ma_decomp: float | None = None
    tau_estimate: float | None = None
    bound_lhs: float | None = None
    bound_rhs: float | None = None
    slack: float | None = None
    vol_ratio: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def mass_report(field: ScalarField, R: float, spec: QuadratureSpec | None = None,
                method: str = "all", r_min: float | None = None, with_bound: bool = False) -> MassReport:
    rep = MassReport(field.name, R)
    if method in ("volume", "all"):
        rep.ma_volume = ma_volume(field, R, spec, r_min)
    if method in ("boundary", "all"):
        rep.ma_boundary = ma_boundary(field, R, spec)
        rep.tau_estimate = rep.ma_boundary / PI2
    if method in ("decomp", "all"):
        rep.ma_decomp = ma_decomposition(field, R, spec).total
    if with_bound:
        b = theorem_bound(field, R, spec)
        rep.bound_lhs, rep.bound_rhs, rep.slack = b.lhs, b.rhs, b.slack
        rep.vol_ratio = volume_comparison(field, R, spec, L_A=b.L_A).ratio
    return rep


def stokes_annulus(field: ScalarField, R: float, r_min: float, spec: QuadratureSpec | None = None):
    """(volume mass of the shell, boundary(R) - boundary(r_min)); equal by Stokes."""
    vol = ma_volume(field, R, spec, r_min)
    return vol, ma_boundary(field, R, spec) - ma_boundary(field, r_min, spec)


def aitken(x: list[float]) -> float:
    """Aitken delta-squared limit from the last three terms (last term if degenerate)."""
    if len(x) < 3:
        return float(x[-1])
    a, b, c = x[-3:]
    d = (c - b) - (b - a)
    if abs(d) < 1e-15:
        return float(c)
    return float(c - (c - b) ** 2 / d)


def tau_ladder(field: ScalarField, A_values, spec: QuadratureSpec | None = None) -> dict:
    """mass(B_{e^{-A}})/pi^2 along a ladder, with an extrapolated limit."""
    taus = [ma_boundary(field, math.exp(-A), spec) / PI2 for A in A_values]
    return {"A": list(A_values), "tau": taus, "tau_limit": aitken(taus)}


__all__ = [
    "ma_density", "ma_volume", "ma_boundary", "ma_decomposition", "decomp_coefficients",
    "pohozaev_residual", "theorem_bound", "volume_comparison", "mass_report", "MassReport",
    "stokes_annulus", "tau_ladder", "sphere_mean_ut", "boundary_density", "NodeSingular",
]
