"""The Sasakian complex Hessian S(u) and plurisubharmonicity tests.

Route A assembles S(u) from Hopf partials (principal chart); route B
evaluates the Cartesian form i dd-bar u on the Sasakian (1,0) frame.
Both give the matrix

    S = [[s00, s01], [s10, s11]],   s_AB = i dd-bar u (X_A, conj X_B).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Jet2, ScalarField, norm
from .hopf import PRINCIPAL, FrameJet, HopfPoint, basic_h, embed, frame_apply, frame_cartesian, to_hopf


@dataclass(frozen=True)
class SasakiHessian:
    s00: np.ndarray
    s01: np.ndarray
    s10: np.ndarray
    s11: np.ndarray
    rX0u: np.ndarray | None = None
    rX0bar_u: np.ndarray | None = None

    def matrix(self) -> np.ndarray:
        return np.stack([np.stack([self.s00, self.s01], -1), np.stack([self.s10, self.s11], -1)], -2)

    def min_eigenvalue(self) -> np.ndarray:
        return hermitian_eigvals(self.matrix())[0]


def hermitian_eigvals(M: np.ndarray):
    """Closed-form eigenvalues (lo, hi) of 2x2 Hermitian matrices."""
    a = np.real(M[..., 0, 0])
    d = np.real(M[..., 1, 1])
    b = M[..., 0, 1]
    mid = 0.5 * (a + d)
    rad = np.sqrt((0.5 * (a - d)) ** 2 + np.abs(b) ** 2)
    return mid - rad, mid + rad


def sasaki_hessian_hopf(fj: FrameJet, zeta=None, r=None) -> SasakiHessian:
    """Route A from principal-chart Hopf partials."""
    if fj.chart != PRINCIPAL:
        raise ValueError("route A is written in the principal chart")
    zeta = fj.zeta if zeta is None else np.asarray(zeta, complex)
    r = fj.r if r is None else np.asarray(r, float)
    bh = basic_h(zeta)
    hz, hzz = bh.h_zeta, bh.h_zetazetabar
    u_thz = fj.u_thetazeta
    s00 = 0.25 * (fj.u_tt + 4 * fj.u_thetatheta) / r ** 2
    s11 = (fj.u_zetazetabar + 0.5 * fj.u_t * hzz
           + np.real(1j * (hz * np.conj(u_thz) - np.conj(hz) * u_thz))
           + np.abs(hz) ** 2 * fj.u_thetatheta)
    s10 = (fj.u_tzeta - 2 * hz * fj.u_thetatheta + 1j * (2 * u_thz + hz * fj.u_ttheta)) / (2 * r)
    return SasakiHessian(s00, np.conj(s10), s10, s11, fj.rX0u, fj.rX0bar_u)


def sasaki_hessian_cartesian(jet: Jet2, p: HopfPoint | None = None) -> SasakiHessian:
    """Route B: S = P^T H conj(P) with P = [X0 z | X1 z]."""
    z = jet.z if p is None else embed(p)
    x0, x1 = frame_cartesian(z)
    H = jet.hess_h

    def pair(a, b):
        return np.einsum("...j,...jk,...k->...", a, H, np.conj(b))

    r = norm(z)
    rx0 = r * np.sum(jet.du * x0, axis=-1)
    return SasakiHessian(np.real(pair(x0, x0)), pair(x0, x1), pair(x1, x0), np.real(pair(x1, x1)),
                         rx0, np.conj(rx0))


def route_difference(field: ScalarField, z, engine: str = "auto") -> float:
    """max entrywise |S_A - S_B| at Cartesian points z."""
    p = to_hopf(z)
    A = sasaki_hessian_hopf(frame_apply(field, p, engine))
    B = sasaki_hessian_cartesian(field.jet(embed(p), engine))
    return float(np.max(np.abs(A.matrix() - B.matrix())))


def laplacian_identity_defect(field: ScalarField, z) -> float:
    """max |4 s00 - (u_rr + u_r/r + 4 u_thetatheta / r^2)| with the right side taken
    from Cartesian directional derivatives."""
    z = np.asarray(z, complex)
    jet = field.jet(z)
    r = norm(z)
    w = z / r[..., None]
    # real second derivative along a direction with complex components v
    def d2(v):
        return (2 * np.real(np.einsum("...j,...jk,...k->...", v, jet.hess_hol, v))
                + 2 * np.real(np.einsum("...j,...jk,...k->...", v, jet.hess_h, np.conj(v))))

    def d1(v):
        return 2 * np.real(np.sum(jet.du * v, axis=-1))

    u_r = d1(w)
    u_rr = d2(w)
    # theta acts as z -> e^{i theta/2} z
    u_thth = d2(0.5j * z) + d1(-0.25 * z)
    rhs = u_rr + u_r / r + 4 * u_thth / r ** 2
    S = sasaki_hessian_hopf(frame_apply(field, to_hopf(z)))
    return float(np.max(np.abs(4 * S.s00 - rhs)))


@dataclass(frozen=True)
class PshVerdict:
    min_eigen_S: float
    min_eigen_cartesian: float
    agree: bool
    n_samples: int


def psh_check(field: ScalarField, samples, tol: float = 1e-8, engine: str = "auto") -> PshVerdict:
    """Compare the sign of the smallest eigenvalue of S(u) with the Cartesian Hessian."""
    z = np.asarray(samples, complex)
    p = to_hopf(z)
    jet = field.jet(z, engine)
    lam_s = sasaki_hessian_hopf(frame_apply(field, p, engine)).min_eigenvalue()
    lam_c = hermitian_eigvals(jet.hess_h)[0]
    agree = bool(np.all((lam_s >= -tol) == (lam_c >= -tol)))
    return PshVerdict(float(np.min(lam_s)), float(np.min(lam_c)), agree, int(len(z)))


def random_annulus_points(n: int, rng: np.random.Generator, r_lo: float = 0.1, r_hi: float = 0.9,
                          phi_margin: float = 0.05) -> np.ndarray:
    """Uniform directions, uniform radii; directions near the principal cut are rejected."""
    out = []
    while sum(len(o) for o in out) < n:
        g = rng.normal(size=(2 * n, 2)) + 1j * rng.normal(size=(2 * n, 2))
        g /= norm(g)[:, None]
        ang = np.angle(g[:, 1] / g[:, 0])
        keep = np.abs(ang) < np.pi - phi_margin
        out.append(g[keep])
    d = np.concatenate(out)[:n]
    return d * rng.uniform(r_lo, r_hi, n)[:, None]
