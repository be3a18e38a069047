"""Points, Wirtinger jets and scalar fields on the punctured unit ball of C^2.

A point is a complex array whose last axis has length 2, ``z[..., 0] = z^0``
and ``z[..., 1] = z^1``.  Every routine is vectorised over the leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NotAvailable, StencilOutsideDomain

DEFAULT_H = 1e-4


def cx(z0, z1) -> np.ndarray:
    """Stack two complex coordinates into a point array."""
    z0, z1 = np.broadcast_arrays(np.asarray(z0, complex), np.asarray(z1, complex))
    return np.stack([z0, z1], axis=-1)


def norm(z) -> np.ndarray:
    z = np.asarray(z)
    return np.sqrt(np.abs(z[..., 0]) ** 2 + np.abs(z[..., 1]) ** 2)


def to_real(z) -> np.ndarray:
    """(..., 2) complex -> (..., 4) real ordered (x0, y0, x1, y1)."""
    z = np.asarray(z, complex)
    return np.stack([z[..., 0].real, z[..., 0].imag, z[..., 1].real, z[..., 1].imag], axis=-1)


def from_real(x) -> np.ndarray:
    x = np.asarray(x, float)
    return cx(x[..., 0] + 1j * x[..., 1], x[..., 2] + 1j * x[..., 3])


@dataclass(frozen=True)
class Jet2:
    """Value, first and second Wirtinger derivatives of a real function.

    ``du[..., j] = u_{z^j}``; ``hess_h[..., j, k] = u_{z^j zbar^k}``;
    ``hess_hol[..., j, k] = u_{z^j z^k}``.  Conjugate derivatives are
    recovered by conjugation since u is real.
    """

    z: np.ndarray
    u: np.ndarray
    du: np.ndarray
    hess_h: np.ndarray
    hess_hol: np.ndarray

    @property
    def du_bar(self) -> np.ndarray:
        return np.conj(self.du)

    def radial(self) -> np.ndarray:
        """r * du/dr, i.e. the t-derivative with t = log r."""
        return 2.0 * np.real(np.sum(self.z * self.du, axis=-1))

    def real_gradient(self) -> np.ndarray:
        g = np.empty(self.du.shape[:-1] + (4,))
        g[..., 0::2] = 2.0 * self.du.real
        g[..., 1::2] = -2.0 * self.du.imag
        return g

    def hermitian_defect(self) -> float:
        d = self.hess_h - np.conj(np.swapaxes(self.hess_h, -1, -2))
        return float(np.max(np.abs(d))) if d.size else 0.0

    def det_h(self) -> np.ndarray:
        h = self.hess_h
        return np.real(h[..., 0, 0] * h[..., 1, 1] - h[..., 0, 1] * h[..., 1, 0])

    def __add__(self, other: "Jet2") -> "Jet2":
        return Jet2(self.z, self.u + other.u, self.du + other.du,
                    self.hess_h + other.hess_h, self.hess_hol + other.hess_hol)

    def scaled(self, c: float) -> "Jet2":
        return Jet2(self.z, c * self.u, c * self.du, c * self.hess_h, c * self.hess_hol)


def wirtinger_from_real(z, u, grad, hess) -> Jet2:
    """Build a Jet2 from a real gradient (..., 4) and real Hessian (..., 4, 4)."""
    du = 0.5 * (grad[..., 0::2] - 1j * grad[..., 1::2])
    xx = hess[..., 0::2, 0::2]
    yy = hess[..., 1::2, 1::2]
    xy = hess[..., 0::2, 1::2]
    yx = hess[..., 1::2, 0::2]
    hh = 0.25 * ((xx + yy) + 1j * (xy - yx))
    hol = 0.25 * ((xx - yy) - 1j * (xy + yx))
    return Jet2(np.asarray(z, complex), np.asarray(u, float), du, hh, hol)


def _stencil(h: float) -> np.ndarray:
    offs = [np.zeros(4)]
    for a in range(4):
        for s in (1.0, -1.0):
            e = np.zeros(4)
            e[a] = s * h
            offs.append(e)
    for a in range(4):
        for b in range(a + 1, 4):
            for sa in (1.0, -1.0):
                for sb in (1.0, -1.0):
                    e = np.zeros(4)
                    e[a], e[b] = sa * h, sb * h
                    offs.append(e)
    return np.array(offs)


def _fd_real_derivatives(func, x, h, radius):
    offs = _stencil(h)
    pts = x[..., None, :] + offs
    r = np.sqrt(np.sum(pts ** 2, axis=-1))
    if np.any(r <= 0.0) or np.any(r >= radius):
        raise StencilOutsideDomain(f"stencil of step {h} leaves the punctured ball of radius {radius}")
    f = np.asarray(func(from_real(pts)), float)
    f0 = f[..., 0]
    grad = np.empty(x.shape[:-1] + (4,))
    hess = np.empty(x.shape[:-1] + (4, 4))
    for a in range(4):
        fp, fm = f[..., 1 + 2 * a], f[..., 2 + 2 * a]
        grad[..., a] = (fp - fm) / (2 * h)
        hess[..., a, a] = (fp - 2 * f0 + fm) / h ** 2
    k = 9
    for a in range(4):
        for b in range(a + 1, 4):
            fpp, fpm, fmp, fmm = (f[..., k + i] for i in range(4))
            k += 4
            hess[..., a, b] = hess[..., b, a] = (fpp - fpm - fmp + fmm) / (4 * h * h)
    return f0, grad, hess


def fd_jet(field: "ScalarField", p, h: float = DEFAULT_H, richardson: bool = False) -> Jet2:
    """Central-difference Wirtinger jet, second order in h.

    With ``richardson=True`` the h and h/2 results are combined to cancel the
    leading truncation term.
    """
    p = np.asarray(p, complex)
    x = to_real(p)
    radius = field.domain_radius
    u, g, H = _fd_real_derivatives(field, x, h, radius)
    if richardson:
        _, g2, H2 = _fd_real_derivatives(field, x, h / 2, radius)
        g = (4 * g2 - g) / 3
        H = (4 * H2 - H) / 3
    return wirtinger_from_real(p, u, g, H)


def analytic_jet(field: "ScalarField", p) -> Jet2:
    if field.jet_func is None:
        raise NotAvailable(f"{field.name} has no closed-form derivatives")
    return field.jet_func(np.asarray(p, complex))


@dataclass
class ScalarField:
    """A real function on the punctured ball with optional closed-form jets."""

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    jet_func: Callable[[np.ndarray], Jet2] | None = None
    psh: bool = False
    s1_invariant: bool = False
    smooth: bool = True
    constants: dict = field(default_factory=dict)
    domain_radius: float = 1.0
    # weights (a, b): u(e^{ias} z0, e^{ibs} z1) = u(z0, z1) for all s; used to
    # collapse one angle of the sphere rule when a != b
    symmetry: tuple[int, int] | None = None
    # R -> QuadFocus locating a sharp concentration of the boundary integrand on S_R
    focus: Callable | None = None
    # (R, spec) -> SphereNodes replacing the default sphere rule
    sphere_rule: Callable | None = None
    # level function whose zero set contains the locus where u is not C^1
    kink: Callable | None = None

    def __call__(self, z) -> np.ndarray:
        return self.func(np.asarray(z, complex))

    @property
    def has_analytic(self) -> bool:
        return self.jet_func is not None

    def jet(self, z, engine: str = "auto", h: float = DEFAULT_H) -> Jet2:
        if engine == "analytic" or (engine == "auto" and self.has_analytic):
            return analytic_jet(self, z)
        return fd_jet(self, z, h)

    def radial_derivative(self, z, h: float = 1e-6) -> np.ndarray:
        """r u_r; analytic when possible, else a log-radial central difference."""
        z = np.asarray(z, complex)
        if self.has_analytic:
            return self.jet(z).radial()
        up = self(z * np.exp(h))
        um = self(z * np.exp(-h))
        return (up - um) / (2 * h)

    def __add__(self, other: "ScalarField") -> "ScalarField":
        a, b = self, other
        jet = None
        if a.has_analytic and b.has_analytic:
            def jet(z):
                return a.jet_func(z) + b.jet_func(z)
        return ScalarField(
            name=f"{a.name}+{b.name}",
            func=lambda z: a(z) + b(z),
            jet_func=jet,
            psh=a.psh and b.psh,
            s1_invariant=a.s1_invariant and b.s1_invariant,
            smooth=a.smooth and b.smooth,
            domain_radius=min(a.domain_radius, b.domain_radius),
            symmetry=a.symmetry if a.symmetry == b.symmetry else None,
            focus=a.focus if a.focus is b.focus else None,
        )


def log_sum_squares_jet(z, F, DF, D2F, c: float) -> Jet2:
    """Jet of c * log(sum_i |F_i|^2) for holomorphic F.

    F: (..., m); DF: (..., m, 2); D2F: (..., m, 2, 2).
    """
    S = np.sum(np.abs(F) ** 2, axis=-1)
    Fc = np.conj(F)
    a = np.einsum("...i,...ij->...j", Fc, DF)  # sum conj(F) dF_j
    du = c * a / S[..., None]
    hh = c * (np.einsum("...ij,...ik->...jk", DF, np.conj(DF)) / S[..., None, None]
              - a[..., :, None] * np.conj(a)[..., None, :] / S[..., None, None] ** 2)
    hol = c * (np.einsum("...i,...ijk->...jk", Fc, D2F) / S[..., None, None]
               - a[..., :, None] * a[..., None, :] / S[..., None, None] ** 2)
    return Jet2(np.asarray(z, complex), c * np.log(S), du, hh, hol)


def linear_field(a0: complex = 0.0, a1: complex = 1.0) -> ScalarField:
    """u = Re(a0 z^0 + a1 z^1), pluriharmonic."""
    a = np.array([a0, a1], complex)

    def func(z):
        return np.real(z @ a)

    def jet(z):
        shape = z.shape[:-1]
        du = np.broadcast_to(a / 2, shape + (2,)).astype(complex)
        zero = np.zeros(shape + (2, 2), complex)
        return Jet2(z, func(z), du, zero, zero.copy())

    return ScalarField(f"re_linear({a0},{a1})", func, jet, psh=True)
