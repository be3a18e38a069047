"""Lelong-type functionals sampled on deterministic grids.

Every supremum here is a maximum over finitely many sample points, hence a
lower bound for the true (essential) supremum.  Samples where u = -inf (the
unbounded locus, e.g. {z^0 = 0} for half_log) carry no derivative and are
skipped by taking nan-aware maxima.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from .catalog import CatalogEntry
from .core import Jet2, ScalarField, cx
from .errors import NonMonotone, NotSeparatedForm
from .mass import aitken
from .quad import QuadratureSpec, chunked_map, fsum_weighted, sphere_nodes
from .hopf import embed_principal

FD_STEP = 1e-4


def direction_grid(n_eta: int = 33, n_phi: int = 32) -> np.ndarray:
    """Unit vectors (cos(eta/2), sin(eta/2) e^{i phi}) with eta in [0, pi] including
    both poles (each pole appears once)."""
    eta = np.linspace(0.0, np.pi, n_eta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    dirs = [cx(1.0, 0.0)[None, :]]
    E, P = np.meshgrid(eta[1:-1], phi, indexing="ij")
    dirs.append(cx(np.cos(E / 2), np.sin(E / 2) * np.exp(1j * P)).reshape(-1, 2))
    dirs.append(cx(0.0, 1.0)[None, :])
    return np.concatenate(dirs)


def _nanmax(x) -> float:
    x = np.asarray(x, float)
    x = x[np.isfinite(x)]
    return float(np.max(x)) if x.size else float("nan")


# ---- spherical mean and maximum ----

def sphere_stats(field: ScalarField, r: float, spec: QuadratureSpec | None = None) -> dict:
    """S_u(r) = mean of u over S_r (uniform measure) and V_u(r) = max of u over S_r."""
    spec = spec or QuadratureSpec()
    n = sphere_nodes(spec, field.symmetry)
    vals = chunked_map(lambda t, z: field(embed_principal(r, t, z)), n.theta, n.zeta)
    S = fsum_weighted(vals, n.w) / fsum_weighted(np.ones_like(n.w), n.w)
    dense = sphere_nodes(spec.doubled())
    extra = field(r * direction_grid()[None, :, :] * np.exp(1j * np.linspace(0, 2 * np.pi, 16, endpoint=False))[:, None, None])
    V = max(_nanmax(vals), _nanmax(field(embed_principal(r, dense.theta, dense.zeta))), _nanmax(extra))
    return {"S_u": S, "V_u": V}


def lelong_number(field: ScalarField, A_ladder, spec: QuadratureSpec | None = None,
                  tol: float = 1e-9, strict: bool = True) -> dict:
    """Slopes of t -> S_u(e^t) between consecutive ladder points t = -A."""
    A = sorted(float(a) for a in A_ladder)
    if len(A) < 2:
        raise ValueError("need at least two ladder values")
    stats = [sphere_stats(field, math.exp(-a), spec) for a in A]
    S = [s["S_u"] for s in stats]
    V = [s["V_u"] for s in stats]
    # t decreases along the ladder; slope = (S(t_i) - S(t_{i+1})) / (t_i - t_{i+1})
    s_slope = [(S[i] - S[i + 1]) / (A[i + 1] - A[i]) for i in range(len(A) - 1)]
    v_slope = [(V[i] - V[i + 1]) / (A[i + 1] - A[i]) for i in range(len(A) - 1)]
    bad = [i for i in range(len(s_slope) - 1) if s_slope[i + 1] > s_slope[i] + tol]
    if bad and strict:
        raise NonMonotone(f"S_u slopes increase along the ladder at positions {bad}")
    return {"A": A, "S_u": S, "V_u": V, "S_slope": s_slope, "V_slope": v_slope,
            "nu_estimate": s_slope[-1], "nu_fit": aitken(s_slope)}


# ---- directional quantities ----

def _fibre_circle(n_s: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n_s) / n_s)


def directional_ladder(field: ScalarField, A: float, n_eta: int = 33, n_phi: int = 32,
                       n_s: int = 32, h: float = FD_STEP) -> dict:
    """M_A = max over directions of the forward t-derivative of the circle average of u
    on the line through the direction, at t = -A; N_A = max over directions of
    (-A)^{-1} max over the circle of u at radius e^{-A}."""
    w = direction_grid(n_eta, n_phi)
    circ = _fibre_circle(n_s)

    def g(t):
        pts = math.exp(t) * circ[None, :, None] * w[:, None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = field(pts)
        return vals

    t0 = -float(A)
    v0, v1, v2 = g(t0), g(t0 + h), g(t0 + 2 * h)
    with np.errstate(invalid="ignore"):
        slope = (-3 * v0.mean(axis=1) + 4 * v1.mean(axis=1) - v2.mean(axis=1)) / (2 * h)
        ratio = np.max(v0, axis=1) / t0
    return {"A": float(A), "M_A": _nanmax(slope), "N_A": _nanmax(ratio)}


def sample_ball(R: float, r_min: float | None = None, n_r: int = 12, n_eta: int = 33,
                n_phi: int = 32, n_s: int = 8) -> np.ndarray:
    """Deterministic sample of the closed shell r_min <= |z| <= R (|z| = R included)."""
    r_min = 1e-3 * R if r_min is None else r_min
    radii = np.geomspace(r_min, R, n_r)
    w = direction_grid(n_eta, n_phi)
    circ = _fibre_circle(n_s)
    pts = radii[:, None, None, None] * circ[None, :, None, None] * w[None, None, :, :]
    return pts.reshape(-1, 2)


def lipschitz_sup(field: ScalarField, R: float, r_min: float | None = None,
                  extra_points=None, **grid) -> float:
    """max |r u_r| over a deterministic sample of the closed ball of radius R."""
    z = sample_ball(R, r_min, **grid)
    if extra_points is not None:
        z = np.concatenate([z, np.asarray(extra_points, complex).reshape(-1, 2)])
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = chunked_map(lambda a, b: field.radial_derivative(np.stack([a, b], -1)), z[:, 0], z[:, 1])
    return _nanmax(np.abs(vals))


def lipschitz_ladder(field: ScalarField, A_values, **kw) -> list[float]:
    return [lipschitz_sup(field, math.exp(-a), **kw) for a in A_values]


def lipschitz_failure_point(n: int, k: int, r: float, arg_xi: float = 0.0) -> np.ndarray:
    """A point of the family |a| = (1 - 1/k) r^{n-1}, a = xi (1+|xi|^2)^{(n-1)/2},
    with the fibre angle chosen so that a and b = r^{n-1} e^{i(n-1)theta} align.

    Coordinates: z^0 = r e^{i theta}/(1+|xi|^2)^{1/2}, z^1 = xi z^0.
    """
    target = (1 - 1 / k) * r ** (n - 1)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * (1 + mid ** 2) ** ((n - 1) / 2) < target:
            lo = mid
        else:
            hi = mid
    xi = 0.5 * (lo + hi) * np.exp(1j * arg_xi)
    theta = arg_xi / (n - 1)
    z0 = r * np.exp(1j * theta) / np.sqrt(1 + abs(xi) ** 2)
    return cx(z0, xi * z0)


# ---- S^1 symmetrization ----

def symmetrize(field: ScalarField, n_theta: int = 64) -> tuple[ScalarField, ScalarField]:
    """u_s = circle average of u(e^{i s} z) by the periodic trapezoid rule, v = u - u_s."""
    rot = np.exp(2j * np.pi * np.arange(n_theta) / n_theta)

    def us(z):
        z = np.asarray(z, complex)
        return np.mean(field(rot[:, None, None] * z.reshape(1, -1, 2)), axis=0).reshape(z.shape[:-1])

    us_jet = None
    if field.has_analytic:
        def us_jet(z):
            z = np.asarray(z, complex)
            zs = rot.reshape((-1,) + (1,) * (z.ndim - 1) + (1,)) * z[None]
            j = field.jet_func(zs)
            e = rot.reshape((-1,) + (1,) * (z.ndim - 1))
            du = np.mean(j.du * e[..., None], axis=0)
            hol = np.mean(j.hess_hol * (e ** 2)[..., None, None], axis=0)
            return Jet2(z, np.mean(j.u, axis=0), du, np.mean(j.hess_h, axis=0), hol)

    u_s = ScalarField(f"sym[{field.name}]", us, us_jet, psh=field.psh, s1_invariant=True,
                      smooth=field.smooth)

    def v(z):
        return field(z) - us(z)

    v_jet = None
    if field.has_analytic:
        def v_jet(z):
            return field.jet_func(z) + us_jet(z).scaled(-1.0)

    return u_s, ScalarField(f"alt[{field.name}]", v, v_jet)


# ---- ladders and the separation bound ----

@dataclass
class LelongLadder:
    A_values: list
    S_slope: list
    V_slope: list
    M_A: list
    N_A: list
    L_A: list
    nu_estimate: float
    lambda_estimate: float
    kappa_estimate: float
    kappa_trend: float = float("nan")
    notes: list = dc_field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def lelong_ladder(field: ScalarField, A_values, spec: QuadratureSpec | None = None) -> LelongLadder:
    A = sorted(float(a) for a in A_values)
    notes = []
    try:
        ln = lelong_number(field, A, spec)
    except NonMonotone as exc:
        notes.append(str(exc))
        ln = lelong_number(field, A, spec, strict=False)
    u_s = field if field.s1_invariant else symmetrize(field)[0]
    M = [directional_ladder(u_s, a)["M_A"] for a in A]
    N = [directional_ladder(field, a)["N_A"] for a in A]
    L = lipschitz_ladder(field, A)
    return LelongLadder(A, ln["S_slope"], ln["V_slope"], M, N, L, ln["nu_estimate"], M[-1], L[-1],
                        aitken(L), notes)


@dataclass
class SeparationReport:
    K: float
    k: float
    A_values: list
    bound_lo: list
    bound_hi: list
    rv_r_min: list
    rv_r_max: list
    L_A: list
    finite_looking: bool
    satisfied: bool
    trivial: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def verify_separation(entry: CatalogEntry, A_ladder, tol: float = 1e-9) -> SeparationReport:
    """Check -max{M_A/K, N_A/k} <= r dv/dr <= max{N_A/K, M_A/k} on samples of B_{e^{-A}}."""
    sep = entry.separated
    if sep is None:
        raise NotSeparatedForm(f"{entry.name} carries no (f, v) structure")
    A = [float(a) for a in A_ladder]
    if sep.trivial:
        return SeparationReport(0.0, 0.0, A, [], [], [], [], [], True, True, trivial=True)
    fld = entry.field
    lo, hi, mins, maxs, L = [], [], [], [], []
    ok = True
    for a in A:
        R = math.exp(-a)
        M = directional_ladder(sep.u_s, a)["M_A"]
        N = directional_ladder(fld, a)["N_A"]
        b_lo = -max(M / sep.K, N / sep.k)
        b_hi = max(N / sep.K, M / sep.k)
        rv = sep.rv_r(sample_ball(R))
        lo.append(b_lo)
        hi.append(b_hi)
        mins.append(float(np.min(rv)))
        maxs.append(float(np.max(rv)))
        ok = ok and mins[-1] >= b_lo - tol and maxs[-1] <= b_hi + tol
        L.append(lipschitz_sup(fld, R))
    order = np.argsort(A)
    Ls = np.array(L)[order]
    finite = bool(np.all(np.isfinite(Ls)) and np.all(np.diff(Ls) <= 1e-9 + 1e-9 * np.abs(Ls[:-1])))
    return SeparationReport(sep.K, sep.k, A, lo, hi, mins, maxs, L, finite, bool(ok))
