"""Standard mollification u_eps = u * rho_eps and its numerical checks.

The kernel is rho(y) = c_m (1 - |y|^2)^m on the unit ball of R^4 with
c_m = (m + 1)(m + 2) / pi^2.  Its integral is computed with a product rule:
Gauss-Legendre in s = |y| against s^3 ds, and on S^3 the coordinates

    y = (sqrt(1 - w) e^{i a}, sqrt(w) e^{i b}),   d sigma = (1/2) dw da db,

with Gauss-Legendre in w and the periodic trapezoid rule in a and b.
Derivatives of u_eps are moved onto the kernel:

    grad u_eps(p) = eps^-1 int u(p - eps y) grad rho(y) dy
    hess u_eps(p) = eps^-2 int u(p - eps y) hess rho(y) dy

so u itself is only ever evaluated, never differentiated.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .core import ScalarField, norm, to_real, wirtinger_from_real
from .errors import BadParams, OutsideDomain
from .lelong import lipschitz_sup
from .quad import (QuadratureSpec, SphereNodes, ball_nodes, chunked_map, fsum_weighted,
                   gauss_legendre)
from .mass import ma_boundary

POINT_CHUNK = 64


@dataclass(frozen=True)
class MollifierSpec:
    epsilon: float
    kernel_order: int = 3
    n_kernel_nodes: int = 7

    def __post_init__(self):
        if not self.epsilon > 0:
            raise BadParams("epsilon must be positive")
        if self.kernel_order < 2:
            raise BadParams("kernel_order must be at least 2 for a C^2 mollification")
        if self.n_kernel_nodes < 2:
            raise BadParams("n_kernel_nodes must be at least 2")


def kernel_constant(m: int) -> float:
    return (m + 1) * (m + 2) / math.pi ** 2


@dataclass(frozen=True)
class KernelRule:
    y: np.ndarray  # (N, 2) complex nodes in the unit ball
    w: np.ndarray  # rho(y) dy
    gw: np.ndarray  # (N, 4) grad rho(y) dy
    hw: np.ndarray  # (N, 4, 4) hess rho(y) dy
    base: np.ndarray  # dy alone


@lru_cache(maxsize=16)
def kernel_rule(order: int = 3, n: int = 7) -> KernelRule:
    c = kernel_constant(order)
    s, ws = gauss_legendre(n, 0.0, 1.0)
    w, ww = gauss_legendre(n, 0.0, 1.0)
    ang = 2 * np.pi * np.arange(n) / n
    S, W, A, B = np.meshgrid(s, w, ang, ang, indexing="ij")
    base = np.einsum("i,j->ij", ws * s ** 3, ww)[:, :, None, None] * 0.5 * (2 * np.pi / n) ** 2
    base = np.broadcast_to(base, S.shape).ravel()
    S, W, A, B = S.ravel(), W.ravel(), A.ravel(), B.ravel()
    y = np.stack([S * np.sqrt(1 - W) * np.exp(1j * A), S * np.sqrt(W) * np.exp(1j * B)], axis=-1)
    yr = to_real(y)
    q = 1 - S ** 2
    rho = c * q ** order
    g1 = -2 * order * c * q ** (order - 1)
    g2 = 4 * order * (order - 1) * c * q ** (order - 2)
    grad = g1[:, None] * yr
    hess = g1[:, None, None] * np.eye(4) + g2[:, None, None] * yr[:, :, None] * yr[:, None, :]
    return KernelRule(y, rho * base, grad * base[:, None], hess * base[:, None, None], base)


def kernel_mass(spec: MollifierSpec) -> float:
    return math.fsum(kernel_rule(spec.kernel_order, spec.n_kernel_nodes).w.tolist())


def _check_domain(field: ScalarField, p, eps: float):
    if np.any(norm(p) + eps >= field.domain_radius):
        raise OutsideDomain(f"ball of radius {eps} around a point leaves the domain of {field.name}")


def _convolve(field: ScalarField, p, spec: MollifierSpec, derivs: bool):
    """Kernel sums at points p (..., 2): value and optionally gradient and Hessian."""
    p = np.asarray(p, complex)
    eps = spec.epsilon
    _check_domain(field, p, eps)
    k = kernel_rule(spec.kernel_order, spec.n_kernel_nodes)
    flat = p.reshape(-1, 2)

    def run(a, b):
        pts = np.stack([a, b], -1)[:, None, :] - eps * k.y[None, :, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.asarray(field(pts), float)
        u = np.where(np.isfinite(u), u, 0.0) if np.any(np.isneginf(u)) else u
        # einsum without BLAS keeps each sum independent of thread scheduling
        out = [np.einsum("pn,n->p", u, k.w)]
        if derivs:
            out.append(np.einsum("pn,na->pa", u, k.gw) / eps)
            out.append(np.einsum("pn,nab->pab", u, k.hw) / eps ** 2)
        return np.concatenate([o.reshape(len(a), -1) for o in out], axis=1)

    res = chunked_map(run, flat[:, 0], flat[:, 1], chunk=POINT_CHUNK)
    shape = p.shape[:-1]
    val = res[:, 0].reshape(shape)
    if not derivs:
        return val
    return val, res[:, 1:5].reshape(shape + (4,)), res[:, 5:].reshape(shape + (4, 4))


def mollified_eval(field: ScalarField, p, spec: MollifierSpec) -> np.ndarray:
    """(u * rho_eps)(p) by the product kernel rule.

    Kernel nodes where u = -inf (a null set of the kernel ball, e.g. an exact
    hit of {z^0 = 0}) would make the sum -inf; they are dropped instead.
    """
    return _convolve(field, p, spec, derivs=False)


def mollify(field: ScalarField, spec: MollifierSpec) -> ScalarField:
    """u_eps as a ScalarField with kernel-derivative jets.

    Declared symmetries are kept: the exact convolution inherits them and the
    discrete kernel rule breaks them only at the level of its quadrature error.
    """
    def func(z):
        return _convolve(field, z, spec, derivs=False)

    def jet(z):
        z = np.asarray(z, complex)
        u, g, h = _convolve(field, z, spec, derivs=True)
        return wirtinger_from_real(z, u, g, h)

    return ScalarField(f"moll[{field.name},eps={spec.epsilon:g}]", func, jet, psh=field.psh,
                       s1_invariant=field.s1_invariant, smooth=True,
                       domain_radius=field.domain_radius - spec.epsilon, symmetry=field.symmetry)


# ---- Friedrichs-type commutator ----

def _real_gradient_fd(field: ScalarField, z, h: float = 1e-6) -> np.ndarray:
    x = to_real(z)
    g = np.empty(x.shape)
    for a in range(4):
        e = np.zeros(4)
        e[a] = h
        zp = x + e
        zm = x - e
        g[..., a] = (field(zp[..., 0::2] + 1j * zp[..., 1::2]) - field(zm[..., 0::2] + 1j * zm[..., 1::2])) / (2 * h)
    return g


def gradient_l1(field: ScalarField, radius: float, spec: QuadratureSpec | None = None) -> float:
    """||grad u||_{L^1(B_radius)} by ball quadrature with central differences."""
    spec = spec or QuadratureSpec(16, 16, 16, 16)
    z, w = ball_nodes(radius, 0.0, spec)

    def dens(a, b):
        return np.linalg.norm(_real_gradient_fd(field, np.stack([a, b], -1)), axis=-1)

    return fsum_weighted(chunked_map(dens, z[:, 0], z[:, 1]), w)


@dataclass(frozen=True)
class FriedrichsRecord:
    defect: float
    bound: float
    lhs: float
    rhs: float
    holds: bool


def friedrichs_check(field: ScalarField, p, spec: MollifierSpec, delta: float = 0.05,
                     grad_l1: float | None = None, h: float = 1e-4, tol: float = 1e-8) -> list[FriedrichsRecord]:
    """|r d_r(u_eps) - r ((d_r u) * rho_eps)| against 2 eps ||grad u||_{L^1(B_{1-delta})}.

    The outer radial derivative is a log-radial central difference of u_eps;
    the inner one is taken pointwise before convolving.
    """
    p = np.asarray(p, complex).reshape(-1, 2)
    if grad_l1 is None:
        grad_l1 = gradient_l1(field, 1.0 - delta)
    bound = 2 * spec.epsilon * grad_l1
    lhs = (mollified_eval(field, p * math.exp(h), spec) - mollified_eval(field, p * math.exp(-h), spec)) / (2 * h)
    r = norm(p)

    def d_r(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return field.radial_derivative(z) / norm(z)

    inner = ScalarField("d_r", d_r, domain_radius=field.domain_radius)
    rhs = r * mollified_eval(inner, p, spec)
    out = []
    for a, b in zip(lhs, rhs):
        d = abs(a - b)
        out.append(FriedrichsRecord(float(d), float(bound), float(a), float(b), bool(d <= bound + tol)))
    return out


# ---- stability of the directional Lipschitz constant ----

MOLLIFIED_GRID = dict(n_r=6, n_eta=9, n_phi=8, n_s=4)


@dataclass
class StabilityTable:
    A: float
    eps: list
    L_u: float
    L_eps: list
    diff: list
    C_fit: float
    holds: bool
    monotone: bool

    def as_dict(self) -> dict:
        return asdict(self)


def lipschitz_stability_check(field: ScalarField, A: float, eps_ladder, n_kernel: int = 7,
                              grid: dict | None = None, tol: float = 1e-9) -> StabilityTable:
    """L_A(u_eps) - L_A(u) over an eps ladder against the line C eps.

    C is the least-squares slope through the origin (clipped at 0).  The
    check fails when some rung lies above that line, which is what happens
    when the difference decays slower than linearly as eps -> 0.
    """
    grid = grid or MOLLIFIED_GRID
    R = math.exp(-A)
    base = lipschitz_sup(field, R, **grid)
    eps = sorted(float(e) for e in eps_ladder)
    L = [lipschitz_sup(mollify(field, MollifierSpec(e, n_kernel_nodes=n_kernel)), R, **grid) for e in eps]
    diff = [l - base for l in L]
    e = np.array(eps)
    d = np.array(diff)
    C = float(max(0.0, (e @ d) / (e @ e)))
    holds = all(x <= C * y + tol for x, y in zip(diff, eps))
    mono = bool(np.all(np.diff(d) >= -1e-9) or np.all(np.diff(d) <= 1e-9))
    return StabilityTable(float(A), eps, base, L, diff, C, holds, mono)


# ---- mollified mass of a field with a kink ----

def _dilate(mask: np.ndarray, k: int) -> np.ndarray:
    """Grow a boolean (theta, eta) grid by k cells; theta is periodic."""
    out = mask.copy()
    for _ in range(k):
        grown = out | np.roll(out, 1, 0) | np.roll(out, -1, 0)
        grown[:, 1:] |= out[:, :-1]
        grown[:, :-1] |= out[:, 1:]
        out = grown
    return out


def kink_sphere_rule(base: ScalarField, eps: float, m: int = 6, margin: float = 3.0,
                     leaf: float = 1.0, coarse: tuple[int, int] = (16, 8)):
    """Quadtree sphere rule for a mollified field whose base has a kink level set.

    Works in the phi = 0 slice (a symmetry reduction is required), where the
    metric of S_R is (R/2)^2 (d theta^2 + d eta^2).  The kink set is located on
    a probe grid; cells closer than margin * eps to it are split until their
    side is at most leaf * eps, all others keep the coarse size.  Each leaf
    carries an m x m Gauss-Legendre rule.
    """
    if base.kink is None or base.symmetry is None or base.symmetry[0] == base.symmetry[1]:
        raise BadParams("kink rule needs a kink level function and a symmetry reduction")

    def rule(R: float, spec: QuadratureSpec) -> SphereNodes:
        step = 0.5 * eps / (R / 2)  # probe spacing in parameter units
        nt = int(np.ceil(4 * np.pi / step))
        ne = int(np.ceil(np.pi / step))
        tp = (np.arange(nt) + 0.5) * 4 * np.pi / nt
        ep = (np.arange(ne) + 0.5) * np.pi / ne
        T, E = np.meshgrid(tp, ep, indexing="ij")
        z = np.stack([R * np.cos(E / 2) * np.exp(0.5j * T), R * np.sin(E / 2) * np.exp(0.5j * T)], -1)
        with np.errstate(invalid="ignore"):
            sgn = np.sign(base.kink(z))
        hit = np.zeros_like(sgn, dtype=bool)
        flip_t = sgn != np.roll(sgn, -1, 0)
        hit |= flip_t | np.roll(flip_t, 1, 0)
        flip_e = sgn[:, 1:] != sgn[:, :-1]
        hit[:, 1:] |= flip_e
        hit[:, :-1] |= flip_e
        near = _dilate(hit, int(np.ceil(margin * eps / (R / 2) / (4 * np.pi / nt))) + 1)
        near_cum = np.pad(np.cumsum(np.cumsum(near, 0), 1), ((1, 0), (1, 0)))

        def is_near(t0, t1, e0, e1):
            i0, i1 = int(np.floor(t0 / (4 * np.pi) * nt)), int(np.ceil(t1 / (4 * np.pi) * nt))
            j0, j1 = int(np.floor(e0 / np.pi * ne)), int(np.ceil(e1 / np.pi * ne))
            i1, j1 = min(i1, nt), min(j1, ne)
            return near_cum[i1, j1] - near_cum[i0, j1] - near_cum[i1, j0] + near_cum[i0, j0] > 0

        target = leaf * eps / (R / 2)
        cells = [(4 * np.pi * i / coarse[0], 4 * np.pi * (i + 1) / coarse[0],
                  np.pi * j / coarse[1], np.pi * (j + 1) / coarse[1])
                 for i in range(coarse[0]) for j in range(coarse[1])]
        leaves = []
        while cells:
            t0, t1, e0, e1 = cells.pop()
            if max(t1 - t0, e1 - e0) > target and is_near(t0, t1, e0, e1):
                tm, em = 0.5 * (t0 + t1), 0.5 * (e0 + e1)
                if t1 - t0 >= e1 - e0:
                    cells += [(t0, tm, e0, e1), (tm, t1, e0, e1)]
                else:
                    cells += [(t0, t1, e0, em), (t0, t1, em, e1)]
            else:
                leaves.append((t0, t1, e0, e1))
        leaves.sort()
        x, w = np.polynomial.legendre.leggauss(m)
        L = np.array(leaves)
        ht, he = 0.5 * (L[:, 1] - L[:, 0]), 0.5 * (L[:, 3] - L[:, 2])
        th = (L[:, 0] + ht)[:, None, None] + ht[:, None, None] * x[None, :, None]
        et = (L[:, 2] + he)[:, None, None] + he[:, None, None] * x[None, None, :]
        W = (ht * he)[:, None, None] * w[None, :, None] * w[None, None, :] * 2 * np.pi
        th, et = np.broadcast_arrays(th, et)
        th, et, W = th.ravel(), et.ravel(), W.ravel()
        P = np.zeros_like(th)
        return SphereNodes(th, et, P, np.tan(et / 2) + 0j, W * np.sin(et) / 4, W)

    return rule


@dataclass
class MassLadder:
    R: float
    eps: list
    mass: list
    rel_steps: list
    cauchy: bool
    tol: float
    # first-order Richardson value 2 m(eps_min) - m(2 eps_min) when the last two rungs halve
    extrapolated: float = float("nan")

    def as_dict(self) -> dict:
        return asdict(self)


def mollified_mass_ladder(field: ScalarField, R: float, eps_ladder=(0.04, 0.02, 0.01),
                          n_kernel: int = 7, spec: QuadratureSpec | None = None,
                          tol: float = 5e-3) -> MassLadder:
    """Boundary-route mass of u_eps on B_R along an eps ladder; Cauchy means each
    consecutive relative change is within tol."""
    spec = spec or QuadratureSpec(n_eta=24)
    eps = sorted((float(e) for e in eps_ladder), reverse=True)
    masses = []
    for e in eps:
        mf = mollify(field, MollifierSpec(e, n_kernel_nodes=n_kernel))
        if field.kink is not None:
            mf.sphere_rule = kink_sphere_rule(field, e)
        masses.append(ma_boundary(mf, R, spec))
    steps = [abs(masses[i + 1] - masses[i]) / abs(masses[i + 1]) for i in range(len(masses) - 1)]
    extra = float("nan")
    if len(eps) >= 2 and abs(eps[-2] - 2 * eps[-1]) < 1e-12:
        extra = 2 * masses[-1] - masses[-2]
    return MassLadder(float(R), eps, masses, steps, all(s <= tol for s in steps), tol, extra)
