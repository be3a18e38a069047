"""Deterministic product quadrature on CP^1, S^3_R and B_R.

The sphere rule is the Hopf product: periodic trapezoid in the fibre angle
theta over [0, 4pi), Gauss-Legendre in the Euler angle eta on (0, pi) and a
midpoint trapezoid in phi.  phi nodes sit at -pi + (j + 1/2) 2pi/n so that no
node lands on the principal-chart cut phi = pi.

Node values may be computed by a thread pool; sums always go through
``math.fsum``, which is exactly rounded and therefore order independent.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import BadParams, NodeSingular
from .hopf import embed_principal

CHUNK = 8192


@dataclass(frozen=True)
class QuadratureSpec:
    n_theta: int = 32
    n_eta: int = 32
    n_phi: int = 32
    n_radial: int = 16

    def __post_init__(self):
        for key in ("n_theta", "n_eta", "n_phi", "n_radial"):
            if int(getattr(self, key)) < 4:
                raise BadParams(f"{key} must be at least 4")
        if self.n_theta % 2:
            raise BadParams("n_theta must be even")

    def doubled(self) -> "QuadratureSpec":
        return replace(self, n_theta=2 * self.n_theta, n_eta=2 * self.n_eta,
                       n_phi=2 * self.n_phi, n_radial=2 * self.n_radial)


def worker_count() -> int:
    n = os.cpu_count() or 1
    cap = os.environ.get("PSH_LAB_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def chunked_map(func, *arrays, chunk: int = CHUNK) -> np.ndarray:
    """Apply a vectorised func over flat arrays in fixed-size chunks.

    Chunk boundaries do not depend on the worker count, so results are
    identical for any number of threads.
    """
    n = len(arrays[0])
    starts = list(range(0, n, chunk))

    def run(s):
        return np.asarray(func(*(a[s:s + chunk] for a in arrays)))

    workers = worker_count()
    if workers == 1 or len(starts) == 1:
        parts = [run(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, starts))
    return np.concatenate(parts) if parts else np.zeros(0)


def fsum_weighted(values: np.ndarray, weights: np.ndarray) -> float:
    v = np.asarray(values, float)
    if not np.all(np.isfinite(v)):
        bad = int(np.count_nonzero(~np.isfinite(v)))
        raise NodeSingular(f"integrand is not finite at {bad} quadrature node(s)")
    return math.fsum((v * weights).tolist())


def gauss_legendre(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def theta_nodes(n: int):
    return 4 * np.pi * np.arange(n) / n, np.full(n, 4 * np.pi / n)


def phi_nodes(n: int):
    return -np.pi + (np.arange(n) + 0.5) * 2 * np.pi / n, np.full(n, 2 * np.pi / n)


def zeta_from_euler(eta, phi):
    return np.tan(eta / 2) * np.exp(1j * phi)


@dataclass(frozen=True)
class CP1Nodes:
    eta: np.ndarray
    phi: np.ndarray
    zeta: np.ndarray
    w: np.ndarray  # weights for omega_FS = (sin eta / 4) d eta d phi


def cp1_nodes(spec: QuadratureSpec) -> CP1Nodes:
    e, we = gauss_legendre(spec.n_eta, 0.0, np.pi)
    p, wp = phi_nodes(spec.n_phi)
    E, P = np.meshgrid(e, p, indexing="ij")
    W = np.outer(we * np.sin(e) / 4, wp)
    E, P, W = E.ravel(), P.ravel(), W.ravel()
    return CP1Nodes(E, P, zeta_from_euler(E, P), W)


@dataclass(frozen=True)
class SphereNodes:
    theta: np.ndarray
    eta: np.ndarray
    phi: np.ndarray
    zeta: np.ndarray
    w: np.ndarray  # weights for d theta ^ omega_FS (total 4 pi^2)
    w_raw: np.ndarray  # weights for d theta d eta d phi

    def area_weights(self, R: float) -> np.ndarray:
        """Weights for the Euclidean area of S^3_R (total 2 pi^2 R^3)."""
        return self.w * R ** 3 / 2


@dataclass(frozen=True)
class QuadFocus:
    """Where the integrand on S_R concentrates, in the phi = 0 slice."""

    thetas: tuple[float, ...]
    eta: float
    w_theta: float
    w_eta: float


def graded_rule(a: float, b: float, c: float, h0: float, m: int = 10, growth: float = 2.0):
    """Composite Gauss-Legendre on [a, b] with panels growing geometrically away from c."""
    edges = [c]
    h = h0
    while edges[-1] < b:
        edges.append(min(edges[-1] + h, b))
        h *= growth
    left = [c]
    h = h0
    while left[-1] > a:
        left.append(max(left[-1] - h, a))
        h *= growth
    edges = np.array(left[::-1][:-1] + edges)
    x, w = np.polynomial.legendre.leggauss(m)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    weights = 0.5 * (hi - lo) * w
    return nodes.ravel(), weights.ravel()


def graded_periodic(centers, period: float, h0: float, m: int = 10):
    """Graded rule on one period, refined around each centre (centres sorted)."""
    c = np.sort(np.mod(np.asarray(centers, float), period))
    nodes, weights = [], []
    for i, ci in enumerate(c):
        prev = c[i - 1] - (period if i == 0 else 0.0)
        nxt = c[i + 1] if i + 1 < len(c) else c[0] + period
        x, w = graded_rule(0.5 * (prev + ci), 0.5 * (ci + nxt), ci, h0, m)
        nodes.append(x)
        weights.append(w)
    return np.mod(np.concatenate(nodes), period), np.concatenate(weights)


def sphere_nodes(spec: QuadratureSpec, symmetry: tuple[int, int] | None = None,
                 focus: QuadFocus | None = None) -> SphereNodes:
    """Hopf product nodes on S^3.

    ``symmetry = (a, b)`` with a != b declares the integrand invariant under
    (z0, z1) -> (e^{ias} z0, e^{ibs} z1), which in principal coordinates is the
    shift (theta, phi) -> (theta + (a+b)s, phi + (b-a)s).  Every phi-slice is
    then a theta-translate of the phi = 0 slice, so phi collapses to one node
    of weight 2 pi.  ``focus`` (only with a symmetry) replaces the theta and
    eta rules by graded rules around the given concentration point.
    """
    reduce = symmetry is not None and symmetry[0] != symmetry[1]
    if focus is not None and not reduce:
        raise BadParams("a focused sphere rule needs a symmetry reduction")
    if focus is None:
        th, wt = theta_nodes(spec.n_theta)
        e, we = gauss_legendre(spec.n_eta, 0.0, np.pi)
    else:
        th, wt = graded_periodic(focus.thetas, 4 * np.pi, focus.w_theta / 4)
        e, we = graded_rule(0.0, np.pi, focus.eta, focus.w_eta / 4)
    if reduce:
        p, wp = np.zeros(1), np.full(1, 2 * np.pi)
    else:
        p, wp = phi_nodes(spec.n_phi)
    T, E, P = np.meshgrid(th, e, p, indexing="ij")
    W = wt[:, None, None] * we[None, :, None] * wp[None, None, :]
    T, E, P, W = T.ravel(), E.ravel(), P.ravel(), W.ravel()
    return SphereNodes(T, E, P, zeta_from_euler(E, P), W * np.sin(E) / 4, W)


def integrate_cp1(g, spec: QuadratureSpec) -> float:
    """Integral of g(zeta) against omega_FS (total mass pi)."""
    nodes = cp1_nodes(spec)
    vals = chunked_map(g, nodes.zeta)
    return fsum_weighted(vals, nodes.w)


def integrate_sphere(g, R: float, spec: QuadratureSpec, measure: str = "fs") -> float:
    """Integral of g(theta, zeta) over S^3_R in principal Hopf coordinates.

    measure="fs" uses d theta ^ omega_FS; measure="area" the Euclidean area.
    """
    nodes = sphere_nodes(spec)
    vals = chunked_map(g, nodes.theta, nodes.zeta)
    if measure == "fs":
        w = nodes.w
    elif measure == "area":
        w = nodes.area_weights(R)
    else:
        raise BadParams(f"unknown measure {measure!r}")
    return fsum_weighted(vals, w)


def ball_nodes(R: float, r_min: float, spec: QuadratureSpec, symmetry: tuple[int, int] | None = None):
    """Cartesian nodes and Euclidean volume weights for B_R minus B_{r_min}."""
    rr, wr = gauss_legendre(spec.n_radial, r_min, R)
    sn = sphere_nodes(spec, symmetry)
    z = embed_principal(rr[:, None], sn.theta[None, :], sn.zeta[None, :])
    w = (wr * rr ** 3)[:, None] * (sn.w / 2)[None, :]
    return z.reshape(-1, 2), w.ravel()


def integrate_ball(density, R: float, r_min: float, spec: QuadratureSpec) -> float:
    """Integral of density(z) over the shell r_min < |z| < R."""
    if not 0 <= r_min < R:
        raise BadParams("need 0 <= r_min < R")
    z, w = ball_nodes(R, r_min, spec)
    vals = chunked_map(lambda a, b: density(np.stack([a, b], axis=-1)), z[:, 0], z[:, 1])
    return fsum_weighted(vals, w)
