"""Complex Hopf coordinates on (C^2)*, Sasakian frames and coframes.

Principal chart (fibre angle theta of period 4 pi, zeta = z^1/z^0):

    z^0 = r e^{i theta/2} rho(zeta) / (1+|zeta|^2)^{1/2},  z^1 = zeta z^0,
    rho(zeta) = (conj(zeta)/|zeta|)^{1/2}  (principal root),

which is singular on the closed negative real axis of zeta.  Simple chart
(period 2 pi, zeta = z^0/z^1):

    z^0 = r e^{i theta'} zeta / (1+|zeta|^2)^{1/2},  z^1 = r e^{i theta'} / (1+|zeta|^2)^{1/2}.

Hopf partial derivatives are obtained from Cartesian Wirtinger jets by the
chain rule.  Every z^j is a product of exponentials, so the embedding
Jacobian is expressed through derivatives of log z^j and log conj(z^j).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ScalarField, norm, to_real
from .errors import ChartSingular

PRINCIPAL = "principal"
SIMPLE = "simple"


@dataclass(frozen=True)
class HopfPoint:
    r: np.ndarray
    theta: np.ndarray
    zeta: np.ndarray
    chart: str = PRINCIPAL


def _check_principal(zeta):
    zeta = np.asarray(zeta, complex)
    if np.any((zeta.imag == 0) & (zeta.real <= 0)):
        raise ChartSingular("principal chart excludes zeta on the closed negative real axis")
    return zeta


def embed_principal(r, theta, zeta) -> np.ndarray:
    zeta = _check_principal(zeta)
    q = 1 + np.abs(zeta) ** 2
    rho = np.exp(-0.5j * np.angle(zeta))
    z0 = r * np.exp(0.5j * np.asarray(theta)) * rho / np.sqrt(q)
    return np.stack(np.broadcast_arrays(z0, zeta * z0), axis=-1)


def embed_simple(r, theta, zeta) -> np.ndarray:
    zeta = np.asarray(zeta, complex)
    q = 1 + np.abs(zeta) ** 2
    z1 = r * np.exp(1j * np.asarray(theta)) / np.sqrt(q)
    return np.stack(np.broadcast_arrays(zeta * z1, z1), axis=-1)


def embed(p: HopfPoint) -> np.ndarray:
    if p.chart == PRINCIPAL:
        return embed_principal(p.r, p.theta, p.zeta)
    if p.chart == SIMPLE:
        return embed_simple(p.r, p.theta, p.zeta)
    raise ValueError(f"unknown chart {p.chart!r}")


def to_hopf(z, chart: str = PRINCIPAL) -> HopfPoint:
    z = np.asarray(z, complex)
    r = norm(z)
    if chart == PRINCIPAL:
        if np.any(z[..., 0] == 0):
            raise ChartSingular("principal chart needs z^0 != 0")
        zeta = _check_principal(z[..., 1] / z[..., 0])
        theta = np.mod(2 * np.angle(z[..., 0]) + np.angle(zeta), 4 * np.pi)
        return HopfPoint(r, theta, zeta, PRINCIPAL)
    if np.any(z[..., 1] == 0):
        raise ChartSingular("simple chart needs z^1 != 0")
    return HopfPoint(r, np.mod(np.angle(z[..., 1]), 2 * np.pi), z[..., 0] / z[..., 1], SIMPLE)


@dataclass(frozen=True)
class BasicH:
    h: np.ndarray
    h_zeta: np.ndarray
    h_zetazetabar: np.ndarray


def basic_h(zeta) -> BasicH:
    """h = log(1+|zeta|^2) - log|zeta| and its derivatives."""
    zeta = np.asarray(zeta, complex)
    if np.any(zeta == 0):
        raise ChartSingular("the basic function is singular at zeta = 0")
    q = 1 + np.abs(zeta) ** 2
    return BasicH(np.log(q) - np.log(np.abs(zeta)), np.conj(zeta) / q - 0.5 / zeta, 1 / q ** 2)


def _embed_derivs(chart: str, z, zeta):
    """First derivatives of z^j and conj z^j in t, theta, zeta, zetabar, and the mixed
    zeta-zetabar second derivative, each as a pair (of z, of conj z).

    Both charts are e^{t + i c theta} times a function of zeta, so t and theta
    derivatives are multiplications by 1 and i c.
    """
    zeta = np.asarray(zeta, complex)
    zb = np.conj(zeta)
    q = 1 + np.abs(zeta) ** 2
    zc = np.conj(z)
    if chart == PRINCIPAL:
        th = 0.5j
        # through log z^j, which is smooth off zeta = 0 in this chart
        lz0 = -0.25 / zeta - zb / (2 * q)
        lz = np.stack([lz0, lz0 + 1 / zeta], axis=-1)
        lzb0 = 0.25 / zb - zeta / (2 * q)
        lzb = np.stack([lzb0, lzb0], axis=-1)
        lzz = (-0.5 / q ** 2)[..., None]
        dz, dzb = z * lz, z * lzb
        mixed = z * (lz * lzb + lzz)
    elif chart == SIMPLE:
        th = 1j
        # z^0 = zeta z^1, z^1 = r e^{i theta} q^{-1/2}; direct, so zeta = 0 is regular
        z1 = z[..., 1]
        dz = np.stack([z1 * (1 - np.abs(zeta) ** 2 / (2 * q)), -zb / (2 * q) * z1], axis=-1)
        dzb = np.stack([-zeta ** 2 / (2 * q) * z1, -zeta / (2 * q) * z1], axis=-1)
        mixed = np.stack([zeta * z1 * (-np.abs(zeta) ** 2 - 4), z1 * (np.abs(zeta) ** 2 - 2)],
                         axis=-1) / (4 * q ** 2)[..., None]
    else:
        raise ValueError(f"unknown chart {chart!r}")
    first = {"t": (z, zc), "th": (th * z, -th * zc), "z": (dz, np.conj(dzb)), "zb": (dzb, np.conj(dz))}
    return first, (mixed, np.conj(mixed)), th


@dataclass(frozen=True)
class FrameJet:
    r: np.ndarray
    zeta: np.ndarray
    chart: str
    u: np.ndarray
    u_t: np.ndarray
    u_theta: np.ndarray
    u_tt: np.ndarray
    u_thetatheta: np.ndarray
    u_ttheta: np.ndarray
    u_zeta: np.ndarray
    u_zetazetabar: np.ndarray
    u_thetazeta: np.ndarray
    u_tzeta: np.ndarray
    rX0u: np.ndarray
    rX0bar_u: np.ndarray


def _first(jet, A, B):
    return np.sum(jet.du * A, axis=-1) + np.sum(np.conj(jet.du) * B, axis=-1)


def _second(jet, AD, BD, AE, BE, zDE, zbDE):
    H, Hol = jet.hess_h, jet.hess_hol
    out = np.einsum("...j,...jk,...k->...", AD, Hol, AE)
    out = out + np.einsum("...j,...jk,...k->...", AD, H, BE)
    out = out + np.einsum("...j,...kj,...k->...", BD, H, AE)
    out = out + np.einsum("...j,...jk,...k->...", BD, np.conj(Hol), BE)
    return out + _first(jet, zDE, zbDE)


def frame_apply(field: ScalarField, p: HopfPoint, engine: str = "auto") -> FrameJet:
    """All Hopf partials of u at p by the chain rule through the embedding."""
    z = embed(p)
    jet = field.jet(z, engine)
    first, mixed, th = _embed_derivs(p.chart, z, p.zeta)
    factor = {"t": (1.0, 1.0), "th": (th, -th)}

    def A(d):
        return first[d][0]

    def B(d):
        return first[d][1]

    def zz(d, e):
        # second derivatives of z and conj z
        if d in factor:
            d, e = e, d
        if e in factor:
            return factor[e][0] * A(d), factor[e][1] * B(d)
        if {d, e} == {"z", "zb"}:
            return mixed
        raise ValueError(f"second derivative {d}{e} is not used")

    def d2(d, e):
        return _second(jet, A(d), B(d), A(e), B(e), *zz(d, e))

    u_t = np.real(_first(jet, A("t"), B("t")))
    u_th = np.real(_first(jet, A("th"), B("th")))
    if p.chart == PRINCIPAL:
        rX0 = 0.5 * (u_t - 2j * u_th)
    else:
        rX0 = 0.5 * (u_t - 1j * u_th)
    return FrameJet(
        r=np.asarray(p.r, float), zeta=np.asarray(p.zeta, complex), chart=p.chart,
        u=jet.u, u_t=u_t, u_theta=u_th,
        u_tt=np.real(d2("t", "t")), u_thetatheta=np.real(d2("th", "th")),
        u_ttheta=np.real(d2("t", "th")),
        u_zeta=_first(jet, A("z"), B("z")),
        u_zetazetabar=np.real(d2("z", "zb")),
        u_thetazeta=d2("th", "z"), u_tzeta=d2("t", "z"),
        rX0u=rX0, rX0bar_u=np.conj(rX0),
    )


# ---- frames and coframes in Cartesian form (principal chart) ----

def frame_cartesian(z):
    """(X0 z, X1 z): the (1,0) frame applied to the coordinate functions."""
    z = np.asarray(z, complex)
    r = norm(z)[..., None]
    zeta = z[..., 1] / z[..., 0]
    q = 1 + np.abs(zeta) ** 2
    x1 = (z[..., 0] / q)[..., None] * np.stack([-np.conj(zeta), np.ones_like(zeta)], axis=-1)
    return z / r, x1


def frame_hopf_components(r, zeta):
    """Components of X0, X1, X0bar, X1bar in the basis (d_r, d_theta, d_x, d_y), zeta = x+iy."""
    r = np.asarray(r, float)
    hz = basic_h(zeta).h_zeta
    zero = np.zeros_like(hz)
    half = np.full_like(hz, 0.5)
    X0 = np.stack([half, -1j / r + zero, zero, zero], axis=-1)
    X1 = np.stack([zero, 1j * hz, half, -0.5j + zero], axis=-1)
    return {"0": X0, "1": X1, "0b": np.conj(X0), "1b": np.conj(X1)}


def coframe_cartesian(z):
    """lambda^0, lambda^1 = d zeta and conjugates as covectors on (x0, y0, x1, y1)."""
    z = np.asarray(z, complex)
    x = to_real(z)
    r = norm(z)[..., None]
    dr = x / r
    eta0 = np.stack([x[..., 1], -x[..., 0], x[..., 3], -x[..., 2]], axis=-1) / r ** 2
    lam0 = dr - 1j * r * eta0
    a = -z[..., 1] / z[..., 0] ** 2
    b = 1 / z[..., 0]
    lam1 = np.stack([a, 1j * a, b, 1j * b], axis=-1)
    return {"0": lam0, "1": lam1, "0b": np.conj(lam0), "1b": np.conj(lam1)}


def _hopf_real_map(P):
    return to_real(embed_principal(P[..., 0], P[..., 1], P[..., 2] + 1j * P[..., 3]))


def embedding_jacobian(r, theta, zeta, h: float = 1e-6):
    """d(x0,y0,x1,y1)/d(r,theta,x,y) by central differences, shape (..., 4, 4)."""
    P = np.stack(np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float),
                                     np.real(zeta), np.imag(zeta)), axis=-1)
    cols = []
    for a in range(4):
        e = np.zeros(4)
        e[a] = h
        cols.append((_hopf_real_map(P + e) - _hopf_real_map(P - e)) / (2 * h))
    return np.stack(cols, axis=-1)


def duality_defect(r, theta, zeta) -> float:
    """max |<lambda^A, X_B> - delta_AB| with frames pushed forward numerically."""
    z = embed_principal(r, theta, zeta)
    J = embedding_jacobian(r, theta, zeta)
    vec = frame_hopf_components(r, zeta)
    cov = coframe_cartesian(z)
    keys = ["0", "1", "0b", "1b"]
    worst = 0.0
    for i, a in enumerate(keys):
        for j, b in enumerate(keys):
            v = np.einsum("...ab,...b->...a", J, vec[b])
            pair = np.sum(cov[a] * v, axis=-1)
            worst = max(worst, float(np.max(np.abs(pair - (i == j)))))
    return worst


def reeb_defect(field: ScalarField, z) -> float:
    """|xi_0 u + 2 u_theta| with xi_0 = sum (y d/dx - x d/dy) applied to a Cartesian jet."""
    z = np.asarray(z, complex)
    x = to_real(z)
    xi = np.stack([x[..., 1], -x[..., 0], x[..., 3], -x[..., 2]], axis=-1)
    g = field.jet(z).real_gradient()
    xi_u = np.sum(xi * g, axis=-1)
    fj = frame_apply(field, to_hopf(z))
    return float(np.max(np.abs(xi_u + 2 * fj.u_theta)))


def chart_consistency(field: ScalarField, z) -> float:
    """Compare FrameJets of an S^1-invariant field in both charts at the same points.

    The fibre coordinate of the simple chart is theta' = theta/2 (up to a
    zeta-dependent shift) and the base coordinates are related by
    zeta_s = 1/zeta_p, so u_t agrees, u_{theta'} = 2 u_theta and
    u_{zeta_s zetabar_s} = u_{zeta_p zetabar_p} / |zeta_s|^4.
    """
    fp = frame_apply(field, to_hopf(z, PRINCIPAL))
    fs = frame_apply(field, to_hopf(z, SIMPLE))
    zs = fs.zeta
    diffs = [
        fp.u_t - fs.u_t,
        fp.u_tt - fs.u_tt,
        2 * fp.u_theta - fs.u_theta,
        fp.u_zetazetabar / np.abs(zs) ** 4 - fs.u_zetazetabar,
        -fp.u_zeta / zs ** 2 - fs.u_zeta,
        -fp.u_tzeta / zs ** 2 - fs.u_tzeta,
    ]
    return float(max(np.max(np.abs(d)) for d in diffs))


# ---- commutator harness in Hopf coordinates (r, theta, x, y) ----

_FD4 = ((-2, 1.0 / 12), (-1, -8.0 / 12), (1, 8.0 / 12), (2, -1.0 / 12))


def _partial(g, P, a, h):
    e = np.zeros(4)
    e[a] = h
    return sum(c * g(P + k * e) for k, c in _FD4) / h


def _vector(name, P):
    r, zeta = P[..., 0], P[..., 2] + 1j * P[..., 3]
    if name == "dr":
        return np.broadcast_to(np.array([1, 0, 0, 0], complex), P.shape)
    if name == "dtheta":
        return np.broadcast_to(np.array([0, 1, 0, 0], complex), P.shape)
    return frame_hopf_components(r, zeta)[name]


def _directional(g, name, P, h):
    V = _vector(name, P)
    return sum(V[..., a] * _partial(g, P, a, h) for a in range(4))


def commutator_selftest(field: ScalarField, samples: np.ndarray, h: float = 2e-3) -> dict:
    """Max defects of the frame commutator identities.

    samples: (N, 4) real array of (r, theta, x, y) principal-chart points.
    """
    P = np.asarray(samples, float)

    def U(Q):
        return field(embed_principal(Q[..., 0], Q[..., 1], Q[..., 2] + 1j * Q[..., 3]))

    def bracket(a, b):
        ab = _directional(lambda Q: _directional(U, b, Q, h), a, P, h)
        ba = _directional(lambda Q: _directional(U, a, Q, h), b, P, h)
        return ab - ba

    r, zeta = P[:, 0], P[:, 2] + 1j * P[:, 3]
    u_th = _partial(U, P, 1, h)
    xi0 = -2 * u_th
    hzz = basic_h(zeta).h_zetazetabar
    defects = {
        "X1_X1bar": bracket("1", "1b") - 1j * hzz * xi0,
        "X0_X0bar": bracket("0", "0b") + 1j * u_th / r ** 2,
        "X1_X0": bracket("1", "0"),
        "X1_dr": bracket("1", "dr"),
        "X1_dtheta": bracket("1", "dtheta"),
    }
    return {k: float(np.max(np.abs(v))) for k, v in defects.items()}


def random_hopf_samples(n: int, rng: np.random.Generator, r_range=(0.3, 0.9),
                        rho_range=(0.3, 3.0), phi_margin: float = 0.3) -> np.ndarray:
    """(n, 4) array of (r, theta, x, y) well inside the principal chart."""
    r = rng.uniform(*r_range, n)
    theta = rng.uniform(0, 4 * np.pi, n)
    rho = np.exp(rng.uniform(np.log(rho_range[0]), np.log(rho_range[1]), n))
    phi = rng.uniform(-np.pi + phi_margin, np.pi - phi_margin, n)
    zeta = rho * np.exp(1j * phi)
    return np.stack([r, theta, zeta.real, zeta.imag], axis=-1)
