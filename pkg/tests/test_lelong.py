import math

import numpy as np
import pytest

from pshlab.catalog import make_entry
from pshlab.core import ScalarField, cx, norm
from pshlab.errors import NotSeparatedForm
from pshlab.hessian import random_annulus_points
from pshlab.lelong import (direction_grid, directional_ladder, lelong_ladder, lelong_number, lipschitz_failure_point,
                           lipschitz_ladder, lipschitz_sup, sample_ball, sphere_stats, symmetrize,
                           verify_separation)
from pshlab.mass import PI2, ma_boundary

import oracles

LOG = make_entry("log_norm").field
QUAD = make_entry("quad").field
HALF = make_entry("half_log").field


def test_sphere_stats_constant_on_spheres():
    for r in (0.05, 0.3, 0.8):
        s = sphere_stats(LOG, r)
        assert s["S_u"] == pytest.approx(math.log(r), abs=1e-12)
        assert s["V_u"] == pytest.approx(math.log(r), abs=1e-12)
        q = sphere_stats(QUAD, r)
        assert q["S_u"] == pytest.approx(r * r / 2, rel=1e-12)


def test_sphere_stats_sym_plus_re():
    r = 0.4
    s = sphere_stats(make_entry("sym_plus_re").field, r)
    assert s["V_u"] == pytest.approx(math.log(r) + r, abs=1e-9)
    assert s["S_u"] == pytest.approx(math.log(r), abs=1e-12)


@pytest.mark.parametrize("A", [2, 4, 8, 16])
def test_half_log_sphere_mean(A):
    s = sphere_stats(HALF, math.exp(-A))
    assert s["S_u"] == pytest.approx(oracles.half_log_sphere_mean(A), abs=1e-6)
    assert s["V_u"] == pytest.approx(-math.sqrt(2 * A), rel=1e-12)


def test_lelong_number_exact_cases():
    assert lelong_number(LOG, [1, 2, 3, 4])["nu_estimate"] == pytest.approx(1.0, abs=1e-8)
    assert abs(lelong_number(QUAD, [8, 10, 12, 14])["nu_estimate"]) <= 1e-8


def test_lelong_number_half_log_slopes():
    # slopes follow the Laguerre oracle and decay towards zero
    A = [4, 8, 12, 16]
    ln = lelong_number(HALF, A)
    ref = [(oracles.half_log_sphere_mean(b) - oracles.half_log_sphere_mean(a)) / (a - b)
           for a, b in zip(A, A[1:])]
    assert np.allclose(ln["S_slope"], ref, atol=1e-6)
    assert all(b < a for a, b in zip(ln["S_slope"], ln["S_slope"][1:]))


def test_lelong_number_needs_two_values():
    with pytest.raises(ValueError):
        lelong_number(LOG, [4])


@pytest.mark.parametrize("name", ["log_norm", "quad", "half_log", "sym_plus_re"])
def test_sphere_stats_convex_in_t(name):
    fld = make_entry(name).field
    t = -np.linspace(1.0, 5.0, 9)
    st = [sphere_stats(fld, math.exp(x)) for x in t]
    for key in ("S_u", "V_u"):
        y = np.array([s[key] for s in st])
        # increasing in t (t decreasing along the array)
        assert np.all(np.diff(y) <= 1e-9)
        assert np.all(y[1:-1] <= 0.5 * (y[:-2] + y[2:]) + 1e-9)


def test_directional_log_norm():
    for A in (1.0, 3.0, 6.0):
        d = directional_ladder(LOG, A)
        assert d["M_A"] == pytest.approx(1.0, abs=1e-8)
        assert d["N_A"] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("A", [2.0, 4.0, 9.0, 16.0])
def test_directional_half_log(A):
    d = directional_ladder(HALF, A)
    assert d["M_A"] == pytest.approx(oracles.half_log_M(A), rel=1e-6)
    assert d["N_A"] >= d["M_A"]


def test_N_dominates_M_after_normalisation():
    # with sup u = -1 on the unit ball the bound holds for the quadratic too
    shifted = ScalarField("quad-3/2", lambda z: QUAD(z) - 1.5, s1_invariant=True)
    for A in (1.0, 2.0, 4.0):
        d = directional_ladder(shifted, A)
        assert d["N_A"] >= d["M_A"]


@pytest.mark.parametrize("name", ["log_norm", "quad", "half_log", "sym_plus_re"])
def test_ladders_non_increasing(name):
    fld = make_entry(name).field
    A = [1.0, 2.0, 4.0, 8.0]
    M = [directional_ladder(symmetrize(fld)[0] if not fld.s1_invariant else fld, a)["M_A"] for a in A]
    L = lipschitz_ladder(fld, A)
    assert all(b <= a + 1e-9 for a, b in zip(M, M[1:]))
    assert all(b <= a + 1e-9 for a, b in zip(L, L[1:]))
    # N_A of the unnormalised quadratic is negative and rises to 0; see the normalised test above
    if fld.psh and name != "quad":
        N = [directional_ladder(fld, a)["N_A"] for a in A]
        assert all(b <= a + 1e-9 for a, b in zip(N, N[1:]))


def test_lipschitz_log_norm():
    assert lipschitz_sup(LOG, 0.5) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("name", ["log_norm", "quad", "half_log"])
def test_lipschitz_equals_M_for_invariant(name):
    fld = make_entry(name).field
    for A in (2.0, 4.0):
        assert abs(lipschitz_sup(fld, math.exp(-A)) - directional_ladder(fld, A)["M_A"]) <= 1e-3


@pytest.mark.parametrize("k", [10, 25, 50])
def test_lipschitz_failure_family(k):
    fld = make_entry("one_n_symm", {"n": 2}).field
    z = lipschitz_failure_point(2, k, 1e-3)
    val = float(fld.radial_derivative(z[None, :])[0])
    ref = oracles.one_n_symm_radial(2, z)
    assert val == pytest.approx(ref, rel=1e-8)
    assert abs(val) >= (k - 1) / 2 - 1e-2
    # the sampled sup including the family point inherits the blow-up
    assert lipschitz_sup(fld, 2e-3, extra_points=z) >= (k - 1) / 2 - 1e-2


def test_failure_point_geometry():
    z = lipschitz_failure_point(3, 20, 1e-2)
    assert float(norm(z)) == pytest.approx(1e-2, rel=1e-12)
    xi = z[1] / z[0]
    a = abs(xi) * (1 + abs(xi) ** 2)
    assert a == pytest.approx((1 - 1 / 20) * 1e-4, rel=1e-10)


def test_symmetrize_sym_plus_re():
    us, v = symmetrize(make_entry("sym_plus_re").field)
    z = random_annulus_points(50, np.random.default_rng(31))
    assert np.max(np.abs(us(z) - LOG(z))) <= 1e-10
    assert np.max(np.abs(v(z) - z[:, 1].real)) <= 1e-10
    rot = np.exp(2j * np.pi * np.arange(64) / 64)
    circle_mean = np.mean([v(e * z) for e in rot], axis=0)
    assert np.max(np.abs(circle_mean)) <= 1e-10
    assert np.max(np.abs(us.jet(z).hess_h - LOG.jet(z).hess_h)) <= 1e-10


@pytest.mark.parametrize("name", ["log_norm", "quad", "half_log"])
def test_symmetrize_invariant_entries(name):
    fld = make_entry(name).field
    z = random_annulus_points(50, np.random.default_rng(32))
    z = z[np.abs(z[:, 0]) > 1e-3]
    assert np.max(np.abs(symmetrize(fld)[1](z))) <= 1e-12


def test_symmetrize_invariant_product():
    # Re(z0 conj z1) is circle invariant, so nothing alternates
    fld = ScalarField("q+re", lambda z: QUAD(z) + np.real(z[..., 0] * np.conj(z[..., 1])))
    us, v = symmetrize(fld)
    z = random_annulus_points(30, np.random.default_rng(33))
    assert np.max(np.abs(v(z))) <= 1e-12
    assert np.max(np.abs(us(z) - fld(z))) <= 1e-12


def test_separation_log_r():
    rep = verify_separation(make_entry("separated", {"us": "two_log_r", "f": "cos", "v": "log_r"}), [2, 4, 8])
    assert rep.K == rep.k == 1.0
    assert rep.satisfied
    assert np.allclose(rep.rv_r_min, 1.0) and np.allclose(rep.rv_r_max, 1.0)


def test_separation_default_and_trivial():
    rep = verify_separation(make_entry("separated"), [2, 4, 8])
    assert rep.satisfied and rep.finite_looking and not rep.trivial
    t = verify_separation(make_entry("separated", {"f": "zero"}), [2, 4])
    assert t.trivial and t.satisfied
    with pytest.raises(NotSeparatedForm):
        verify_separation(make_entry("log_norm"), [2, 4])


def test_lelong_ladder_log_norm():
    lad = lelong_ladder(LOG, [2, 4, 6, 8])
    assert lad.nu_estimate == pytest.approx(1.0, abs=1e-8)
    assert lad.lambda_estimate == pytest.approx(1.0, abs=1e-8)
    assert lad.kappa_estimate == pytest.approx(1.0, abs=1e-12)
    assert lad.notes == []
    assert set(lad.as_dict()) >= {"A_values", "M_A", "N_A", "L_A"}


@pytest.mark.parametrize("name", ["log_norm", "quad"])
def test_mass_bound_at_ladder_scale(name):
    fld = make_entry(name).field
    A = [1.0, 2.0, 3.0, 4.0]
    ln = lelong_number(fld, A)
    L = lipschitz_ladder(fld, A)
    for i in range(len(A) - 1):
        tau = ma_boundary(fld, math.exp(-A[i])) / PI2
        assert tau <= 4 * L[i] * ln["S_slope"][i] + 1e-6


def test_direction_grid_and_samples():
    d = direction_grid(5, 4)
    assert d.shape == (2 + 3 * 4, 2)
    assert np.allclose(norm(d), 1.0)
    s = sample_ball(0.5, 0.01, n_r=3, n_eta=5, n_phi=4, n_s=2)
    assert np.isclose(norm(s).max(), 0.5) and np.isclose(norm(s).min(), 0.01)
    assert np.allclose(d[0], cx(1.0, 0.0)) and np.allclose(d[-1], cx(0.0, 1.0))
