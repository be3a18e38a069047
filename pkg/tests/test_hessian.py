import numpy as np
import pytest

from pshlab.catalog import make_entry, smooth_psh_entries
from pshlab.core import ScalarField, norm
from pshlab.hessian import (hermitian_eigvals, laplacian_identity_defect, psh_check, random_annulus_points,
                            route_difference, sasaki_hessian_cartesian, sasaki_hessian_hopf)
from pshlab.hopf import basic_h, frame_apply, to_hopf

import oracles

Z = random_annulus_points(100, np.random.default_rng(21))


def _S(name, params=None, z=Z):
    fld = make_entry(name, params).field
    p = to_hopf(z)
    return sasaki_hessian_hopf(frame_apply(fld, p)), p


def test_quad_matrix():
    S, p = _S("quad")
    hzz = basic_h(p.zeta).h_zetazetabar
    assert np.allclose(S.s00, 0.5, atol=1e-12)
    assert np.allclose(S.s11, 0.5 * p.r ** 2 * hzz, atol=1e-12)
    assert np.allclose(S.s01, 0.0, atol=1e-12)


def test_log_norm_matrix():
    S, p = _S("log_norm")
    hzz = basic_h(p.zeta).h_zetazetabar
    assert np.allclose(S.s00, 0.0, atol=1e-12)
    assert np.allclose(S.s11, 0.5 * hzz, atol=1e-12)
    assert np.allclose(S.s01, 0.0, atol=1e-12)


@pytest.mark.parametrize("name", ["quad", "log_norm", "half_log"])
def test_circle_invariant_reduction(name):
    fld = make_entry(name).field
    p = to_hopf(Z)
    fj = frame_apply(fld, p)
    assert np.max(np.abs(fj.u_theta)) < 1e-12
    S = sasaki_hessian_hopf(fj)
    hzz = basic_h(p.zeta).h_zetazetabar
    assert np.allclose(S.s00, 0.25 * fj.u_tt / p.r ** 2, atol=1e-10)
    assert np.allclose(S.s10, fj.u_tzeta / (2 * p.r), atol=1e-10)
    assert np.allclose(S.s11, fj.u_zetazetabar + 0.5 * fj.u_t * hzz, atol=1e-10)


def test_hermitian_structure():
    for e in smooth_psh_entries():
        S, _ = _S(e.name, e.params)
        assert np.allclose(S.s10, np.conj(S.s01))
        assert np.isrealobj(S.s00) and np.isrealobj(S.s11)


def test_routes_quad_tight():
    assert route_difference(make_entry("quad").field, Z) <= 1e-8


@pytest.mark.parametrize("entry", smooth_psh_entries(), ids=lambda e: e.field.name)
def test_routes_agree(entry):
    assert route_difference(entry.field, Z) <= 1e-6


def test_routes_one_n_symm_fd():
    # both routes fed by the difference engine
    assert route_difference(make_entry("one_n_symm", {"n": 2}).field, Z[:30], engine="fd") <= 1e-6


@pytest.mark.parametrize("key,name,params", [("one_n_symm2", "one_n_symm", {"n": 2}),
                                             ("sym_plus_re", "sym_plus_re", None)])
def test_matrix_against_symbolic_frame(key, name, params):
    # independent route: symbolic Hessian paired with the frame written out by hand
    ref = oracles.symbolic_jet(key)
    S, _ = _S(name, params, Z[:10])
    for i, z in enumerate(Z[:10]):
        hh = ref(z)[2]
        r = float(norm(z))
        zeta = z[1] / z[0]
        x0 = z / r
        x1 = z[0] / (1 + abs(zeta) ** 2) * np.array([-np.conj(zeta), 1.0])
        assert S.s00[i] == pytest.approx(np.real(x0 @ hh @ np.conj(x0)), abs=1e-9)
        assert S.s11[i] == pytest.approx(np.real(x1 @ hh @ np.conj(x1)), abs=1e-9)
        assert abs(S.s10[i] - x1 @ hh @ np.conj(x0)) <= 1e-9


@pytest.mark.parametrize("entry", smooth_psh_entries(), ids=lambda e: e.field.name)
def test_laplacian_identity(entry):
    assert laplacian_identity_defect(entry.field, Z) <= 1e-6


def test_log_norm_s00_is_restricted_laplacian():
    S, _ = _S("log_norm")
    assert laplacian_identity_defect(make_entry("log_norm").field, Z) <= 1e-12
    assert np.max(np.abs(S.s00)) <= 1e-12


def test_psh_quad():
    v = psh_check(make_entry("quad").field, Z)
    assert v.min_eigen_S >= -1e-10 and v.min_eigen_cartesian >= -1e-10 and v.agree
    assert v.n_samples == len(Z)


def test_psh_negative():
    q = make_entry("quad").field
    neg = ScalarField("-|z|^2", lambda z: -2 * q(z), lambda z: q.jet_func(z).scaled(-2.0))
    v = psh_check(neg, Z)
    assert v.min_eigen_S < 0 and v.min_eigen_cartesian < 0 and v.agree


def test_psh_one_n_symm():
    v = psh_check(make_entry("one_n_symm", {"n": 2}).field, Z)
    assert v.min_eigen_S >= -1e-8 and v.agree


def test_cartesian_route_uses_given_point():
    fld = make_entry("quad").field
    p = to_hopf(Z[:5])
    B = sasaki_hessian_cartesian(fld.jet(Z[:5]), p)
    assert np.allclose(B.s00, 0.5)


def test_closed_form_eigenvalues():
    rng = np.random.default_rng(22)
    A = rng.normal(size=(50, 2, 2)) + 1j * rng.normal(size=(50, 2, 2))
    H = A + np.conj(np.swapaxes(A, -1, -2))
    lo, hi = hermitian_eigvals(H)
    ref = np.linalg.eigvalsh(H)
    assert np.allclose(lo, ref[:, 0]) and np.allclose(hi, ref[:, 1])
