import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pshlab.catalog import make_entry
from pshlab.core import cx, linear_field, norm
from pshlab.errors import ChartSingular
from pshlab.hessian import random_annulus_points
from pshlab.hopf import (PRINCIPAL, SIMPLE, HopfPoint, basic_h, chart_consistency, commutator_selftest,
                         duality_defect, embed, embed_principal, embed_simple, frame_apply,
                         random_hopf_samples, reeb_defect, to_hopf)
from pshlab.quad import QuadratureSpec, integrate_cp1

import oracles


def test_simple_chart_examples():
    assert np.allclose(embed_simple(1.0, 0.0, 0.0), [0, 1])
    s = 2j / math.sqrt(2)
    assert np.allclose(embed_simple(2.0, math.pi / 2, 1.0), [s, s])
    # and against the independent formula
    assert np.allclose(embed_simple(0.7, 1.3, 0.2 - 0.4j), oracles.simple_chart(0.7, 1.3, 0.2 - 0.4j))


def test_principal_chart_example():
    z = embed_principal(1.0, 0.0, 1.0)
    assert abs(z[0]) == pytest.approx(2 ** -0.5)
    assert abs(z[1]) == pytest.approx(2 ** -0.5)
    assert z[1] / z[0] == pytest.approx(1.0)


def test_principal_cut_rejected():
    with pytest.raises(ChartSingular):
        embed_principal(1.0, 0.0, -1.0)
    with pytest.raises(ChartSingular):
        to_hopf(cx(0.0, 1.0))
    with pytest.raises(ChartSingular):
        to_hopf(cx(1.0, 0.0), SIMPLE)


def test_theta_period_is_4pi():
    z = embed_principal(0.5, 0.3, 0.2 + 0.7j)
    assert np.allclose(embed_principal(0.5, 0.3 + 4 * np.pi, 0.2 + 0.7j), z)
    assert not np.allclose(embed_principal(0.5, 0.3 + 2 * np.pi, 0.2 + 0.7j), z)


def test_basic_h_at_one():
    b = basic_h(1.0)
    assert b.h == pytest.approx(math.log(2))
    assert b.h_zetazetabar == pytest.approx(0.25)
    assert abs(b.h_zeta) < 1e-15
    with pytest.raises(ChartSingular):
        basic_h(0.0)


def test_fs_total_volume():
    assert integrate_cp1(lambda z: np.ones(z.shape), QuadratureSpec()) == pytest.approx(math.pi, abs=1e-10)


def test_frame_log_norm():
    z = random_annulus_points(20, np.random.default_rng(3))
    fj = frame_apply(make_entry("log_norm").field, to_hopf(z))
    assert np.allclose(fj.u_t, 1.0, atol=1e-13)
    assert np.allclose(fj.u_theta, 0.0, atol=1e-13)
    assert np.allclose(fj.rX0u, 0.5, atol=1e-13)
    assert np.allclose(fj.rX0u + fj.rX0bar_u, fj.u_t, atol=1e-13)
    sq = fj.rX0bar_u ** 2 + fj.rX0u ** 2
    assert np.allclose(sq, 0.5, atol=1e-13)
    assert np.allclose(sq, 0.5 * (fj.u_t ** 2 - 4 * fj.u_theta ** 2), atol=1e-13)


def test_frame_re_z1_simple_chart():
    fld = linear_field(0.0, 1.0)
    r, th = 0.6, np.linspace(0.1, 6.0, 7)
    p = HopfPoint(np.full(7, r), th, np.zeros(7, complex), SIMPLE)
    fj = frame_apply(fld, p)
    assert np.allclose(fj.u, r * np.cos(th), atol=1e-14)
    assert np.allclose(fj.u_theta, -r * np.sin(th), atol=1e-14)


@pytest.mark.parametrize("zeta", [0.0, 0.3 - 0.8j, -1.5 + 0.1j])
def test_simple_chart_partials_by_differences(zeta):
    # zeta derivatives in the simple chart, including zeta = 0 (the z^1 axis)
    fld = make_entry("sym_plus_re").field
    r, th, h = 0.5, 0.9, 1e-4

    def U(dx, dy):
        return float(fld(embed_simple(r, th, zeta + dx + 1j * dy)))

    ux = (U(h, 0) - U(-h, 0)) / (2 * h)
    uy = (U(0, h) - U(0, -h)) / (2 * h)
    lap = (U(h, 0) + U(-h, 0) + U(0, h) + U(0, -h) - 4 * U(0, 0)) / h ** 2
    fj = frame_apply(fld, HopfPoint(np.array(r), np.array(th), np.array(zeta, complex), SIMPLE))
    assert abs(fj.u_zeta - 0.5 * (ux - 1j * uy)) < 1e-7
    assert abs(fj.u_zetazetabar - lap / 4) < 1e-5


@pytest.mark.parametrize("fld", [make_entry("quad").field, make_entry("log_norm").field,
                                 linear_field(0.0, 1.0)], ids=["quad", "log_norm", "re_z1"])
def test_commutators(fld):
    samples = random_hopf_samples(50, np.random.default_rng(4))
    d = commutator_selftest(fld, samples)
    assert set(d) == {"X1_X1bar", "X0_X0bar", "X1_X0", "X1_dr", "X1_dtheta"}
    assert max(d.values()) <= 1e-5


def test_commutator_detects_wrong_identity():
    # a field with nonzero u_theta makes the X0 bracket correction essential
    fld = linear_field(0.0, 1.0)
    samples = random_hopf_samples(20, np.random.default_rng(4))
    d = commutator_selftest(fld, samples)
    r = samples[:, 0]
    z = embed_principal(r, samples[:, 1], samples[:, 2] + 1j * samples[:, 3])
    fj = frame_apply(fld, to_hopf(z))
    # the correction term itself is far above the defect level
    assert np.max(np.abs(fj.u_theta / r ** 2)) > 1e3 * d["X0_X0bar"]


def test_duality():
    s = random_hopf_samples(50, np.random.default_rng(12))
    assert duality_defect(s[:, 0], s[:, 1], s[:, 2] + 1j * s[:, 3]) <= 1e-6


@pytest.mark.parametrize("name", ["quad", "log_norm", "sym_plus_re", "half_log"])
def test_reeb(name):
    z = random_annulus_points(50, np.random.default_rng(13))
    assert reeb_defect(make_entry(name).field, z) <= 1e-6


@pytest.mark.parametrize("name", ["quad", "log_norm", "half_log"])
def test_chart_consistency(name):
    z = random_annulus_points(50, np.random.default_rng(14))
    assert chart_consistency(make_entry(name).field, z) <= 1e-8


_angle = st.floats(0.0, 4 * math.pi, exclude_max=True)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 0.99), _angle, st.floats(1e-3, 1e3), st.floats(-3.0, 3.0))
def test_principal_roundtrip(r, theta, rho, phi):
    zeta = rho * np.exp(1j * phi)
    z = embed_principal(r, theta, zeta)
    assert float(norm(z)) == pytest.approx(r, rel=1e-13)
    p = to_hopf(z)
    assert p.chart == PRINCIPAL
    assert np.allclose(embed(p), z, atol=1e-13)
    assert abs(p.zeta - zeta) <= 1e-12 * max(1.0, rho)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.0, 2 * math.pi, exclude_max=True), st.floats(0.0, 1e3),
       st.floats(-3.2, 3.2))
def test_simple_roundtrip(r, theta, rho, phi):
    z = embed_simple(r, theta, rho * np.exp(1j * phi))
    p = to_hopf(z, SIMPLE)
    assert np.allclose(embed(p), z, atol=1e-13)
