import math

import numpy as np
import pytest

from pshlab.catalog import REGISTRY, make_entry, osc_1d, smooth_psh_entries
from pshlab.core import cx
from pshlab.errors import BadParams, UnknownEntry
from pshlab.hessian import psh_check, random_annulus_points


def test_log_norm_value():
    assert make_entry("log_norm").field(cx(1.0, 0.0)) == 0.0


def test_half_log_value():
    assert make_entry("half_log").field(cx(math.exp(-2), 0.0)) == pytest.approx(-2.0, rel=1e-14)


@pytest.mark.parametrize("t", [1e-3, 1e-2, 0.1])
def test_one_n_symm_on_the_curve(t):
    # on z1 = z0^2 the first modulus vanishes and u = (1/4) log t^8
    u = make_entry("one_n_symm", {"n": 2}).field(cx(t, t * t))
    assert u == pytest.approx(2 * math.log(t), rel=1e-12)


@pytest.mark.parametrize("name,params", [("quad", None), ("log_norm", None), ("half_log", None),
                                         ("one_n_symm", {"n": 2}), ("one_n_symm", {"n": 3}),
                                         ("sym_plus_re", None)])
def test_psh_grid(name, params):
    fld = make_entry(name, params).field
    z = random_annulus_points(500, np.random.default_rng(11))
    v = psh_check(fld, z)
    assert v.min_eigen_cartesian >= -1e-8
    assert v.min_eigen_S >= -1e-8
    assert v.agree


@pytest.mark.parametrize("name", ["log_norm", "quad"])
def test_s1_invariance(name):
    rng = np.random.default_rng(5)
    fld = make_entry(name).field
    z = random_annulus_points(100, rng)
    rot = np.exp(1j * rng.uniform(0, 2 * np.pi, 100))[:, None]
    assert np.max(np.abs(fld(rot * z) - fld(z))) <= 1e-12
    assert fld.s1_invariant


def test_finite_on_punctured_ball():
    z = random_annulus_points(200, np.random.default_rng(6), r_lo=1e-3, r_hi=0.99)
    for name in REGISTRY:
        assert np.all(np.isfinite(make_entry(name).field(z))), name


def test_errors():
    with pytest.raises(UnknownEntry):
        make_entry("nope")
    with pytest.raises(BadParams):
        make_entry("one_n_symm", {"n": 1})
    with pytest.raises(BadParams):
        make_entry("one_n_symm", {"n": 2.5})
    with pytest.raises(BadParams):
        make_entry("quad", {"n": 2})
    with pytest.raises(BadParams):
        make_entry("max_green", {"K": 0})


def test_max_green_is_max_of_pieces():
    fld = make_entry("max_green").field
    z = random_annulus_points(100, np.random.default_rng(7))
    ref = np.maximum(osc_1d(z[:, 0]), np.log(np.abs(z[:, 1])))
    assert np.array_equal(fld(z), ref)
    assert not fld.smooth
    # the kink function changes sign across the set where the two pieces meet
    k = fld.kink(z)
    assert np.array_equal(k > 0, osc_1d(z[:, 0]) > np.log(np.abs(z[:, 1])))


def test_osc_1d_terms():
    # the k = 1 term dominates near w = 1, the rest are point-like logs at w = 1/k
    w = np.array([0.5 + 1e-3])
    k = np.arange(1, 9)
    ref = np.sum(np.log(np.abs(w[:, None] - 1 / k) ** 2 + np.exp(-k ** 5.0)) / k ** 2, axis=1)
    assert osc_1d(w) == pytest.approx(ref, rel=1e-13)


def test_smooth_entries_flags():
    for e in smooth_psh_entries():
        assert e.field.smooth and e.field.psh and e.field.has_analytic


def test_expected_constants():
    assert make_entry("log_norm").expected["nu"] == 1.0
    assert make_entry("one_n_symm", {"n": 3}).expected["nu"] == pytest.approx(1 / 3)
    assert make_entry("quad").expected["tau"] == 0.0
