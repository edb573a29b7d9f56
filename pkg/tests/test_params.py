import json
import math

import pytest
from hypothesis import given, strategies as st

from optocausal.errors import NegativeCoupling, NonPositiveRate, ValidationError
from optocausal.params import (Sidedness, SystemParams, _threshold_formulas, fig2_params,
                               make_params, pt_thresholds)


def test_reference_point_two_sided():
    p = make_params(gamma_m=1e-6, gamma_c=0.1, sidedness="two_sided", delta=1, g_mag=4e-3, theta=0)
    assert p.kappa == pytest.approx(0.2, abs=0)
    assert p.omega_m == 1.0
    assert p.g == complex(4e-3, 0)


def test_single_sided_kappa():
    assert make_params(sidedness=Sidedness.SINGLE_SIDED).kappa == 0.1


@pytest.mark.parametrize("kw, exc", [
    ({"gamma_c": -0.1}, NonPositiveRate),
    ({"gamma_m": 0.0}, NonPositiveRate),
    ({"g_mag": -1e-3}, NegativeCoupling),
    ({"delta": float("nan")}, ValidationError),
    ({"sidedness": "three_sided"}, ValidationError),
    ({"kappa_c_override": 0.0}, NonPositiveRate),
])
def test_validation(kw, exc):
    with pytest.raises(exc):
        make_params(**kw)


def test_theta_wrapped():
    p = make_params(theta=-math.pi / 2)
    assert p.theta == pytest.approx(1.5 * math.pi)
    assert p.g_i == pytest.approx(-p.g_mag if p.g_mag else 0.0)


def test_quadrature_components():
    p = make_params(g_mag=2.0, theta=math.pi / 3)
    assert p.g_r == pytest.approx(1.0)
    assert p.g_i == pytest.approx(math.sqrt(3.0))


@given(gm=st.floats(1e-9, 1.0), gc=st.floats(1e-6, 10.0), d=st.floats(-5, 5),
       g=st.floats(0, 1), th=st.floats(0, 6.28), side=st.sampled_from(list(Sidedness)))
def test_json_round_trip_bit_exact(gm, gc, d, g, th, side):
    p = make_params(gamma_m=gm, gamma_c=gc, delta=d, g_mag=g, theta=th, sidedness=side)
    q = SystemParams.from_dict(json.loads(json.dumps(p.to_dict())))
    assert q == p


def test_pt_thresholds_reference():
    t = pt_thresholds(fig2_params())
    assert t.g_pt_plus == pytest.approx(0.7071, abs=1e-4)
    assert t.applicable == "plus"
    t = pt_thresholds(fig2_params(delta=-1))
    assert t.g_pt_minus == pytest.approx(4.472e-4, rel=1e-3)
    assert t.applicable == "minus"
    assert t.g_pt_minus < 1e-2 * t.g_pt_plus


def test_pt_minus_vanishes_with_gamma_m():
    assert pt_thresholds(make_params(gamma_m=1e-300)).g_pt_minus < 1e-140


@given(d=st.floats(0.01, 10), gm=st.floats(1e-9, 1), k=st.floats(1e-3, 10))
def test_thresholds_scale_covariant(d, gm, k):
    # rates and detunings expressed in units of 2*omega_m are halved, as is the threshold
    plus, minus = _threshold_formulas(d, gm, k, 1.0)
    plus2, minus2 = _threshold_formulas(d / 2, gm / 2, k / 2, 0.5)
    assert plus2 == pytest.approx(plus / 2, rel=1e-14)
    assert minus2 == pytest.approx(minus / 2, rel=1e-14)


def test_with_coupling_keeps_rest():
    p = fig2_params(theta=0.3)
    q = p.with_coupling(1e-3)
    assert (q.g_mag, q.theta, q.delta) == (1e-3, p.theta, p.delta)
