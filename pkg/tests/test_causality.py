import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from optocausal import causality
from optocausal.causality import (ComplexRootSet, FrequencyWindow, ROOT_LABELS, Verdict,
                                  causality_verdict, eps_over_mu_poles, kernel_check,
                                  kernel_check_response, numerator_cubic, numerator_product,
                                  perturbative_gcrt, perturbative_gcrt_gamma_c,
                                  polynomial_roots, reference_roots, solve_roots)
from optocausal.errors import IllConditioned, WindowTooNarrow
from optocausal.params import fig2_params, make_params, pt_thresholds

X = sp.symbols("x")


def _sympy_coeffs(p):
    k, d, gm = sp.nsimplify(p.kappa), sp.nsimplify(p.delta), sp.nsimplify(p.gamma_m)
    g2 = sp.nsimplify(p.g_mag) ** 2
    expr = sp.expand((k - sp.I * (d + X)) * (X ** 2 - 1 + sp.I * gm * X) - sp.I * g2)
    poly = sp.Poly(expr, X)
    return np.array([complex(c) for c in poly.all_coeffs()])


def test_cubic_matches_symbolic_expansion():
    p = fig2_params(g_mag=4e-3)
    np.testing.assert_allclose(numerator_cubic(p), _sympy_coeffs(p), rtol=1e-15, atol=1e-20)


@settings(max_examples=25, deadline=None)
@given(gm=st.floats(1e-8, 1e-1), gc=st.floats(1e-3, 1.0), d=st.floats(-3, 3), g=st.floats(0, 1))
def test_expansion_equals_product(gm, gc, d, g):
    p = make_params(gamma_m=gm, gamma_c=gc, delta=d, g_mag=g)
    c = numerator_cubic(p)
    xs = np.random.default_rng(1).normal(size=5) + 1j * np.random.default_rng(2).normal(size=5)
    for x in xs:
        ref = numerator_product(p, x)
        assert abs(np.polyval(c, x) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_leading_coefficient_independent_of_g():
    for g in (0.0, 1e-3, 0.5):
        assert numerator_cubic(fig2_params(g_mag=g))[0] == -1j


def test_zero_coupling_factorizes():
    p = fig2_params()
    assert abs(np.polyval(numerator_cubic(p), -p.delta - 1j * p.kappa)) < 1e-15
    rs = solve_roots(p)
    assert rs.labels == ROOT_LABELS
    expect = [math.sqrt(1 - 0.25e-12) - 5e-7j, -math.sqrt(1 - 0.25e-12) - 5e-7j, -1 - 0.2j]
    np.testing.assert_allclose(rs.roots, expect, atol=1e-13)
    assert causality_verdict(rs) is Verdict.CAUSAL


def test_companion_solver_on_known_cubic():
    roots = np.sort_complex(polynomial_roots(np.poly([1.0, 2.0, 3.0]).astype(complex)))
    np.testing.assert_allclose(roots, [1, 2, 3], atol=1e-13)


def test_residual_and_max_imag_invariants():
    rs = solve_roots(fig2_params(g_mag=6e-3))
    scale = np.max(np.abs(numerator_cubic(fig2_params(g_mag=6e-3))))
    assert max(rs.residuals) < 1e-10 * scale
    assert rs.max_imag == max(r.imag for r in rs.roots)


def test_ill_conditioned_reported(monkeypatch):
    monkeypatch.setattr(causality, "polynomial_roots", lambda c: np.array([0.3, 0.1j, 5.0]))
    with pytest.raises(IllConditioned):
        solve_roots(fig2_params())


def test_crossing_near_formula():
    p = fig2_params()
    g0 = perturbative_gcrt(p)
    assert g0 == pytest.approx(4.472e-3, rel=1e-3)
    lo = solve_roots(p.with_coupling(0.8 * g0)).by_label("near_plus_wm").imag
    hi = solve_roots(p.with_coupling(1.2 * g0)).by_label("near_plus_wm").imag
    assert lo < 0 < hi
    assert abs(solve_roots(p.with_coupling(g0)).by_label("near_plus_wm").imag) < 2e-8


def test_verdict_definition():
    rs = ComplexRootSet((1 - 1e-3j, -1 + 1e-3j, -1 - 0.2j), ROOT_LABELS, 1e-3, (0, 0, 0))
    assert causality_verdict(rs) is Verdict.NONCAUSAL


def test_marginal_flag():
    p = fig2_params()
    g = causality.perturbative_gcrt(p)
    from optocausal.sweep import find_critical_classical
    gc = find_critical_classical(p, tol=1e-13)
    assert solve_roots(p.with_coupling(gc)).marginal
    assert not solve_roots(p.with_coupling(g / 2)).marginal


def test_red_minus_side_noncausal_above_pt_minus():
    p = fig2_params(delta=-1.0)
    g = 1.1 * pt_thresholds(p).g_pt_minus
    assert causality_verdict(solve_roots(p.with_coupling(g))) is Verdict.NONCAUSAL


def test_formula_variants():
    assert perturbative_gcrt(make_params(gamma_m=1e-300)) < 1e-140
    assert perturbative_gcrt(make_params(sidedness="single_sided")) == pytest.approx(6.325e-3, rel=1e-3)
    p = fig2_params()
    assert perturbative_gcrt_gamma_c(p) / perturbative_gcrt(p) == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize("g", [0.0, 2e-3, 6e-3, 0.05])
def test_roots_independent_of_theta(g):
    base = solve_roots(fig2_params(g_mag=g, theta=0.0)).roots
    for th in (math.pi / 4, math.pi / 2):
        np.testing.assert_allclose(solve_roots(fig2_params(g_mag=g, theta=th)).roots, base,
                                   atol=1e-12, rtol=0)


@pytest.mark.parametrize("g", [0.0, 3e-3, 1e-2, 0.3])
def test_vieta_sum(g):
    p = fig2_params(g_mag=g)
    a3, a2 = numerator_cubic(p)[:2]
    s = sum(solve_roots(p).roots)
    assert abs(s - (-a2 / a3)) <= 1e-10 * abs(a2 / a3)


def test_continuity_no_label_swaps():
    p = fig2_params()
    prev = None
    grid = np.linspace(0, 0.05, 501)
    for g in grid:
        rs = solve_roots(p.with_coupling(g), previous=prev)
        if prev is not None:
            jumps = [abs(a - b) for a, b in zip(rs.roots, prev.roots)]
            assert max(jumps) < 1e-3
        prev = rs


def test_eps_poles_independent_of_kl():
    p = fig2_params(g_mag=8e-3)
    roots = np.array(solve_roots(p).roots)
    seeds = roots + 0.1 * np.min(np.abs(roots.imag)) * (1 + 1j)
    for kl in np.linspace(0.1, 3.0, 20):
        np.testing.assert_allclose(eps_over_mu_poles(p, kl, seeds), roots, atol=1e-10, rtol=0)



def test_eps_poles_below_critical_coupling():
    # the cavity root is a near pole-zero dipole of the response here
    p = fig2_params(g_mag=2.2e-3)
    roots = np.array(solve_roots(p).roots)
    seeds = roots + 0.1 * np.min(np.abs(roots.imag)) * (1 + 1j)
    np.testing.assert_allclose(eps_over_mu_poles(p, 0.7, seeds), roots, atol=1e-10, rtol=0)


def test_response_part_derivatives_match_symbolic():
    p = fig2_params(g_mag=3e-3)
    k, d, gm = sp.nsimplify(p.kappa), sp.nsimplify(p.delta), sp.nsimplify(p.gamma_m)
    g2, gc = sp.nsimplify(p.g_mag) ** 2, sp.nsimplify(p.gamma_c)
    mech = X ** 2 - 1 + sp.I * gm * X
    num = 2 * gc * ((k - sp.I * (d + X)) * mech - sp.I * g2)
    den = ((k - sp.I * X) ** 2 + d ** 2) * mech + 2 * d * g2
    dnum, dden = sp.diff(num, X), sp.diff(den, X)
    for x in (0.3 - 0.2j, -1.0 - 1e-4j, 1.7 + 0.5j):
        _, _, dn, dd = causality._c_plus_parts(p, x, deriv=True)
        sub = {X: sp.nsimplify(x.real) + sp.I * sp.nsimplify(x.imag)}
        assert abs(dn - complex(dnum.subs(sub))) <= 1e-14
        assert abs(dd - complex(dden.subs(sub))) <= 1e-14

# ------------------------------------------------------------ kernel check

def _single_pole(w0, gamma):
    return lambda x: 1.0 / (w0 - x - 1j * gamma)


def test_kernel_lower_half_pole_is_causal():
    win = FrequencyWindow(0.0, 8.0)
    kc = kernel_check_response(_single_pole(0.5, 0.1), win, poles=[0.5 - 0.1j])
    assert kc.precausal_leakage < 1e-2
    assert kc.verdict is Verdict.CAUSAL
    # analytic pair: G(tau) = 2 pi i exp(-i w0 tau - gamma tau) for tau > 0
    tau = kc.tau_grid
    sel = (tau > 5) & (tau < 20)
    expect = 2j * np.pi * np.exp(-1j * 0.5 * tau[sel] - 0.1 * tau[sel])
    assert np.max(np.abs(kc.kernel[sel] - expect)) < 0.05 * np.max(np.abs(expect))


def test_kernel_upper_half_pole_is_anticausal():
    kc = kernel_check_response(_single_pole(0.5, -0.1), FrequencyWindow(0.0, 8.0))
    assert kc.precausal_leakage == pytest.approx(1.0, abs=1e-2)
    assert kc.verdict is Verdict.NONCAUSAL


def test_kernel_zero_response():
    kc = kernel_check_response(lambda x: np.zeros_like(x, dtype=complex), FrequencyWindow(0, 1))
    assert kc.precausal_leakage == 0.0
    assert not np.any(kc.kernel)


def test_window_too_narrow():
    with pytest.raises(WindowTooNarrow):
        kernel_check_response(_single_pole(1.0, 0.1), FrequencyWindow(0.0, 1.05), poles=[1 - 0.1j])
    with pytest.raises(WindowTooNarrow):
        kernel_check(fig2_params(g_mag=1e-3), FrequencyWindow(0.0, 1.0 + 1e-7))


def test_window_validation():
    with pytest.raises(ValueError):
        FrequencyWindow(0, 1, samples=1001)


@pytest.mark.parametrize("delta", [1.0, -1.0])
@pytest.mark.parametrize("frac", [0.3, 0.7, 1.5, 3.0])
def test_kernel_agrees_with_roots(delta, frac):
    p = fig2_params(delta=delta)
    from optocausal.sweep import find_critical_classical
    gc = find_critical_classical(p)
    q = p.with_coupling(frac * gc)
    kc = kernel_check(q)
    assert 0.0 <= kc.precausal_leakage <= 1.0
    assert kc.verdict is causality_verdict(solve_roots(q))
    assert len(kc.windows) == 3
