"""Kernel families, flat supersolutions and integral thresholds."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffabs import (
    AbsorptionKernel,
    DomainError,
    OmegaSpec,
    ProblemSpec,
    H_integral,
    alpha_ell,
    dini_classify,
    ell_star,
    eval_U,
    eval_Utilde,
    eval_h,
    theta_exponent,
)


# ---------------------------------------------------------------------------
# omega specifications
# ---------------------------------------------------------------------------

def test_constant_omega_value():
    om = OmegaSpec("constant", sigma=2.5)
    assert om(0.1) == 2.5
    assert om(1.0) == 2.5


def test_power_omega_value():
    om = OmegaSpec("power", a=3.0, alpha=0.5)
    assert om(0.25) == pytest.approx(1.5, rel=1e-14)


def test_omega_rejects_bad_family():
    with pytest.raises(DomainError):
        OmegaSpec("nope")


def test_omega_rejects_nonpositive_sigma():
    with pytest.raises(DomainError):
        OmegaSpec("constant", sigma=0.0)


@given(st.floats(min_value=0.01, max_value=2.0),
       st.floats(min_value=1e-6, max_value=1.0))
@settings(max_examples=50, deadline=None)
def test_power_omega_monotone_nondecreasing(alpha, t):
    om = OmegaSpec("power", a=1.0, alpha=alpha)
    assert om(t) <= om(min(1.0, t * 2.0)) + 1e-15


# ---------------------------------------------------------------------------
# kernel evaluation oracles
# ---------------------------------------------------------------------------

def test_exp_omega_constant_closed_form():
    # h(t) = exp(-sigma/t)
    k = AbsorptionKernel.exp_omega(OmegaSpec("constant", sigma=1.0))
    assert eval_h(k, 0.5) == pytest.approx(math.exp(-2.0), rel=1e-14)
    assert k.log_h(0.1) == pytest.approx(-10.0, rel=1e-14)


def test_exp_omega_sqrt_closed_form():
    # omega = sqrt(t): h(t) = exp(-1/sqrt(t))
    k = AbsorptionKernel.exp_omega(OmegaSpec("power", a=1.0, alpha=0.5))
    assert k.log_h(0.04) == pytest.approx(-5.0, rel=1e-13)


def test_double_exp_log_value():
    k = AbsorptionKernel.double_exp(OmegaSpec("constant", sigma=1.0))
    # log h = -exp(omega/t) = -exp(1/t)
    assert k.log_h(0.5) == pytest.approx(-math.exp(2.0), rel=1e-13)


def test_lemma1_kernel_value():
    sigma = 1.5
    k = AbsorptionKernel.lemma1_kernel(sigma)
    t = 0.3
    g = math.exp(sigma / t)
    expected = math.log(sigma) - 2.0 * math.log(t) + sigma / t - g
    assert k.log_h(t) == pytest.approx(expected, rel=1e-13)


def test_constant_kernel_and_H():
    k = AbsorptionKernel.constant(2.0)
    assert eval_h(k, 0.123) == 2.0
    assert H_integral(k, 0.5) == pytest.approx(1.0, rel=1e-10)


def test_power_kernel_H_closed_form():
    # h = 3 t^2 integrates to t^3
    k = AbsorptionKernel.power(3.0, 2.0)
    assert H_integral(k, 0.5) == pytest.approx(0.125, rel=1e-10)


def test_porous_threshold_kernel_value():
    # m=2, q=3: h(t) = t^{(q-m)/(m-1)} / omega(t) = t / omega(t)
    om = OmegaSpec("power", a=1.0, alpha=2.0)
    k = AbsorptionKernel.porous_threshold(2.0, 3.0, om)
    assert eval_h(k, 0.5) == pytest.approx(0.5 / 0.25, rel=1e-13)


def test_tabulated_kernel_roundtrip(tmp_path):
    t = np.geomspace(1e-4, 1.0, 50)
    v = np.exp(-1.0 / t)
    path = tmp_path / "kern.csv"
    np.savetxt(path, np.column_stack([t, v]), delimiter=",",
               header="t,value", comments="")
    k = AbsorptionKernel.from_csv(path)
    assert eval_h(k, 0.5) == pytest.approx(math.exp(-2.0), rel=1e-3)


# ---------------------------------------------------------------------------
# flat supersolutions
# ---------------------------------------------------------------------------

def _spec(kernel, variant="power", q=2.0, m=2.0):
    return ProblemSpec(N=1, variant=variant, kernel=kernel, q=q, m=m,
                      R=4.0, T=1.0)


def test_flat_supersolution_constant_kernel():
    # h = 1, q = 2: U(t) = 1/t
    spec = _spec(AbsorptionKernel.constant(1.0))
    assert eval_U(spec, 0.25) == pytest.approx(4.0, rel=1e-10)


def test_flat_supersolution_power_kernel():
    # h = 2t, q = 2: H = t^2, U = 1/t^2
    spec = _spec(AbsorptionKernel.power(2.0, 1.0))
    assert eval_U(spec, 0.5) == pytest.approx(4.0, rel=1e-9)


def test_flat_supersolution_exponential_variant():
    # h = 1: Utilde(t) = -ln t
    spec = _spec(AbsorptionKernel.constant(1.0), variant="exponential")
    assert eval_Utilde(spec, 0.25) == pytest.approx(math.log(4.0), rel=1e-10)


def test_flat_supersolution_divergent_H_is_zero():
    # porous-threshold with omega = t^{7/3} makes H(t) divergent at 0:
    # the flat barrier collapses to 0 (no fundamental solutions exist)
    om = OmegaSpec("power", a=1.0, alpha=7.0 / 3.0)
    k = AbsorptionKernel.porous_threshold(2.0, 3.0, om)
    spec = _spec(k, variant="porous", q=3.0, m=2.0)
    assert eval_U(spec, 0.05) == 0.0


def test_supersolution_decreasing_in_time():
    spec = _spec(AbsorptionKernel.exp_omega(OmegaSpec("constant", sigma=1.0)))
    ts = np.linspace(0.05, 0.9, 12)
    us = [eval_U(spec, float(t)) for t in ts]
    assert all(b < a for a, b in zip(us, us[1:]))


# ---------------------------------------------------------------------------
# Dini-type thresholds and exponents (family table oracles)
# ---------------------------------------------------------------------------

def test_dini_constant_omega_divergent():
    res = dini_classify(OmegaSpec("constant", sigma=1.0), 0.5)
    assert res.kind == "divergent"
    assert not res.finite


def test_dini_sqrt_omega_finite_value():
    # int_0^1 t^{1/4 - 1} dt = 4
    res = dini_classify(OmegaSpec("power", a=1.0, alpha=0.5), 0.5)
    assert res.kind == "finite"
    assert res.value == pytest.approx(4.0, rel=1e-9)


def test_dini_linear_omega_porous_exponent():
    # int_0^1 t^{3/14 - 1} dt = 14/3
    res = dini_classify(OmegaSpec("power", a=1.0, alpha=1.0), 3.0 / 14.0)
    assert res.kind == "finite"
    assert res.value == pytest.approx(14.0 / 3.0, rel=1e-9)


def test_theta_exponent_oracle():
    assert theta_exponent(2.0, 3.0, 1) == pytest.approx(3.0 / 14.0, abs=1e-15)


def test_theta_exponent_domain():
    with pytest.raises(DomainError):
        theta_exponent(1.0, 3.0, 1)  # m must exceed 1


def test_alpha_ell_star_is_zero():
    for N in (1, 2, 3):
        ls = ell_star(N)
        assert alpha_ell(N, ls) == pytest.approx(0.0, abs=1e-12)


def test_ell_star_value():
    # ell* = 1 + 2/(N+2)
    assert ell_star(1) == pytest.approx(1.0 + 2.0 / 3.0, rel=1e-14)
    assert ell_star(3) == pytest.approx(1.4, rel=1e-14)


@given(st.floats(min_value=1.01, max_value=5.0), st.integers(1, 4))
@settings(max_examples=50, deadline=None)
def test_alpha_ell_sign_matches_ell_star(ell, N):
    a = alpha_ell(N, ell)
    if ell > ell_star(N) + 1e-9:
        assert a > 0.0
    elif ell < ell_star(N) - 1e-9:
        assert a < 0.0
