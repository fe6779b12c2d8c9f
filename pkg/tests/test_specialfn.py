import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loglab.exceptions import DomainError
from loglab.specialfn import (
    EULER_GAMMA,
    const_cNs,
    const_kappa,
    digamma,
    dimensional_constants,
    gamma_fn,
    kappa_small_s_limit,
    log_power_bound_gap,
    unit_sphere_area,
)

mp.mp.dps = 30


@pytest.mark.parametrize("x", [0.01, 0.1, 0.25, 0.5, 0.9, 1.0, 1.5, 2.5, 7.3, 20.0, 49.5])
def test_gamma_matches_mpmath(x):
    assert gamma_fn(x) == pytest.approx(float(mp.gamma(x)), rel=1e-13)


@pytest.mark.parametrize("x", [0.01, 0.1, 0.5, 1.0, 2.0, 3.7, 10.0, 55.0])
def test_digamma_matches_mpmath(x):
    assert digamma(x) == pytest.approx(float(mp.digamma(x)), rel=1e-13, abs=1e-14)


def test_known_values():
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)
    assert digamma(1.0) == pytest.approx(-EULER_GAMMA, rel=1e-14)
    assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2 * math.log(2), rel=1e-14)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_gamma_digamma_domain(bad):
    with pytest.raises(DomainError):
        gamma_fn(bad)
    with pytest.raises(DomainError):
        digamma(bad)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.05, max_value=40.0))
def test_gamma_recurrence(x):
    assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.05, max_value=40.0))
def test_digamma_recurrence(x):
    assert digamma(x + 1.0) == pytest.approx(digamma(x) + 1.0 / x, rel=1e-12, abs=1e-13)


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("s", [0.01, 0.1, 0.3, 0.5, 0.9])
def test_cNs_matches_mpmath(N, s):
    s_ = mp.mpf(s)
    ref = 4**s_ * mp.pi ** (-mp.mpf(N) / 2) * s_ * (1 - s_) * mp.gamma(mp.mpf(N) / 2 + s_) / mp.gamma(2 - s_)
    assert const_cNs(N, s) == pytest.approx(float(ref), rel=1e-13)


def test_cNs_limits():
    # c_{1,1/2} = 1/pi; c_{N,s}/s -> pi^{-N/2} Gamma(N/2) as s -> 0
    assert const_cNs(1, 0.5) == pytest.approx(1.0 / math.pi, rel=1e-13)
    assert const_cNs(1, 1e-8) / 1e-8 == pytest.approx(dimensional_constants(1).c_N, rel=1e-6)


@pytest.mark.parametrize("s", [0.0, 1.0, -0.1])
def test_cNs_domain(s):
    with pytest.raises(DomainError):
        const_cNs(1, s)


@pytest.mark.parametrize("N", [0, -1, 1.5, True])
def test_dimension_validation(N):
    with pytest.raises(DomainError):
        dimensional_constants(N)


def test_unit_sphere_area():
    assert unit_sphere_area(1) == pytest.approx(2.0, rel=1e-14)
    assert unit_sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-14)
    assert unit_sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-14)


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_dimensional_constants_vs_oracles(N):
    c = dimensional_constants(N)
    half = mp.mpf(N) / 2
    assert c.c_N == pytest.approx(float(mp.pi ** (-half) * mp.gamma(half)), rel=1e-13)
    # zero-order coefficient with the convention used by the operator (see README)
    assert c.rho_N == pytest.approx(float(2 * mp.log(2) + mp.digamma(half) - mp.euler), rel=1e-12, abs=1e-13)
    a_ref = (2 / mp.mpf(N)) * mp.log(mp.gamma(N) / mp.gamma(half)) - mp.log(4 * mp.pi) - 2 * mp.digamma(half)
    assert c.a_N == pytest.approx(float(a_ref), rel=1e-12, abs=1e-13)
    # d_N = 4 + (2 pi)^{-N} |S^{N-1}| int_0^1 (2 ln r)^2 r^{N-1} dr, and that radial integral is 8/N^3
    sphere = 2 * mp.pi**half / mp.gamma(half)
    d_ref = 4 + (2 * mp.pi) ** (-N) * sphere * 8 / mp.mpf(N) ** 3
    assert c.d_N == pytest.approx(float(d_ref), rel=1e-10)


def test_rho_one_equals_minus_two_gamma():
    assert dimensional_constants(1).rho_N == pytest.approx(-2 * EULER_GAMMA, rel=1e-14)


def test_d1_closed_form():
    assert dimensional_constants(1).d_N == pytest.approx(4 + 8 / math.pi, rel=1e-14)


@pytest.mark.parametrize("N,s", [(1, 0.1), (1, 0.4), (2, 0.3), (3, 1.2)])
def test_kappa_matches_mpmath(N, s):
    s_ = mp.mpf(s)
    ref = (
        2 ** (-2 * s_) * mp.pi ** (-s_) * mp.gamma((N - 2 * s_) / 2) / mp.gamma((N + 2 * s_) / 2)
        * (mp.gamma(N) / mp.gamma(mp.mpf(N) / 2)) ** (2 * s_ / N)
    )
    assert const_kappa(N, s) == pytest.approx(float(ref), rel=1e-12)


@pytest.mark.parametrize("s", [0.0, 0.5, 0.7])
def test_kappa_domain_n1(s):
    with pytest.raises(DomainError):
        const_kappa(1, s)


def test_kappa_limit_n1_closed_form():
    assert kappa_small_s_limit(1) == pytest.approx(4 * math.exp(2 * EULER_GAMMA) / math.pi**2, rel=1e-13)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_kappa_limit_matches_root(N):
    assert const_kappa(N, 1e-5) ** 1e5 == pytest.approx(kappa_small_s_limit(N), rel=1e-4)


@settings(max_examples=100, deadline=None)
@given(
    st.floats(min_value=1.0001, max_value=1e4),
    st.floats(min_value=0.0, max_value=2.0),
    st.floats(min_value=0.01, max_value=2.0),
)
def test_log_power_bound_nonnegative(r, alpha, delta):
    assert log_power_bound_gap(r, alpha, alpha + delta) >= -1e-9 * r ** (alpha + delta)


def test_log_power_bound_requires_order():
    with pytest.raises(DomainError):
        log_power_bound_gap(2.0, 1.0, 1.0)
