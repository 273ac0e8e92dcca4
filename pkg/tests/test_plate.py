import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate
from scipy import optimize

from movingatom import acceptance, plate
from movingatom.errors import DomainError, RegularizationError
from movingatom.oracle import oracle_coeff_A, oracle_coeff_B
from movingatom.params import AtomParams, MirrorParams, rescale
from movingatom.plate import (
    alpha_beta,
    coeff_A_parallel,
    coeff_A_perp,
    coeff_A_zero_loss,
    coeff_B_parallel,
    coeff_B_perp,
    im_gamma_mp_smallosc,
    m_parallel,
    m_parallel_far_limit,
    m_perp,
    plate_kernel_point,
)
from movingatom.special import sine_integral
from movingatom.trajectory import LineSpectrum

ATOM = AtomParams(1.0, 1.0)


def _mirror(omega_m=2.0, xi=0.01):
    return MirrorParams(1.0, omega_m, xi)


def _stated_closed_form(omega_m, a):
    return 2 / a ** 2 * (2 - (1 + omega_m * a) * math.exp(-omega_m * a))


# -- alpha, beta -------------------------------------------------------------------


def test_alpha_beta_examples():
    assert alpha_beta(0.0, 0.0) == (0.0, 0.0)
    assert alpha_beta(1.0, 0.0) == (0.0, 1.0)
    assert alpha_beta(-1.0, 0.0) == (1.0, 0.0)


@given(st.floats(-1e6, 1e6), st.floats(0, 1e3))
def test_alpha_beta_relations(u, xi):
    al, be = alpha_beta(u, xi)
    assert al >= 0 and be >= 0
    scale = max(abs(u), xi, 1e-300)
    assert abs((be * be - al * al) - u) <= 1e-12 * scale
    assert abs(al * be - xi / 2) <= 1e-12 * scale


# -- B coefficients ------------------------------------------------------------------


def test_b_at_zero():
    assert coeff_B_perp(0.0) == 0.0
    assert coeff_B_parallel(0.0) == 0.0


def test_b_perp_at_one():
    exact = (-2 * math.cos(2) + math.sin(2)) / 4
    assert abs(coeff_B_perp(1.0) - exact) < 1e-15
    assert abs(exact - 0.435397) < 1e-6
    ref, _ = sp_integrate.quad(lambda u: u * math.sin(2 * u), 0, 1, epsabs=1e-15, epsrel=1e-13)
    assert abs(coeff_B_perp(1.0) - ref) < 1e-14


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0, 100.0])
def test_si_identity_points(x):
    assert abs(coeff_B_parallel(x) + coeff_B_perp(x) - sine_integral(2 * x)) < 1e-12


def test_si_identity_log_grid():
    xs = np.geomspace(1e-3, 1e3, 200)
    resid = coeff_B_parallel(xs) + coeff_B_perp(xs) - sine_integral(2 * xs)
    assert np.max(np.abs(resid)) < 1e-12


@pytest.mark.parametrize("x", [1e-4, 1e-3, 0.2, 0.4999, 0.5, 0.5001, 2.0, 37.0])
def test_b_against_defining_integrals(x):
    assert abs(coeff_B_perp(x) - oracle_coeff_B("perp", x)) < 1e-13
    assert abs(coeff_B_parallel(x) - oracle_coeff_B("par", x)) < 1e-13


def test_b_small_x_series():
    x = 1e-4
    assert math.isclose(coeff_B_perp(x), 2 * x / 3 - 4 * x ** 3 / 15, rel_tol=1e-15)
    assert math.isclose(coeff_B_parallel(x), 4 * x / 3 - 8 * x ** 3 / 45, rel_tol=1e-15)


def test_b_domain():
    with pytest.raises(DomainError):
        coeff_B_perp(-1.0)
    with pytest.raises(DomainError):
        coeff_B_parallel(np.array([1.0, -1.0]))


def test_tampered_b_perp_fails_acceptance(monkeypatch):
    original = plate._b_perp_scalar
    monkeypatch.setattr(plate, "_b_perp_scalar", lambda x: -original(x))
    passed, _, _ = acceptance.c06_si_identity()
    assert not passed


# -- A coefficients ---------------------------------------------------------------


@pytest.mark.parametrize("coeff,kind", [(coeff_A_parallel, "par"), (coeff_A_perp, "perp")])
def test_a_against_romberg_oracle(coeff, kind):
    main = coeff(0.01, 2.0, 1.0).value
    ref = oracle_coeff_A(kind, 0.01, 2.0, 1.0)
    assert abs(main - ref) <= 1e-6 * abs(ref)


@pytest.mark.parametrize("omega_m,a", [(2.0, 1.0), (1.0, 2.0), (4.0, 0.5)])
def test_a_ladder_converges_to_zero_loss_value(omega_m, a):
    limit = coeff_A_zero_loss(omega_m, a)
    for coeff in (coeff_A_parallel, coeff_A_perp):
        vals = [coeff(xi, omega_m, a).value for xi in (1e-2, 1e-3, 1e-4, 1e-5)]
        gaps = [abs(v - limit) for v in vals]
        assert gaps[0] > gaps[1] > gaps[2] > gaps[3]
        # leading gap is linear in xi (A_par has a xi^(3/2) correction on top)
        assert 9 < gaps[2] / gaps[3] < 11
        assert abs(vals[3] + (vals[3] - vals[2]) / 9 - limit) < 1e-5 * abs(limit)


def test_a_lossless_integral_matches_zero_loss_value():
    for omega_m, a in ((2.0, 1.0), (0.7, 3.0)):
        lim = coeff_A_zero_loss(omega_m, a)
        assert math.isclose(coeff_A_perp(0.0, omega_m, a).value, lim, rel_tol=1e-9)
        assert math.isclose(coeff_A_parallel(0.0, omega_m, a).value, lim, rel_tol=1e-9)


def test_a_stated_closed_form_example():
    # example point: xi = 0 against (2/a^2)(2 - (1 + Omega_m a) e^{-Omega_m a})
    expect = _stated_closed_form(2.0, 1.0)
    for coeff in (coeff_A_parallel, coeff_A_perp):
        assert math.isclose(coeff(0.0, 2.0, 1.0).value, expect, rel_tol=1e-6)


def test_a_domain():
    with pytest.raises(DomainError):
        coeff_A_perp(0.01, 2.0, 0.0)
    with pytest.raises(DomainError):
        coeff_A_parallel(-0.01, 2.0, 1.0)


# -- kernels ------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.floats(-6, 6), st.sampled_from([0.5, 1.0, 2.0]), st.sampled_from([1.0, 2.0]))
def test_decomposition_and_parity(nu, a, omega_m):
    mirror = _mirror(omega_m)
    k = plate_kernel_point(ATOM, mirror, a, nu)
    assert k.m_parallel == k.resonance_term_parallel + k.threshold_term_parallel
    assert k.m_perp == k.resonance_term_perp + k.threshold_term_perp
    if abs(nu) <= ATOM.omega_p:
        assert k.threshold_term_parallel == 0.0 and k.threshold_term_perp == 0.0
    km = plate_kernel_point(ATOM, mirror, a, -nu)
    assert km.m_parallel == k.m_parallel and km.m_perp == k.m_perp


def test_below_threshold_lossless_is_zero():
    k = plate_kernel_point(ATOM, MirrorParams(1.0, 2.0, 0.0), 1.0, 0.7)
    assert k.m_parallel == 0.0 and k.m_perp == 0.0
    small = plate_kernel_point(ATOM, MirrorParams(1.0, 2.0, 1e-6), 1.0, 0.7)
    assert abs(small.m_parallel) < 1e-8 and abs(small.m_perp) < 1e-8


def test_lossless_resonance_needs_regularization():
    with pytest.raises(RegularizationError):
        m_parallel(ATOM, MirrorParams(1.0, 2.0, 0.0), 1.0, 3.0)
    with pytest.raises(RegularizationError):
        m_perp(ATOM, MirrorParams(1.0, 2.0, 0.0), 1.0, -3.0)
    # threshold singularity at (|nu| - Omega_p) = Omega_m
    with pytest.raises(RegularizationError):
        m_parallel(ATOM, MirrorParams(1.0, 2.0, 0.0), 1.0, 3.0 + 0.0 * 1)


@pytest.mark.parametrize("omega_m,a", [(2.0, 1.0), (1.0, 0.5)])
def test_peak_at_resonance(omega_m, a):
    mirror = _mirror(omega_m)
    res = omega_m + 1.0
    width = mirror.xi / (2 * res)
    nus = np.linspace(res - 0.5, res + 0.5, 2001)
    par = [abs(plate_kernel_point(ATOM, mirror, a, nu).m_parallel) for nu in nus]
    perp = [abs(plate_kernel_point(ATOM, mirror, a, nu).m_perp) for nu in nus]
    assert abs(nus[int(np.argmax(par))] - res) <= width
    assert abs(nus[int(np.argmax(perp))] - res) <= width


def test_far_plate_limits():
    mirror = _mirror(1.0)
    k = plate_kernel_point(ATOM, mirror, 50.0, 3.0)
    lim = m_parallel_far_limit(ATOM, mirror, 3.0)
    assert abs(k.m_parallel - lim) <= 0.02 * abs(lim)
    assert abs(k.m_perp) < 0.05 * abs(k.m_parallel)
    far = plate_kernel_point(ATOM, _mirror(2.0), 50.0, 10.0)
    lim = m_parallel_far_limit(ATOM, _mirror(2.0), 10.0)
    assert abs(far.m_parallel - lim) <= 0.02 * abs(lim)


def test_far_limit_is_p_xi_modulated_square_law():
    mirror = _mirror(1.5, 0.02)
    for nu in (1.3, 2.0, 4.0):
        k = nu - 1.0
        expect = k * k * (k * k - 2.25) / ((k * k - 2.25) ** 2 + 0.02 ** 2) / 64
        assert math.isclose(m_parallel_far_limit(ATOM, mirror, nu), expect, rel_tol=1e-14)
    assert m_parallel_far_limit(ATOM, mirror, 0.9) == 0.0


def test_threshold_sign_change_at_mirror_frequency():
    mirror = _mirror(2.0)
    nus = np.linspace(2.5, 3.5, 1000)  # no grid point exactly on the zero
    thr = np.array([m_parallel(ATOM, mirror, 1.0, nu).threshold for nu in nus])
    flips = np.nonzero(np.diff(np.sign(thr)))[0]
    assert len(flips) == 1
    assert abs(0.5 * (nus[flips[0]] + nus[flips[0] + 1]) - 3.0) <= nus[1] - nus[0]


def test_perp_threshold_zeros_follow_b_perp():
    # first positive zero of sin 2x - 2x cos 2x
    x0 = optimize.brentq(lambda x: math.sin(2 * x) - 2 * x * math.cos(2 * x), 2.0, 2.4)
    a = 2.0
    mirror = _mirror(1.0)
    nu_zero = 1.0 + x0 / a
    step = 1e-4
    below = m_perp(ATOM, mirror, a, nu_zero - step).threshold
    above = m_perp(ATOM, mirror, a, nu_zero + step).threshold
    assert below * above < 0
    assert m_perp(ATOM, mirror, a, nu_zero).threshold == pytest.approx(0.0, abs=1e-12)


def _resonance_areas(omega_m, a, normalize=False):
    res = omega_m + 1.0
    areas = []
    for xi in (0.01, 0.005):
        mirror = _mirror(omega_m, xi)
        w = xi / (2 * res)
        norm = coeff_A_parallel(xi, omega_m, a).value if normalize else 1.0
        r = sp_integrate.quad(lambda nu: m_parallel(ATOM, mirror, a, nu).resonance / norm,
                              res - 20 * w, res + 20 * w, points=[res], epsrel=1e-10, limit=200)[0]
        areas.append(r)
    return areas


@pytest.mark.parametrize("omega_m,a", [(2.0, 1.0), (1.0, 2.0), (4.0, 0.5)])
def test_resonance_area_is_loss_independent(omega_m, a):
    areas = _resonance_areas(omega_m, a)
    assert abs(areas[1] / areas[0] - 1) < 0.01


def test_resonance_lineshape_area_is_loss_independent():
    # with A_par divided out only the Lorentzian in nu^2 - M^2 is left
    areas = _resonance_areas(2.0, 1.0, normalize=True)
    assert abs(areas[1] / areas[0] - 1) < 1e-4


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(0.3, 6.0))
def test_kernel_scaling_covariance(lam, nu):
    mirror = _mirror(2.0, 0.05)
    atom2, mirror2, a2, nu2 = rescale(lam, ATOM, mirror, 1.0, nu)
    k1 = plate_kernel_point(ATOM, mirror, 1.0, nu)
    k2 = plate_kernel_point(atom2, mirror2, a2, nu2)
    for v1, v2 in ((k1.m_parallel, k2.m_parallel), (k1.m_perp, k2.m_perp)):
        assert math.isclose(v2, lam ** 3 * v1, rel_tol=1e-7, abs_tol=1e-14 * lam ** 3)


# -- rates --------------------------------------------------------------------------


def test_rate_zero_spectra():
    mirror = _mirror()
    assert im_gamma_mp_smallosc(ATOM, mirror, 1.0, None, None).value == 0.0
    assert im_gamma_mp_smallosc(ATOM, mirror, 1.0, lambda nu: 0.0, lambda nu: 0.0,
                                nu_max=5.0).value == 0.0


def test_rate_lines():
    mirror = _mirror()
    amp_sq = 0.01
    par = im_gamma_mp_smallosc(ATOM, mirror, 1.0, LineSpectrum(2.5, amp_sq, 0.0), None).value
    assert math.isclose(par, 0.5 * amp_sq / 2 * m_parallel(ATOM, mirror, 1.0, 2.5).total,
                        rel_tol=1e-14)
    perp_only = LineSpectrum(2.5, 0.0, amp_sq)
    perp = im_gamma_mp_smallosc(ATOM, mirror, 1.0, perp_only, None).value
    assert math.isclose(perp, 0.5 * amp_sq / 2 * m_perp(ATOM, mirror, 1.0, 2.5).total,
                        rel_tol=1e-14)
    with pytest.raises(DomainError):
        im_gamma_mp_smallosc(ATOM, mirror, 1.0, perp_only, lambda nu: 0.0)


def test_pure_perpendicular_motion_has_no_parallel_part(monkeypatch):
    calls = []
    real = plate.m_parallel

    def spy(*args, **kwargs):
        calls.append(args)
        return real(*args, **kwargs)

    monkeypatch.setattr(plate, "m_parallel", spy)
    im_gamma_mp_smallosc(ATOM, _mirror(), 1.0, LineSpectrum(2.5, 0.0, 0.01), None)
    im_gamma_mp_smallosc(ATOM, _mirror(), 1.0, None, lambda nu: math.exp(-(nu - 2) ** 2),
                         nu_max=4.0, tol=1e-6)
    assert calls == []


@pytest.mark.slow
def test_rate_narrow_gaussian_ladder():
    mirror = _mirror()
    amp, nu0 = 30.0, 2.5
    exact = im_gamma_mp_smallosc(ATOM, mirror, 1.0, LineSpectrum(nu0, amp ** 2, 0.0), None).value

    def spectrum(w):
        def y_sq(nu):
            g = lambda z: math.exp(-0.5 * (z / w) ** 2) / (w * math.sqrt(2 * math.pi))  # noqa: E731
            return math.pi * amp ** 2 / 2 * (g(nu - nu0) + g(nu + nu0))
        return y_sq

    vals = [im_gamma_mp_smallosc(ATOM, mirror, 1.0, spectrum(w), None, nu_max=nu0 + 12 * w,
                                 tol=1e-11).value for w in (0.04, 0.02, 0.01)]
    gaps = [abs(v - exact) for v in vals]
    assert gaps[0] > gaps[1] > gaps[2]
    r1 = [(4 * b - a) / 3 for a, b in zip(vals[:-1], vals[1:])]
    r2 = (16 * r1[1] - r1[0]) / 15
    assert abs(r2 - exact) <= 1e-6 * abs(exact)
