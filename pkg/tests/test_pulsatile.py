import math

import numpy as np
import pytest
import scipy.special

from radm.pulsatile import (
    BesselRangeError,
    NoReversalRegimeError,
    PulsatileCase,
    alpha_reversal_bound,
    alpha_womersley,
    annular_effect,
    bessel_j0_complex,
    channel_eigen_solution,
    channel_pde_residual,
    channel_profile,
    crank_nicolson_channel,
    decay_rate,
    mode_coefficient,
    pipe_ode_residual,
    pipe_profile,
    womersley,
    womersley_ratio,
)

CASE = dict(R=1.0, omega=144.0, nu=1.0)


@pytest.mark.parametrize(
    "z", [0.5, 3 + 4j, -7j, 12 * (1 + 1j) / math.sqrt(2), 30.0, 49.0 + 1.0j, 20 * np.exp(0.3j)]
)
def test_j0_against_scipy(z):
    ref = scipy.special.jv(0, z)
    assert abs(bessel_j0_complex(z) - ref) <= 1e-13 * max(1.0, abs(ref))


def test_j0_near_zero_on_real_axis():
    z0 = scipy.special.jn_zeros(0, 10)[-1]
    assert abs(bessel_j0_complex(z0 + 1e-3) - scipy.special.j0(z0 + 1e-3)) < 1e-14


def test_j0_range_guard():
    with pytest.raises(BesselRangeError):
        bessel_j0_complex(51.0)


def test_dimensionless_numbers():
    c = PulsatileCase(**CASE)
    assert womersley(c) == 12.0
    assert alpha_womersley(c) == 12.0
    c1 = PulsatileCase(**CASE, alpha=1.0)
    assert np.isclose(womersley(c1) / alpha_womersley(c1), womersley_ratio(c1))
    assert womersley_ratio(c1) >= 1


def test_reversal_bound():
    b = alpha_reversal_bound(12.0, 1.0, 144.0)
    assert np.isclose(b, (12.0**4 - 1e4) ** 0.25 / 120.0)
    with pytest.raises(NoReversalRegimeError):
        alpha_reversal_bound(10.0, 1.0, 144.0)


def test_case_validation():
    with pytest.raises(ValueError):
        PulsatileCase(R=0, omega=1, nu=1)
    with pytest.raises(ValueError):
        PulsatileCase(R=1, omega=1, nu=1, alpha=-0.1)


@pytest.mark.parametrize("alpha", [0.0, 0.1, 1.0])
def test_channel_boundary_and_symmetry(alpha):
    c = PulsatileCase(**CASE, alpha=alpha)
    for t in (0.0, 0.3, 1.7):
        assert abs(channel_profile(c, t, 1.0)) < 1e-13
        x = np.linspace(0, 1, 11)
        assert np.allclose(channel_profile(c, t, x), channel_profile(c, t, -x), atol=1e-15)


def test_channel_low_frequency_limit():
    # quasi-steady Poiseuille: w ~ (R^2 - x^2)/(2 nu) cos(omega t)
    c = PulsatileCase(R=1.0, omega=1e-3, nu=1.0)
    x = np.linspace(-1, 1, 21)
    assert np.allclose(channel_profile(c, 0.0, x), (1 - x**2) / 2, atol=1e-3)


def test_channel_rejects_outside():
    with pytest.raises(ValueError):
        channel_profile(PulsatileCase(**CASE), 0.0, 1.5)


@pytest.mark.parametrize("alpha", [0.0, 0.1, 1.0])
def test_residuals(alpha):
    c = PulsatileCase(**CASE, alpha=alpha)
    assert channel_pde_residual(c, 0.0) <= 1e-6
    assert channel_pde_residual(c, 0.4) <= 1e-6
    assert pipe_ode_residual(c) <= 1e-6


def test_pipe_wall_value_and_regularity():
    c = PulsatileCase(**CASE, alpha=0.1)
    assert abs(pipe_profile(c, 1.0)) < 1e-14
    r = np.array([0.0, 1e-4])
    w = pipe_profile(c, r)
    assert abs(w[1] - w[0]) < 1e-6


def test_annular_effect_regimes():
    assert annular_effect(PulsatileCase(**CASE))[1:] == (True, True)
    xmax, rev, ann = annular_effect(PulsatileCase(**CASE, alpha=1.0))
    assert not rev and not ann


def test_mode_coefficient_limits():
    lam, nu, alpha, beta = 2.0, 0.5, 0.3, 1.5
    assert mode_coefficient(0.0, lam, nu, alpha, beta, 0.7) == 0.7
    assert np.isclose(mode_coefficient(1e4, lam, nu, alpha, beta, 0.7), beta / (lam * nu))
    # decay is capped at nu / alpha^2 for every mode
    assert decay_rate(1e12, nu, alpha) <= nu / alpha**2
    with pytest.raises(ValueError):
        mode_coefficient(1.0, 0.0, nu, alpha, beta, 0.0)


def test_mode_coefficient_satisfies_ode():
    lam, nu, alpha, beta, c0 = 3.0, 0.2, 0.5, 1.0, -0.4
    t, h = 0.7, 1e-5
    dc = (mode_coefficient(t + h, lam, nu, alpha, beta, c0) - mode_coefficient(t - h, lam, nu, alpha, beta, c0)) / (2 * h)
    c = mode_coefficient(t, lam, nu, alpha, beta, c0)
    assert abs((1 + alpha**2 * lam) * dc + nu * lam * c - beta) < 1e-8


def test_eigen_solution_steady_state():
    x = np.linspace(-1, 1, 41)
    w = channel_eigen_solution(1.0, 1.0, 0.3, 50.0, x)
    assert np.allclose(w, (1 - x**2) / 2, atol=1e-6)


def test_crank_nicolson_short():
    x, (w,) = crank_nicolson_channel(1.0, 1.0, 0.1, [0.2], nx=400, dt=2e-3)
    ref = channel_eigen_solution(1.0, 1.0, 0.1, 0.2, x)
    assert np.abs(w - ref).max() < 1e-4
