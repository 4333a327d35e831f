"""Exact pulsatile-flow solutions for Navier-Stokes and NS-Voigt.

Fully developed flow ``v = (0, 0, w(t, x))`` driven by an axial pressure
drop reduces the Voigt system to the scalar problem

    w_t - alpha^2 Lap w_t - nu Lap w = lambda(t),    w = 0 on the wall.

This module evaluates its closed-form solutions for a plane channel
``|x| < R`` and a circular pipe ``r < R``, plus the Dirichlet eigenmode
solution for a constant pressure drop, and an independent Crank-Nicolson
solver for the channel used to cross-check it.
"""
import cmath
import math
from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.sparse
import scipy.sparse.linalg


class BesselRangeError(ValueError):
    pass


class NearZeroDenominatorError(ArithmeticError):
    pass


class BranchError(ArithmeticError):
    """Imaginary residue of a supposedly real closed form is too large."""


class NoReversalRegimeError(ValueError):
    pass


@dataclass(frozen=True)
class PulsatileCase:
    R: float
    omega: float
    nu: float
    alpha: float = 0.0

    def __post_init__(self):
        for name in ("R", "omega", "nu"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")

    @property
    def wo(self):
        return womersley(self)

    @property
    def alpha_wo(self):
        return alpha_womersley(self)


# ---------------------------------------------------------------------------
# dimensionless numbers
# ---------------------------------------------------------------------------

def womersley(case):
    return case.R * math.sqrt(case.omega / case.nu)


def alpha_womersley(case):
    """``R sqrt(omega) / (alpha^4 omega^2 + nu^2)^(1/4)``."""
    a, w, nu = case.alpha, case.omega, case.nu
    return case.R * math.sqrt(w) / (a**4 * w * w + nu * nu) ** 0.25


def womersley_ratio(case):
    """``Wo / alpha-Wo = (1 + alpha^4 omega^2 / nu^2)^(1/4)``, always >= 1."""
    a, w, nu = case.alpha, case.omega, case.nu
    return (1.0 + (a * a * w / nu) ** 2) ** 0.25


def alpha_reversal_bound(wo, nu, omega):
    """Largest ``alpha`` that still shows flow reversal at Womersley number ``wo``."""
    q = wo**4 - 10000.0
    if q <= 0:
        raise NoReversalRegimeError(f"Wo={wo} <= 10: no flow-reversal regime")
    return math.sqrt(nu) * q**0.25 / (10.0 * math.sqrt(omega))


# ---------------------------------------------------------------------------
# Bessel J0 by power series
# ---------------------------------------------------------------------------

J0_MAX_ABS_Z = 50.0
_EPS = np.finfo(float).eps


def _neumaier(total, comp, x):
    t = total + x
    if abs(total) >= abs(x):
        comp += (total - t) + x
    else:
        comp += (x - t) + total
    return t, comp


def _j0_series_float(z):
    q = -0.25 * z * z
    term = 1.0 + 0.0j
    sr, cr = 1.0, 0.0
    si, ci = 0.0, 0.0
    biggest = 1.0
    half = abs(z) / 2.0
    m = 0
    while True:
        m += 1
        term *= q / (m * m)
        sr, cr = _neumaier(sr, cr, term.real)
        si, ci = _neumaier(si, ci, term.imag)
        a = abs(term)
        biggest = max(biggest, a)
        if m > half and a <= 1e-18 * max(abs(complex(sr + cr, si + ci)), 1e-300):
            break
        if m > 400:
            break
    return complex(sr + cr, si + ci), biggest, m


def _j0_series_mp(z, bits):
    with mpmath.workprec(bits):
        zz = mpmath.mpc(z.real, z.imag)
        q = -zz * zz / 4
        term = mpmath.mpc(1)
        total = mpmath.mpc(1)
        m = 0
        tiny = mpmath.mpf(2) ** (-bits)
        while True:
            m += 1
            term *= q / (m * m)
            total += term
            if m > abs(z) / 2 and abs(term) <= tiny * abs(total):
                break
        return complex(total)


def bessel_j0_complex(z):
    """``J0(z) = sum_m (-z^2/4)^m / (m!)^2`` for complex ``|z| <= 50``.

    The series is summed in double precision with Neumaier compensation.
    When cancellation between terms would cost more than about three
    digits (large ``|z|`` near the real axis) it is re-summed with enough
    extra mpmath precision to cover the loss.
    """
    z = complex(z)
    if abs(z) > J0_MAX_ABS_Z:
        raise BesselRangeError(f"|z| = {abs(z):.3g} exceeds series guard {J0_MAX_ABS_Z}")
    if z == 0:
        return 1.0 + 0.0j
    value, biggest, nterms = _j0_series_float(z)
    mag = abs(value)
    loss = biggest / mag if mag > 0 else math.inf
    if loss * nterms * _EPS <= 1e-14:
        return value
    extra = 64 if not math.isfinite(loss) else int(math.log2(loss * nterms)) + 1
    return _j0_series_mp(z, 64 + extra)


def bessel_j0_array(z):
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty_like(z)
    for idx, val in np.ndenumerate(z):
        out[idx] = bessel_j0_complex(val)
    return out


# ---------------------------------------------------------------------------
# plane channel |x| < R driven by cos(omega t)
# ---------------------------------------------------------------------------

def _cosh_ratio(x, R, c):
    """``cosh(x / c) / cosh(R / c)`` without overflow (``Re c > 0``)."""
    ax = np.abs(x)
    return np.exp((ax - R) / c) * (1 + np.exp(-2 * ax / c)) / (1 + np.exp(-2 * R / c))


def _voigt_length(case, sign):
    # principal square root: positive real part, so cosh terms decay inward
    return np.sqrt(complex(case.alpha**2, sign * case.nu / case.omega))


def _channel_complex(case, t, x):
    w = case.omega
    x = np.asarray(x, dtype=np.float64)
    cp = _voigt_length(case, +1.0)
    cm = _voigt_length(case, -1.0)
    s, c = math.sin(w * t), math.cos(w * t)
    return (
        s / w
        + (1.0 / (2 * w)) * complex(-s, -c) * _cosh_ratio(x, case.R, cp)
        + (1.0 / (2 * w)) * complex(-s, c) * _cosh_ratio(x, case.R, cm)
    )


def channel_profile(case, t, x):
    """Real solution ``w(t, x)`` of the plane channel driven by ``cos(omega t)``.

    Sums the two complex-conjugate branches of the closed form; raises
    :class:`BranchError` if the imaginary parts fail to cancel.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(x) > case.R * (1 + 1e-12)):
        raise ValueError("channel profile requires |x| <= R")
    w = _channel_complex(case, t, x)
    scale = max(float(np.max(np.abs(w.real))), 1e-300)
    resid = float(np.max(np.abs(w.imag)))
    if resid > 1e-10 * scale and resid > 1e-300:
        raise BranchError(f"imaginary residue {resid:.3e} exceeds 1e-10 of max|w| {scale:.3e}")
    out = w.real
    return float(out) if out.ndim == 0 else out


def annular_effect(case, t=0.0, npoints=2001):
    """Locate the velocity maximum and test for flow reversal at time ``t``.

    Returns ``(x_of_max_abs, has_reversal, annular)`` on a half-channel grid
    ``0 <= x <= R``; ``annular`` means the maximum of ``|w|`` lies in
    ``(R/2, R)`` and ``has_reversal`` means ``w`` changes sign along the radius.
    """
    x = np.linspace(0.0, case.R, npoints)
    w = channel_profile(case, t, x)
    xmax = float(x[np.argmax(np.abs(w))])
    interior = w[:-1]
    nz = interior[np.abs(interior) > 1e-12 * np.abs(interior).max()]
    reversal = bool(nz.size and (nz.min() < 0 < nz.max()))
    annular = case.R / 2 < xmax < case.R
    return xmax, reversal, annular


# ---------------------------------------------------------------------------
# circular pipe r < R driven by exp(i omega t)
# ---------------------------------------------------------------------------

def _pipe_kappa(case):
    return 1j * math.sqrt(case.omega) / cmath.sqrt(complex(case.alpha**2 * case.omega, -case.nu))


def _pipe_complex(case, r):
    kappa = _pipe_kappa(case)
    denom = bessel_j0_complex(kappa * case.R)
    if abs(denom) < 1e-14:
        raise NearZeroDenominatorError(f"|J0(kappa R)| = {abs(denom):.3e}")
    r = np.asarray(r, dtype=np.float64)
    num = bessel_j0_array(kappa * r)
    return (1.0 - num / denom) / (1j * case.omega)


def pipe_profile(case, r):
    """Complex amplitude ``W(r)`` of the single-mode pipe solution ``exp(i omega t) W(r)``."""
    r = np.asarray(r, dtype=np.float64)
    if np.any(r < 0) or np.any(r > case.R * (1 + 1e-12)):
        raise ValueError("pipe profile requires 0 <= r <= R")
    out = _pipe_complex(case, r)
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# finite-difference residuals (independent checks of the closed forms)
# ---------------------------------------------------------------------------

_D2_8 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])
_D1_8 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])


def _stencil(values, weights, h, power):
    width = len(weights)
    m = values.shape[-1] - width + 1
    acc = np.zeros(values.shape[:-1] + (m,), dtype=values.dtype)
    for j, wj in enumerate(weights):
        acc = acc + wj * values[..., j : j + m]
    return acc / h**power


def channel_pde_residual(case, t, npoints=401, dt_frac=0.02):
    """Max |w_t - alpha^2 w_txx - nu w_xx - cos(omega t)| on interior nodes.

    Central eighth-order differences in space on an ``npoints`` grid over
    ``[-R, R]`` and in time with step ``dt_frac / omega``; nodes whose
    stencil leaves the channel are skipped.
    """
    x = np.linspace(-case.R, case.R, npoints)
    h = x[1] - x[0]
    tau = dt_frac / case.omega
    times = t + tau * np.arange(-4, 5)
    w = np.array([channel_profile(case, s, x) for s in times])
    wxx = _stencil(w, _D2_8, h, 2)
    wt = _stencil(w[:, 4:-4].T, _D1_8, tau, 1)[:, 0]
    wtxx = _stencil(wxx.T, _D1_8, tau, 1)[:, 0]
    res = wt - case.alpha**2 * wtxx - case.nu * wxx[4] - math.cos(case.omega * t)
    return float(np.max(np.abs(res)))


def pipe_ode_residual(case, npoints=401):
    """Max |i omega W - (i omega alpha^2 + nu)(W'' + W'/r) - 1| on ``0 < r < R``."""
    r = np.linspace(0.0, case.R, npoints)
    h = r[1] - r[0]
    W = _pipe_complex(case, r)
    d2 = _stencil(W, _D2_8, h, 2)
    d1 = _stencil(W, _D1_8, h, 1)
    rc = r[4:-4]
    Wc = W[4:-4]
    res = 1j * case.omega * Wc - (1j * case.omega * case.alpha**2 + case.nu) * (d2 + d1 / rc) - 1.0
    return float(np.max(np.abs(res)))


# ---------------------------------------------------------------------------
# Dirichlet eigenmodes for a constant pressure drop
# ---------------------------------------------------------------------------

def mode_coefficient(t, lambda_m, nu, alpha, beta_m, c0):
    """Coefficient of one Dirichlet eigenmode under a unit pressure drop.

    Solves ``(1 + alpha^2 lambda) c' + nu lambda c = beta`` exactly:
    the mode relaxes from ``c0`` to ``beta / (lambda nu)`` at rate
    ``lambda nu / (1 + alpha^2 lambda)``, which never exceeds ``nu / alpha^2``.
    """
    if np.any(np.asarray(lambda_m) <= 0) or nu <= 0:
        raise ValueError("mode_coefficient needs lambda_m > 0 and nu > 0")
    rate = lambda_m * nu / (1.0 + alpha * alpha * lambda_m)
    decay = np.exp(-rate * t)
    return c0 * decay + beta_m / (lambda_m * nu) * (1.0 - decay)


def decay_rate(lambda_m, nu, alpha):
    return lambda_m * nu / (1.0 + alpha * alpha * lambda_m)


def channel_modes(R, m):
    """Eigenvalues and pressure-drop projections of ``sin(m pi (x + R) / 2R) / sqrt(R)``."""
    m = np.asarray(m, dtype=np.float64)
    lam = (m * np.pi / (2.0 * R)) ** 2
    beta = (2.0 * R / (m * np.pi)) * (1.0 - np.cos(m * np.pi)) / np.sqrt(R)
    return lam, beta


def channel_mode_functions(R, m, x):
    m = np.asarray(m, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    return np.sin(np.multiply.outer(x + R, m) * np.pi / (2.0 * R)) / np.sqrt(R)


def project_initial(R, w0, modes, quad_points=4096):
    """``c_m(0) = int w0 phi_m dx`` by Gauss-Legendre quadrature."""
    if w0 is None:
        return np.zeros(len(modes))
    xg, wg = np.polynomial.legendre.leggauss(quad_points)
    xg = R * xg
    wg = R * wg
    return (wg * w0(xg)) @ channel_mode_functions(R, modes, xg)


def channel_eigen_solution(R, nu, alpha, t, x, w0=None, n_modes=2000, pressure_drop=1.0):
    """Truncated eigenmode series for the channel under a constant pressure drop."""
    m = np.arange(1, n_modes + 1)
    lam, beta = channel_modes(R, m)
    c0 = project_initial(R, w0, m)
    c = mode_coefficient(t, lam, nu, alpha, pressure_drop * beta, c0)
    return channel_mode_functions(R, m, x) @ c


def crank_nicolson_channel(R, nu, alpha, times, nx=2000, dt=1e-3, w0=None, pressure_drop=1.0, startup=4):
    """Finite-difference solve of ``w_t - alpha^2 w_txx - nu w_xx = p`` on ``(-R, R)``.

    Second-order central differences in space, Crank-Nicolson in time with
    ``startup`` backward-Euler half steps to damp incompatible initial data.
    Returns ``(x, [w(t) for t in times])`` including the wall nodes.
    """
    x = np.linspace(-R, R, nx + 1)
    h = x[1] - x[0]
    m = nx - 1
    lap = scipy.sparse.diags([np.ones(m - 1), -2 * np.ones(m), np.ones(m - 1)], [-1, 0, 1], format="csc") / h**2
    eye = scipy.sparse.identity(m, format="csc")
    A = eye - alpha**2 * lap
    L = nu * lap
    w = np.zeros(m) if w0 is None else np.asarray(w0(x[1:-1]), dtype=np.float64)
    times = sorted(float(s) for s in times)
    out = []
    t = 0.0

    def solver_for(step):
        return scipy.sparse.linalg.factorized((A - 0.5 * step * L).tocsc()), (A + 0.5 * step * L).tocsr()

    be_solve = scipy.sparse.linalg.factorized((A - 0.5 * dt * L).tocsc()) if startup else None
    cn_solve, cn_rhs = solver_for(dt)
    nstart = startup
    for target in times:
        while t < target - 1e-12:
            step = min(dt, target - t)
            if nstart > 0 and step == dt:
                # two backward-Euler half steps replace one CN step
                for _ in range(2):
                    w = be_solve(A @ w + 0.5 * dt * pressure_drop)
                nstart -= 2
            elif step == dt:
                w = cn_solve(cn_rhs @ w + dt * pressure_drop)
            else:
                s, r = solver_for(step)
                w = s(r @ w + step * pressure_drop)
            t += step
        full = np.zeros(nx + 1)
        full[1:-1] = w
        out.append(full)
    return x, out
