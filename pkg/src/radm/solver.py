"""Time integration of the RADM momentum equation on the periodic box.

In Fourier space the model reads, mode by mode,

    (1 + alpha^2 |k|^2) dv/dt = f - P[(Dv . grad) Dv] - nu |k|^2 D v

with ``D`` the van Cittert symbol and ``P`` the Leray projector.  ``N = 0``
gives NS-Voigt, ``alpha = 0`` the Navier-Stokes equations.  Time stepping is
explicit second-order Adams-Bashforth; forcing rescales the energy of the
lowest shells after every step.
"""
import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import diagnostics
from .filters import SymbolTable
from .spectral import (
    Grid,
    SpectralField,
    divergence_products,
    make_rng,
    project_coeffs,
    random_field,
)

log = logging.getLogger(__name__)

BOOTSTRAP_SUBSTEPS = 10


class BlowUpError(FloatingPointError):
    def __init__(self, step, message="non-finite values in right-hand side"):
        super().__init__(f"{message} at step {step}")
        self.step = step


class CFLViolation(RuntimeError):
    pass


class CFLWarning(RuntimeWarning):
    pass


class ForcingError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    alpha: float = 0.0
    nu: float = 0.005
    N: int = 0
    dt: float = 1e-3
    n: int = 32
    forcing: Optional[tuple] = None
    steps: int = 0
    cfl: float = 0.5
    cfl_action: str = "warn"
    linear: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not self.nu >= 0:
            raise ValueError(f"nu must be >= 0, got {self.nu}")
        if self.N < 0 or int(self.N) != self.N:
            raise ValueError(f"N must be a non-negative integer, got {self.N}")
        if self.cfl_action not in ("warn", "abort", "ignore"):
            raise ValueError(f"cfl_action must be warn, abort or ignore, got {self.cfl_action!r}")
        if self.forcing is not None:
            object.__setattr__(self, "forcing", tuple(float(e) for e in self.forcing))
            if any(e <= 0 for e in self.forcing):
                raise ValueError("forcing shell targets must be positive")


@dataclass
class SolverState:
    v: SpectralField
    rhs_prev: Optional[np.ndarray] = None
    time: float = 0.0
    step: int = 0


class RADMSolver:
    """Right-hand side, stepper and forcing for one parameter set.

    ``body_force`` is an optional steady spectral forcing field ``f``; the
    shell-rescaling forcing is configured through ``params.forcing``.
    """

    def __init__(self, params, body_force=None, deconv=None, mask=None):
        self.params = params
        self.grid = Grid(params.n)
        self.table = SymbolTable.build(self.grid, params.alpha, params.N, deconv)
        self.mask = self.grid.dealias_mask if mask is None else np.asarray(mask, dtype=bool)
        if body_force is not None:
            body_force = SpectralField(self.grid, project_coeffs(self.grid, body_force.coeffs) * self.mask)
        self.body_force = body_force
        self._nu_k2_d = params.nu * self.table.ksq * self.table.dhat
        self.max_speed = 0.0

    # -- right-hand side -------------------------------------------------

    def nonlinear(self, w):
        """``P[(w . grad) w]`` for coefficient array ``w``; records max speed."""
        # overflow is reported as BlowUpError by the caller
        with np.errstate(over="ignore", invalid="ignore"):
            out, u = divergence_products(self.grid, w, None, self.mask, project=True)
            self.max_speed = float(np.sqrt((u * u).sum(axis=0).max()))
        return out

    def rhs_coeffs(self, v, step=0):
        t = self.table
        acc = -self._nu_k2_d * v
        if not self.params.linear:
            acc -= self.nonlinear(t.dhat * v)
        if self.body_force is not None:
            acc += self.body_force.coeffs
        acc *= t.fhat
        acc *= self.mask
        if not np.all(np.isfinite(acc)):
            raise BlowUpError(step)
        return acc

    def rhs_w_form(self, w, step=0):
        """Time derivative of ``w = Dv`` written directly in ``w``.

        ``D^{-1} F^{-1} w_t = f - P[(w . grad) w] - nu |k|^2 w``.
        """
        t = self.table
        acc = -self.params.nu * t.ksq * w
        if not self.params.linear:
            acc -= self.nonlinear(w)
        if self.body_force is not None:
            acc += self.body_force.coeffs
        acc *= t.fhat * t.dhat
        acc *= self.mask
        if not np.all(np.isfinite(acc)):
            raise BlowUpError(step)
        return acc

    # -- stepping ----------------------------------------------------------

    def check_cfl(self, step):
        if self.params.cfl_action == "ignore" or self.max_speed == 0:
            return
        dx = 2 * math.pi / self.grid.n
        limit = self.params.cfl * dx / self.max_speed
        if self.params.dt > limit:
            msg = f"step {step}: dt={self.params.dt:.3g} exceeds CFL limit {limit:.3g}"
            if self.params.cfl_action == "abort":
                raise CFLViolation(msg)
            warnings.warn(msg, CFLWarning, stacklevel=3)

    def advance(self, c, rhs_prev, rhs_fn, step):
        """One AB2 update of ``c``; returns ``(c_new, rhs(c))``.

        Without history the step is bootstrapped by ten forward-Euler
        substeps of ``dt / 10``.
        """
        dt = self.params.dt
        r = rhs_fn(c, step)
        self.check_cfl(step)
        if rhs_prev is None:
            sub = dt / BOOTSTRAP_SUBSTEPS
            x = c + sub * r
            for _ in range(BOOTSTRAP_SUBSTEPS - 1):
                x = x + sub * rhs_fn(x, step)
            return x, r
        return c + dt * (1.5 * r - 0.5 * rhs_prev), r

    def step(self, state):
        c, r = self.advance(state.v.coeffs, state.rhs_prev, self.rhs_coeffs, state.step)
        c *= self.mask
        return SolverState(SpectralField(self.grid, c), r, state.time + self.params.dt, state.step + 1)

    # -- forcing -------------------------------------------------------------

    def apply_forcing(self, state):
        """Rescale shells 1, 2, ... so their kinetic energy hits the targets.

        Returns ``(new_state, injected)`` with ``injected`` the change in
        model energy caused by the rescaling.
        """
        targets = self.params.forcing
        if not targets:
            return state, 0.0
        c = state.v.coeffs.copy()
        sq = (c.real**2 + c.imag**2).sum(axis=0)
        weight = self.table.model_weight()
        injected = 0.0
        for shell, target in enumerate(targets, start=1):
            sel = (self.grid.shell_index == shell) & self.mask
            e = 0.5 * float(sq[sel].sum())
            if e <= 0.0:
                raise ForcingError(f"shell {shell} carries no energy; cannot rescale to {target}")
            scale = math.sqrt(target / e)
            c[:, sel] *= scale
            injected += 0.5 * float((weight[sel] * sq[sel]).sum()) * (scale * scale - 1.0)
        return replace(state, v=SpectralField(self.grid, c)), injected

    # -- diagnostics -----------------------------------------------------------

    def energies(self, state):
        return diagnostics.compute_energies(state.v, self.table, self.params.nu, self.body_force)

    def spectrum(self, state):
        return diagnostics.compute_spectrum(state.v, self.table)


def rhs(solver, state):
    return SpectralField(solver.grid, solver.rhs_coeffs(state.v.coeffs, state.step))


def step_ab2(solver, state):
    return solver.step(state)


def apply_forcing(solver, state):
    return solver.apply_forcing(state)[0]


def voigt_equivalence_check(solver, state):
    """Max-norm gap between ``D (v after one step)`` and ``w = Dv`` stepped
    in its own form; the two are algebraically identical mode by mode."""
    d = solver.table.dhat
    v1, _ = solver.advance(state.v.coeffs, state.rhs_prev, solver.rhs_coeffs, state.step)
    w_prev = None if state.rhs_prev is None else d * state.rhs_prev
    w1, _ = solver.advance(d * state.v.coeffs, w_prev, solver.rhs_w_form, state.step)
    return float(np.abs(d * v1 - w1).max())


# ---------------------------------------------------------------------------
# initial conditions
# ---------------------------------------------------------------------------

def initial_spectrum_shape(k, k0=3.0):
    return k**4 * np.exp(-2.0 * (k / k0) ** 2)


def initial_field(n, seed, energy=0.1, k0=3.0, mask=None):
    """Seeded random solenoidal field with spectrum ``~ k^4 exp(-2 (k/k0)^2)``."""
    grid = Grid(n)
    rng = make_rng(seed)
    f = random_field(grid, rng, mask=mask)
    c = f.coeffs
    sq = (c.real**2 + c.imag**2).sum(axis=0)
    shells = grid.shell_index
    keep = grid.dealias_mask if mask is None else mask
    kmax = int(shells[keep].max())
    target = initial_spectrum_shape(np.arange(kmax + 1, dtype=np.float64), k0)
    target *= energy / target[1:].sum()
    for s in range(1, kmax + 1):
        sel = (shells == s) & keep
        e = 0.5 * float(sq[sel].sum())
        if e > 0:
            c[:, sel] *= math.sqrt(target[s] / e)
    return SpectralField(grid, c)


# ---------------------------------------------------------------------------
# driver with energy bookkeeping
# ---------------------------------------------------------------------------

class Integrator:
    """Steps a solver while recording the model-energy budget.

    ``reports[i]`` is taken after forcing at ``times[i]``; the running
    balance residual accounts for viscous loss, body-force work and energy
    injected by shell rescaling.
    """

    def __init__(self, solver, state):
        self.solver = solver
        self.state = state
        self.times = [state.time]
        self.reports = [solver.energies(state)]
        self._eps_int = 0.0
        self._work_int = 0.0
        self.injected = 0.0

    @property
    def report(self):
        return self.reports[-1]

    def balance(self):
        r0 = self.reports[0]
        r = self.reports[-1]
        defect = r.model_energy - r0.model_energy + self._eps_int - self._work_int - self.injected
        return abs(defect) / (r0.model_energy + 1.0)

    def step(self):
        prev = self.reports[-1]
        state = self.solver.step(self.state)
        before = self.solver.energies(state)
        state, inj = self.solver.apply_forcing(state)
        dt = state.time - self.state.time
        self._eps_int += 0.5 * dt * (prev.dissipation + before.dissipation)
        self._work_int += 0.5 * dt * (prev.work + before.work)
        self.injected += inj
        after = self.solver.energies(state) if inj else before
        self.state = state
        self.times.append(state.time)
        self.reports.append(after)
        self.reports[-1] = replace(after, balance_residual=self.balance())
        return state

    def run(self, steps, callback=None):
        for _ in range(steps):
            self.step()
            if callback is not None:
                callback(self)
        return self.state
