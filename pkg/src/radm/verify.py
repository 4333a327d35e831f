"""Self-check suites run by ``radm verify``.

Each suite returns a :class:`SuiteResult`.  ``inject`` deliberately breaks
one ingredient so the suite can show that it notices:

* ``"symbol"`` scales the deconvolution symbol by ``1 + 1e-3``;
* ``"dealias"`` replaces the 2/3-rule mask by an all-true mask.
"""
from dataclasses import dataclass

import numpy as np

from .filters import deconvolution_residual, helmholtz_symbol, symbol_bounds_hold, van_cittert_symbol
from .pulsatile import (
    PulsatileCase,
    alpha_womersley,
    channel_pde_residual,
    pipe_ode_residual,
    womersley,
)
from .spectral import Grid, brute_force_convect, convect, make_rng, project_coeffs, random_field
from .solver import ModelParams, RADMSolver, SolverState, initial_field

INJECTIONS = ("symbol", "dealias")


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str


def _symbol_function(inject):
    if inject == "symbol":
        return lambda ksq, alpha, N: van_cittert_symbol(ksq, alpha, N) * (1.0 + 1e-3)
    return van_cittert_symbol


def random_symbol_sample(rng, size=10_000, kmax=64, nmax=20):
    """Random ``(|k|^2, alpha, N)`` with ``k`` on the integer lattice."""
    k = rng.integers(-kmax, kmax + 1, size=(size, 3))
    ksq = (k * k).sum(axis=1).astype(np.float64)
    alpha = rng.uniform(1.0 / 64.0, 4.0, size=size)
    N = rng.integers(0, nmax + 1, size=size)
    return ksq, alpha, N


def symbol_bounds_suite(inject=None, seed=2024):
    rng = make_rng(seed)
    ksq, alpha, N = random_symbol_sample(rng)
    deconv = _symbol_function(inject)
    bad = 0
    worst = 0.0
    for n_order in np.unique(N):
        sel = N == n_order
        a = alpha[sel] ** 2 * ksq[sel]
        d = np.array([deconv(q, al, int(n_order)) for q, al in zip(ksq[sel], alpha[sel])])
        if not symbol_bounds_hold(d, a, int(n_order)):
            bad += int(np.sum(~((d >= 1) & (d <= np.minimum(n_order + 1.0, 1.0 + a)))))
        f = helmholtz_symbol(ksq[sel], alpha[sel])
        lhs = 1.0 - d * f
        rhs = deconvolution_residual(ksq[sel], alpha[sel], int(n_order))
        scale = np.maximum(np.abs(rhs), d * f)
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / scale)))
    ok = bad == 0 and worst <= 1e-13
    return SuiteResult("symbol-bounds", ok, f"{bad} bound violations, residual identity err {worst:.2e}")


def convolution_suite(inject=None, trials=5, seed=7):
    rng = make_rng(seed)
    worst = 0.0
    for n in (4, 8):
        grid = Grid(n)
        mask = np.ones((n, n, n), dtype=bool) if inject == "dealias" else None
        for _ in range(trials):
            a = random_field(grid, rng)
            b = random_field(grid, rng)
            fast = convect(a, b, mask=mask).coeffs
            ref = brute_force_convect(a, b).coeffs
            worst = max(worst, float(np.abs(fast - ref).max() / np.abs(ref).max()))
    return SuiteResult("convolution-oracle", worst <= 1e-12, f"max relative err {worst:.2e}")


def conservation_suite(inject=None, seed=11):
    """Energy orthogonality of the projected nonlinear term and a short
    inviscid run whose model-energy drift must stay tiny."""
    n = 16
    grid = Grid(n)
    rng = make_rng(seed)
    mask = np.ones((n, n, n), dtype=bool) if inject == "dealias" else grid.dealias_mask
    dealias = inject != "dealias"
    worst = 0.0
    for _ in range(3):
        u = random_field(grid, rng, dealias=dealias)
        nl = project_coeffs(grid, convect(u, u, mask=mask).coeffs)
        inner = float(np.real(np.vdot(u.coeffs, nl)))
        scale = float(np.abs(u.coeffs).ravel() @ np.abs(nl).ravel())
        worst = max(worst, abs(inner) / scale)
    params = ModelParams(alpha=1.0 / 8.0, nu=0.0, N=1, dt=2e-3, n=n, cfl_action="ignore")
    solver = RADMSolver(params, mask=mask)
    if inject == "dealias":
        v0 = random_field(grid, make_rng(seed + 1), dealias=False)
        v0.coeffs *= np.sqrt(0.5 / (0.5 * (np.abs(v0.coeffs) ** 2).sum()))
    else:
        v0 = initial_field(n, seed, energy=0.5)
    state = SolverState(v0)
    e0 = solver.energies(state).model_energy
    for _ in range(20):
        state = solver.step(state)
    drift = abs(solver.energies(state).model_energy - e0) / e0
    ok = worst <= 1e-12 and drift <= 1e-6
    return SuiteResult("conservation", ok, f"orthogonality defect {worst:.2e}, 20-step drift {drift:.2e}")


def pulsatile_suite(inject=None):
    errs = []
    for alpha in (0.0, 0.1, 1.0):
        case = PulsatileCase(1.0, 144.0, 1.0, alpha)
        errs.append(channel_pde_residual(case, 0.0))
        errs.append(pipe_ode_residual(case))
    golden = [
        abs(womersley(PulsatileCase(1.0, 144.0, 1.0)) - 12.0),
        abs(alpha_womersley(PulsatileCase(1.0, 144.0, 1.0, 1.0)) - 0.999988) / 1e-5,
        abs(alpha_womersley(PulsatileCase(1.0, 144.0, 1.0, 0.1)) - 9.06295) / 1e-4,
    ]
    ok = max(errs) <= 1e-6 and golden[0] == 0.0 and max(golden[1:]) <= 1.0
    return SuiteResult("pulsatile-residual", ok, f"max FD residual {max(errs):.2e}")


SUITES = (symbol_bounds_suite, convolution_suite, conservation_suite, pulsatile_suite)


def run_all(inject=None):
    if inject is not None and inject not in INJECTIONS:
        raise ValueError(f"unknown injection {inject!r}; choose from {INJECTIONS}")
    return [suite(inject=inject) for suite in SUITES]


def format_table(results):
    width = max(len(r.name) for r in results)
    lines = [f"{'suite'.ljust(width)}  result  detail"]
    for r in results:
        lines.append(f"{r.name.ljust(width)}  {'PASS' if r.passed else 'FAIL'}    {r.detail}")
    return "\n".join(lines)


__all__ = ["SuiteResult", "run_all", "format_table", "INJECTIONS"]
