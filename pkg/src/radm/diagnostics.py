"""Energy functionals, shell spectra and inertial-range slope fits."""
import csv
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from . import _kernels


@dataclass(frozen=True)
class EnergyReport:
    """Per-unit-volume energy budget of one snapshot.

    ``dissipation`` is ``nu ||grad Dv||^2`` and ``work`` is ``(f, Dv)``; the
    model energy changes at rate ``work - dissipation`` in the absence of
    time-stepping error.
    """

    energy: float
    model_energy: float
    dissipation: float
    work: float = 0.0
    balance_residual: float = float("nan")


@dataclass
class Spectrum:
    k: np.ndarray
    E: np.ndarray
    EM: np.ndarray

    def to_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "E", "EM"])
        for k, e, em in zip(self.k, self.E, self.EM):
            w.writerow([int(k), repr(float(e)), repr(float(em))])

    @classmethod
    def from_csv(cls, fh):
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
        if rows[0] != ["k", "E", "EM"]:
            raise ValueError(f"unexpected spectrum header {rows[0]}")
        data = np.array([[float(x) for x in r] for r in rows[1:]])
        return cls(data[:, 0].astype(int), data[:, 1], data[:, 2])

    def total(self):
        return float(self.E.sum())


def _modes_sq(coeffs):
    c = coeffs
    with np.errstate(over="ignore"):
        return c.real**2 + c.imag**2


def compute_energies(v, symbols, nu=0.0, body_force=None):
    """Kinetic energy, model energy, dissipation and forcing work of ``v``.

    ``E = 1/2 sum |v_k|^2``, ``E_M = 1/2 sum D(k)(1 + alpha^2|k|^2)|v_k|^2``.
    """
    sq = _modes_sq(v.coeffs).sum(axis=0)
    E = 0.5 * float(sq.sum())
    EM = 0.5 * float((symbols.model_weight() * sq).sum())
    eps = float(nu) * float((symbols.ksq * symbols.dhat**2 * sq).sum())
    work = 0.0
    if body_force is not None:
        dv = symbols.dhat * v.coeffs
        work = float(np.real(np.conj(body_force.coeffs) * dv).sum())
    return EnergyReport(E, EM, eps, work)


def shell_count(grid):
    """Number of integer shells (including shell 0) that hold retained modes."""
    return int(grid.shell_index[grid.dealias_mask].max()) + 1


def compute_spectrum(v, symbols):
    """Shell-binned kinetic and model energy spectra.

    Shells are ``round(|k|) = 1, 2, ...`` up to the largest shell that holds
    a retained mode, so the shells partition all nonzero modes.  ``EM(k)``
    uses the deconvolution symbol at the shell-centre wavenumber.
    """
    grid = v.grid
    sq = _modes_sq(v.coeffs).sum(axis=0)
    nshell = shell_count(grid)
    if np.any(sq[~grid.dealias_mask]):
        nshell = int(grid.shell_index.max()) + 1
    sums = _kernels.shell_sum(np.ascontiguousarray(sq), grid.shell_index, nshell)
    k = np.arange(1, nshell)
    E = 0.5 * sums[1:]
    ksq = k.astype(np.float64) ** 2
    dk = np.asarray(symbols.deconv(ksq, symbols.alpha, symbols.N))
    EM = dk * (1.0 + symbols.alpha**2 * ksq) * 2.0 * E
    return Spectrum(k, E, EM)


class SlopeFitError(ValueError):
    pass


def fit_slope(spectrum, k_lo, k_hi):
    """Least-squares slope of ``log E`` against ``log k`` over ``[k_lo, k_hi]``."""
    if not (k_hi > k_lo >= 1):
        raise SlopeFitError(f"need k_hi > k_lo >= 1, got [{k_lo}, {k_hi}]")
    k = np.asarray(spectrum.k, dtype=np.float64)
    E = np.asarray(spectrum.E, dtype=np.float64)
    sel = (k >= k_lo) & (k <= k_hi)
    if sel.sum() < 2:
        raise SlopeFitError(f"fewer than two shells in [{k_lo}, {k_hi}]")
    if np.any(E[sel] <= 0):
        raise SlopeFitError(f"zero shell energy in [{k_lo}, {k_hi}]")
    slope, _ = np.polyfit(np.log(k[sel]), np.log(E[sel]), 1)
    return float(slope)


def balance_residual(times, reports, work=None, injected=0.0):
    """Normalised defect of the discrete model-energy balance.

    ``|E_M(T) - E_M(0) + int eps dt - int work dt - injected| / (E_M(0) + 1)``
    with trapezoid quadrature.  ``injected`` is energy added impulsively, e.g.
    by shell-rescaling forcing.
    """
    if len(reports) < 2:
        raise ValueError("balance residual needs at least two samples")
    t = np.asarray(times, dtype=np.float64)
    EM = np.array([r.model_energy for r in reports])
    eps = np.array([r.dissipation for r in reports])
    w = np.array([r.work for r in reports]) if work is None else np.asarray(work, dtype=np.float64)
    defect = EM[-1] - EM[0] + trapezoid(eps, t) - trapezoid(w, t) - injected
    return float(abs(defect) / (EM[0] + 1.0))


def time_average(values, start_fraction=0.5):
    """Arithmetic mean over the trailing ``1 - start_fraction`` of a series."""
    values = np.asarray(values)
    if values.shape[0] == 0:
        raise ValueError("empty series")
    start = min(int(np.floor(start_fraction * values.shape[0])), values.shape[0] - 1)
    return values[start:].mean(axis=0)


def integral_scale(spectrum):
    """Integral length ``pi / (2 u'^2) sum E(k) / k`` and rms velocity ``u'``."""
    E = spectrum.E
    total = E.sum()
    if total <= 0:
        return 0.0, 0.0
    u2 = 2.0 * total / 3.0
    L = np.pi / (2.0 * u2) * float((E / spectrum.k).sum())
    return L, float(np.sqrt(u2))


def write_scalar_log_header(fh):
    fh.write("step,time,E,E_M,dissipation,balance_residual\n")


def write_scalar_log_row(fh, step, time, report):
    fh.write(
        f"{int(step)},{float(time)!r},{float(report.energy)!r},{float(report.model_energy)!r},"
        f"{float(report.dissipation)!r},{float(report.balance_residual)!r}\n"
    )
