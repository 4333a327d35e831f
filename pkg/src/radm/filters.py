"""Helmholtz filter and van Cittert deconvolution in Fourier space.

Every operator here is diagonal on the lattice, so it is represented by a
per-mode scalar symbol.  ``a = alpha**2 |k|**2`` throughout.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .spectral import Grid, GridMismatchError, SpectralField


def helmholtz_symbol(ksq, alpha):
    """``1 / (1 + alpha^2 |k|^2)``; accepts ``|k|^2`` as scalar or array."""
    return 1.0 / (1.0 + alpha * alpha * np.asarray(ksq, dtype=np.float64))


def van_cittert_symbol(ksq, alpha, N):
    """Symbol of ``D_N = sum_{n=0}^N (I - F)^n``.

    Uses the closed geometric form ``(1 + a) (1 - r^(N+1))`` with
    ``r = a / (1 + a)``; ``1 - r^(N+1)`` goes through ``expm1``/``log1p`` so
    it keeps full relative accuracy when ``r`` is close to 1.
    """
    if N < 0:
        raise ValueError(f"deconvolution order must be >= 0, got {N}")
    a = alpha * alpha * np.asarray(ksq, dtype=np.float64)
    scalar = a.ndim == 0
    a = np.atleast_1d(a)
    out = np.ones_like(a)
    pos = a > 0
    if N > 0 and pos.any():
        ap = a[pos]
        one_minus = -np.expm1(-(N + 1) * np.log1p(1.0 / ap))
        d = (1.0 + ap) * one_minus
        # the exact value lies in [1, min(N + 1, 1 + a)]; clipping only
        # removes last-ulp rounding excursions
        out[pos] = np.clip(d, 1.0, np.minimum(N + 1.0, 1.0 + ap))
    return float(out[0]) if scalar else out


def deconvolution_residual(ksq, alpha, N):
    """``1 - D_N F`` in closed form, ``(a / (1 + a))^(N+1)``."""
    if N < 0:
        raise ValueError(f"deconvolution order must be >= 0, got {N}")
    a = alpha * alpha * np.asarray(ksq, dtype=np.float64)
    r = (a / (1.0 + a)) ** (N + 1)
    return float(r) if r.ndim == 0 else r


SymbolFunction = Callable[[np.ndarray, float, int], np.ndarray]


@dataclass(frozen=True)
class FilterParams:
    alpha: float
    n_deconv: int = 0

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.n_deconv < 0 or int(self.n_deconv) != self.n_deconv:
            raise ValueError(f"deconvolution order must be a non-negative integer, got {self.n_deconv}")


@dataclass(frozen=True, eq=False)
class SymbolTable:
    """Per-mode symbols for one ``(grid, alpha, N)``; immutable after build.

    ``deconv`` may be replaced by any callable ``(ksq, alpha, N) -> symbol``
    to plug in a different deconvolution operator.  Bounds of such a symbol
    are not checked.
    """

    grid: Grid
    alpha: float
    N: int
    deconv: SymbolFunction = field(default=van_cittert_symbol, repr=False)
    ksq: np.ndarray = field(init=False, repr=False)
    fhat: np.ndarray = field(init=False, repr=False)
    dhat: np.ndarray = field(init=False, repr=False)
    dsqrt: np.ndarray = field(init=False, repr=False)
    inv_helmholtz: np.ndarray = field(init=False, repr=False)
    mask: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        FilterParams(self.alpha, self.N)
        ksq = self.grid.ksq
        dhat = np.asarray(self.deconv(ksq, self.alpha, self.N), dtype=np.float64).reshape(ksq.shape)
        values = {
            "ksq": ksq,
            "fhat": helmholtz_symbol(ksq, self.alpha),
            "dhat": dhat,
            "dsqrt": np.sqrt(dhat),
            "inv_helmholtz": 1.0 + self.alpha**2 * ksq,
            "mask": self.grid.dealias_mask,
        }
        for name, arr in values.items():
            arr = np.array(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def build(cls, n, alpha, N, deconv=None):
        grid = n if isinstance(n, Grid) else Grid(n)
        if deconv is None:
            return cls(grid, float(alpha), int(N))
        return cls(grid, float(alpha), int(N), deconv)

    def symbol(self, which):
        try:
            return {
                "filter": self.fhat,
                "deconv": self.dhat,
                "deconv_sqrt": self.dsqrt,
                "inverse_helmholtz": self.inv_helmholtz,
            }[which]
        except KeyError:
            raise ValueError(f"unknown symbol {which!r}") from None

    def model_weight(self):
        """Per-mode weight ``D(k) (1 + alpha^2 |k|^2)`` of the model energy."""
        return self.dhat * self.inv_helmholtz


def apply_symbol(f: SpectralField, table: SymbolTable, which: str) -> SpectralField:
    """Multiply every mode of ``f`` by the chosen scalar symbol."""
    if f.grid != table.grid:
        raise GridMismatchError(f"symbol table built for n={table.grid.n}, field has n={f.grid.n}")
    return SpectralField(f.grid, f.coeffs * table.symbol(which))


def symbol_bounds_hold(dhat, a, N):
    """Exact check of ``1 <= D <= min(N + 1, 1 + a)``."""
    dhat = np.asarray(dhat)
    upper = np.minimum(N + 1.0, 1.0 + np.asarray(a))
    return bool(np.all((dhat >= 1.0) & (dhat <= upper)))


__all__ = [
    "FilterParams",
    "SymbolTable",
    "apply_symbol",
    "deconvolution_residual",
    "helmholtz_symbol",
    "symbol_bounds_hold",
    "van_cittert_symbol",
]
