"""Fourier-lattice vector fields on the 2*pi periodic cube.

Coefficients are stored in full FFT ordering with shape ``(3, n, n, n)``
and normalised so that ``v(x) = sum_k vhat_k exp(i k.x)``; integer
wavenumbers follow :func:`numpy.fft.fftfreq`.  All energies derived from
them are per unit volume.
"""
import os
import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft

from . import _kernels


class FieldCorruptError(ValueError):
    """A spectral field violates the reality condition."""


class GridMismatchError(ValueError):
    pass


class CheckpointFormatError(ValueError):
    pass


def fft_workers():
    """Worker count for scipy.fft, capped by ``RADM_THREADS``."""
    value = os.environ.get("RADM_THREADS")
    if not value:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def dealias_cutoff(n):
    """Largest retained wavenumber component under the 2/3 rule.

    ``(n - 1) // 3`` equals ``floor(n / 3)`` unless ``3 | n``; in that case
    ``floor(n / 3)`` would let a triad alias back onto a retained mode.
    """
    return (n - 1) // 3


@dataclass(frozen=True)
class Grid:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 4 or self.n % 2:
            raise ValueError(f"grid size must be an even integer >= 4, got {self.n!r}")

    @cached_property
    def kint(self):
        """Integer wavenumbers along one axis in FFT ordering."""
        return np.fft.fftfreq(self.n, 1.0 / self.n).round().astype(np.int64)

    @cached_property
    def k(self):
        """Broadcastable float wavenumber components ``(k1, k2, k3)``."""
        k = self.kint.astype(np.float64)
        return (k[:, None, None], k[None, :, None], k[None, None, :])

    @cached_property
    def ksq(self):
        k1, k2, k3 = self.k
        return k1 * k1 + k2 * k2 + k3 * k3

    @cached_property
    def kmag(self):
        return np.sqrt(self.ksq)

    @cached_property
    def dealias_mask(self):
        """True on modes whose every component satisfies |k_i| <= cutoff."""
        cut = dealias_cutoff(self.n)
        a = np.abs(self.kint) <= cut
        return a[:, None, None] & a[None, :, None] & a[None, None, :]

    @cached_property
    def shell_index(self):
        """Nearest-integer shell of every mode, ``round(|k|)``."""
        return np.rint(self.kmag).astype(np.int64)

    @cached_property
    def negate_index(self):
        return (-np.arange(self.n)) % self.n

    @property
    def shape(self):
        return (3, self.n, self.n, self.n)

    def physical_coords(self):
        x = 2 * np.pi * np.arange(self.n) / self.n
        return np.meshgrid(x, x, x, indexing="ij")


class SpectralField:
    """Complex Fourier coefficients of a real periodic 3-vector field."""

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid, coeffs=None):
        self.grid = grid
        if coeffs is None:
            coeffs = np.zeros(grid.shape, dtype=np.complex128)
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != grid.shape:
            raise GridMismatchError(f"coefficient shape {coeffs.shape} != {grid.shape}")
        self.coeffs = coeffs

    @classmethod
    def zeros(cls, n):
        return cls(Grid(n))

    def copy(self):
        return SpectralField(self.grid, self.coeffs.copy())

    def __repr__(self):
        return f"SpectralField(n={self.grid.n}, max|c|={np.abs(self.coeffs).max():.3g})"

    def reality_defect(self):
        """max |c(k) - conj(c(-k))| relative to max |c|."""
        c = self.coeffs
        neg = self.grid.negate_index
        flipped = np.conj(c[:, neg][:, :, neg][:, :, :, neg])
        scale = np.abs(c).max()
        if scale == 0:
            return 0.0
        return float(np.abs(c - flipped).max() / scale)

    def divergence_defect(self):
        """max |k.c(k)| relative to max |k| |c(k)|."""
        k1, k2, k3 = self.grid.k
        c = self.coeffs
        div = np.abs(k1 * c[0] + k2 * c[1] + k3 * c[2])
        scale = (self.grid.kmag * np.sqrt((np.abs(c) ** 2).sum(axis=0))).max()
        if scale == 0:
            return 0.0
        return float(div.max() / scale)

    def is_divergence_free(self, tol=1e-12):
        return self.divergence_defect() <= tol


def transform_to_physical(field, check=True):
    """Real samples ``(3, n, n, n)`` of ``field`` on the collocation grid."""
    if check:
        defect = field.reality_defect()
        if defect > 1e-10:
            raise FieldCorruptError(f"reality condition violated (defect {defect:.3e})")
    u = scipy.fft.ifftn(field.coeffs, axes=(1, 2, 3), norm="forward", workers=fft_workers())
    return np.ascontiguousarray(u.real)


def transform_to_spectral(u, remove_mean=True, grid=None):
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 4 or u.shape[0] != 3 or len(set(u.shape[1:])) != 1:
        raise ValueError(f"expected physical samples of shape (3, n, n, n), got {u.shape}")
    grid = grid or Grid(u.shape[1])
    c = scipy.fft.fftn(u, axes=(1, 2, 3), norm="forward", workers=fft_workers())
    if remove_mean:
        c[:, 0, 0, 0] = 0.0
    return SpectralField(grid, c)


def leray_project(field):
    c = project_coeffs(field.grid, field.coeffs)
    return SpectralField(field.grid, c)


def project_coeffs(grid, c):
    k1, k2, k3 = grid.k
    ksq = grid.ksq.copy()
    ksq[0, 0, 0] = 1.0
    kdot = (k1 * c[0] + k2 * c[1] + k3 * c[2]) / ksq
    out = np.empty_like(c)
    out[0] = c[0] - k1 * kdot
    out[1] = c[1] - k2 * kdot
    out[2] = c[2] - k3 * kdot
    return out


def _physical_half(grid, c, workers):
    # Hermitian input: the inverse real transform reads only the half spectrum
    h = grid.n // 2 + 1
    n = grid.n
    return scipy.fft.irfftn(c[..., :h], s=(n, n, n), axes=(1, 2, 3), norm="forward", workers=workers)


def divergence_products(grid, a, b=None, mask=None, project=False, workers=None):
    """Dealiased spectral coefficients of ``div(a (x) b)``, optionally projected.

    ``a`` and ``b`` are coefficient arrays.  For divergence-free ``a`` this
    equals ``(a . grad) b``.  With ``b is None`` the symmetric six-product
    form for ``(a . grad) a`` is used.
    """
    n = grid.n
    workers = workers or fft_workers()
    mask = grid.dealias_mask if mask is None else mask
    ua = _physical_half(grid, a, workers)
    if b is None:
        prod = np.empty((6, n, n, n))
        prod[0] = ua[0] * ua[0]
        prod[1] = ua[1] * ua[1]
        prod[2] = ua[2] * ua[2]
        prod[3] = ua[0] * ua[1]
        prod[4] = ua[0] * ua[2]
        prod[5] = ua[1] * ua[2]
        index = _kernels.SYMMETRIC_INDEX
    else:
        ub = _physical_half(grid, b, workers)
        prod = (ub[:, None] * ua[None, :]).reshape(9, n, n, n)
        index = _kernels.GENERAL_INDEX
    half = scipy.fft.rfftn(prod, axes=(1, 2, 3), norm="forward", workers=workers)
    out = np.empty(grid.shape, dtype=np.complex128)
    _kernels.assemble_divergence(half, index, grid.kint, mask, out, project)
    return out, ua


def convect(a, b, mask=None):
    """Dealiased pseudo-spectral ``(a . grad) b`` (not projected).

    Both inputs must be divergence-free and dealiased; the product is then
    identical to the truncated Galerkin convolution on retained modes.
    """
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: n={a.grid.n} vs n={b.grid.n}")
    grid = a.grid
    mask = grid.dealias_mask if mask is None else np.asarray(mask, dtype=bool)
    if a is b:
        out, _ = divergence_products(grid, a.coeffs, None, mask)
    else:
        out, _ = divergence_products(grid, a.coeffs, b.coeffs, mask)
    return SpectralField(grid, out)


BRUTE_FORCE_MAX_N = 8


def brute_force_convect(a, b, mask=None):
    """Direct triadic sum ``sum_{p+q=k} i (q . a_p) b_q`` on retained modes.

    Reference semantics for :func:`convect`; cost is
    O(n^6), so ``n`` is limited to 8.
    """
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: n={a.grid.n} vs n={b.grid.n}")
    grid = a.grid
    if grid.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute-force convolution limited to n <= {BRUTE_FORCE_MAX_N}, got {grid.n}")
    keep = grid.dealias_mask if mask is None else np.asarray(mask, dtype=bool)
    out = _kernels.brute_convolution(a.coeffs, b.coeffs, grid.kint, keep)
    return SpectralField(grid, out)


# ---------------------------------------------------------------------------
# random fields
# ---------------------------------------------------------------------------

def make_rng(seed):
    """Counter-based Philox generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))


def random_field(grid, rng, dealias=True, solenoidal=True, mask=None):
    """White-noise real field: physical Gaussian samples, transformed."""
    u = rng.standard_normal(grid.shape)
    f = transform_to_spectral(u, remove_mean=True, grid=grid)
    c = f.coeffs
    if dealias:
        c *= grid.dealias_mask if mask is None else mask
    else:
        _zero_nyquist(grid, c)
    if solenoidal:
        c = project_coeffs(grid, c)
    return SpectralField(grid, c)


def _zero_nyquist(grid, c):
    h = grid.n // 2
    c[:, h] = 0
    c[:, :, h] = 0
    c[:, :, :, h] = 0


# ---------------------------------------------------------------------------
# checkpoint I/O
# ---------------------------------------------------------------------------

MAGIC = b"RADM"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIdddI")


@dataclass
class Checkpoint:
    field: SpectralField
    time: float
    alpha: float
    nu: float
    N: int


def write_checkpoint(path, field, time, alpha, nu, N):
    """Little-endian: header then ``3 n^3`` complex128 in C order (k1 slowest)."""
    n = field.grid.n
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, n, float(time), float(alpha), float(nu), int(N))
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(field.coeffs, dtype="<c16").tobytes())
    os.replace(tmp, path)


def read_checkpoint(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise CheckpointFormatError("file too short for checkpoint header")
    magic, version, n, time, alpha, nu, N = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CheckpointFormatError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise CheckpointFormatError(f"unsupported checkpoint version {version}")
    grid = Grid(n)
    expected = _HEADER.size + 16 * 3 * n**3
    if len(raw) != expected:
        raise CheckpointFormatError(f"payload size {len(raw)} != expected {expected}")
    coeffs = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).reshape(grid.shape)
    field = SpectralField(grid, coeffs.astype(np.complex128))
    return Checkpoint(field, time, alpha, nu, N)
