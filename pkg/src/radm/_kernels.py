"""Hot inner loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports cleanly and the environment
variable ``RADM_DISABLE_NUMBA`` is unset or falsy.  Both paths are always
importable (``*_numpy`` / ``*_numba``) so tests and the benchmark can
compare them directly.
"""
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _env_disabled():
    return os.environ.get("RADM_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and not _env_disabled()

# Component layout of the product tensor T[i][j] = (a_j b_i)^ in the
# half-spectrum buffer.  Symmetric products (a is b) need only six FFTs.
SYMMETRIC_INDEX = np.array([[0, 3, 4], [3, 1, 5], [4, 5, 2]], dtype=np.int64)
GENERAL_INDEX = np.array([[0, 1, 2], [3, 4, 5], [6, 7, 8]], dtype=np.int64)


# ---------------------------------------------------------------------------
# nonlinear term assembly: half-spectrum tensor -> projected full-spectrum
# vector  out_i(k) = i sum_j k_j T_ij(k) on dealiased modes, optionally
# Leray-projected in the same pass
# ---------------------------------------------------------------------------

def assemble_divergence_numpy(half, index, kint, mask, out, project):
    n = kint.shape[0]
    h = n // 2 + 1
    neg = (-np.arange(n)) % n
    # rebuild the full spectrum from the Hermitian half
    full = np.empty((half.shape[0], n, n, n), dtype=np.complex128)
    full[..., :h] = half
    upper = np.arange(h, n)
    full[..., upper] = np.conj(half[:, neg][:, :, neg][..., n - upper])
    k1 = kint[:, None, None].astype(np.float64)
    k2 = kint[None, :, None].astype(np.float64)
    k3 = kint[None, None, :].astype(np.float64)
    ks = (k1, k2, k3)
    for i in range(3):
        acc = ks[0] * full[index[i, 0]] + ks[1] * full[index[i, 1]] + ks[2] * full[index[i, 2]]
        out[i] = 1j * acc
    if project:
        ksq = k1 * k1 + k2 * k2 + k3 * k3
        ksq[0, 0, 0] = 1.0
        kdot = (k1 * out[0] + k2 * out[1] + k3 * out[2]) / ksq
        out[0] -= k1 * kdot
        out[1] -= k2 * kdot
        out[2] -= k3 * kdot
    out *= mask
    return out


@njit(cache=True)
def assemble_divergence_numba(half, index, kint, mask, out, project):
    n = kint.shape[0]
    h = n // 2 + 1
    for a in range(n):
        ka = kint[a]
        an = (n - a) % n
        for b in range(n):
            kb = kint[b]
            bn = (n - b) % n
            for c in range(n):
                if not mask[a, b, c]:
                    out[0, a, b, c] = 0.0
                    out[1, a, b, c] = 0.0
                    out[2, a, b, c] = 0.0
                    continue
                kc = kint[c]
                if c < h:
                    conj = False
                    ia, ib, ic = a, b, c
                else:
                    conj = True
                    ia, ib, ic = an, bn, n - c
                s0 = 0j
                s1 = 0j
                s2 = 0j
                for j in range(3):
                    kj = ka if j == 0 else (kb if j == 1 else kc)
                    t0 = half[index[0, j], ia, ib, ic]
                    t1 = half[index[1, j], ia, ib, ic]
                    t2 = half[index[2, j], ia, ib, ic]
                    if conj:
                        t0 = t0.conjugate()
                        t1 = t1.conjugate()
                        t2 = t2.conjugate()
                    s0 += kj * t0
                    s1 += kj * t1
                    s2 += kj * t2
                s0 *= 1j
                s1 *= 1j
                s2 *= 1j
                ksq = ka * ka + kb * kb + kc * kc
                if not project or ksq == 0:
                    out[0, a, b, c] = s0
                    out[1, a, b, c] = s1
                    out[2, a, b, c] = s2
                    continue
                kdot = (ka * s0 + kb * s1 + kc * s2) / ksq
                out[0, a, b, c] = s0 - ka * kdot
                out[1, a, b, c] = s1 - kb * kdot
                out[2, a, b, c] = s2 - kc * kdot
    return out


# ---------------------------------------------------------------------------
# shell binning
# ---------------------------------------------------------------------------

def shell_sum_numpy(values, shell, nshell):
    return np.bincount(shell.ravel(), weights=values.ravel(), minlength=nshell)[:nshell]


@njit(cache=True)
def shell_sum_numba(values, shell, nshell):
    out = np.zeros(nshell)
    v = values.ravel()
    s = shell.ravel()
    for i in range(v.size):
        if s[i] < nshell:
            out[s[i]] += v[i]
    return out


# ---------------------------------------------------------------------------
# brute-force triadic convolution (test oracle, O(n^6))
# ---------------------------------------------------------------------------

def brute_convolution_numpy(a, b, kint, keep):
    """sum_{p+q=k} i (q . a_p) b_q without wrap-around, restricted to ``keep``."""
    n = kint.shape[0]
    out = np.zeros_like(a)
    lo = kint.min()
    hi = kint.max()
    # position of each integer wavenumber in FFT ordering
    pos = np.full(hi - lo + 1, -1, dtype=np.int64)
    pos[kint - lo] = np.arange(n)
    q = np.meshgrid(kint, kint, kint, indexing="ij")
    for p1i, p2i, p3i in np.argwhere(np.any(a != 0, axis=0)):
        ap = a[:, p1i, p2i, p3i]
        s = (q[0] + kint[p1i], q[1] + kint[p2i], q[2] + kint[p3i])
        ok = np.ones(q[0].shape, dtype=bool)
        for c in s:
            ok &= (c >= lo) & (c <= hi)
        t = tuple(pos[np.clip(c, lo, hi) - lo] for c in s)
        ok &= keep[t]
        # p + q = k is injective in q, so targets never repeat
        factor = 1j * (q[0] * ap[0] + q[1] * ap[1] + q[2] * ap[2])
        out[:, t[0][ok], t[1][ok], t[2][ok]] += factor[ok] * b[:, ok]
    return out


@njit(cache=True)
def brute_convolution_numba(a, b, kint, keep):
    n = kint.shape[0]
    out = np.zeros_like(a)
    lo = kint.min()
    hi = kint.max()
    pos = np.full(hi - lo + 1, -1, dtype=np.int64)
    for i in range(n):
        pos[kint[i] - lo] = i
    for p1i in range(n):
        for p2i in range(n):
            for p3i in range(n):
                a0 = a[0, p1i, p2i, p3i]
                a1 = a[1, p1i, p2i, p3i]
                a2 = a[2, p1i, p2i, p3i]
                if a0 == 0 and a1 == 0 and a2 == 0:
                    continue
                for q1i in range(n):
                    s1 = kint[p1i] + kint[q1i]
                    if s1 < lo or s1 > hi:
                        continue
                    for q2i in range(n):
                        s2 = kint[p2i] + kint[q2i]
                        if s2 < lo or s2 > hi:
                            continue
                        for q3i in range(n):
                            s3 = kint[p3i] + kint[q3i]
                            if s3 < lo or s3 > hi:
                                continue
                            t1 = pos[s1 - lo]
                            t2 = pos[s2 - lo]
                            t3 = pos[s3 - lo]
                            if not keep[t1, t2, t3]:
                                continue
                            qa = kint[q1i] * a0 + kint[q2i] * a1 + kint[q3i] * a2
                            f = 1j * qa
                            for i in range(3):
                                out[i, t1, t2, t3] += f * b[i, q1i, q2i, q3i]
    return out


if USE_NUMBA:
    assemble_divergence = assemble_divergence_numba
    shell_sum = shell_sum_numba
    brute_convolution = brute_convolution_numba
else:
    assemble_divergence = assemble_divergence_numpy
    shell_sum = shell_sum_numpy
    brute_convolution = brute_convolution_numpy


def backend():
    """Name of the active kernel backend."""
    return "numba" if USE_NUMBA else "numpy"
