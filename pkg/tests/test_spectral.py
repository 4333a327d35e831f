import io
import os

import numpy as np
import pytest

from radm import spectral
from radm.spectral import (
    CheckpointFormatError,
    FieldCorruptError,
    Grid,
    GridMismatchError,
    SpectralField,
    brute_force_convect,
    convect,
    dealias_cutoff,
    leray_project,
    make_rng,
    random_field,
    read_checkpoint,
    transform_to_physical,
    transform_to_spectral,
    write_checkpoint,
)

from conftest import rand_field, rel_err


@pytest.mark.parametrize("n", [3, 5, 2, 0, 7.0])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        Grid(n)


def test_dealias_cutoff_values():
    assert dealias_cutoff(8) == 2
    assert dealias_cutoff(16) == 5
    assert dealias_cutoff(32) == 10
    assert dealias_cutoff(12) == 3  # 3 | n: one below floor(n/3)


@pytest.mark.parametrize("n", range(4, 40, 2))
def test_dealias_cutoff_blocks_wraparound(n):
    # the largest retained sum 2*cut must not wrap onto a retained mode
    cut = dealias_cutoff(n)
    assert 2 * cut - n < -cut
    assert dealias_cutoff(n) >= n // 3 - 1


def test_roundtrip_physical_spectral(grid, rng):
    f = random_field(grid, rng)
    u = transform_to_physical(f)
    back = transform_to_spectral(u, grid=grid)
    assert rel_err(back.coeffs, f.coeffs) < 1e-13


def test_known_mode_amplitude():
    g = Grid(8)
    x, y, z = g.physical_coords()
    u = np.stack([np.sin(y), np.zeros_like(x), np.zeros_like(x)])
    f = transform_to_spectral(u)
    assert abs(f.coeffs[0, 0, 1, 0] - (-0.5j)) < 1e-14
    assert abs(f.coeffs[0, 0, -1, 0] - 0.5j) < 1e-14


def test_reality_check_raises():
    f = rand_field(8)
    f.coeffs[0, 1, 0, 0] += 1.0
    with pytest.raises(FieldCorruptError):
        transform_to_physical(f)


def test_projection_is_idempotent_and_solenoidal(grid, rng):
    f = random_field(grid, rng, solenoidal=False)
    p = leray_project(f)
    assert p.is_divergence_free()
    assert rel_err(leray_project(p).coeffs, p.coeffs) < 1e-14


@pytest.mark.parametrize("n", [4, 8])
def test_convect_matches_brute_force(n):
    for seed in range(3):
        a = rand_field(n, seed)
        b = rand_field(n, seed + 100)
        assert rel_err(convect(a, b).coeffs, brute_force_convect(a, b).coeffs) < 1e-12


def test_convect_symmetric_path_matches_general():
    a = rand_field(8, 1)
    b = a.copy()
    assert rel_err(convect(a, a).coeffs, convect(a, b).coeffs) < 1e-13


def test_convect_single_triad():
    # a = (sin y, 0, 0): (a . grad) a = 0; b = (0, 0, sin x): (a.grad) b = 0
    # a = (0, sin x, 0), b = (sin y, 0, 0): (a.grad) b = (sin x cos y, 0, 0)
    g = Grid(8)
    x, y, z = g.physical_coords()
    zero = np.zeros_like(x)
    a = transform_to_spectral(np.stack([zero, np.sin(x), zero]))
    b = transform_to_spectral(np.stack([np.sin(y), zero, zero]))
    got = transform_to_physical(convect(a, b))
    assert np.abs(got[0] - np.sin(x) * np.cos(y)).max() < 1e-13
    assert np.abs(got[1:]).max() < 1e-13


def test_brute_force_size_limit():
    a = rand_field(16)
    with pytest.raises(ValueError):
        brute_force_convect(a, a)


def test_grid_mismatch():
    with pytest.raises(GridMismatchError):
        convect(rand_field(8), rand_field(16))


def test_rng_is_deterministic():
    a = rand_field(8, seed=5).coeffs
    b = rand_field(8, seed=5).coeffs
    c = rand_field(8, seed=6).coeffs
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_checkpoint_roundtrip(tmp_path):
    f = rand_field(8, 3)
    path = tmp_path / "c.radm"
    write_checkpoint(path, f, 1.25, 0.0625, 0.005, 2)
    ck = read_checkpoint(path)
    assert np.array_equal(ck.field.coeffs, f.coeffs)
    assert (ck.time, ck.alpha, ck.nu, ck.N) == (1.25, 0.0625, 0.005, 2)
    assert os.path.getsize(path) == spectral._HEADER.size + 16 * 3 * 8**3
    assert not os.path.exists(f"{path}.tmp")


def test_checkpoint_layout_is_c_order(tmp_path):
    f = SpectralField.zeros(4)
    f.coeffs[2, 1, 0, 3] = 1 + 2j
    path = tmp_path / "c.radm"
    write_checkpoint(path, f, 0, 0, 0, 0)
    raw = np.frombuffer(path.read_bytes()[spectral._HEADER.size:], dtype="<c16")
    idx = np.ravel_multi_index((2, 1, 0, 3), (3, 4, 4, 4))
    assert raw[idx] == 1 + 2j and np.count_nonzero(raw) == 1


@pytest.mark.parametrize("mutate", ["magic", "version", "truncate"])
def test_checkpoint_corruption(tmp_path, mutate):
    path = tmp_path / "c.radm"
    write_checkpoint(path, rand_field(4), 0, 0, 0, 0)
    data = bytearray(path.read_bytes())
    if mutate == "magic":
        data[:4] = b"XXXX"
    elif mutate == "version":
        data[4] = 9
    else:
        data = data[:-8]
    path.write_bytes(bytes(data))
    with pytest.raises(CheckpointFormatError):
        read_checkpoint(path)


def test_fft_workers_env(monkeypatch):
    monkeypatch.setenv("RADM_THREADS", "3")
    assert spectral.fft_workers() == 3
    monkeypatch.setenv("RADM_THREADS", "junk")
    assert spectral.fft_workers() == 1
