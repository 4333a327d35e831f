import numpy as np
import pytest

from radm.filters import (
    SymbolTable,
    apply_symbol,
    deconvolution_residual,
    helmholtz_symbol,
    symbol_bounds_hold,
    van_cittert_symbol,
)
from radm.spectral import Grid, GridMismatchError

from conftest import rand_field


def neumann_sum(ksq, alpha, N):
    f = helmholtz_symbol(ksq, alpha)
    return sum((1.0 - f) ** j for j in range(N + 1))


@pytest.mark.parametrize("N", [0, 1, 2, 5])
def test_closed_form_matches_series(N):
    ksq = np.arange(0, 200, dtype=float)
    assert np.allclose(van_cittert_symbol(ksq, 0.3, N), neumann_sum(ksq, 0.3, N), rtol=1e-13)


def test_symbol_edge_values():
    assert van_cittert_symbol(0.0, 1.0, 5) == 1.0
    assert van_cittert_symbol(100.0, 0.0, 5) == 1.0
    assert van_cittert_symbol(100.0, 1.0, 0) == 1.0
    # large a: D -> N + 1
    assert abs(van_cittert_symbol(1e12, 1.0, 3) - 4.0) < 1e-9


def test_residual_identity_small_a():
    ksq = np.array([1e-6, 1e-3, 1.0])
    for N in (0, 1, 4):
        lhs = 1 - van_cittert_symbol(ksq, 0.01, N) * helmholtz_symbol(ksq, 0.01)
        rhs = deconvolution_residual(ksq, 0.01, N)
        assert np.all(np.abs(lhs - rhs) <= 1e-13 * np.maximum(rhs, 1e-300) + 1e-16)


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        van_cittert_symbol(1.0, 1.0, -1)


def test_table_read_only_and_symbols():
    t = SymbolTable.build(8, 0.25, 2)
    with pytest.raises(ValueError):
        t.dhat[0, 0, 0] = 3.0
    assert np.allclose(t.symbol("filter") * t.symbol("inverse_helmholtz"), 1.0)
    assert np.allclose(t.symbol("deconv_sqrt") ** 2, t.symbol("deconv"))
    with pytest.raises(ValueError):
        t.symbol("nope")


def test_custom_deconvolution_is_plugged_in():
    t = SymbolTable.build(8, 0.25, 2, deconv=lambda ksq, a, N: np.full_like(ksq, 2.0))
    assert np.all(t.dhat == 2.0)


def test_apply_symbol_filter_then_inverse():
    f = rand_field(8, 1)
    t = SymbolTable.build(8, 0.5, 1)
    g = apply_symbol(apply_symbol(f, t, "filter"), t, "inverse_helmholtz")
    assert np.allclose(g.coeffs, f.coeffs, atol=1e-15)
    with pytest.raises(GridMismatchError):
        apply_symbol(rand_field(16), t, "filter")


def test_symbol_bounds_helper():
    assert symbol_bounds_hold(np.array([1.0, 2.0]), np.array([5.0, 5.0]), 1)
    assert not symbol_bounds_hold(np.array([2.5]), np.array([5.0]), 1)
    assert not symbol_bounds_hold(np.array([0.99]), np.array([5.0]), 1)
