import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outlierlab.gue import (BranchCutError, GueKernelContext, cH_coeffs,
                            ell_H, g_H, hermite, kernel_gue, norm_k, rho_r)


def _quad_inner(r, i, j):
    """High-precision orthogonality integral of H_i^{(r)} H_j^{(r)} e^{-r z^2/2}."""
    with mpmath.workdps(50):
        def integrand(z):
            zf = float(z)
            return hermite(r, i, zf) * hermite(r, j, zf) * mpmath.exp(-r * z * z / 2)
        # tails beyond |z| = 25 are below e^{-300} for every case used here
        return mpmath.quad(integrand, [-25, 0, 25])


def test_hermite_base_cases():
    assert hermite(3, 0, 1.7) == 1.0
    assert hermite(3, 1, 1.7) == pytest.approx(1.7)
    # H_2 = z^2 - 1/r
    assert hermite(4, 2, 1.5) == pytest.approx(1.5 ** 2 - 0.25)


@pytest.mark.parametrize("r", [1, 2, 4, 8])
def test_orthogonality(r):
    for i in range(5):
        for j in range(i + 1, 6):
            val = float(_quad_inner(r, i, j))
            assert abs(val) < 1e-10


@pytest.mark.parametrize("r,j", [(1, 0), (2, 1), (4, 3), (8, 2)])
def test_norms_match_quadrature(r, j):
    diag = float(_quad_inner(r, j, j))
    assert diag == pytest.approx(norm_k(r, j), rel=1e-12)


@pytest.mark.parametrize("r", [2, 4])
def test_norm_arbiter_rejects_positive_exponent(r):
    """The positive-exponent variant r^{j-1/2} j! sqrt(2 pi) is wrong."""
    j = 2
    diag = float(_quad_inner(r, j, j))
    wrong = r ** (j - 0.5) * math.factorial(j) * math.sqrt(2 * math.pi)
    assert abs(diag - wrong) > 0.1 * wrong


def test_kernel_symmetry_and_confluence():
    ctx = GueKernelContext(r=3)
    assert kernel_gue(ctx, 0.7, -0.2) == pytest.approx(kernel_gue(ctx, -0.2, 0.7))
    limit = kernel_gue(ctx, 0.5, 0.5 + 1e-9)
    assert kernel_gue(ctx, 0.5, 0.5) == pytest.approx(limit, rel=1e-5)


def test_kernel_r1_closed_form():
    # r=1: K(x,y) = e^{-x^2/4 - y^2/4}
    ctx = GueKernelContext(r=1)
    for x, y in [(0.3, -1.1), (2.0, 0.0)]:
        assert kernel_gue(ctx, x, y) == pytest.approx(
            math.exp(-x * x / 4 - y * y / 4), rel=1e-12)


@pytest.mark.parametrize("r", [1, 2, 4, 8])
def test_density_unit_mass(r):
    ctx = GueKernelContext(r=r)
    xs = np.linspace(-6, 6, 4001)
    mass = np.trapezoid([rho_r(ctx, float(x)) for x in xs], xs)
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_density_semicircle_limit():
    ctx = GueKernelContext(r=64)
    xs = np.linspace(-1.8, 1.8, 181)
    sc = np.sqrt(4.0 - xs ** 2) / (2.0 * math.pi)
    dev = max(abs(rho_r(ctx, float(x)) - s) for x, s in zip(xs, sc))
    assert dev <= 0.02


def test_g_H_values():
    # g_H(2) = 1/2 (quadrature-verified); log-normalized at infinity
    assert g_H(2.0).real == pytest.approx(0.5, abs=1e-12)
    assert abs(g_H(2.0).imag) < 1e-12
    z = 1e8
    assert abs(g_H(z) - math.log(z)) < 1e-7


def test_g_H_branch_cut():
    with pytest.raises(BranchCutError):
        g_H(0.5)
    # endpoints are allowed
    g_H(-2.0)


def test_g_H_continuity_across_large_real_axis():
    up = g_H(5.0 + 1e-12j)
    assert g_H(5.0).real == pytest.approx(up.real, abs=1e-9)


def test_ell_H():
    assert ell_H() == pytest.approx(-1.0 - 2.0 * math.log(2.0), abs=1e-15)


def test_cH_centered():
    c = cH_coeffs(0.0, 4)
    assert c[0] == pytest.approx(0.0, abs=1e-10)
    assert c[1] == pytest.approx(0.5, abs=1e-10)


@pytest.mark.parametrize("zeta0", [0.1, -0.1])
def test_cH_shift_convention(zeta0):
    # definition gives c_1 = +zeta0, c_2 = (1 + zeta0^2)/2
    c = cH_coeffs(zeta0, 4)
    assert c[0] == pytest.approx(zeta0, abs=1e-8)
    assert c[1] == pytest.approx(0.5 * (1.0 + zeta0 ** 2), abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(x=st.floats(-3, 3), y=st.floats(-3, 3), r=st.integers(1, 6))
def test_kernel_symmetric_property(x, y, r):
    ctx = GueKernelContext(r=r)
    assert kernel_gue(ctx, x, y) == pytest.approx(
        kernel_gue(ctx, y, x), rel=1e-9, abs=1e-12)
