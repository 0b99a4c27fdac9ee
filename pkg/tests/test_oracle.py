import math

import numpy as np
import pytest

from outlierlab import oracle
from outlierlab.oracle import OracleError
from outlierlab.potential import Potential


@pytest.fixture(scope="module")
def gaussian_V():
    return Potential((0.0, 0.0, 0.5))


@pytest.fixture(scope="module")
def ok_n12(gaussian_V):
    return oracle.build(gaussian_V, 2.0, 12, 1, precision=256)


def test_n1_r0_closed_form(gaussian_V):
    ok = oracle.build(gaussian_V, 0.0, 1, 0, precision=192)
    for x in (0.0, 1.0, -1.5):
        expected = math.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi)
        assert ok.kernel_eval(x, x) == pytest.approx(expected, rel=1e-12)


def test_trace_equals_n(ok_n12):
    assert ok_n12.trace() == pytest.approx(12.0, abs=1e-10)


def test_reproducing_property(ok_n12):
    """int K(x, t) K(t, y) dt = K(x, y) for a determinantal projection kernel."""
    x, y = 0.5, -0.3
    lo, hi = ok_n12.domain
    import mpmath
    nodes, weights = oracle._legendre_nodes(32, ok_n12.precision)
    with mpmath.workprec(ok_n12.precision):
        total = mpmath.mpf(0)
        edges = mpmath.linspace(mpmath.mpf(lo), mpmath.mpf(hi), 17)
        for aa, bb in zip(edges[:-1], edges[1:]):
            half, mid = (bb - aa) / 2, (aa + bb) / 2
            for t, w in zip(nodes, weights):
                s = mid + half * t
                total += w * half * ok_n12._kernel_mp(x, s) * ok_n12._kernel_mp(s, y)
    resid = abs(float(total) - ok_n12.kernel_eval(x, y))
    assert resid < 1e-8


def test_gauge_invariance_on_products(gaussian_V):
    plain = oracle.build(gaussian_V, 2.0, 8, 1, precision=224)
    gauged = oracle.build(gaussian_V, 2.0, 8, 1, precision=224, symmetrize=True)
    # diagonal values are gauge-invariant
    for x in (0.0, 1.0, 2.4):
        assert gauged.kernel_eval(x, x) == pytest.approx(
            plain.kernel_eval(x, x), rel=1e-12)
    # off-diagonal products K(x,y) K(y,x) are gauge-invariant
    x, y = 0.4, 1.3
    assert gauged.kernel_eval(x, y) * gauged.kernel_eval(y, x) == pytest.approx(
        plain.kernel_eval(x, y) * plain.kernel_eval(y, x), rel=1e-10)


def test_precision_doubling_stability(gaussian_V):
    lo = oracle.build(gaussian_V, 2.0, 10, 1, precision=256)
    hi = oracle.build(gaussian_V, 2.0, 10, 1, precision=512)
    for x in (0.0, 2.2, 2.6):
        assert abs(lo.mean_density(x) - hi.mean_density(x)) < 1e-12


def test_bulk_density_near_semicircle(gaussian_V):
    ok = oracle.build(gaussian_V, 0.0, 24, 0, precision=256)
    # at the bulk center the semicircle gives 1/pi
    assert ok.mean_density(0.0) == pytest.approx(1.0 / math.pi, rel=0.05)


def test_caps_and_guards(gaussian_V):
    with pytest.raises(OracleError):
        oracle.build(gaussian_V, 1.0, 64, 1)
    with pytest.raises(OracleError):
        oracle.build(gaussian_V, 1.0, 12, 6)
    with pytest.raises(OracleError):
        oracle.build(gaussian_V, 1.0, 12, 1, precision=64)


def test_domain_guard(ok_n12):
    with pytest.raises(OracleError):
        ok_n12.kernel_eval(1e4, 0.0)
    with pytest.raises(OracleError):
        ok_n12.expected_count((0.0, 1e4))


def test_quartic_trace(gaussian_V):
    V = Potential((0.0, 0.0, 0.0, 0.0, 0.25))
    ok = oracle.build(V, 0.5, 8, 1, precision=256)
    assert ok.trace() == pytest.approx(8.0, abs=1e-10)
