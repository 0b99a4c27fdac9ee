"""Asymptotic kernel and outlier-law predictions at leading order in r/n.

The supercritical kernel prediction is

    K(x, y) = exp(-n P3(x)/2 + n P3(y)/2) (sqrt(c)/k_{r-1}) kappa^{-1/2}
              K_r^GUE(zeta_x, zeta_y),

with the local coordinate of the supercritical chart and zeta0 = 0.  The
diagonal divided by n is the predicted mean density; its total mass over
the chart equals r/n exactly by the Christoffel-Darboux identity, which is
how the overall constant is pinned (the printed density prefactor alone
does not integrate to r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gue import GueKernelContext, kernel_gue, norm_k
from .landscape import Landscape, Regime, to_local_super


class PredictionError(RuntimeError):
    """Prediction requested outside its regime of validity."""


def _require(L: Landscape, regime: Regime):
    if L.regime is not regime:
        raise PredictionError(f"prediction requires {regime.value}, landscape is {L.regime.value}")


def predict_supercritical_kernel(L: Landscape, n: int, r: int, x: float, y: float) -> float:
    """Predicted finite-n kernel near a* for real x, y inside the chart."""
    _require(L, Regime.SUPERCRITICAL)
    if r >= n / 4:
        raise PredictionError("requires r < n/4")
    kappa = r / n
    c = L.curvature_c
    ctx = GueKernelContext(r=r, zeta0=0.0)
    zeta_x = to_local_super(L, n, r, x).real
    zeta_y = to_local_super(L, n, r, y).real
    prefactor = math.sqrt(c) / norm_k(r, r - 1) / math.sqrt(kappa)
    conj = math.exp(-0.5 * n * L.P(3, x) + 0.5 * n * L.P(3, y))
    return conj * prefactor * kernel_gue(ctx, zeta_x, zeta_y)


def predict_outlier_density(L: Landscape, n: int, r: int, x: float) -> float:
    """Predicted mean eigenvalue density near a*: kernel diagonal over n."""
    return predict_supercritical_kernel(L, n, r, x, x) / n


def predict_outlier_law_r1(L: Landscape, n: int) -> tuple[float, float]:
    """Gaussian law of the single outlier: mean a*, variance 1/(n c)."""
    _require(L, Regime.SUPERCRITICAL)
    return float(L.a_star), 1.0 / (n * L.curvature_c)


@dataclass(frozen=True)
class SuppressionStatement:
    """Operational form of the subcritical no-outlier claim near b*."""

    center: float
    radius: float
    n: int
    r: int
    claim: str = field(default=(
        "expected eigenvalue count in the disk decays exponentially in n"
    ))


def predict_subcritical(L: Landscape, n: int, r: int) -> SuppressionStatement:
    """Disk around b* on which the kernel is exponentially suppressed.

    The radius is the largest one on which Re P2 < 0 is certified on a
    grid, capped at (b* - beta)/2 so the disk stays clear of the band.
    """
    _require(L, Regime.SUBCRITICAL)
    b_star = L.b_star
    cap = 0.5 * (b_star - L.em.band.beta)
    radii = np.linspace(cap / 32.0, cap, 32)
    radius = 0.0
    for rad in radii:
        xs = np.concatenate([
            np.linspace(b_star - rad, b_star + rad, 17),
        ])
        if all(L.P(2, float(x)) < 0.0 for x in xs):
            radius = float(rad)
        else:
            break
    if radius <= 0.0:
        raise PredictionError("could not certify Re P2 < 0 on any disk at b*")
    return SuppressionStatement(center=float(b_star), radius=radius, n=n, r=r)
