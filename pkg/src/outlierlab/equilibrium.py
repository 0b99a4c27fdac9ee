"""Unperturbed single-band equilibrium measure for a polynomial potential.

The density has the form rho(s) = (1/2pi) h(s) sqrt((s-alpha)(beta-s)) on a
single band [alpha, beta].  The band endpoints solve the two moment
conditions

    int_a^b V'(s) / sqrt((s-alpha)(beta-s)) ds = 0,
    (1/2pi) int_a^b s V'(s) / sqrt((s-alpha)(beta-s)) ds = 1,

which under s = mid + w*cos(theta) become plain theta-integrals that
Gauss-Chebyshev quadrature evaluates exactly for polynomial V'.  The
polynomial factor h comes from the difference quotient of V':

    h(x) = (1/pi) int_a^b [V'(s) - V'(x)] / (s - x) * ds / sqrt((s-a)(b-s)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate
from scipy.special import roots_legendre

from .potential import Potential


class EquilibriumError(RuntimeError):
    """Endpoint solve failed or the measure violates regularity."""


class OnBranchCut(ValueError):
    """g(z) requested at a point of the branch cut (-inf, beta]."""


class TooCloseToSupport(ValueError):
    """g'(z) or g''(z) requested within 1e-12 of the band."""


@dataclass(frozen=True)
class Band:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise ValueError("band endpoints must be finite")
        if not self.alpha < self.beta:
            raise ValueError("band requires alpha < beta")

    @property
    def mid(self) -> float:
        return 0.5 * (self.alpha + self.beta)

    @property
    def halfwidth(self) -> float:
        return 0.5 * (self.beta - self.alpha)


def _cheb_nodes(n: int):
    """First-kind Chebyshev angles and uniform weight pi/n."""
    k = np.arange(1, n + 1)
    return (2 * k - 1) * np.pi / (2 * n)


def _moment_conditions(V: Potential, mid: float, w: float, n_nodes: int):
    """Residuals of the two endpoint conditions at (mid, w)."""
    theta = _cheb_nodes(n_nodes)
    s = mid + w * np.cos(theta)
    vp = V.eval_derivative(s)
    f1 = float(np.mean(vp))                # (1/pi) * int V' dtheta
    f2 = float(np.mean(s * vp)) / 2.0      # (1/2pi) * int s V' dtheta
    return np.array([f1, f2 - 1.0])


def _moment_jacobian(V: Potential, mid: float, w: float, n_nodes: int):
    theta = _cheb_nodes(n_nodes)
    c = np.cos(theta)
    s = mid + w * c
    vp = V.eval_derivative(s)
    vpp = V.eval_derivative(s, 2)
    j11 = float(np.mean(vpp))
    j12 = float(np.mean(vpp * c))
    j21 = float(np.mean(vp + s * vpp)) / 2.0
    j22 = float(np.mean(c * (vp + s * vpp))) / 2.0
    return np.array([[j11, j12], [j21, j22]])


def solve_endpoints(V: Potential, *, tol: float = 1e-13, max_iter: int = 200) -> Band:
    """Band endpoints by Newton with homotopy from the Gaussian band (-2, 2).

    The path V_t = (1-t) z^2/2 + t V is traversed in 8 continuation steps;
    each step polishes (mid, halfwidth) to residual below ``tol``.
    """
    d = V.degree
    n_nodes = d + 8
    quad_coeffs = np.zeros(d + 1)
    quad_coeffs[2] = 0.5
    target = np.zeros(d + 1)
    target[: len(V.coeffs)] = V.coeffs

    mid, w = 0.0, 2.0
    iters_left = max_iter
    for t in np.linspace(0.0, 1.0, 9)[1:]:
        Vt = Potential(tuple((1.0 - t) * quad_coeffs + t * target))
        converged = False
        while iters_left > 0:
            iters_left -= 1
            res = _moment_conditions(Vt, mid, w, n_nodes)
            if np.max(np.abs(res)) < tol:
                converged = True
                break
            jac = _moment_jacobian(Vt, mid, w, n_nodes)
            try:
                step = np.linalg.solve(jac, res)
            except np.linalg.LinAlgError as exc:
                raise EquilibriumError("no single-band solution found") from exc
            # keep the halfwidth positive; damp if the full step overshoots
            scale = 1.0
            while w - scale * step[1] <= 0:
                scale *= 0.5
                if scale < 1e-8:
                    raise EquilibriumError("no single-band solution found")
            mid -= scale * step[0]
            w -= scale * step[1]
        if not converged:
            raise EquilibriumError("no single-band solution found")
    return Band(alpha=mid - w, beta=mid + w)


@dataclass(frozen=True)
class EquilibriumMeasure:
    """Equilibrium measure with band, density factor h, and multiplier l1.

    Immutable; all evaluators are pure functions of (band, h_coeffs).
    """

    band: Band
    h_coeffs: tuple[float, ...]
    l1: float

    # -- density ------------------------------------------------------------

    def h(self, x):
        return npoly.polyval(x, self.h_coeffs)

    def density(self, s):
        """rho(s) on the band; zero outside."""
        s = np.asarray(s, dtype=float)
        a, b = self.band.alpha, self.band.beta
        inside = (s >= a) & (s <= b)
        val = np.zeros_like(s)
        root = np.sqrt(np.clip((s - a) * (b - s), 0.0, None))
        val = np.where(inside, self.h(s) * root / (2.0 * np.pi), 0.0)
        return val if val.shape else float(val)

    def mass(self, n_nodes: int = 256) -> float:
        """Total mass by second-kind Chebyshev quadrature (exact for h)."""
        mid, w = self.band.mid, self.band.halfwidth
        k = np.arange(1, n_nodes + 1)
        theta = k * np.pi / (n_nodes + 1)
        wk = np.pi / (n_nodes + 1) * np.sin(theta) ** 2
        s = mid + w * np.cos(theta)
        return float(w * w / (2.0 * np.pi) * np.sum(wk * self.h(s)))

    # -- g-function ---------------------------------------------------------

    def _theta_integral(self, f, *, points=None):
        val, _ = integrate.quad(
            f, 0.0, np.pi, epsabs=1e-14, epsrel=1e-13, limit=300, points=points
        )
        return val

    def _weight(self, theta):
        mid, w = self.band.mid, self.band.halfwidth
        s = mid + w * np.cos(theta)
        return (w * w / (2.0 * np.pi)) * self.h(s) * np.sin(theta) ** 2, s

    def g_eval(self, z, *, nodes: int | None = None):
        """g(z) = int log(z - s) rho(s) ds, principal branch.

        Raises OnBranchCut for real z <= beta; use g_real for the real part
        on the cut.  ``nodes`` switches to fixed-order Gauss-Legendre with
        that many nodes (used by quadrature-independence checks).
        """
        zc = complex(z)
        if zc.imag == 0.0 and zc.real <= self.band.beta:
            raise OnBranchCut(f"g({z}) lies on the branch cut; use g_real")
        if nodes is not None:
            x, wts = roots_legendre(nodes)
            theta = 0.5 * np.pi * (x + 1.0)
            wq, s = self._weight(theta)
            vals = np.log(zc - s) * wq
            return complex(0.5 * np.pi * np.sum(wts * vals))

        def integrand(theta, part):
            wq, s = self._weight(theta)
            return part(np.log(zc - s) * wq)

        re = self._theta_integral(lambda t: integrand(t, np.real))
        im = self._theta_integral(lambda t: integrand(t, np.imag))
        return complex(re, im)

    def g_real(self, x: float) -> float:
        """Re g(x) for any real x, including on the band."""
        x = float(x)
        a, b = self.band.alpha, self.band.beta
        mid, w = self.band.mid, self.band.halfwidth

        def integrand(theta):
            wq, s = self._weight(theta)
            diff = np.abs(x - s)
            # the sin^2 factor kills the log singularity at the node
            return np.where(diff > 0, np.log(np.maximum(diff, 1e-300)), 0.0) * wq

        if a < x < b:
            theta_x = float(np.arccos((x - mid) / w))
            return self._theta_integral(integrand, points=[theta_x])
        return self._theta_integral(integrand)

    def g_prime(self, z, *, guard: bool = True):
        """g'(z) = int rho(s)/(z - s) ds for z off the band."""
        zc = complex(z)
        if guard and self._band_distance(zc) < 1e-12:
            raise TooCloseToSupport(f"g'({z}): too close to support")

        def integrand(theta, part):
            wq, s = self._weight(theta)
            return part(wq / (zc - s))

        re = self._theta_integral(lambda t: integrand(t, np.real))
        if zc.imag == 0.0:
            return complex(re, 0.0)
        im = self._theta_integral(lambda t: integrand(t, np.imag))
        return complex(re, im)

    def g_prime_at_beta(self) -> float:
        """Limit g'(beta+), finite because rho vanishes like a square root."""
        mid, w = self.band.mid, self.band.halfwidth

        def integrand(theta):
            s = mid + w * np.cos(theta)
            return (w / (2.0 * np.pi)) * self.h(s) * (1.0 + np.cos(theta))

        return self._theta_integral(integrand)

    def g_second(self, z):
        """g''(z) = -int rho(s)/(z - s)^2 ds for z off the band."""
        zc = complex(z)
        if self._band_distance(zc) < 1e-12:
            raise TooCloseToSupport(f"g''({z}): too close to support")

        def integrand(theta, part):
            wq, s = self._weight(theta)
            return part(-wq / (zc - s) ** 2)

        re = self._theta_integral(lambda t: integrand(t, np.real))
        if zc.imag == 0.0:
            return complex(re, 0.0)
        im = self._theta_integral(lambda t: integrand(t, np.imag))
        return complex(re, im)

    def _band_distance(self, zc: complex) -> float:
        a, b = self.band.alpha, self.band.beta
        x = min(max(zc.real, a), b)
        return abs(zc - x)


def build_measure(V: Potential, band: Band) -> EquilibriumMeasure:
    """Assemble the equilibrium measure on a solved band.

    h is extracted exactly from the Chebyshev moments of the difference
    quotient of V'; l1 is fixed by P1(beta) = 0, i.e. l1 = V(beta) - 2 g(beta).
    """
    d = V.degree
    n_nodes = d + 8
    theta = _cheb_nodes(n_nodes)
    s = band.mid + band.halfwidth * np.cos(theta)
    vp_coeffs = V.derivative()  # b_m, m = 0..d-1

    # h_j = (1/N) sum_k sum_{m > j} b_m s_k^{m-1-j}
    h_coeffs = np.zeros(max(d - 1, 1))
    powers = {p: np.mean(s**p) for p in range(d)}
    for j in range(d - 1):
        acc = 0.0
        for m in range(j + 1, d):
            if vp_coeffs[m] != 0.0:
                acc += vp_coeffs[m] * powers[m - 1 - j]
        h_coeffs[j] = acc

    em = EquilibriumMeasure(band=band, h_coeffs=tuple(float(c) for c in h_coeffs), l1=0.0)

    h_alpha = em.h(band.alpha)
    h_beta = em.h(band.beta)
    if h_alpha <= 0.0 or h_beta <= 0.0:
        raise EquilibriumError("non-regular potential: h vanishes at a band endpoint")
    grid = np.linspace(band.alpha, band.beta, 513)
    h_grid = em.h(grid)
    if np.min(h_grid) < -1e-12 * max(1.0, float(np.max(np.abs(h_grid)))):
        raise EquilibriumError("not single-band: h negative inside the band")

    mass = em.mass()
    if abs(mass - 1.0) > 1e-10:
        raise EquilibriumError(f"equilibrium mass {mass} differs from 1")

    # l1 via P1(beta) = 0; g(beta) has an integrable log singularity only
    mid, w = band.mid, band.halfwidth

    def g_beta_integrand(theta):
        sq, sv = em._weight(theta)
        arg = w * (1.0 - np.cos(theta))
        return np.where(arg > 0, np.log(np.maximum(arg, 1e-300)), 0.0) * sq

    g_beta, _ = integrate.quad(g_beta_integrand, 0.0, np.pi, epsabs=1e-14, limit=300)
    l1 = float(V.eval(band.beta)) - 2.0 * g_beta
    return EquilibriumMeasure(band=band, h_coeffs=em.h_coeffs, l1=l1)
