"""Effective potentials, regime classification, and local outlier charts.

The three effective potentials built from the equilibrium data,

    P1 = -V + 2g + l1,   P2 = -V + a z + g + l2,   P3 = P2 - P1,

control where source eigenvalues detach from the band.  The critical
coupling is a_c = V'(beta)/2 = g'(beta); above it (for convex V) a unique
global maximum a* of P2 appears to the right of the band, below it P3 has a
unique minimum at the shadow point b*.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .equilibrium import EquilibriumMeasure
from .potential import Potential


class LandscapeError(RuntimeError):
    """Classification or landscape construction failed."""


class OutsideChart(ValueError):
    """Point outside the validity disk of the local coordinate."""


class Regime(str, enum.Enum):
    SUPERCRITICAL = "Supercritical"
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    JUMPING_OUTLIER = "JumpingOutlier"


def critical_a(em: EquilibriumMeasure, V: Potential) -> float:
    """a_c = V'(beta)/2, cross-checked against the quadrature value g'(beta+)."""
    beta = em.band.beta
    ac = 0.5 * float(V.eval_derivative(beta))
    gp = em.g_prime_at_beta()
    if abs(ac - gp) > 1e-6 * max(1.0, abs(ac)):
        raise LandscapeError(f"equilibrium inconsistency: V'(beta)/2={ac} vs g'(beta)={gp}")
    if abs(ac - gp) > 1e-8 * max(1.0, abs(ac)):
        raise LandscapeError(f"a_c cross-check outside 1e-8: {ac} vs {gp}")
    return ac


def eval_P(em: EquilibriumMeasure, V: Potential, a: float, l2: float, which: int, z):
    """P1, P2, or P3 at complex z off the cut (use eval_P_real on the axis)."""
    g = em.g_eval(z)
    if which == 1:
        return -V.eval(z) + 2.0 * g + em.l1
    if which == 2:
        return -V.eval(z) + a * z + g + l2
    if which == 3:
        return a * z - g - em.l1 + l2
    raise ValueError("which must be 1, 2, or 3")


def eval_P_real(em: EquilibriumMeasure, V: Potential, a: float, l2: float, which: int, x: float) -> float:
    """Real part of P_which at real x (valid on and off the band)."""
    g = em.g_real(x)
    if which == 1:
        return float(-V.eval(x) + 2.0 * g + em.l1)
    if which == 2:
        return float(-V.eval(x) + a * x + g + l2)
    if which == 3:
        return float(a * x - g - em.l1 + l2)
    raise ValueError("which must be 1, 2, or 3")


def _p2_slope(em: EquilibriumMeasure, V: Potential, a: float, x: float) -> float:
    """P2'(x) = -V'(x) + a + g'(x) for real x off the band."""
    return float(-V.eval_derivative(x) + a + em.g_prime(x).real)


def find_b_star(em: EquilibriumMeasure, a: float, *, a_c: float | None = None) -> float:
    """Unique root of g'(z) = a on (beta, inf) for 0 < a < a_c.

    g' decreases strictly to the right of the band, so a doubling bracket
    plus bisection plus a Newton polish is safe.
    """
    if a <= 0.0:
        raise ValueError("b* requires a > 0")
    if a_c is None:
        a_c = em.g_prime_at_beta()
    if a >= a_c:
        raise LandscapeError("b* undefined for a >= a_c")
    beta = em.band.beta
    lo = beta + 1e-9 * max(1.0, abs(beta))
    hi = beta + 1.0
    while em.g_prime(hi).real >= a:
        hi = beta + 2.0 * (hi - beta)
        if hi - beta > 1e12:
            raise LandscapeError("failed to bracket b*")
    if em.g_prime(lo).real <= a:
        raise LandscapeError("b* collapsed onto the band endpoint")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if em.g_prime(mid).real > a:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-8:
            break
    z = 0.5 * (lo + hi)
    for _ in range(50):
        f = em.g_prime(z).real - a
        df = em.g_second(z).real
        step = f / df
        z_new = z - step
        if not (beta < z_new):
            z_new = 0.5 * (z + max(lo, beta + 1e-12))
        if abs(z_new - z) < 1e-13 * max(1.0, abs(z)):
            z = z_new
            break
        z = z_new
    return float(z)


def _x_max(em: EquilibriumMeasure, V: Potential, a: float, a_c: float) -> float:
    """Point beyond which -V' + a + g' < -1 permanently (tail dominance)."""
    beta = em.band.beta
    d2 = V.derivative(2)
    x0 = beta
    if len(d2) > 1:
        roots = npoly.polyroots(d2)
        reals = [r.real for r in roots if abs(r.imag) < 1e-9 * (1 + abs(r))]
        if reals:
            x0 = max(x0, max(reals))
    x = max(x0 + 1.0, beta + 1.0)
    # for x > beta, 0 < g'(x) < a_c, so -V'(x) + a + a_c is an upper bound
    while -float(V.eval_derivative(x)) + a + a_c > -1.0:
        x *= 1.5
        if x > 1e12:
            raise LandscapeError("failed to certify polynomial dominance")
    return x


def find_a_star(
    em: EquilibriumMeasure,
    V: Potential,
    a: float,
    *,
    lo: float | None = None,
    scan_points: int = 160,
) -> tuple[float, bool]:
    """Global maximizer of P2 on (lo, X_max]; unique=False flags a tie.

    Roots of P2' are isolated by a sign scan on a geometric grid and
    polished by Newton; the returned point is the argmax of P2 over the
    local maxima, with ties within 1e-9 in P2-value reported as non-unique.
    """
    beta = em.band.beta
    a_c = em.g_prime_at_beta()
    if lo is None:
        lo = beta
    x_hi = _x_max(em, V, a, a_c)
    offs = np.geomspace(1e-8 * max(1.0, abs(lo)), x_hi - lo, scan_points)
    grid = lo + offs
    slopes = np.array([_p2_slope(em, V, a, x) for x in grid])

    roots = []
    for x1, x2, s1, s2 in zip(grid[:-1], grid[1:], slopes[:-1], slopes[1:]):
        if s1 == 0.0:
            roots.append(x1)
        if s1 > 0.0 > s2:  # only descending crossings are maxima
            a_br, b_br = x1, x2
            for _ in range(60):
                m = 0.5 * (a_br + b_br)
                if _p2_slope(em, V, a, m) > 0:
                    a_br = m
                else:
                    b_br = m
            z = 0.5 * (a_br + b_br)
            for _ in range(30):
                f = _p2_slope(em, V, a, z)
                df = float(-V.eval_derivative(z, 2) + em.g_second(z).real)
                if df == 0.0:
                    break
                z_new = z - f / df
                if not (x1 <= z_new <= x2):
                    break
                if abs(z_new - z) < 1e-13 * max(1.0, abs(z)):
                    z = z_new
                    break
                z = z_new
            roots.append(float(z))
    if not roots:
        raise LandscapeError("P2 has no interior maximum")
    vals = np.array([eval_P_real(em, V, a, 0.0, 2, x) for x in roots])
    order = np.argsort(vals)[::-1]
    a_star = float(roots[order[0]])
    unique = True
    if len(roots) > 1 and vals[order[0]] - vals[order[1]] < 1e-9:
        unique = False
    return a_star, unique


def fix_l2(em: EquilibriumMeasure, V: Potential, a: float, regime: Regime,
           a_star: float | None = None, b_star: float | None = None) -> float:
    """Multiplier normalization: P2(a*) = 0 (super) or P3(b*) = 0 (sub)."""
    if regime is Regime.SUPERCRITICAL:
        if a_star is None:
            raise ValueError("supercritical l2 needs a*")
        return float(V.eval(a_star)) - a * a_star - em.g_real(a_star)
    if regime is Regime.SUBCRITICAL:
        if b_star is None:
            raise ValueError("subcritical l2 needs b*")
        return em.l1 - (a * b_star - em.g_real(b_star))
    return 0.0


def curvature(em: EquilibriumMeasure, V: Potential, a_star: float) -> float:
    """c = V''(a*) - g''(a*) > 0 (nondegenerate maximum of P2)."""
    c = float(V.eval_derivative(a_star, 2)) - em.g_second(a_star).real
    if c <= 1e-10:
        raise LandscapeError("degenerate maximum: P2 is not quadratic at a*")
    return c


@dataclass(frozen=True)
class Landscape:
    """Classified outlier landscape for a potential/coupling pair."""

    V: Potential
    em: EquilibriumMeasure
    a: float
    a_c: float
    regime: Regime
    l2: float
    a_star: float | None = None
    b_star: float | None = None
    curvature_c: float | None = None

    def P(self, which: int, z):
        if isinstance(z, complex) and z.imag != 0.0:
            return eval_P(self.em, self.V, self.a, self.l2, which, z)
        return eval_P_real(self.em, self.V, self.a, self.l2, which, float(np.real(z)))

    def P_complex(self, which: int, z):
        return eval_P(self.em, self.V, self.a, self.l2, which, z)


def classify(em: EquilibriumMeasure, V: Potential, a: float) -> Landscape:
    """Regime classification with all secondary conditions verified.

    Negative couplings are the caller's responsibility (reflect a -> -a,
    V(z) -> V(-z)).
    """
    if a <= 0.0:
        raise ValueError("classification requires a > 0")
    a_c = critical_a(em, V)

    if abs(a - a_c) < 1e-8 * max(1.0, a_c):
        return Landscape(V=V, em=em, a=a, a_c=a_c, regime=Regime.CRITICAL, l2=0.0)

    convex = V.is_convex()

    if a > a_c:
        a_star, unique = find_a_star(em, V, a)
        if not unique:
            return Landscape(V=V, em=em, a=a, a_c=a_c, regime=Regime.JUMPING_OUTLIER, l2=0.0)
        return _supercritical(em, V, a, a_c, a_star)

    # a < a_c: shadow point always exists
    b_star = find_b_star(em, a, a_c=a_c)
    if convex:
        return _subcritical(em, V, a, a_c, b_star)

    # general potential: compare sup of P2 on [b*, X_max] with P3(b*)
    x_hi = _x_max(em, V, a, a_c)
    p3_bstar = eval_P_real(em, V, a, 0.0, 3, b_star)
    grid = b_star + (x_hi - b_star) * np.linspace(0.0, 1.0, 400) ** 2
    p2_vals = np.array([eval_P_real(em, V, a, 0.0, 2, x) for x in grid])
    # tail certificate: beyond X_max, P2 <= -V + a x + log(x - alpha), which
    # is decreasing there and already below the grid values by dominance
    q_tail = -float(V.eval(x_hi)) + a * x_hi + np.log(x_hi - em.band.alpha)
    sup_diff = max(float(np.max(p2_vals)), q_tail) - p3_bstar
    if sup_diff < -1e-9:
        return _subcritical(em, V, a, a_c, b_star)
    if sup_diff <= 1e-9:
        return Landscape(V=V, em=em, a=a, a_c=a_c, regime=Regime.JUMPING_OUTLIER, l2=0.0)
    a_star, unique = find_a_star(em, V, a, lo=b_star)
    if not unique:
        return Landscape(V=V, em=em, a=a, a_c=a_c, regime=Regime.JUMPING_OUTLIER, l2=0.0)
    return _supercritical(em, V, a, a_c, a_star, b_star=b_star)


def _supercritical(em, V, a, a_c, a_star, b_star=None) -> Landscape:
    l2 = fix_l2(em, V, a, Regime.SUPERCRITICAL, a_star=a_star)
    c = curvature(em, V, a_star)
    return Landscape(V=V, em=em, a=a, a_c=a_c, regime=Regime.SUPERCRITICAL,
                     l2=l2, a_star=a_star, b_star=b_star, curvature_c=c)


def _subcritical(em, V, a, a_c, b_star) -> Landscape:
    l2 = fix_l2(em, V, a, Regime.SUBCRITICAL, b_star=b_star)
    return Landscape(V=V, em=em, a=a, a_c=a_c, regime=Regime.SUBCRITICAL,
                     l2=l2, b_star=b_star)


# -- local coordinates ------------------------------------------------------


def _check_kappa(n: int, r: int) -> float:
    kappa = r / n
    if not (0.0 < kappa < 0.25):
        raise ValueError("kappa = r/n must lie in (0, 1/4)")
    return kappa


def to_local_super(L: Landscape, n: int, r: int, z) -> complex:
    """Leading-order conformal coordinate zeta = rho(z)/sqrt(kappa) at a*.

    rho(z) = sqrt(-2 P2(z)) with the branch fixed by rho'(a*) = sqrt(c) > 0;
    the centering zeta0 is zero at leading order.
    """
    if L.regime is not Regime.SUPERCRITICAL:
        raise LandscapeError("supercritical chart requires a supercritical landscape")
    kappa = _check_kappa(n, r)
    zc = complex(z)
    dz = zc - L.a_star
    if abs(dz) < 1e-14:
        return 0.0 + 0.0j
    p2 = L.P_complex(2, zc) if zc.imag != 0.0 else complex(L.P(2, zc.real))
    if p2.real >= 0.0 and abs(dz) > 1e-7:
        raise OutsideChart(f"Re P2({z}) >= 0 away from a*")
    rho = np.sqrt(complex(-2.0 * p2))
    if (rho / dz).real < 0.0:
        rho = -rho
    return complex(rho / np.sqrt(kappa))


def from_local_super(L: Landscape, n: int, r: int, zeta) -> complex:
    """Invert the supercritical chart by Newton, seeded by the linearization."""
    if L.regime is not Regime.SUPERCRITICAL:
        raise LandscapeError("supercritical chart requires a supercritical landscape")
    kappa = _check_kappa(n, r)
    zeta = complex(zeta)
    if abs(zeta) < 1e-14:
        return complex(L.a_star)
    target = zeta * np.sqrt(kappa)
    c = L.curvature_c
    z = L.a_star + target / np.sqrt(c)
    for _ in range(60):
        p2 = L.P_complex(2, z) if z.imag != 0.0 else complex(L.P(2, z.real))
        rho = np.sqrt(complex(-2.0 * p2))
        dz = z - L.a_star
        if abs(dz) > 0 and (rho / dz).real < 0.0:
            rho = -rho
        # rho' = -P2'/rho
        p2p = complex(-L.V.eval_derivative(z) + L.a + L.em.g_prime(z))
        drho = -p2p / rho if rho != 0 else np.sqrt(complex(c))
        step = (rho - target) / drho
        z = z - step
        if abs(step) < 1e-13 * max(1.0, abs(z)):
            break
    return complex(z)


def to_local_sub(L: Landscape, n: int, r: int, z) -> complex:
    """Diagnostic subcritical coordinate zeta = rho(z)/(i sqrt(kappa)) at b*.

    rho(z) = sqrt(2 P3(z)) with rho'(b*) > 0, so real z > b* maps to purely
    imaginary zeta.
    """
    if L.regime is not Regime.SUBCRITICAL:
        raise LandscapeError("subcritical chart requires a subcritical landscape")
    kappa = _check_kappa(n, r)
    zc = complex(z)
    dz = zc - L.b_star
    if abs(dz) < 1e-14:
        return 0.0 + 0.0j
    p3 = L.P_complex(3, zc) if zc.imag != 0.0 else complex(L.P(3, zc.real))
    rho = np.sqrt(complex(2.0 * p3))
    if (rho / dz).real < 0.0:
        rho = -rho
    return complex(rho / (1j * np.sqrt(kappa)))
