"""Exact finite-n correlation kernel of the source ensemble at desk scale.

The eigenvalue process is a biorthogonal ensemble: weight families

    g_k(x) = x^k e^{-n V(x)},            k = 0 .. n-r-1,
    g_{n-r+k}(x) = x^k e^{-n(V(x)-ax)},  k = 0 .. r-1,

paired against monomials f_j(x) = x^j.  With the Gram matrix
G_jk = int f_j g_k dx, the correlation kernel is

    K_n(x, y) = sum_{j,k} g_k(x) (G^{-1})_{kj} f_j(y),

a rank-n reproducing kernel with trace exactly n.  Monomial Gram matrices
are exponentially ill-conditioned, hence all arithmetic is mpmath with a
build-time mantissa (default 256 bits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath

from .potential import Potential


class OracleError(RuntimeError):
    """Oracle build or evaluation failure."""


N_CAP = 32
R_CAP = 4
MIN_PRECISION = 192
_PANEL_ORDER = 32


@lru_cache(maxsize=32)
def _legendre_nodes(order: int, prec: int):
    """Gauss-Legendre nodes/weights on [-1, 1] at ``prec`` bits, by Newton."""
    with mpmath.workprec(prec + 32):
        nodes, weights = [], []
        for i in range(1, order + 1):
            x = mpmath.mpf(math.cos(math.pi * (i - 0.25) / (order + 0.5)))
            for _ in range(100):
                p0, p1 = mpmath.mpf(1), x
                for k in range(2, order + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = order * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpmath.mpf(2) ** (-prec - 16):
                    break
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
        return tuple(nodes), tuple(weights)


def _domain(V: Potential, a: float, n: int, precision: int) -> tuple[float, float]:
    """Truncation interval: all integrands below 2^(-precision/2 - 20) outside."""
    thresh = -(0.5 * precision + 20.0) * math.log(2.0)

    def log_bound(x: float) -> float:
        v = float(V.eval(x))
        drift = max(0.0, a * x)  # the source weight only helps where ax < 0
        return -n * (v - drift) + 2.0 * n * math.log1p(abs(x))

    hi = 1.0
    while log_bound(hi) > thresh or log_bound(hi * 1.05) > log_bound(hi):
        hi *= 1.25
        if hi > 1e6:
            raise OracleError("tail bound unsatisfiable on the right")
    lo = -1.0
    while log_bound(lo) > thresh or log_bound(lo * 1.05) > log_bound(lo):
        lo *= 1.25
        if lo < -1e6:
            raise OracleError("tail bound unsatisfiable on the left")
    return lo, hi


@dataclass
class OracleKernel:
    """Finite-n kernel; immutable after build, safe for concurrent evaluation."""

    n: int
    r: int
    a: float
    V: Potential
    precision: int
    domain: tuple[float, float]
    symmetrize: bool = False
    _gram_inverse: mpmath.matrix = field(repr=False, default=None)
    _nodes: list = field(repr=False, default=None)
    _weights: list = field(repr=False, default=None)

    # -- evaluation ---------------------------------------------------------

    def _weight_vector(self, x):
        """g_k(x) for k = 0..n-1 in working precision."""
        n, r, a = self.n, self.r, self.a
        v = mpmath.mpf(0)
        for c in reversed(self.V.coeffs):
            v = v * x + mpmath.mpf(c)
        w1 = mpmath.exp(-n * v)
        w2 = mpmath.exp(-n * (v - mpmath.mpf(a) * x))
        if self.symmetrize:
            gauge = mpmath.exp(n * v / 2)
            w1 *= gauge
            w2 *= gauge
        out = []
        p = mpmath.mpf(1)
        for _ in range(n - r):
            out.append(p * w1)
            p *= x
        p = mpmath.mpf(1)
        for _ in range(r):
            out.append(p * w2)
            p *= x
        return out

    def _monomial_vector(self, y):
        if self.symmetrize:
            v = mpmath.mpf(0)
            for c in reversed(self.V.coeffs):
                v = v * y + mpmath.mpf(c)
            gauge = mpmath.exp(-self.n * v / 2)
        else:
            gauge = mpmath.mpf(1)
        out = []
        p = mpmath.mpf(1)
        for _ in range(self.n):
            out.append(p * gauge)
            p *= y
        return out

    def _kernel_mp(self, x, y):
        with mpmath.workprec(self.precision):
            g = self._weight_vector(mpmath.mpf(x))
            f = self._monomial_vector(mpmath.mpf(y))
            B = self._gram_inverse
            total = mpmath.mpf(0)
            for k in range(self.n):
                acc = mpmath.mpf(0)
                for j in range(self.n):
                    acc += B[k, j] * f[j]
                total += g[k] * acc
            return total

    def kernel_eval(self, x: float, y: float) -> float:
        lo, hi = self.domain
        if not (lo <= x <= hi and lo <= y <= hi):
            raise OracleError("point outside truncation domain")
        return float(self._kernel_mp(x, y))

    def mean_density(self, x: float) -> float:
        return self.kernel_eval(x, x) / self.n

    def expected_count(self, interval: tuple[float, float], panels: int = 8) -> float:
        """int_interval K(x, x) dx by composite Gauss-Legendre."""
        lo, hi = interval
        dlo, dhi = self.domain
        if not (dlo <= lo <= hi <= dhi):
            raise OracleError("interval outside truncation domain")
        nodes, weights = _legendre_nodes(_PANEL_ORDER, self.precision)
        with mpmath.workprec(self.precision):
            total = mpmath.mpf(0)
            edges = mpmath.linspace(mpmath.mpf(lo), mpmath.mpf(hi), panels + 1)
            for aa, bb in zip(edges[:-1], edges[1:]):
                half = (bb - aa) / 2
                mid = (aa + bb) / 2
                for t, w in zip(nodes, weights):
                    x = mid + half * t
                    total += w * half * self._kernel_mp(x, x)
            return float(total)

    def trace(self, panels: int | None = None) -> float:
        if panels is None:
            panels = max(12, self.n)
        return self.expected_count(self.domain, panels=panels)


def build(V: Potential, a: float, n: int, r: int, precision: int = 256,
          symmetrize: bool = False) -> OracleKernel:
    """Assemble the Gram matrix from weight moments and invert it.

    Raises OracleError("raise precision") when the inverse residual exceeds
    2^(-precision/4).
    """
    if n > N_CAP or n < 1:
        raise OracleError(f"n capped at {N_CAP}")
    if not 0 <= r <= R_CAP or r > n:
        raise OracleError(f"r capped at {R_CAP} and r <= n")
    if precision < MIN_PRECISION:
        raise OracleError(f"precision must be at least {MIN_PRECISION} bits")

    lo, hi = _domain(V, a, n, precision)
    d = V.degree
    total_nodes = 8 * (n + d * n)
    panels = max(total_nodes // _PANEL_ORDER + 2, 8)
    nodes, weights = _legendre_nodes(_PANEL_ORDER, precision)

    with mpmath.workprec(precision):
        m1 = [mpmath.mpf(0)] * (2 * n)
        m2 = [mpmath.mpf(0)] * (2 * n)
        a_mp = mpmath.mpf(a)
        coeffs = [mpmath.mpf(c) for c in reversed(V.coeffs)]
        edges = mpmath.linspace(mpmath.mpf(lo), mpmath.mpf(hi), panels + 1)
        for aa, bb in zip(edges[:-1], edges[1:]):
            half = (bb - aa) / 2
            mid = (aa + bb) / 2
            for t, w in zip(nodes, weights):
                x = mid + half * t
                v = mpmath.mpf(0)
                for c in coeffs:
                    v = v * x + c
                w1 = w * half * mpmath.exp(-n * v)
                w2 = w * half * mpmath.exp(-n * (v - a_mp * x))
                p = mpmath.mpf(1)
                for m in range(2 * n):
                    m1[m] += p * w1
                    m2[m] += p * w2
                    p *= x

        G = mpmath.matrix(n, n)
        for j in range(n):
            for k in range(n):
                if k < n - r:
                    G[j, k] = m1[j + k]
                else:
                    G[j, k] = m2[j + (k - (n - r))]
        try:
            B = G ** -1
        except ZeroDivisionError as exc:
            raise OracleError("raise precision: Gram matrix numerically singular") from exc
        # residual of the inverse as the conditioning certificate
        resid = mpmath.mpf(0)
        I = mpmath.eye(n)
        R = G * B - I
        for j in range(n):
            for k in range(n):
                resid = max(resid, abs(R[j, k]))
        if resid > mpmath.mpf(2) ** (-precision // 4):
            raise OracleError(f"raise precision: inverse residual {mpmath.nstr(resid)}")

    return OracleKernel(n=n, r=r, a=a, V=V, precision=precision,
                        domain=(lo, hi), symmetrize=symmetrize,
                        _gram_inverse=B, _nodes=nodes, _weights=weights)
