"""Polynomial external fields and their admissibility checks.

A potential is a real polynomial V(z) = sum c_k z^k with even degree and
positive leading coefficient, which guarantees that V(x) - a*x grows to
+infinity for every real coupling a.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly


class PotentialError(ValueError):
    """Raised when a coefficient list does not define an admissible potential."""


@dataclass(frozen=True)
class Potential:
    """Real polynomial potential, coefficients in ascending degree order.

    Immutable after construction; safe to share across threads.
    """

    coeffs: tuple[float, ...]
    degree: int = field(init=False)

    def __post_init__(self):
        c = tuple(float(x) for x in self.coeffs)
        if not c or not all(np.isfinite(c)):
            raise PotentialError("coefficients must be finite real numbers")
        # strip trailing zeros to get the true degree
        d = len(c) - 1
        while d > 0 and c[d] == 0.0:
            d -= 1
        c = c[: d + 1]
        if d < 2 or d % 2 != 0:
            raise PotentialError("degree must be even and at least 2")
        if c[d] <= 0.0:
            raise PotentialError("leading coefficient must be positive")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "degree", d)

    @classmethod
    def from_json(cls, text: str) -> "Potential":
        """Parse from a JSON array of coefficients, lowest degree first."""
        data = json.loads(text)
        if not isinstance(data, list):
            raise PotentialError("expected a JSON array of coefficients")
        return cls(tuple(data))

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """Horner evaluation; accepts real/complex scalars or numpy arrays."""
        return npoly.polyval(z, self.coeffs)

    def derivative(self, order: int = 1) -> np.ndarray:
        """Exact coefficient-wise derivative; returns ascending coefficients.

        Orders beyond the degree give the zero polynomial.
        """
        if order < 1:
            raise ValueError("order must be >= 1")
        if order > self.degree:
            return np.zeros(1)
        return npoly.polyder(np.asarray(self.coeffs, dtype=float), order)

    def eval_derivative(self, z, order: int = 1):
        return npoly.polyval(z, self.derivative(order))

    def is_convex(self, interval: tuple[float, float] | None = None) -> bool:
        """True iff V'' >= 0 on the interval (all of R when None).

        Isolated zeros of V'' count as convex.  Decided by locating the real
        roots of V'' and sign-testing between consecutive roots.
        """
        d2 = self.derivative(2)
        if len(d2) == 1:
            return d2[0] >= 0.0
        roots = npoly.polyroots(d2)
        real_roots = sorted(r.real for r in roots if abs(r.imag) <= 1e-9 * (1 + abs(r)))
        if interval is None:
            span = max([1.0] + [abs(r) for r in real_roots])
            lo, hi = -10.0 * span, 10.0 * span
        else:
            lo, hi = interval
            real_roots = [r for r in real_roots if lo < r < hi]
        probes = []
        pts = [lo] + real_roots + [hi]
        for left, right in zip(pts[:-1], pts[1:]):
            if right > left:
                probes.append(0.5 * (left + right))
        vals = npoly.polyval(np.array(probes), d2)
        return bool(np.all(vals >= -1e-12 * max(1.0, float(np.max(np.abs(vals))))))


def shifted(V: Potential, t: float) -> Potential:
    """Return the potential W(z) = V(z - t)."""
    n = V.degree + 1
    # binomial expansion of (z - t)^k
    out = np.zeros(n)
    for k, c in enumerate(V.coeffs):
        if c == 0.0:
            continue
        row = np.zeros(k + 1)
        row[0] = 1.0
        for _ in range(k):
            row = np.convolve(row, [-t, 1.0])[: k + 1]
        out[: k + 1] += c * row
    return Potential(tuple(out))
