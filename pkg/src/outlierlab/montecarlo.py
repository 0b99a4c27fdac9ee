"""Exact sampling of the Gaussian source ensemble and statistical validation.

The sampler is exact only for the quadratic potential V(x) = x^2/2, where
the ensemble is a GUE matrix shifted by the fixed source diag(a x r).  For
general potentials the finite-n kernel oracle is the validation path.

Every trial draws from its own counter-based RNG stream derived from the
master seed, so trial order and parallel execution cannot perturb results.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .landscape import Landscape, Regime
from .potential import Potential
from .prediction import predict_outlier_law_r1


GAUSSIAN_COEFFS = (0.0, 0.0, 0.5)


class MonteCarloError(RuntimeError):
    """Sampler misuse: wrong potential or wrong regime."""


def require_gaussian(V: Potential) -> None:
    if tuple(V.coeffs) != GAUSSIAN_COEFFS:
        raise MonteCarloError("MC requires Gaussian potential")


def _trial_rng(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    key = (trial,) if stream == 0 else (stream, trial)
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=seed, spawn_key=key)))


@dataclass(frozen=True)
class McReport:
    """Aggregate of one Monte Carlo run; deterministic given (inputs, seed).

    wall_time is informational only and is excluded from canonical JSON
    serialization to keep reports byte-reproducible.
    """

    n: int
    r: int
    a: float
    trials: int
    seed: int
    outlier_means: tuple[float, ...]
    outlier_variances: tuple[float, ...]
    ks_distance: float
    escape_rate: float
    wall_time: float

    def __post_init__(self):
        if not (0.0 <= self.ks_distance <= 1.0):
            raise ValueError("ks_distance must lie in [0, 1]")
        if not (0.0 <= self.escape_rate <= 1.0):
            raise ValueError("escape_rate must lie in [0, 1]")

    def canonical_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "a": self.a,
            "trials": self.trials,
            "seed": self.seed,
            "outlier_means": list(self.outlier_means),
            "outlier_variances": list(self.outlier_variances),
            "ks_distance": self.ks_distance,
            "escape_rate": self.escape_rate,
        }


def sample_gue(n: int, rng: np.random.Generator) -> np.ndarray:
    """Hermitian matrix with density proportional to exp(-n tr(H^2)/2)."""
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (A + A.conj().T) / (2.0 * math.sqrt(n))


def sample_spectrum(n: int, r: int, a: float, rng: np.random.Generator) -> np.ndarray:
    """Ascending eigenvalues of GUE + diag(a x r, 0 x (n-r))."""
    if n < 2:
        raise MonteCarloError("n must be at least 2")
    if not 0 <= r <= n:
        raise MonteCarloError("need 0 <= r <= n")
    M = sample_gue(n, rng)
    idx = np.arange(r)
    M[idx, idx] += a
    return np.linalg.eigvalsh(M)


def outlier_stats(n: int, r: int, a: float, trials: int, seed: int,
                  L: Landscape) -> McReport:
    """Top-r eigenvalue statistics of ``trials`` independent draws.

    r = 1: Kolmogorov-Smirnov distance of the largest eigenvalue against
    the predicted Normal(a*, 1/(n c)).  r >= 2: two-sample KS distance
    between the pooled top-r set rescaled by sqrt(n c / r) about a* and a
    pooled reference drawn from r x r GUE matrices (separate RNG streams).
    """
    require_gaussian(L.V)
    if L.regime is not Regime.SUPERCRITICAL:
        raise MonteCarloError("outlier statistics need a supercritical landscape")
    if r < 1 or trials < 2:
        raise MonteCarloError("need r >= 1 and trials >= 2")
    t0 = time.perf_counter()
    top = np.empty((trials, r))
    for t in range(trials):
        lam = sample_spectrum(n, r, a, _trial_rng(seed, t))
        top[t] = lam[-r:]

    means = top.mean(axis=0)
    variances = top.var(axis=0, ddof=1)

    a_star, var1 = predict_outlier_law_r1(L, n)
    if r == 1:
        ks = stats.kstest(top[:, 0], "norm",
                          args=(a_star, math.sqrt(var1))).statistic
    else:
        c = L.curvature_c
        scale = math.sqrt(n * c / r)
        sample = ((top - a_star) * scale).ravel()
        ref = np.empty((trials, r))
        for t in range(trials):
            ref[t] = np.linalg.eigvalsh(sample_gue(r, _trial_rng(seed, t, stream=2)))
        ks = stats.ks_2samp(sample, ref.ravel()).statistic

    return McReport(
        n=n, r=r, a=a, trials=trials, seed=seed,
        outlier_means=tuple(float(m) for m in means),
        outlier_variances=tuple(float(v) for v in variances),
        ks_distance=float(ks),
        escape_rate=0.0,
        wall_time=time.perf_counter() - t0,
    )


def subcritical_escape_rate(n: int, a: float, trials: int, seed: int,
                            L: Landscape, threshold: float | None = None,
                            force: bool = False) -> float:
    """Fraction of trials whose largest eigenvalue exceeds ``threshold``.

    Defaults to threshold = b* - 0.1.  Refuses a supercritical landscape
    (where the rate is trivially ~1) unless ``force`` is set.
    """
    require_gaussian(L.V)
    if L.regime is Regime.SUPERCRITICAL and not force:
        raise MonteCarloError(
            "landscape is supercritical; escape rate ~ 1 (pass force=True to override)")
    if threshold is None:
        if L.b_star is None:
            raise MonteCarloError("no b* available to set the default threshold")
        threshold = float(L.b_star) - 0.1
    hits = 0
    for t in range(trials):
        lam = sample_spectrum(n, 1, a, _trial_rng(seed, t))
        if lam[-1] > threshold:
            hits += 1
    return hits / trials


def subcritical_report(n: int, a: float, trials: int, seed: int,
                       L: Landscape, threshold: float | None = None,
                       force: bool = False) -> McReport:
    """McReport wrapper around the escape rate (outlier fields empty)."""
    t0 = time.perf_counter()
    rate = subcritical_escape_rate(n, a, trials, seed, L,
                                   threshold=threshold, force=force)
    return McReport(
        n=n, r=1, a=a, trials=trials, seed=seed,
        outlier_means=(), outlier_variances=(),
        ks_distance=0.0, escape_rate=rate,
        wall_time=time.perf_counter() - t0,
    )
