"""Numerical laboratory for the spectral-outlier phase diagram of random
Hermitian matrices with a rank-r external source.

Layers: potential / equilibrium / landscape build the classification
(Supercritical, Subcritical, Critical, JumpingOutlier); gue / prediction
evaluate the limiting kernels; oracle / montecarlo verify them at finite n;
service / cli expose everything over HTTP and the command line.
"""

from .potential import Potential, PotentialError
from .equilibrium import (Band, EquilibriumError, EquilibriumMeasure,
                          build_measure, solve_endpoints)
from .landscape import Landscape, LandscapeError, Regime, classify

__all__ = [
    "Band",
    "EquilibriumError",
    "EquilibriumMeasure",
    "Landscape",
    "LandscapeError",
    "Potential",
    "PotentialError",
    "Regime",
    "build_measure",
    "classify",
    "solve_endpoints",
]

__version__ = "0.1.0"
