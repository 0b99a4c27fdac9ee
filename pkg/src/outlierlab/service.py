"""HTTP service exposing the laboratory: landscape analysis, kernel
predictions, the finite-n oracle, Monte Carlo runs, and cross-checks.

Error mapping: configuration/validation problems -> 400; mathematical
failures (non-convergence, regime violations, precision exhaustion) -> 409.
All successful responses are canonical report payloads (schema_version,
echoed config, result) so that clients can serialize them byte-stably.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, model_validator

from . import montecarlo, oracle
from .equilibrium import EquilibriumError, build_measure, solve_endpoints
from .landscape import Landscape, LandscapeError, Regime, classify
from .montecarlo import MonteCarloError
from .oracle import OracleError
from .potential import Potential, PotentialError
from .prediction import (PredictionError, predict_outlier_density,
                         predict_outlier_law_r1, predict_subcritical)
from .serialize import report

MAX_GRID_POINTS = 2000


# ---------------------------------------------------------------------------
# request / response models


class GridSpec(BaseModel):
    x_min: float
    x_max: float
    points: int = Field(ge=2, le=MAX_GRID_POINTS)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.x_min < self.x_max:
            raise ValueError("grid needs x_min < x_max")
        return self


class AnalyzeRequest(BaseModel):
    potential: list[float]
    a: float | None = None
    sweep: list[float] | None = None

    @model_validator(mode="after")
    def _one_of(self):
        if (self.a is None) == (self.sweep is None):
            raise ValueError("provide exactly one of 'a' or 'sweep'")
        return self


class PredictRequest(BaseModel):
    potential: list[float]
    a: float
    n: int = Field(ge=2)
    r: int = Field(ge=1)
    grid: GridSpec | None = None


class OracleRequest(BaseModel):
    potential: list[float]
    a: float
    n: int = Field(ge=1, le=oracle.N_CAP)
    r: int = Field(ge=0, le=oracle.R_CAP)
    precision_bits: int = 256
    grid: GridSpec | None = None
    intervals: list[tuple[float, float]] = Field(default_factory=list)
    symmetrize: bool = False


class McRequest(BaseModel):
    potential: list[float]
    a: float
    n: int = Field(ge=2)
    r: int = Field(ge=0)
    trials: int = Field(ge=2)
    seed: int = Field(ge=0, lt=2 ** 64)
    mode: str = Field(default="outlier", pattern="^(outlier|escape)$")
    threshold: float | None = None
    force: bool = False


class CompareRequest(BaseModel):
    potential: list[float]
    a: float
    n: int = Field(ge=2)
    r: int = Field(ge=1)
    method: str = Field(pattern="^(oracle|mc)$")
    trials: int = Field(default=2000, ge=2)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    precision_bits: int = 256
    expect_regime: str | None = None


# ---------------------------------------------------------------------------
# helpers

_MATH_ERRORS = (EquilibriumError, LandscapeError, PredictionError,
                OracleError, MonteCarloError)


def _potential(coeffs: list[float]) -> Potential:
    try:
        return Potential(tuple(coeffs))
    except (PotentialError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def _landscape(V: Potential, a: float) -> Landscape:
    try:
        em = build_measure(V, solve_endpoints(V))
        return classify(em, V, a)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except _MATH_ERRORS as exc:
        raise HTTPException(status_code=409, detail=str(exc))


def _check_kappa_request(n: int, r: int) -> None:
    if r >= n / 4:
        raise HTTPException(
            status_code=400,
            detail=f"r={r} must stay below n/4={n / 4} (r/n must be small)")


def _landscape_dict(L: Landscape) -> dict:
    return {
        "alpha": L.em.band.alpha,
        "beta": L.em.band.beta,
        "l1": L.em.l1,
        "a_c": L.a_c,
        "regime": L.regime.value,
        "a_star": L.a_star,
        "b_star": L.b_star,
        "curvature_c": L.curvature_c,
        "l2": L.l2,
    }


def _math_guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except _MATH_ERRORS as exc:
        raise HTTPException(status_code=409, detail=str(exc))


# ---------------------------------------------------------------------------
# application

app = FastAPI(title="spectral outlier laboratory")


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/analyze")
def analyze(req: AnalyzeRequest) -> dict:
    V = _potential(req.potential)
    config = req.model_dump()
    if req.a is not None:
        L = _landscape(V, req.a)
        return report(config, _landscape_dict(L))
    results = []
    for a in req.sweep:
        L = _landscape(V, a)
        results.append({"a": a, **_landscape_dict(L)})
    return report(config, {"sweep": results})


@app.post("/predict")
def predict(req: PredictRequest) -> dict:
    V = _potential(req.potential)
    _check_kappa_request(req.n, req.r)
    L = _landscape(V, req.a)
    config = req.model_dump()
    if L.regime is Regime.SUBCRITICAL:
        stmt = _math_guard(predict_subcritical, L, req.n, req.r)
        return report(config, {
            "regime": L.regime.value,
            "suppression": {"center": stmt.center, "radius": stmt.radius,
                            "n": stmt.n, "r": stmt.r, "claim": stmt.claim},
        })
    if L.regime is not Regime.SUPERCRITICAL:
        raise HTTPException(
            status_code=409,
            detail=f"prediction refused in regime {L.regime.value}")
    a_star, variance = _math_guard(predict_outlier_law_r1, L, req.n)
    result = {
        "regime": L.regime.value,
        "a_star": L.a_star,
        "curvature_c": L.curvature_c,
        "outlier_mean": a_star,
        "outlier_variance_r1": variance,
    }
    if req.grid is not None:
        xs = np.linspace(req.grid.x_min, req.grid.x_max, req.grid.points)
        dens = [_math_guard(predict_outlier_density, L, req.n, req.r, float(x))
                for x in xs]
        mass = float(np.trapezoid(dens, xs)) * req.n
        result["grid"] = {"x": [float(x) for x in xs], "density": dens}
        result["grid_mass_times_n"] = mass
    return report(config, result)


@app.post("/oracle")
def oracle_endpoint(req: OracleRequest) -> dict:
    V = _potential(req.potential)
    if req.precision_bits < oracle.MIN_PRECISION:
        raise HTTPException(
            status_code=400,
            detail=f"precision must be at least {oracle.MIN_PRECISION} bits")
    ok = _math_guard(oracle.build, V, req.a, req.n, req.r,
                     precision=req.precision_bits, symmetrize=req.symmetrize)
    result = {
        "domain": list(ok.domain),
        "trace": _math_guard(ok.trace),
        "expected_counts": [
            {"interval": list(iv), "count": _math_guard(ok.expected_count, tuple(iv))}
            for iv in req.intervals
        ],
    }
    if req.grid is not None:
        xs = np.linspace(req.grid.x_min, req.grid.x_max, req.grid.points)
        result["grid"] = {
            "x": [float(x) for x in xs],
            "density": [_math_guard(ok.mean_density, float(x)) for x in xs],
        }
    return report(req.model_dump(), result)


@app.post("/mc")
def mc(req: McRequest) -> dict:
    V = _potential(req.potential)
    try:
        montecarlo.require_gaussian(V)
    except MonteCarloError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    L = _landscape(V, req.a)
    config = req.model_dump()
    if req.mode == "outlier":
        if req.r < 1:
            raise HTTPException(status_code=400, detail="outlier mode needs r >= 1")
        _check_kappa_request(req.n, req.r)
        rep = _math_guard(montecarlo.outlier_stats,
                          req.n, req.r, req.a, req.trials, req.seed, L)
    else:
        rep = _math_guard(montecarlo.subcritical_report,
                          req.n, req.a, req.trials, req.seed, L,
                          threshold=req.threshold, force=req.force)
    return report(config, rep.canonical_dict())


@app.post("/compare")
def compare(req: CompareRequest) -> dict:
    V = _potential(req.potential)
    _check_kappa_request(req.n, req.r)
    L = _landscape(V, req.a)
    config = req.model_dump()
    if req.expect_regime is not None and req.expect_regime != L.regime.value:
        raise HTTPException(
            status_code=400,
            detail=f"expected regime {req.expect_regime}, classified {L.regime.value}")
    checks: list[dict] = []

    def check(name: str, value: float, passed: bool, threshold: str):
        checks.append({"name": name, "value": value, "pass": bool(passed),
                       "threshold": threshold})

    if req.method == "oracle":
        ok = _math_guard(oracle.build, V, req.a, req.n, req.r,
                         precision=req.precision_bits)
        if L.regime is Regime.SUPERCRITICAL:
            window = (L.a_star - 0.3, L.a_star + 0.3)
            count = _math_guard(ok.expected_count, window)
            check("outlier_count", count,
                  0.8 * req.r <= count <= 1.2 * req.r, "within [0.8 r, 1.2 r]")
            xs = np.linspace(window[0], window[1], 41)
            dens = [ok.mean_density(float(x)) for x in xs]
            peak = float(xs[int(np.argmax(dens))])
            check("peak_location", peak, abs(peak - L.a_star) < 0.1,
                  "within 0.1 of a*")
        elif L.regime is Regime.SUBCRITICAL:
            window = (L.b_star - 0.15, L.b_star + 0.15)
            count = _math_guard(ok.expected_count, window)
            check("shadow_count", count, count < 0.05, "< 0.05")
        else:
            raise HTTPException(status_code=409,
                                detail=f"compare refused in regime {L.regime.value}")
    else:
        try:
            montecarlo.require_gaussian(V)
        except MonteCarloError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if L.regime is Regime.SUPERCRITICAL:
            rep = _math_guard(montecarlo.outlier_stats,
                              req.n, req.r, req.a, req.trials, req.seed, L)
            a_star, variance = predict_outlier_law_r1(L, req.n)
            mean_gate = 4.0 * math.sqrt(variance / req.trials)
            mean_top = rep.outlier_means[-1]
            check("mean_deviation", abs(mean_top - a_star),
                  abs(mean_top - a_star) < mean_gate, f"< {mean_gate!r}")
            if req.r == 1:
                var_top = rep.outlier_variances[-1]
                check("variance_ratio", var_top / variance,
                      abs(var_top / variance - 1.0) < 0.15, "within 15% of 1")
                check("ks_distance", rep.ks_distance,
                      rep.ks_distance < 0.05, "< 0.05")
            else:
                check("ks_distance", rep.ks_distance,
                      rep.ks_distance < 0.06, "< 0.06")
        elif L.regime is Regime.SUBCRITICAL:
            rate = _math_guard(montecarlo.subcritical_escape_rate,
                               req.n, req.a, req.trials, req.seed, L)
            check("escape_rate", rate, rate < 0.01, "< 0.01")
        else:
            raise HTTPException(status_code=409,
                                detail=f"compare refused in regime {L.regime.value}")

    verdict = all(c["pass"] for c in checks)
    return report(config, {"regime": L.regime.value, "method": req.method,
                           "checks": checks, "pass": verdict})
