"""Command-line front end; a thin client of the HTTP service.

By default commands are served in-process (the ASGI app mounted on an
httpx transport); ``--server URL`` targets a remote instance instead.
Exit codes: 0 success, 1 usage/configuration error, 2 mathematical
failure reported by the service.
"""

from __future__ import annotations

import argparse
import json
import sys

import anyio
import httpx

from .serialize import atomic_write, canonical_json, grid_csv

USAGE_ERROR = 1
MATH_ERROR = 2


class CliUsageError(Exception):
    pass


def _parse_grid(text: str) -> dict:
    try:
        lo, hi, pts = text.split(":")
        return {"x_min": float(lo), "x_max": float(hi), "points": int(pts)}
    except ValueError as exc:
        raise CliUsageError(f"bad --grid '{text}', expected min:max:points") from exc


def _parse_sweep(text: str) -> list[float]:
    try:
        key, rng = text.split("=")
        if key != "a":
            raise ValueError
        start, stop, steps = rng.split(":")
        steps = int(steps)
        start, stop = float(start), float(stop)
        if steps < 1:
            raise ValueError
        if steps == 1:
            return [start]
        h = (stop - start) / (steps - 1)
        return [start + i * h for i in range(steps)]
    except ValueError as exc:
        raise CliUsageError(
            f"bad --sweep '{text}', expected a=start:stop:steps") from exc


def _parse_potential(text: str) -> list[float]:
    try:
        coeffs = json.loads(text)
        if not isinstance(coeffs, list) or not coeffs:
            raise ValueError
        return [float(c) for c in coeffs]
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise CliUsageError(
            f"bad --potential '{text}', expected a JSON array of coefficients") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="outlierlab",
        description="Spectral-outlier phase diagram laboratory for "
                    "rank-r source random matrix ensembles.")
    parser.add_argument("--server", default=None,
                        help="URL of a running service; default runs in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, needs_nr=False, needs_mc=False):
        p.add_argument("--config", default=None,
                       help="JSON file with the same keys as the flags")
        p.add_argument("--potential", default=None,
                       help="ascending coefficients as a JSON array, e.g. [0,0,0.5]")
        p.add_argument("--a", type=float, default=None)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if needs_nr:
            p.add_argument("--n", type=int, default=None)
            p.add_argument("--r", type=int, default=None)
        if needs_mc:
            p.add_argument("--trials", type=int, default=None)
            p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("analyze", help="classify the landscape at a (or a sweep)")
    common(p)
    p.add_argument("--sweep", default=None, help="a=start:stop:steps")

    p = sub.add_parser("predict", help="asymptotic outlier density / suppression disk")
    common(p, needs_nr=True)
    p.add_argument("--grid", default=None, help="min:max:points")

    p = sub.add_parser("oracle", help="exact finite-n kernel diagnostics")
    common(p, needs_nr=True)
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--grid", default=None, help="min:max:points")
    p.add_argument("--interval", action="append", default=None,
                   metavar="LO:HI", help="expected-count interval (repeatable)")

    p = sub.add_parser("mc", help="Monte Carlo sampling run")
    common(p, needs_nr=True, needs_mc=True)
    p.add_argument("--mode", choices=("outlier", "escape"), default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--force", action="store_true", default=None)

    p = sub.add_parser("compare", help="prediction vs oracle or Monte Carlo verdict")
    common(p, needs_nr=True, needs_mc=True)
    p.add_argument("--method", choices=("oracle", "mc"), default=None)
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--expect-regime", default=None)

    return parser


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliUsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise CliUsageError("config file must hold a JSON object")
    return cfg


def _merged(args: argparse.Namespace, keys: list[str]) -> dict:
    """Config-file values overridden by explicitly given flags."""
    cfg = _load_config(args.config)
    out = {k: v for k, v in cfg.items() if k in keys}
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    return out


def _request_body(args: argparse.Namespace) -> tuple[str, dict]:
    cmd = args.command
    if cmd == "analyze":
        merged = _merged(args, ["potential", "a", "sweep"])
        if isinstance(merged.get("potential"), str):
            merged["potential"] = _parse_potential(merged["potential"])
        if isinstance(merged.get("sweep"), str):
            merged["sweep"] = _parse_sweep(merged["sweep"])
        return "/analyze", merged
    if cmd == "predict":
        merged = _merged(args, ["potential", "a", "n", "r", "grid"])
        if isinstance(merged.get("potential"), str):
            merged["potential"] = _parse_potential(merged["potential"])
        if isinstance(merged.get("grid"), str):
            merged["grid"] = _parse_grid(merged["grid"])
        return "/predict", merged
    if cmd == "oracle":
        merged = _merged(args, ["potential", "a", "n", "r", "precision_bits",
                                "grid", "interval"])
        if isinstance(merged.get("potential"), str):
            merged["potential"] = _parse_potential(merged["potential"])
        if isinstance(merged.get("grid"), str):
            merged["grid"] = _parse_grid(merged["grid"])
        intervals = merged.pop("interval", None) or []
        parsed = []
        for iv in intervals:
            if isinstance(iv, str):
                try:
                    lo, hi = iv.split(":")
                    parsed.append([float(lo), float(hi)])
                except ValueError as exc:
                    raise CliUsageError(f"bad --interval '{iv}', expected lo:hi") from exc
            else:
                parsed.append(list(iv))
        merged["intervals"] = parsed
        return "/oracle", merged
    if cmd == "mc":
        merged = _merged(args, ["potential", "a", "n", "r", "trials", "seed",
                                "mode", "threshold", "force"])
        if isinstance(merged.get("potential"), str):
            merged["potential"] = _parse_potential(merged["potential"])
        return "/mc", merged
    if cmd == "compare":
        merged = _merged(args, ["potential", "a", "n", "r", "method", "trials",
                                "seed", "precision_bits", "expect_regime"])
        if isinstance(merged.get("potential"), str):
            merged["potential"] = _parse_potential(merged["potential"])
        return "/compare", merged
    raise CliUsageError(f"unknown command {cmd}")


async def _post(server: str | None, path: str, body: dict) -> httpx.Response:
    if server is None:
        from .service import app
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://service") as client:
            return await client.post(path, json=body, timeout=None)
    async with httpx.AsyncClient(base_url=server) as client:
        return await client.post(path, json=body, timeout=None)


def _emit(payload: dict, fmt: str, out: str | None) -> None:
    if fmt == "csv":
        grid = payload.get("result", {}).get("grid")
        if grid is None:
            raise CliUsageError("csv format requires a command that returns a grid "
                                "(pass --grid)")
        text = grid_csv(["x", "density"], zip(grid["x"], grid["density"]))
    else:
        text = canonical_json(payload)
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        path, body = _request_body(args)
        missing = [k for k in ("potential",) if body.get(k) is None]
        if missing:
            raise CliUsageError(f"missing required option(s): {missing}")
        resp = anyio.run(_post, args.server, path, body)
    except CliUsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except httpx.HTTPError as exc:
        print(f"error: service unreachable: {exc}", file=sys.stderr)
        return MATH_ERROR

    if resp.status_code in (400, 422):
        print(f"error: {resp.json().get('detail', resp.text)}", file=sys.stderr)
        return USAGE_ERROR
    if resp.status_code != 200:
        print(f"error: {resp.json().get('detail', resp.text)}", file=sys.stderr)
        return MATH_ERROR
    try:
        _emit(resp.json(), args.format, args.out)
    except CliUsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
