"""Canonical, byte-reproducible report serialization and atomic file output.

JSON reports: keys sorted, floats emitted via shortest round-trip repr
(Python's default float formatting), a schema_version field, and the full
echoed request config.  Identical inputs therefore produce byte-identical
bytes, which the determinism tests assert literally.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Iterable

SCHEMA_VERSION = 1


def canonical_json(payload: dict) -> str:
    """Deterministic JSON text for a report payload (newline-terminated)."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"),
                      allow_nan=False) + "\n"


def report(config: dict, result: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "config": config, "result": result}


def grid_csv(header: Iterable[str], rows: Iterable[Iterable[float]]) -> str:
    """CSV text for a numeric grid; floats via repr for round-tripping."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, float) else str(v)
                              for v in row))
    return "\n".join(lines) + "\n"


def atomic_write(path: str, text: str) -> None:
    """Write via a temp file in the target directory and rename into place."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-out-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
