"""Deterministic output formatting shared by the CLI and tests.

Every file the toolkit writes must be byte-identical across runs for the
same inputs: floats go through ``%.17g`` (shortest-exact round-trip is
repr-dependent; 17 significant digits is fixed), JSON is sorted-key with
two-space indent and a ``schema`` version, and all text is written with LF
endings regardless of platform.
"""

from __future__ import annotations

import json
from pathlib import Path

__all__ = ["SCHEMA_VERSION", "fmt17", "json_text", "write_text", "write_bytes"]

SCHEMA_VERSION = 1


def fmt17(x: float) -> str:
    return f"{float(x):.17g}"


def json_text(payload: dict) -> str:
    """Schema-stamped, key-sorted JSON document ending in a newline."""
    doc = {"schema": SCHEMA_VERSION, **payload}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_bytes(text.encode("utf-8"))


def write_bytes(path: str | Path, data: bytes) -> None:
    Path(path).write_bytes(data)
