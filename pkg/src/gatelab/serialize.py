"""Deterministic report formatting.

Emitted JSON must be byte-identical across runs of the same configuration,
so every float is frozen to 12 significant digits before serialization and
keys are sorted.
"""

from __future__ import annotations

import json
import math

SIGNIFICANT_DIGITS = 12


def freeze_float(x: float) -> float:
    if not math.isfinite(x):
        return x
    return float(f"{x:.{SIGNIFICANT_DIGITS}g}")


def freeze(value):
    """Recursively freeze floats inside plain json-ready containers."""
    if isinstance(value, float):
        return freeze_float(value)
    if isinstance(value, dict):
        return {k: freeze(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [freeze(v) for v in value]
    return value


def dumps_report(payload: dict) -> str:
    return json.dumps(freeze(payload), indent=2, sort_keys=True) + "\n"


def format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    return str(value)


def tsv_text(header: list[str], rows: list[list]) -> str:
    lines = ["\t".join(header)]
    lines += ["\t".join(format_cell(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"
