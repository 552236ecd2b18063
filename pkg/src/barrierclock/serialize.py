"""CSV / JSON output with 17-significant-digit floats.

Undefined values are written as empty CSV cells or JSON null, never NaN.
"""

from __future__ import annotations

import io
import json
import math

import numpy as np


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"refusing to serialize non-finite value {x}")
        if x == 0:
            return "0"
        return format(x, ".17g")
    return str(x)


def dumps(obj) -> str:
    """Compact JSON where every float carries 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer, float, np.floating)):
        return fmt(obj)
    if isinstance(obj, complex):
        return dumps([obj.real, obj.imag])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def csv_text(header: list[str], rows: list[list]) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")
    return out.getvalue()


def plot_text(header: list[str], rows: list[list]) -> str:
    """Whitespace-separated columns with a '#' header, as gnuplot reads them.
    Undefined cells become '?' (gnuplot's missing-data marker)."""
    out = io.StringIO()
    out.write("# " + " ".join(header) + "\n")
    for row in rows:
        out.write(" ".join(fmt(v) if v is not None and not isinstance(v, str) else ("?" if v in (None, "") else v) for v in row) + "\n")
    return out.getvalue()
