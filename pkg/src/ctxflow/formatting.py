"""Canonical JSON, fraction-aware number display, and small text tables."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

#: Values within this distance of a small fraction display as that fraction.
FRACTION_TOL = 1e-9
#: Largest denominator tried for fraction display (covers 1/18 ... 1 and 4/9 etc.).
MAX_DENOMINATOR = 36


def round12(x: float) -> float:
    """Round a float to 12 significant digits (stable under JSON round-trips)."""
    return float(f"{x:.12g}")


def _canonical(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return round12(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, str):
        return obj
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    raise TypeError(f"cannot canonicalize {type(obj).__name__}")


def canonical_dumps(obj) -> str:
    """Deterministic JSON: sorted keys, 2-space indent, floats at 12 digits.

    Parsing the output and dumping it again reproduces the bytes exactly.
    """
    return json.dumps(_canonical(obj), sort_keys=True, indent=2, ensure_ascii=False)


def complex_pair(z: complex) -> list[float]:
    """JSON form of a complex value: ``[re, im]``."""
    return [round12(z.real), round12(z.imag)]


def format_real(x: float) -> str:
    """Fraction display for near-rational values, 12-digit decimal otherwise."""
    frac = Fraction(x).limit_denominator(MAX_DENOMINATOR)
    if abs(x - float(frac)) <= FRACTION_TOL:
        if frac.denominator == 1:
            return str(frac.numerator)
        return f"{frac.numerator}/{frac.denominator}"
    return f"{x:.12g}"


def format_complex(z: complex) -> str:
    re, im = z.real, z.imag
    if abs(im) <= FRACTION_TOL:
        return format_real(re)
    if abs(re) <= FRACTION_TOL:
        return f"{format_real(im)}i"
    sign = "+" if im >= 0 else "-"
    return f"{format_real(re)}{sign}{format_real(abs(im))}i"


def csv_complex(z: complex) -> str:
    """CSV cell form of a complex value: ``re:im``."""
    return f"{z.real:.12g}:{z.imag:.12g}"


def render_table(headers: list[str], rows: list[list[str]]) -> str:
    """Plain aligned table; first column left-aligned, the rest right-aligned."""
    cols = len(headers)
    widths = [len(h) for h in headers]
    for row in rows:
        for i in range(cols):
            widths[i] = max(widths[i], len(row[i]))

    def fmt(cells: list[str]) -> str:
        parts = [cells[0].ljust(widths[0])]
        parts += [cells[i].rjust(widths[i]) for i in range(1, cols)]
        return "  ".join(parts).rstrip()

    lines = [fmt(headers), "  ".join("-" * w for w in widths)]
    lines += [fmt(row) for row in rows]
    return "\n".join(lines)


def csv_text(headers: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")
