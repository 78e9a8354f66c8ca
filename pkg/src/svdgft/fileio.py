"""CSV and JSON serialization.

Floats are written with 17 significant digits in CSV and as their shortest
round-trip ``repr`` in JSON, so every file reads back to the same doubles.
Output is byte-deterministic: fixed column order, ``\\n`` line endings and
sorted JSON keys.
"""

import csv
import hashlib
import io
import json
import math

import numpy as np

from ._errors import GraphFormatError

__all__ = [
    "fmt",
    "read_signal",
    "write_signal",
    "read_coefficients",
    "write_coefficients",
    "write_table",
    "write_matrix",
    "sha256_file",
    "to_jsonable",
    "dumps_json",
    "write_json",
]


def fmt(x):
    return format(float(x), ".17g")


def _rows(path, header):
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    lines = [(i, ln) for i, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if not lines:
        raise GraphFormatError(f"{path}: empty file, expected header {','.join(header)!r}")
    lineno, head = lines[0]
    cols = [c.strip() for c in head.split(",")]
    if cols != list(header):
        raise GraphFormatError(f"expected header {','.join(header)!r}, got {head.strip()!r}", lineno)
    out = []
    for lineno, ln in lines[1:]:
        parts = [p.strip() for p in ln.split(",")]
        if len(parts) != len(header):
            raise GraphFormatError(f"expected {len(header)} fields, got {len(parts)}", lineno)
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise GraphFormatError(f"cannot parse number in {ln.strip()!r}", lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise GraphFormatError(f"non-finite value in {ln.strip()!r}", lineno)
        out.append((lineno, vals))
    return out


def read_signal(path):
    """One-column CSV with header ``value``."""
    return np.array([v[0] for _, v in _rows(path, ["value"])])


def read_coefficients(path):
    """CSV ``index,sum_block,diff_block`` with indices ``0 .. n-1`` in order."""
    rows = _rows(path, ["index", "sum_block", "diff_block"])
    for k, (lineno, v) in enumerate(rows):
        if v[0] != k:
            raise GraphFormatError(f"expected index {k}, got {v[0]:g}", lineno)
    z = np.array([v[1:] for _, v in rows]).reshape(-1, 2)
    return z[:, 0], z[:, 1]


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_table(path, header, rows):
    """CSV with the given header; numbers formatted by :func:`fmt`, ints kept as ints."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([c if isinstance(c, str) else (str(c) if isinstance(c, (int, np.integer)) else fmt(c)) for c in r])
    _write(path, buf.getvalue())


def write_signal(path, x):
    write_table(path, ["value"], [[v] for v in np.asarray(x, dtype=float)])


def write_coefficients(path, coeffs):
    rows = [[i, a, b] for i, (a, b) in enumerate(zip(coeffs.sum_block, coeffs.diff_block))]
    write_table(path, ["index", "sum_block", "diff_block"], rows)


def write_matrix(path, M, prefix):
    """Matrix with columns named ``prefix0 .. prefix{n-1}``, one row per vertex."""
    M = np.asarray(M, dtype=float)
    write_table(path, [f"{prefix}{j}" for j in range(M.shape[1])], M.tolist())


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def to_jsonable(obj):
    """Convert numpy scalars/arrays and non-finite floats into plain JSON values.

    ``inf`` and ``nan`` become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps_json(obj):
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    _write(path, dumps_json(obj))
