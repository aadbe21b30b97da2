"""Matrix file format and stable text formatting for reports.

A matrix file is a JSON document with two fields::

    {"dim": 2, "rows": [[1.0, 0.25], [0.25, 2.0]]}

The reader symmetrizes the payload via ``(M + M.T) / 2`` and reports
the Frobenius norm of the asymmetric part, so silently-skewed inputs
remain visible to the caller.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DimMismatchError
from .symcore import SymmetricMatrix, frobenius

__all__ = ["read_matrix", "write_matrix", "format_matrix"]


def read_matrix(source) -> tuple[SymmetricMatrix, float]:
    """Read a matrix file; returns ``(matrix, asymmetry_norm)``.

    ``source`` may be a path or an open text stream.
    """
    if hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    if not isinstance(doc, dict) or "dim" not in doc or "rows" not in doc:
        raise ValueError("matrix file must carry fields 'dim' and 'rows'")
    dim = int(doc["dim"])
    rows = np.asarray(doc["rows"], dtype=float)
    if rows.shape != (dim, dim):
        raise DimMismatchError(
            f"rows have shape {rows.shape}, expected ({dim}, {dim})"
        )
    asymmetry = frobenius(rows - rows.T)
    return SymmetricMatrix(rows), asymmetry


def write_matrix(path, matrix) -> None:
    """Write a matrix to the JSON file format."""
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimMismatchError(f"expected a square matrix, got {arr.shape}")
    doc = {"dim": arr.shape[0], "rows": [[float(v) for v in row] for row in arr]}
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def format_matrix(matrix, indent: str = "") -> str:
    """Deterministic fixed-format rendering of a matrix, row per line."""
    arr = np.asarray(matrix, dtype=float)
    rows = []
    for row in np.atleast_2d(arr):
        rows.append(indent + "[" + ", ".join(f"{v:.12g}" for v in row) + "]")
    return "\n".join(rows)
