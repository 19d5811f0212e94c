"""JSON state files.

A state file is ``{"dim_a": m, "dim_b": n, "entries": [[re, im], ...],
"metadata": {...}}`` with the ``(mn)^2`` entries listed row-major. Floats are
written with Python's shortest round-trip repr, so reading a file back gives
bit-identical matrices.
"""
import json
from pathlib import Path

import numpy as np

from .exceptions import QminError, ShapeError
from .states import validate


def state_to_dict(rho, metadata=None):
    flat = np.asarray(rho.entries).ravel()
    return {
        "dim_a": rho.dim_a,
        "dim_b": rho.dim_b,
        "entries": [[float(z.real), float(z.imag)] for z in flat],
        "metadata": dict(metadata or {}),
    }


def state_from_dict(data):
    try:
        m, n = int(data["dim_a"]), int(data["dim_b"])
        pairs = np.asarray(data["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise QminError(f"malformed state record: {exc}") from exc
    if pairs.shape != ((m * n) ** 2, 2):
        raise ShapeError(f"expected {(m * n) ** 2} [re, im] pairs, got array of shape {pairs.shape}")
    entries = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(m * n, m * n)
    return validate(entries, m, n)


def write_state(path, rho, metadata=None):
    Path(path).write_text(json.dumps(state_to_dict(rho, metadata), indent=1) + "\n")


def read_state(path):
    """Load and validate a state file. Returns ``(DensityMatrix, metadata)``."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise QminError(f"{path}: not valid JSON ({exc})") from exc
    return state_from_dict(data), data.get("metadata", {})
