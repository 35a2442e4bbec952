"""Versioned on-disk formats: JSON states and reports, CSV tables.

One schema string per format.  Floats are written with 17 significant
digits everywhere ('%.17g'), which round-trips IEEE doubles exactly, and
the JSON writer sorts object keys, so equal data produces byte-identical
files.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .dynamics import PhasePoint
from .times import TimeVector

STATE_SCHEMA = "rskp-state-1"
REPORT_SCHEMA = "rskp-report-1"


def format_float(v: float) -> str:
    return "%.17g" % float(v)


def dumps_json(obj, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, '%.17g' floats, two-space indent."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k))}: {dumps_json(v, indent + 1)}"
            for k, v in sorted(obj.items())
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        parts = [f"{inner}{dumps_json(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            raise ValueError(f"non-finite float {v!r} cannot be serialized")
        return format_float(v)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def state_to_dict(p: PhasePoint, provenance=None, y0_matrix=None) -> dict:
    doc = {
        "schema_version": STATE_SCHEMA,
        "n_particles": p.n_particles,
        "x": [float(v) for v in p.x],
        "y": [float(v) for v in p.y],
        "t": {str(k): float(v) for k, v in p.t.to_dict().items()},
        "provenance": provenance if provenance is not None else {},
    }
    if y0_matrix is not None:
        doc["y0_matrix"] = [[float(v) for v in row] for row in y0_matrix]
    return doc


def state_from_dict(doc: dict, eps_collision: float = None):
    """Validated (PhasePoint, extras) from a schema dict.

    extras carries provenance and the optional y0_matrix override used by
    verification suites that test externally supplied initial matrices.
    Raises ValueError naming the violated invariant, or CollisionError
    from the PhasePoint gap checks.
    """
    if not isinstance(doc, dict):
        raise ValueError("state document must be a JSON object")
    schema = doc.get("schema_version")
    if schema != STATE_SCHEMA:
        raise ValueError(f"unsupported schema_version {schema!r} (expected {STATE_SCHEMA!r})")
    try:
        n = int(doc["n_particles"])
        x = [float(v) for v in doc["x"]]
        y = [float(v) for v in doc["y"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ValueError(f"state fields n_particles/x/y malformed: {e}") from e
    if len(x) != n or len(y) != n:
        raise ValueError(f"array lengths ({len(x)}, {len(y)}) must equal n_particles ({n})")
    t_raw = doc.get("t", {})
    if not isinstance(t_raw, dict):
        raise ValueError("t must be an object of flow-index -> value")
    try:
        t = TimeVector.from_dict({int(k): float(v) for k, v in t_raw.items()})
    except (TypeError, ValueError) as e:
        raise ValueError(f"t entries malformed: {e}") from e

    kwargs = {}
    if eps_collision is not None:
        kwargs["eps_collision"] = eps_collision
    p = PhasePoint(np.array(x), np.array(y), t, **kwargs)

    extras = {"provenance": doc.get("provenance", {})}
    if "y0_matrix" in doc:
        mat = np.asarray(doc["y0_matrix"], dtype=float)
        if mat.shape != (n, n):
            raise ValueError(f"y0_matrix must be {n}x{n}, got {mat.shape}")
        extras["y0_matrix"] = mat
    return p, extras


def save_state(path: str, p: PhasePoint, provenance=None, y0_matrix=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json(state_to_dict(p, provenance, y0_matrix)) + "\n")


def load_state(path: str, eps_collision: float = None):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValueError(f"invalid JSON in {path}: {e}") from e
    return state_from_dict(doc, eps_collision)


def csv_line(values) -> str:
    """One CSV row; floats via format_float, everything else via str."""
    cells = []
    for v in values:
        if isinstance(v, (float, np.floating)):
            cells.append(format_float(v))
        else:
            cells.append(str(v))
    return ",".join(cells)


def trajectory_header(n: int):
    return (["sample_index", "flow_index", "flow_time"]
            + [f"x_{i}" for i in range(1, n + 1)]
            + [f"y_{i}" for i in range(1, n + 1)]
            + [f"H_{m}" for m in range(1, 5)])
