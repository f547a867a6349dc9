"""Deterministic CSV/JSON emission and the state-profile JSON schema."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

import numpy as np

from .lattice import AmplitudeVector

SCHEMA_VERSION = 1


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(value)


def _plain(value):
    """JSON-ready copy with numpy scalars/arrays and enums unwrapped."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def render_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(columns)
    for row in rows:
        missing = [c for c in columns if c not in row]
        if missing:
            raise ValueError(f"row lacks columns {missing}")
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def render_json(payload) -> str:
    return json.dumps(_plain(payload), sort_keys=True, indent=2, allow_nan=True) + "\n"


def emit_table(
    rows: Iterable[dict],
    columns: Sequence[str],
    fmt: str = "csv",
    path: Optional[Union[str, Path]] = None,
    stream: Optional[TextIO] = None,
) -> str:
    """Write rows as CSV (17 significant digits) or a JSON document.

    The rendered text is returned and also written to ``path`` or
    ``stream`` when given.
    """
    rows = list(rows)
    if fmt == "csv":
        text = render_csv(rows, columns)
    elif fmt == "json":
        text = render_json({"schema_version": SCHEMA_VERSION, "columns": list(columns), "rows": [{c: r[c] for c in columns} for r in rows]})
    else:
        raise ValueError(f"unknown format {fmt!r}")
    write_text(text, path, stream)
    return text


def write_text(text: str, path=None, stream: Optional[TextIO] = None):
    if path is not None:
        Path(path).write_text(text)
    elif stream is not None:
        stream.write(text)


def profile_rows(profile: AmplitudeVector) -> list[dict]:
    return [
        {"j": int(j), "re": float(c.real), "im": float(c.imag), "prob": float(abs(c) ** 2)}
        for j, c in zip(profile.sites, profile.values)
    ]


def state_to_json(state) -> dict:
    """``{parity, energy, decay, x, profile: [{j, re, im, prob}]}`` for a bound or resonant state."""
    return {
        "parity": getattr(state.parity, "value", state.parity),
        "energy": float(state.energy),
        "decay": float(getattr(state, "decay", 0.0)),
        "x": float(state.x) if hasattr(state, "x") else _bound_x(state),
        "profile": profile_rows(state.profile),
    }


def _bound_x(state) -> float:
    # above-band bound states alternate in sign: Re k = pi
    return math.pi if state.location == "above_band" else 0.0


def profile_from_json(doc: dict) -> AmplitudeVector:
    prof = doc["profile"]
    return AmplitudeVector([p["j"] for p in prof], [complex(p["re"], p["im"]) for p in prof])


def states_document(kind: str, params: dict, states: Sequence, extra: Optional[dict] = None) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "params": params,
        "states": [state_to_json(s) for s in states],
    }
    if extra:
        doc.update(extra)
    return doc
