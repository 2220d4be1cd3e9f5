"""Result serialization: CSV with embedded metadata headers, JSON sidecars.

Floats are written with 17 significant digits so round-trips are
bit-faithful.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone
from pathlib import Path

from . import __version__

FLOAT_FMT = "{:.16e}"


def fmt(x) -> str:
    if isinstance(x, float):
        return FLOAT_FMT.format(x)
    return str(x)


def metadata_block(**extra) -> dict:
    meta = {
        "tool": "cslrot",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "spectral_convention": "two-sided angular-frequency DNS",
        "thermal_floor_form": "4*kB*T*gamma*I unless overridden",
    }
    meta.update(extra)
    return meta


def write_csv(path, header, rows, meta: dict | None = None):
    path = Path(path)
    with open(path, "w", newline="") as fh:
        for key, val in (meta or {}).items():
            fh.write(f"# {key} = {val}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def write_json(path, payload: dict, meta: dict | None = None):
    path = Path(path)
    doc = {"metadata": meta or metadata_block()}
    doc.update(payload)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, default=_coerce)
        fh.write("\n")
    return path


def _coerce(obj):
    try:
        import numpy as np
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
    except ImportError:
        pass
    if isinstance(obj, float):
        return obj
    return str(obj)


def read_csv_columns(path):
    """Read back one of our CSVs: (metadata dict, header, column arrays)."""
    meta = {}
    rows = []
    header = None
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            break
        fh.seek(0)
        reader = csv.reader(l for l in fh if not l.startswith("#"))
        for row in reader:
            if header is None:
                header = row
            elif row:
                rows.append(row)
    cols = list(zip(*rows)) if rows else [[] for _ in header or []]
    return meta, header, cols
