"""Jet files and polyline export.

A jet file is a flat JSON object whose keys are :class:`MongeJet` field
names; missing coefficients are zero.  Polylines are written as JSON or CSV
and read back bit-identically (JSON uses the shortest round-trip repr of each
float, CSV writes 17 significant digits).
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError
from .jet_model import MongeJet
from .tracer import Polyline

__all__ = ["parse_jet", "load_jet", "dump_jet", "polyline_to_dict", "polyline_from_dict",
           "write_polyline", "read_polyline"]


def parse_jet(text: str, source: str = "<jet>") -> MongeJet:
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ParseError(f"{source}: expected a JSON object of jet coefficients")
    known = set(MongeJet.names())
    values = {}
    for key, val in data.items():
        if key not in known:
            raise ParseError(f"{source}: unknown coefficient {key!r}")
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ParseError(f"{source}: field {key!r} must be a number, got {val!r}")
        if not math.isfinite(val):
            raise ParseError(f"{source}: field {key!r} is not finite")
        values[key] = float(val)
    return MongeJet(**values)


def load_jet(path) -> MongeJet:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"{p}: {exc.strerror}") from None
    return parse_jet(text, str(p))


def dump_jet(jet: MongeJet, nonzero_only: bool = True) -> str:
    d = {k: v for k, v in jet.as_dict().items() if v != 0 or not nonzero_only}
    return json.dumps(d, indent=1)


def _rows(a):
    return None if a is None else np.asarray(a, dtype=float).tolist()


def polyline_to_dict(pl: Polyline) -> dict:
    out = {"foliation": pl.foliation, "termination": pl.termination,
           "points": _rows(pl.points), "tangents": _rows(pl.tangents)}
    if pl.embedded is not None:
        out["embedded"] = _rows(pl.embedded)
    if pl.slopes is not None:
        out["slopes"] = _rows(pl.slopes)
        out["charts"] = list(pl.charts) if pl.charts is not None else None
    return out


def polyline_from_dict(d: dict) -> Polyline:
    try:
        pts = np.array(d["points"], dtype=float).reshape(-1, 3)
        tan = np.array(d.get("tangents") or np.zeros_like(pts), dtype=float).reshape(-1, 3)
        emb = d.get("embedded")
        sl = d.get("slopes")
        return Polyline(d["foliation"], pts, tan, d["termination"],
                        None if emb is None else np.array(emb, dtype=float).reshape(-1, 4),
                        None if sl is None else np.array(sl, dtype=float),
                        d.get("charts"))
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"malformed polyline record: {exc}") from None


def _csv_text(pl: Polyline) -> str:
    buf = _io.StringIO()
    buf.write(f"# foliation={pl.foliation} termination={pl.termination}\n")
    cols = ["u1", "u2", "u3", "t1", "t2", "t3"]
    if pl.embedded is not None:
        cols += ["x1", "x2", "x3", "x4"]
    if pl.slopes is not None:
        cols += ["slope", "chart"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for i in range(len(pl.points)):
        row = [f"{x:.17g}" for x in (*pl.points[i], *pl.tangents[i])]
        if pl.embedded is not None:
            row += [f"{x:.17g}" for x in pl.embedded[i]]
        if pl.slopes is not None:
            row += [f"{pl.slopes[i]:.17g}", pl.charts[i] if pl.charts is not None else "P"]
        w.writerow(row)
    return buf.getvalue()


def _from_csv(text: str) -> Polyline:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ParseError("polyline CSV must start with a '# foliation=... termination=...' line")
    meta = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    rows = list(csv.reader(lines[1:]))
    head, body = rows[0], rows[1:]
    col = {c: i for i, c in enumerate(head)}
    num = lambda names: np.array([[float(r[col[c]]) for c in names] for r in body]).reshape(len(body), -1)
    emb = num(["x1", "x2", "x3", "x4"]) if "x1" in col else None
    slopes = num(["slope"])[:, 0] if "slope" in col else None
    charts = [r[col["chart"]] for r in body] if "chart" in col else None
    return Polyline(meta["foliation"], num(["u1", "u2", "u3"]), num(["t1", "t2", "t3"]),
                    meta["termination"], emb, slopes, charts)


def write_polyline(pl: Polyline, path, fmt: str | None = None) -> Path:
    p = Path(path)
    fmt = fmt or ("csv" if p.suffix == ".csv" else "json")
    if fmt == "csv":
        p.write_text(_csv_text(pl))
    else:
        p.write_text(json.dumps(polyline_to_dict(pl)))
    return p


def read_polyline(path, fmt: str | None = None) -> Polyline:
    p = Path(path)
    fmt = fmt or ("csv" if p.suffix == ".csv" else "json")
    text = p.read_text()
    if fmt == "csv":
        return _from_csv(text)
    try:
        return polyline_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
