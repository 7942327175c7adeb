"""Reading and writing bodies as JSON documents.

A body file looks like::

    {"dim": 2, "kind": "vpolytope", "vertices": [[0, 0], [1, 0], [0, 1]]}
    {"dim": 2, "kind": "hpolytope",
     "halfspaces": [{"normal": [1, 0], "offset": 1}, ...]}

Floats are written with 17 significant digits so that a round trip through a
file reproduces every coordinate bit for bit.
"""
from __future__ import annotations

import json

import numpy as np

from ..errors import BodyFormatError, LabError
from .polytope import HalfSpace, HPolytope, VPolytope

KINDS = ("vpolytope", "hpolytope")


def fmt(x: float) -> str:
    """``x`` printed with 17 significant digits, which round-trips any double."""
    x = float(x)
    if x == 0.0:
        return "0"
    return format(x, ".17g")


def _dump(obj, indent, level) -> str:
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    nl = "\n" if indent else ""
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + nl + ("," + nl).join(items) + nl + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in seq):
            return "[" + ", ".join(_dump(v, indent, level) for v in seq) + "]"
        if not seq:
            return "[]"
        return "[" + nl + ("," + nl).join(pad + _dump(v, indent, level + 1) for v in seq) + nl + end + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            return json.dumps(str(float(obj)))
        return fmt(obj)
    return json.dumps(obj)


def dumps(obj, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits."""
    return _dump(obj, indent, 0) + "\n"


def body_to_dict(body) -> dict:
    if isinstance(body, VPolytope):
        return {"dim": body.dim, "kind": "vpolytope", "vertices": body.vertices.tolist()}
    if isinstance(body, HPolytope):
        return {"dim": body.dim, "kind": "hpolytope",
                "halfspaces": [{"normal": h.normal.tolist(), "offset": h.offset}
                               for h in body.halfspaces]}
    raise TypeError(f"cannot serialize {type(body).__name__}")


def write_body(body, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(body_to_dict(body)))


def _vector(value, dim, where):
    if not isinstance(value, list) or len(value) != dim:
        raise BodyFormatError(f"expected a list of {dim} numbers", where)
    for k, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise BodyFormatError("not a number", f"{where}[{k}]")
        if not np.isfinite(x):
            raise BodyFormatError("non-finite number", f"{where}[{k}]")
    return value


def body_from_dict(doc):
    if not isinstance(doc, dict):
        raise BodyFormatError("top level must be an object", "$")
    unknown = set(doc) - {"dim", "kind", "vertices", "halfspaces"}
    if unknown:
        raise BodyFormatError(f"unknown keys {sorted(unknown)}", "$")
    dim = doc.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 2:
        raise BodyFormatError("must be an integer >= 2", "dim")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise BodyFormatError(f"must be one of {KINDS}", "kind")
    try:
        if kind == "vpolytope":
            verts = doc.get("vertices")
            if not isinstance(verts, list) or not verts:
                raise BodyFormatError("missing or empty", "vertices")
            pts = [_vector(v, dim, f"vertices[{i}]") for i, v in enumerate(verts)]
            return VPolytope(np.array(pts, dtype=float))
        hs = doc.get("halfspaces")
        if not isinstance(hs, list) or not hs:
            raise BodyFormatError("missing or empty", "halfspaces")
        out = []
        for i, h in enumerate(hs):
            if not isinstance(h, dict) or set(h) != {"normal", "offset"}:
                raise BodyFormatError("expected {normal, offset}", f"halfspaces[{i}]")
            normal = _vector(h["normal"], dim, f"halfspaces[{i}].normal")
            off = h["offset"]
            if isinstance(off, bool) or not isinstance(off, (int, float)) or not np.isfinite(off):
                raise BodyFormatError("not a finite number", f"halfspaces[{i}].offset")
            try:
                out.append(HalfSpace(normal, off))
            except LabError as exc:
                raise BodyFormatError(str(exc), f"halfspaces[{i}].normal") from None
        return HPolytope(out)
    except BodyFormatError:
        raise
    except LabError as exc:
        field = "vertices" if kind == "vpolytope" else "halfspaces"
        raise BodyFormatError(f"{type(exc).__name__}: {exc}", field) from None


def loads_body(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BodyFormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return body_from_dict(doc)


def read_body(path):
    """Load a body file; an H-polytope is returned as is (use ``.vpolytope``)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise BodyFormatError(exc.strerror or str(exc), str(path)) from None
    return loads_body(text)
