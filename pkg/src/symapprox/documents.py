"""JSON documents for frames, diagonal models and reports.

A frame document stores a row-major synthesis matrix whose entries are
numbers or ``[re, im]`` pairs::

    {"schemaVersion": "1.0", "kind": "frame", "rows": 2, "cols": 2,
     "data": [[0.4, 0], [0, 0.6]]}

A diagonal-model document lists the explicit singular values and the sizes
of the implicit runs, with infinity written as the string ``"inf"``::

    {"schemaVersion": "1.0", "kind": "diagonal-model",
     "exceptional": [0.5, 0.3], "tailOnes": "inf", "kernelDim": "inf",
     "cokernelDim": 2, "tailConverges": true}
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import jsonschema
import numpy as np

from .diagonal import INF, DiagonalModel
from .errors import FrameError
from .frames import Frame

SCHEMA_VERSION = "1.0"

_ENTRY = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_EXT_NAT = {"oneOf": [{"type": "integer", "minimum": 0}, {"const": "inf"}]}
_DIAG_FIELDS = ("exceptional", "tailOnes", "kernelDim", "cokernelDim", "tailConverges")

SCHEMA = {
    "type": "object",
    "required": ["schemaVersion", "kind"],
    "properties": {
        "schemaVersion": {"const": SCHEMA_VERSION},
        "kind": {"enum": ["frame", "diagonal-model"]},
        "label": {"type": "string"},
    },
    "allOf": [
        {
            "if": {"properties": {"kind": {"const": "frame"}}},
            "then": {
                "required": ["rows", "cols", "data"],
                "properties": {
                    "rows": {"type": "integer", "minimum": 1},
                    "cols": {"type": "integer", "minimum": 1},
                    "data": {"type": "array", "items": {"type": "array", "items": _ENTRY}},
                },
                "not": {"anyOf": [{"required": [f]} for f in _DIAG_FIELDS]},
            },
        },
        {
            "if": {"properties": {"kind": {"const": "diagonal-model"}}},
            "then": {
                "required": list(_DIAG_FIELDS),
                "properties": {
                    "exceptional": {"type": "array", "items": {"type": "number", "minimum": 0}},
                    "tailOnes": _EXT_NAT,
                    "kernelDim": _EXT_NAT,
                    "cokernelDim": _EXT_NAT,
                    "tailConverges": {"type": "boolean"},
                },
                "not": {"anyOf": [{"required": [f]} for f in ("rows", "cols", "data")]},
            },
        },
    ],
}


class DocumentError(FrameError, ValueError):
    """A document is unreadable, malformed or violates the schema."""


def digest(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def _ext(x):
    return INF if x == "inf" else int(x)


def encode_ext(x):
    """Extended natural or signed integer as JSON (``"inf"``/``"-inf"`` for infinities)."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return int(x)


def parse(doc: dict):
    """Validate a decoded document and build a :class:`Frame` or :class:`DiagonalModel`."""
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise DocumentError(f"schema violation at {list(exc.absolute_path)}: {exc.message}") from None
    if doc["kind"] == "diagonal-model":
        try:
            return DiagonalModel(
                tuple(doc["exceptional"]),
                tail_ones=_ext(doc["tailOnes"]),
                kernel_dim=_ext(doc["kernelDim"]),
                cokernel_dim=_ext(doc["cokernelDim"]),
                tail_converges=doc["tailConverges"],
            )
        except FrameError as exc:
            raise DocumentError(str(exc)) from None
    rows, cols, data = doc["rows"], doc["cols"], doc["data"]
    if len(data) != rows or any(len(row) != cols for row in data):
        raise DocumentError(f"data does not have shape {rows} x {cols}")
    M = np.array(
        [[complex(*e) if isinstance(e, list) else complex(e) for e in row] for row in data]
    )
    try:
        return Frame(M, doc.get("label"))
    except FrameError as exc:
        raise DocumentError(str(exc)) from None


def load(path) -> tuple:
    """Read and parse a document; returns ``(object, sha256 of the raw bytes)``."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DocumentError(f"{path} is not valid JSON: {exc}") from None
    return parse(doc), digest(raw)


def encode_matrix(M) -> list:
    """Row-major nested list; real entries as numbers, otherwise ``[re, im]``."""
    M = np.asarray(M)
    if not np.iscomplexobj(M) or not np.any(M.imag):
        return [[float(x) for x in row] for row in np.real(M)]
    return [[[float(x.real), float(x.imag)] for x in row] for row in M]


def frame_document(M, label: str | None = None) -> dict:
    M = np.asarray(M)
    doc = {
        "schemaVersion": SCHEMA_VERSION,
        "kind": "frame",
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": encode_matrix(M),
    }
    if label is not None:
        doc["label"] = label
    return doc


def model_document(model: DiagonalModel) -> dict:
    return {
        "schemaVersion": SCHEMA_VERSION,
        "kind": "diagonal-model",
        "exceptional": list(model.exceptional),
        "tailOnes": encode_ext(model.tail_ones),
        "kernelDim": encode_ext(model.kernel_dim),
        "cokernelDim": encode_ext(model.cokernel_dim),
        "tailConverges": model.tail_converges,
    }


def dumps(doc: dict) -> str:
    """Canonical serialization: sorted keys, no NaN or infinity allowed."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False)
