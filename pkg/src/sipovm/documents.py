"""JSON documents exchanged by the command line tool.

Layout::

    {"kind": ..., "dimension": d, "payload": {...},
     "metadata": {"seed": ..., "method": ..., "tool_version": ..., "created_at": ...}}

Complex numbers are ``[re, im]`` pairs and matrices are row-major nested
lists.  Payloads by kind:

=============  ===========================================================
state          ``{"matrix": M}``
povm           ``{"elements": [M, ...]}``
fiducial       ``{"vector": [z, ...]}``
phases         ``{"angles": [{"p1": .., "p2": .., "theta": ..}, ...]}``
wigner         ``{"values": [[w, ...], ...]}`` indexed ``[p1][p2]``
report         free-form object (certification fields)
bases          ``{"bases": [[v, ...], ...]}``, ``bases[r][a]`` a vector
probabilities  ``{"probabilities": [p, ...]}``
=============  ===========================================================

Documents hold JSON-native values only, so ``decode(encode(doc)) == doc``.
Floats are written with Python's shortest round-trip repr.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__

KINDS = ("state", "povm", "fiducial", "phases", "wigner", "report", "bases", "probabilities")


class DocumentError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class Document:
    kind: str
    dimension: int
    payload: dict
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "dimension": self.dimension, "payload": self.payload, "metadata": self.metadata}


def make_metadata(seed=None, method=None, created_at: str | None = None) -> dict:
    if created_at is None:
        created_at = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return {"seed": seed, "method": method, "tool_version": __version__, "created_at": created_at}


def encode(doc: Document) -> bytes:
    return (json.dumps(doc.to_json(), indent=1, allow_nan=False) + "\n").encode("utf-8")


def decode(data: bytes | str) -> Document:
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise DocumentError("$", f"malformed JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise DocumentError("$", "document must be a JSON object")
    for key in ("kind", "dimension", "payload"):
        if key not in obj:
            raise DocumentError(f"$.{key}", "missing required field")
    kind = obj["kind"]
    if kind not in KINDS:
        raise DocumentError("$.kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    d = obj["dimension"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise DocumentError("$.dimension", f"expected an integer >= 2, got {d!r}")
    payload = obj["payload"]
    if not isinstance(payload, dict):
        raise DocumentError("$.payload", "expected an object")
    metadata = obj.get("metadata", {})
    if not isinstance(metadata, dict):
        raise DocumentError("$.metadata", "expected an object")
    _VALIDATORS[kind](payload, d, "$.payload")
    return Document(kind=kind, dimension=d, payload=payload, metadata=metadata)


def read(path) -> Document:
    with open(path, "rb") as fh:
        return decode(fh.read())


def write(doc: Document, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode(doc))


# ----------------------------------------------------------------------------
# validation


def _real(x, path):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise DocumentError(path, f"expected a finite number, got {x!r}")


def _complex(z, path):
    if not isinstance(z, list) or len(z) != 2:
        raise DocumentError(path, "expected a complex number as [re, im]")
    _real(z[0], f"{path}[0]")
    _real(z[1], f"{path}[1]")


def _list(x, path, length=None):
    if not isinstance(x, list):
        raise DocumentError(path, "expected an array")
    if length is not None and len(x) != length:
        raise DocumentError(path, f"expected {length} entries, got {len(x)}")


def _vector(v, d, path):
    _list(v, path, d)
    for i, z in enumerate(v):
        _complex(z, f"{path}[{i}]")


def _matrix(m, d, path):
    _list(m, path, d)
    for i, row in enumerate(m):
        _vector(row, d, f"{path}[{i}]")


def _field(payload, key, path):
    if key not in payload:
        raise DocumentError(f"{path}.{key}", "missing required field")
    return payload[key]


def _v_state(p, d, path):
    _matrix(_field(p, "matrix", path), d, f"{path}.matrix")


def _v_povm(p, d, path):
    els = _field(p, "elements", path)
    _list(els, f"{path}.elements")
    if not els:
        raise DocumentError(f"{path}.elements", "POVM has no elements")
    for r, m in enumerate(els):
        _matrix(m, d, f"{path}.elements[{r}]")


def _v_fiducial(p, d, path):
    _vector(_field(p, "vector", path), d, f"{path}.vector")


def _v_phases(p, d, path):
    angles = _field(p, "angles", path)
    _list(angles, f"{path}.angles")
    for k, a in enumerate(angles):
        loc = f"{path}.angles[{k}]"
        if not isinstance(a, dict):
            raise DocumentError(loc, "expected an object with p1, p2, theta")
        for key in ("p1", "p2"):
            v = _field(a, key, loc)
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < d:
                raise DocumentError(f"{loc}.{key}", f"expected an integer in [0, {d - 1}]")
        _real(_field(a, "theta", loc), f"{loc}.theta")


def _v_wigner(p, d, path):
    vals = _field(p, "values", path)
    _list(vals, f"{path}.values", d)
    for i, row in enumerate(vals):
        _list(row, f"{path}.values[{i}]", d)
        for j, x in enumerate(row):
            _real(x, f"{path}.values[{i}][{j}]")


def _v_report(p, d, path):
    if "d" in p and p["d"] != d:
        raise DocumentError(f"{path}.d", f"report dimension {p['d']} disagrees with document dimension {d}")


def _v_bases(p, d, path):
    bases = _field(p, "bases", path)
    _list(bases, f"{path}.bases")
    for r, b in enumerate(bases):
        _matrix(b, d, f"{path}.bases[{r}]")


def _v_probabilities(p, d, path):
    probs = _field(p, "probabilities", path)
    _list(probs, f"{path}.probabilities")
    for i, x in enumerate(probs):
        _real(x, f"{path}.probabilities[{i}]")


_VALIDATORS = {
    "state": _v_state,
    "povm": _v_povm,
    "fiducial": _v_fiducial,
    "phases": _v_phases,
    "wigner": _v_wigner,
    "report": _v_report,
    "bases": _v_bases,
    "probabilities": _v_probabilities,
}


# ----------------------------------------------------------------------------
# numpy <-> JSON


def complex_to_json(a) -> list:
    """Nested lists with every complex entry replaced by ``[re, im]``."""
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def complex_from_json(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def real_to_json(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def jsonable(obj):
    """Recursively convert numpy scalars/arrays so ``json`` can write them."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    return obj
