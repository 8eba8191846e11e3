"""JSON formats for matrices, operator sequences and profiles.

* Matrix: ``{"rows": n, "cols": m, "entries": [[re, im], ...]}`` (row-major)
* OpSequence: ``{"dim": d, "items": [Matrix, ...]}``
* Profile: ``{"steps": [[value, width], ...]}``

Parse errors raise :class:`~ncklab.errors.MalformedInput` with the line and
column of the offending token when the JSON itself is broken, or a path such
as ``items[2].entries[5]`` when the structure is wrong.
"""

import json
import math
from pathlib import Path

import numpy as np

from .errors import MalformedInput
from .profile import Profile
from .rowcol import OpSequence


def _fail(msg, where=None, line=None, column=None):
    raise MalformedInput(msg, where=where, line=line, column=column)


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(exc.msg, line=exc.lineno, column=exc.colno) from None


def load_file(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def _number(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"expected a number, got {type(v).__name__}", where)
    if not math.isfinite(v):
        _fail("non-finite number", where)
    return float(v)


def _posint(v, where):
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        _fail("expected a positive integer", where)
    return v


def matrix_from_obj(obj, where="$") -> np.ndarray:
    if not isinstance(obj, dict):
        _fail("matrix must be an object", where)
    for key in ("rows", "cols", "entries"):
        if key not in obj:
            _fail(f"missing key {key!r}", where)
    n = _posint(obj["rows"], f"{where}.rows")
    m = _posint(obj["cols"], f"{where}.cols")
    ent = obj["entries"]
    if not isinstance(ent, list):
        _fail("entries must be a list", f"{where}.entries")
    if len(ent) != n * m:
        _fail(f"expected {n * m} entries, got {len(ent)}", f"{where}.entries")
    out = np.empty(n * m, dtype=np.complex128)
    for k, e in enumerate(ent):
        w = f"{where}.entries[{k}]"
        if isinstance(e, list) and len(e) == 2:
            out[k] = complex(_number(e[0], w), _number(e[1], w))
        else:
            out[k] = _number(e, w)
    return out.reshape(n, m)


def matrix_to_obj(a) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return {"rows": a.shape[0], "cols": a.shape[1],
            "entries": [[float(z.real), float(z.imag)] for z in a.ravel()]}


def opseq_from_obj(obj, where="$") -> OpSequence:
    if not isinstance(obj, dict):
        _fail("sequence must be an object", where)
    if "items" not in obj:
        _fail("missing key 'items'", where)
    items = obj["items"]
    if not isinstance(items, list) or not items:
        _fail("items must be a non-empty list", f"{where}.items")
    mats = [matrix_from_obj(m, f"{where}.items[{i}]") for i, m in enumerate(items)]
    d = _posint(obj["dim"], f"{where}.dim") if "dim" in obj else mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape != (d, d):
            _fail(f"item has shape {m.shape}, expected ({d}, {d})", f"{where}.items[{i}]")
    return OpSequence(np.stack(mats))


def opseq_to_obj(x: OpSequence) -> dict:
    return {"dim": x.dim, "items": [matrix_to_obj(m) for m in x.items]}


def profile_from_obj(obj, where="$") -> Profile:
    if not isinstance(obj, dict) or "steps" not in obj:
        _fail("profile must be an object with 'steps'", where)
    steps = obj["steps"]
    if not isinstance(steps, list):
        _fail("steps must be a list", f"{where}.steps")
    pairs = []
    for k, s in enumerate(steps):
        w = f"{where}.steps[{k}]"
        if not isinstance(s, list) or len(s) != 2:
            _fail("step must be [value, width]", w)
        v, wd = _number(s[0], w), _number(s[1], w)
        if v < 0 or wd <= 0:
            _fail("need value >= 0 and width > 0", w)
        pairs.append((v, wd))
    return Profile(pairs)


def profile_to_obj(f: Profile) -> dict:
    return {"steps": [[v, w] for v, w in f.steps]}


def detect(obj) -> str:
    """``"matrix"``, ``"sequence"`` or ``"profile"``."""
    if isinstance(obj, dict):
        if "steps" in obj:
            return "profile"
        if "items" in obj:
            return "sequence"
        if "entries" in obj:
            return "matrix"
    _fail("input is not a matrix, sequence or profile object")


def read_sequence(path) -> OpSequence:
    return opseq_from_obj(load_file(path))


def write_json(obj, path):
    text = json.dumps(obj, indent=2, default=_default)
    if path in (None, "-"):
        print(text)
    else:
        Path(path).write_text(text + "\n")


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")
