"""Reading and writing problem files.

A problem file is JSON with two top-level fields::

    {"v": [2, 0],
     "blocks": [{"A": [[1, 0], [0, 0]],
                 "set": {"type": "ballp", "center": [0, 0], "radius": 1, "p": 1.5}}]}

Infinite box bounds are written as the strings "inf" and "-inf".  The
dimension of "soc" and "orthant" sets is the row count of the block's A.
Errors name the offending field (``blocks[0].set.radius``) and the line of
the JSON object that holds it.
"""
import json
import json.decoder
import json.scanner
import math
import re
from pathlib import Path

import numpy as np

from .errors import DimensionError, ProblemFileError
from .model import Instance
from . import sets

# parameters accepted for each set type, besides "type"
SET_FIELDS = {
    "box": ("lower", "upper"),
    "halfspace": ("a", "b"),
    "hyperplane": ("a", "b"),
    "affine": ("basis", "anchor"),
    "ball2": ("center", "radius"),
    "ballp": ("center", "radius", "p"),
    "soc": (),
    "soc_reflected": ("orientation",),
    "orthant": (),
}
TOP_FIELDS = ("v", "blocks")
BLOCK_FIELDS = ("A", "set")
INF_TOKENS = {"inf": math.inf, "-inf": -math.inf, "+inf": math.inf}


class _Located(dict):
    """A JSON object that remembers where it starts in the source text."""

    line = None
    text = ""

    def line_of(self, key):
        m = re.search(r'"%s"\s*:' % re.escape(key), self.text)
        if m is None:
            return self.line
        return self.line + self.text.count("\n", 0, m.start())


def _located_decoder():
    dec = json.JSONDecoder()
    plain = json.decoder.JSONObject

    def parse_object(s_and_end, strict, scan_once, object_hook, object_pairs_hook, memo=None, _w=None, _ws=None):
        s, end = s_and_end
        start = end - 1
        kwargs = {}
        if memo is not None:
            kwargs["memo"] = memo
        pairs, new_end = plain(s_and_end, strict, scan_once, None, list, **kwargs)
        obj = _Located()
        for k, val in pairs:
            if k in obj:
                raise ProblemFileError(f"duplicate key {k!r}", line=s.count("\n", 0, start) + 1)
            obj[k] = val
        obj.line = s.count("\n", 0, start) + 1
        obj.text = s[start:new_end]
        return obj, new_end

    dec.parse_object = parse_object
    dec.scan_once = json.scanner.py_make_scanner(dec)
    return dec


def _line(obj, key=None):
    if isinstance(obj, _Located):
        return obj.line if key is None else obj.line_of(key)
    return None


def _number(x, path, line, allow_inf=False):
    if isinstance(x, bool):
        raise ProblemFileError("expected a number, got a boolean", path, line)
    if isinstance(x, (int, float)):
        x = float(x)
        if not math.isfinite(x):
            raise ProblemFileError("numbers must be finite", path, line)
        return x
    if allow_inf and isinstance(x, str) and x.strip().lower() in INF_TOKENS:
        return INF_TOKENS[x.strip().lower()]
    want = 'a number or "inf"/"-inf"' if allow_inf else "a number"
    raise ProblemFileError(f"expected {want}, got {x!r}", path, line)


def _vector(x, path, line, allow_inf=False):
    if not isinstance(x, list):
        raise ProblemFileError(f"expected an array of numbers, got {type(x).__name__}", path, line)
    return np.array([_number(e, f"{path}[{i}]", line, allow_inf) for i, e in enumerate(x)], dtype=float)


def _matrix(x, path, line, ncols=None):
    if not isinstance(x, list) or not x:
        raise ProblemFileError("expected a nonempty array of rows", path, line)
    rows = [_vector(r, f"{path}[{i}]", line) for i, r in enumerate(x)]
    width = len(rows[0]) if ncols is None else ncols
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ProblemFileError(f"row has {len(r)} entries, expected {width}", f"{path}[{i}]", line)
    return np.array(rows)


def _check_fields(obj, allowed, required, path):
    if not isinstance(obj, dict):
        raise ProblemFileError(f"expected an object, got {type(obj).__name__}", path, None)
    for k in obj:
        if k not in allowed:
            raise ProblemFileError(f"unknown field {k!r}", f"{path}.{k}" if path else k, _line(obj, k))
    for k in required:
        if k not in obj:
            raise ProblemFileError("missing field", f"{path}.{k}" if path else k, _line(obj))


def _build_set(raw, m, path):
    if not isinstance(raw, dict):
        raise ProblemFileError("expected an object", path, None)
    kind = raw.get("type")
    if kind not in SET_FIELDS:
        raise ProblemFileError(f"unknown set type {kind!r}; expected one of {sorted(SET_FIELDS)}",
                               f"{path}.type", _line(raw, "type"))
    fields = SET_FIELDS[kind]
    _check_fields(raw, ("type",) + fields, fields, path)

    def vec(k, allow_inf=False):
        return _vector(raw[k], f"{path}.{k}", _line(raw, k), allow_inf)

    def num(k):
        return _number(raw[k], f"{path}.{k}", _line(raw, k))

    try:
        if kind == "box":
            return sets.Box(vec("lower", True), vec("upper", True))
        if kind == "halfspace":
            return sets.Halfspace(vec("a"), num("b"))
        if kind == "hyperplane":
            return sets.Hyperplane(vec("a"), num("b"))
        if kind == "affine":
            basis = raw["basis"]
            if basis == []:
                B = np.zeros((m, 0))
            else:
                B = _matrix(basis, f"{path}.basis", _line(raw, "basis"))
            return sets.AffineSubspace(B, vec("anchor"))
        if kind == "ball2":
            return sets.EuclideanBall(vec("center"), num("radius"))
        if kind == "ballp":
            return sets.PNormBall(vec("center"), num("radius"), num("p"))
        if kind == "soc":
            return sets.SecondOrderCone(m)
        if kind == "orthant":
            return sets.NonnegativeOrthant(m)
        orient = raw["orientation"]
        if not isinstance(orient, list) or not all(isinstance(k, int) and not isinstance(k, bool) for k in orient):
            raise ProblemFileError("expected an array of signed 1-based indices",
                                   f"{path}.orientation", _line(raw, "orientation"))
        return sets.PolarReflectedCone(tuple(orient))
    except ProblemFileError:
        raise
    except (ValueError, TypeError) as exc:
        raise ProblemFileError(str(exc), path, _line(raw)) from None


def instance_from_dict(doc):
    """Build an :class:`Instance` from a parsed problem document."""
    _check_fields(doc, TOP_FIELDS, TOP_FIELDS, "")
    v = _vector(doc["v"], "v", _line(doc, "v"))
    if v.size == 0:
        raise ProblemFileError("anchor must be nonempty", "v", _line(doc, "v"))
    blocks_raw = doc["blocks"]
    if not isinstance(blocks_raw, list) or not blocks_raw:
        raise ProblemFileError("expected a nonempty array of blocks", "blocks", _line(doc, "blocks"))
    blocks = []
    for i, b in enumerate(blocks_raw):
        path = f"blocks[{i}]"
        _check_fields(b, BLOCK_FIELDS, BLOCK_FIELDS, path)
        A = _matrix(b["A"], f"{path}.A", _line(b, "A"), ncols=v.size)
        C = _build_set(b["set"], A.shape[0], f"{path}.set")
        if C.dim != A.shape[0]:
            raise ProblemFileError(f"set has dimension {C.dim} but A has {A.shape[0]} rows",
                                   f"{path}.set", _line(b, "set"))
        blocks.append((A, C))
    try:
        return Instance(v, blocks)
    except DimensionError as exc:
        m = re.match(r"block (\d+)", str(exc))
        field = f"blocks[{m.group(1)}]" if m else "blocks"
        raise ProblemFileError(str(exc), field, None) from None
    except ValueError as exc:
        raise ProblemFileError(str(exc), "blocks", None) from None


def parse_problem(text):
    """Parse problem-file text into an :class:`Instance`."""
    try:
        doc = _located_decoder().decode(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"invalid JSON: {exc.msg}", None, exc.lineno) from None
    return instance_from_dict(doc)


def load_problem(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_problem(text)


def _plain(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, list):
        return [_plain(e) for e in x]
    if isinstance(x, dict):
        return {k: _plain(e) for k, e in x.items()}
    return x


def instance_to_dict(inst):
    return {
        "v": inst.anchor.tolist(),
        "blocks": [{"A": b.A.tolist(), "set": _plain(b.set.to_dict())} for b in inst.blocks],
    }


def dump_problem(inst, path=None):
    """Serialize an instance; floats use Python's shortest round-trip repr."""
    doc = instance_to_dict(inst)
    lines = ["{", f' "v": {json.dumps(doc["v"])},', ' "blocks": [']
    for i, b in enumerate(doc["blocks"]):
        rows = ",\n   ".join(json.dumps(r) for r in b["A"])
        tail = "," if i + 1 < len(doc["blocks"]) else ""
        lines.append(f'  {{"A": [{rows}],')
        lines.append(f'   "set": {json.dumps(b["set"])}}}{tail}')
    lines += [" ]", "}"]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def bundled_dir():
    """Directory holding the problem files shipped with the package."""
    return Path(__file__).resolve().parent / "data"


def bundled_problems():
    """Names of the shipped problem files, without solution sidecars."""
    return sorted(p.name for p in bundled_dir().glob("*.json") if not p.name.endswith(".solution.json"))


def load_solution(problem_path):
    """Read the ``<name>.solution.json`` sidecar next to a problem file, or None."""
    p = Path(problem_path)
    side = p.with_name(p.stem + ".solution.json")
    if not side.exists():
        return None
    doc = json.loads(side.read_text())
    return {k: (np.array(v) if isinstance(v, list) else v) for k, v in doc.items()}


__all__ = [
    "parse_problem",
    "load_problem",
    "instance_from_dict",
    "instance_to_dict",
    "dump_problem",
    "bundled_dir",
    "bundled_problems",
    "load_solution",
    "SET_FIELDS",
]
