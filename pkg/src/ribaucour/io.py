"""JSON and OBJ file formats.

Floats are written with Python's shortest round-trip ``repr`` so that
reading a file back reproduces every value exactly.  Files are written to
a temporary sibling and moved into place, so readers never see a partial
file.
"""

import json
import math
import os
import tempfile

import numpy as np

from . import incidence as inc


class SchemaError(ValueError):
    """A JSON document does not have the expected layout."""


def _finite_list(a):
    return np.asarray(a, dtype=float).tolist()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else None
    return obj


def dumps(doc):
    return json.dumps(_jsonable(doc), indent=1, allow_nan=False) + "\n"


def _target_mode(path):
    try:
        return os.stat(path).st_mode & 0o777
    except FileNotFoundError:
        mask = os.umask(0)
        os.umask(mask)
        return 0o666 & ~mask


def write_text(path, text):
    """Atomically replace ``path`` with ``text`` (LF line endings)."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        # mkstemp creates 0600; give the file the mode a plain open() would
        os.chmod(tmp, _target_mode(path))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, doc):
    write_text(path, dumps(doc))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as err:
            raise SchemaError(f"{path}: invalid JSON: {err}") from err


def _require(doc, key, where):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"{where}: missing field {key!r}")
    return doc[key]


def _point_array(value, dim, where):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as err:
        raise SchemaError(f"{where}: points must be numeric arrays") from err
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise SchemaError(f"{where}: expected a list of {dim}-vectors")
    if not np.all(np.isfinite(arr)):
        raise SchemaError(f"{where}: non-finite coordinate")
    return arr


def _dim(doc, where):
    dim = _require(doc, "ambient_dim", where)
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SchemaError(f"{where}: ambient_dim must be a positive integer")
    return dim


def curve_doc(points, normals=None):
    points = np.asarray(points, dtype=float)
    doc = {"kind": "curve", "ambient_dim": points.shape[1], "points": _finite_list(points)}
    if normals is not None:
        doc["normals"] = _finite_list(normals)
    return doc


def net_doc(points):
    points = np.asarray(points, dtype=float)
    n1, n2, dim = points.shape
    return {"kind": "net", "ambient_dim": dim, "shape": [n1, n2],
            "points": _finite_list(points.reshape(n1 * n2, dim))}


def chain_doc(curves, labels):
    curves = [np.asarray(c, dtype=float) for c in curves]
    return {"kind": "chain", "ambient_dim": curves[0].shape[1], "labels": list(labels),
            "curves": [_finite_list(c) for c in curves]}


def parse_geometry(doc, where="input"):
    """Decode a curve, framed curve, net or chain document.

    Returns ``(kind, payload)``: ``("curve", points)``,
    ``("framed_curve", (points, normals))``, ``("net", grid)`` or
    ``("chain", [curves])``.
    """
    kind = _require(doc, "kind", where)
    if kind == "curve":
        dim = _dim(doc, where)
        pts = _point_array(_require(doc, "points", where), dim, where)
        if "normals" in doc:
            nrm = _point_array(doc["normals"], dim, where + " normals")
            if nrm.shape != pts.shape:
                raise SchemaError(f"{where}: normals and points differ in length")
            return "framed_curve", (pts, nrm)
        return "curve", pts
    if kind == "net":
        dim = _dim(doc, where)
        shape = _require(doc, "shape", where)
        if (not isinstance(shape, list) or len(shape) != 2
                or not all(isinstance(v, int) and v > 0 for v in shape)):
            raise SchemaError(f"{where}: shape must be [n1, n2]")
        pts = _point_array(_require(doc, "points", where), dim, where)
        if len(pts) != shape[0] * shape[1]:
            raise SchemaError(f"{where}: expected {shape[0] * shape[1]} points, got {len(pts)}")
        return "net", pts.reshape(shape[0], shape[1], dim)
    if kind == "chain":
        dim = _dim(doc, where)
        curves = _require(doc, "curves", where)
        if not isinstance(curves, list) or not curves:
            raise SchemaError(f"{where}: curves must be a non-empty list")
        return "chain", [_point_array(c, dim, f"{where} curve {i}") for i, c in enumerate(curves)]
    raise SchemaError(f"{where}: unknown kind {kind!r}")


def read_geometry(path):
    return parse_geometry(read_json(path), str(path))


def parse_sphere(doc, where="sphere"):
    """Sphere vector from ``{"kind": "sphere", ...}`` or ``{"kind": "plane", ...}``."""
    kind = _require(doc, "kind", where)
    try:
        if kind == "sphere":
            center = np.array(_require(doc, "center", where), dtype=float)
            radius = float(_require(doc, "radius", where))
            return inc.sphere_from_center_radius(center, radius)
        if kind == "plane":
            normal = np.array(_require(doc, "normal", where), dtype=float)
            offset = float(_require(doc, "offset", where))
            return inc.plane_from_normal_offset(normal, offset)
    except (TypeError, ValueError) as err:
        if isinstance(err, SchemaError):
            raise
        raise SchemaError(f"{where}: {err}") from err
    raise SchemaError(f"{where}: unknown kind {kind!r}")


def sphere_doc(s):
    d = inc.decode_sphere(s)
    if isinstance(d, inc.Plane):
        return {"kind": "plane", "normal": _finite_list(d.normal), "offset": d.offset}
    return {"kind": "sphere", "center": _finite_list(d.center), "radius": d.radius}


def load_sphere(text):
    """Sphere from inline JSON text or from a JSON file path."""
    text = text.strip()
    if text.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as err:
            raise SchemaError(f"sphere: invalid JSON: {err}") from err
        return parse_sphere(doc)
    return parse_sphere(read_json(text), text)


def parse_point(text, dim=None):
    """Point from ``"x,y,z"``."""
    try:
        p = np.array([float(v) for v in text.split(",")])
    except ValueError as err:
        raise SchemaError(f"bad point {text!r}") from err
    if dim is not None and len(p) != dim:
        raise SchemaError(f"point {text!r} should have {dim} coordinates")
    if not np.all(np.isfinite(p)):
        raise SchemaError(f"non-finite point {text!r}")
    return p


def obj_text(strips):
    """Wavefront text: all ``v`` lines first, then 1-indexed ``f a b c d`` quads."""
    verts, faces, offset = [], [], 0
    for strip in strips:
        pts = strip.points.reshape(-1, strip.points.shape[-1])
        verts.extend(pts)
        faces.extend(strip.faces() + offset + 1)
        offset += len(pts)
    lines = ["v " + " ".join(repr(float(c)) for c in p) for p in verts]
    lines += ["f " + " ".join(str(int(i)) for i in f) for f in faces]
    return "\n".join(lines) + "\n"


def write_obj(path, strips):
    write_text(path, obj_text(strips))
