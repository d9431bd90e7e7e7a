"""PLY mesh reader: ASCII and binary little-endian, triangular faces only.

Supports the subset used by the Stanford Scanning Repository files: vertex
elements with float/double x, y, z properties (extra scalar properties such
as confidence or intensity are parsed and discarded) and face elements with a
single integer-list property. Anything else is a hard format error carrying
the byte offset where parsing stopped.
"""
import struct
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError, PlyFormatError
from .mesh import TriangleMesh

_SCALAR_FMT = {
    "char": "b", "int8": "b",
    "uchar": "B", "uint8": "B",
    "short": "h", "int16": "h",
    "ushort": "H", "uint16": "H",
    "int": "i", "int32": "i",
    "uint": "I", "uint32": "I",
    "float": "f", "float32": "f",
    "double": "d", "float64": "d",
}
_SCALAR_SIZE = {k: struct.calcsize(v) for k, v in _SCALAR_FMT.items()}


@dataclass
class _Element:
    name: str
    count: int
    properties: list  # (name, type) or (name, "list", count_type, item_type)


def load_mesh(path):
    """Read a PLY file into a TriangleMesh, dropping degenerate faces."""
    with open(path, "rb") as f:
        data = f.read()
    fmt, elements, offset = _parse_header(data)
    if fmt == "ascii":
        verts, faces = _read_ascii(data, elements, offset)
    else:
        verts, faces = _read_binary(data, elements, offset)
    if len(verts) == 0:
        raise InvalidInputError(f"{path}: mesh has no vertices")
    if len(faces) == 0:
        raise InvalidInputError(f"{path}: mesh has no faces")
    return TriangleMesh.from_arrays(verts, faces)


def _parse_header(data):
    if not data.startswith(b"ply"):
        raise PlyFormatError("missing 'ply' magic", offset=0)
    end = data.find(b"end_header\n")
    if end < 0:
        raise PlyFormatError("missing end_header", offset=len(data))
    body_offset = end + len(b"end_header\n")
    try:
        header = data[:end].decode("ascii")
    except UnicodeDecodeError as e:
        raise PlyFormatError("non-ASCII header", offset=e.start) from None

    fmt = None
    elements = []
    pos = 0
    for line in header.splitlines():
        pos += len(line) + 1
        tokens = line.split()
        if not tokens or tokens[0] in ("ply", "comment", "obj_info"):
            continue
        if tokens[0] == "format":
            if tokens[1] == "ascii":
                fmt = "ascii"
            elif tokens[1] == "binary_little_endian":
                fmt = "binary_le"
            else:
                raise PlyFormatError(f"unsupported format {tokens[1]!r}",
                                     offset=pos - len(line) - 1)
        elif tokens[0] == "element":
            elements.append(_Element(tokens[1], int(tokens[2]), []))
        elif tokens[0] == "property":
            if not elements:
                raise PlyFormatError("property before element",
                                     offset=pos - len(line) - 1)
            if tokens[1] == "list":
                if tokens[2] not in _SCALAR_FMT or tokens[3] not in _SCALAR_FMT:
                    raise PlyFormatError(f"unsupported list types in {line!r}",
                                         offset=pos - len(line) - 1)
                elements[-1].properties.append((tokens[4], "list", tokens[2], tokens[3]))
            else:
                if tokens[1] not in _SCALAR_FMT:
                    raise PlyFormatError(f"unsupported property type {tokens[1]!r}",
                                         offset=pos - len(line) - 1)
                elements[-1].properties.append((tokens[2], tokens[1]))
    if fmt is None:
        raise PlyFormatError("missing format line", offset=0)
    return fmt, elements, body_offset


def _vertex_layout(elem):
    names = [p[0] for p in elem.properties]
    for axis in ("x", "y", "z"):
        if axis not in names:
            raise PlyFormatError(f"vertex element lacks property {axis!r}")
    if any(p[1] == "list" for p in elem.properties):
        raise PlyFormatError("list property in vertex element")
    return names.index("x"), names.index("y"), names.index("z")


def _read_ascii(data, elements, offset):
    verts, faces = [], []
    lines = data[offset:].split(b"\n")
    li = 0
    pos = offset
    for elem in elements:
        is_vertex = elem.name == "vertex"
        is_face = elem.name == "face"
        if is_vertex:
            ix, iy, iz = _vertex_layout(elem)
        for _ in range(elem.count):
            if li >= len(lines):
                raise PlyFormatError(f"truncated {elem.name} data", offset=pos)
            line = lines[li]
            li += 1
            pos += len(line) + 1
            tokens = line.split()
            try:
                if is_vertex:
                    if len(tokens) != len(elem.properties):
                        raise ValueError
                    verts.append((float(tokens[ix]), float(tokens[iy]),
                                  float(tokens[iz])))
                elif is_face:
                    n = int(tokens[0])
                    if n != 3:
                        raise PlyFormatError(
                            f"non-triangular face ({n} vertices)",
                            offset=pos - len(line) - 1)
                    if len(tokens) != n + 1:
                        raise ValueError
                    faces.append((int(tokens[1]), int(tokens[2]), int(tokens[3])))
            except (ValueError, IndexError):
                raise PlyFormatError(f"malformed {elem.name} line {line!r}",
                                     offset=pos - len(line) - 1) from None
    return np.asarray(verts, dtype=np.float64), np.asarray(faces, dtype=np.int64)


def _read_binary(data, elements, offset):
    verts, faces = [], []
    pos = offset
    for elem in elements:
        is_vertex = elem.name == "vertex"
        is_face = elem.name == "face"
        fixed = all(p[1] != "list" for p in elem.properties)
        if is_vertex:
            ix, iy, iz = _vertex_layout(elem)
        if fixed:
            rec = "<" + "".join(_SCALAR_FMT[p[1]] for p in elem.properties)
            size = struct.calcsize(rec)
            end = pos + size * elem.count
            if end > len(data):
                raise PlyFormatError(f"truncated {elem.name} data", offset=len(data))
            if is_vertex:
                rows = struct.iter_unpack(rec, data[pos:end])
                verts = [(r[ix], r[iy], r[iz]) for r in rows]
            pos = end
        else:
            if len(elem.properties) != 1:
                raise PlyFormatError(
                    "mixed list and scalar properties unsupported", offset=pos)
            _, _, count_type, item_type = elem.properties[0]
            cfmt, csize = _SCALAR_FMT[count_type], _SCALAR_SIZE[count_type]
            ifmt, isize = _SCALAR_FMT[item_type], _SCALAR_SIZE[item_type]
            for _ in range(elem.count):
                if pos + csize > len(data):
                    raise PlyFormatError(f"truncated {elem.name} data",
                                         offset=len(data))
                (n,) = struct.unpack_from("<" + cfmt, data, pos)
                pos += csize
                if is_face and n != 3:
                    raise PlyFormatError(f"non-triangular face ({n} vertices)",
                                         offset=pos - csize)
                if pos + n * isize > len(data):
                    raise PlyFormatError(f"truncated {elem.name} data",
                                         offset=len(data))
                items = struct.unpack_from(f"<{n}{ifmt}", data, pos)
                pos += n * isize
                if is_face:
                    faces.append(items)
    return np.asarray(verts, dtype=np.float64), np.asarray(faces, dtype=np.int64)
