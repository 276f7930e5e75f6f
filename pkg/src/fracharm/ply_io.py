"""PLY reading/writing and farthest-point downsampling of point clouds."""
from dataclasses import dataclass, field
import os

import numpy as np

from . import kernels
from .errors import ConfigError, InputError, PlyFormatError

_PLY_TYPES = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "i2", "int16": "i2",
    "ushort": "u2", "uint16": "u2",
    "int": "i4", "int32": "i4",
    "uint": "u4", "uint32": "u4",
    "float": "f4", "float32": "f4",
    "double": "f8", "float64": "f8",
}
_FORMATS = ("ascii", "binary_little_endian")


@dataclass(frozen=True, eq=False)
class PointCloud:
    """N points in 3D with optional uchar colors and named scalar channels."""

    points: np.ndarray
    colors: np.ndarray | None = None
    scalars: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must have shape (N, 3), got {pts.shape}")
        n = pts.shape[0]
        if n < 1:
            raise ValueError("a point cloud needs at least one point")
        if not np.all(np.isfinite(pts)):
            bad = int(np.argwhere(~np.isfinite(pts))[0, 0])
            raise ValueError(f"non-finite coordinate at point {bad}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.colors is not None:
            col = np.asarray(self.colors)
            if col.shape != (n, 3):
                raise ValueError(f"colors must have shape ({n}, 3), got {col.shape}")
            if np.any(col < 0) or np.any(col > 255):
                raise ValueError("colors must lie in [0, 255]")
            col = col.astype(np.uint8)
            col.setflags(write=False)
            object.__setattr__(self, "colors", col)
        scal = {}
        for name, values in self.scalars.items():
            v = np.array(values, dtype=np.float64)
            if v.shape != (n,):
                raise ValueError(f"scalar {name!r} must have shape ({n},), got {v.shape}")
            v.setflags(write=False)
            scal[name] = v
        object.__setattr__(self, "scalars", scal)

    def __len__(self):
        return self.points.shape[0]

    def subset(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return PointCloud(
            self.points[idx],
            None if self.colors is None else self.colors[idx],
            {k: v[idx] for k, v in self.scalars.items()},
        )


def _parse_header(fh):
    """Return (format, elements, header_bytes) where elements is a list of
    (name, count, [(prop_name, dtype or ('list', count_t, item_t))], line)."""
    first = fh.readline()
    if first.rstrip(b"\r\n") != b"ply":
        raise PlyFormatError("missing 'ply' magic", 1)
    fmt = None
    elements = []
    lineno = 1
    while True:
        raw = fh.readline()
        lineno += 1
        if not raw:
            raise PlyFormatError("header ended before 'end_header'", lineno)
        try:
            line = raw.decode("ascii").strip()
        except UnicodeDecodeError:
            raise PlyFormatError("non-ASCII byte in header", lineno) from None
        if not line or line.startswith(("comment", "obj_info")):
            continue
        words = line.split()
        key = words[0]
        if key == "end_header":
            break
        if key == "format":
            if len(words) != 3:
                raise PlyFormatError("malformed format line", lineno)
            if words[1] not in _FORMATS:
                raise PlyFormatError(f"unsupported PLY format {words[1]!r}", lineno)
            if words[2] != "1.0":
                raise PlyFormatError(f"unsupported PLY version {words[2]!r}", lineno)
            fmt = words[1]
        elif key == "element":
            if len(words) != 3:
                raise PlyFormatError("malformed element line", lineno)
            try:
                count = int(words[2])
            except ValueError:
                raise PlyFormatError(f"bad element count {words[2]!r}", lineno) from None
            if count < 0:
                raise PlyFormatError("negative element count", lineno)
            elements.append((words[1], count, [], lineno))
        elif key == "property":
            if not elements:
                raise PlyFormatError("property before any element", lineno)
            props = elements[-1][2]
            if len(words) == 5 and words[1] == "list":
                if words[2] not in _PLY_TYPES or words[3] not in _PLY_TYPES:
                    raise PlyFormatError("unknown list property type", lineno)
                props.append((words[4], ("list", _PLY_TYPES[words[2]], _PLY_TYPES[words[3]]), lineno))
            elif len(words) == 3:
                if words[1] not in _PLY_TYPES:
                    raise PlyFormatError(f"unknown property type {words[1]!r}", lineno)
                props.append((words[2], _PLY_TYPES[words[1]], lineno))
            else:
                raise PlyFormatError("malformed property line", lineno)
        else:
            raise PlyFormatError(f"unexpected header keyword {key!r}", lineno)
    if fmt is None:
        raise PlyFormatError("header has no format line", lineno)
    return fmt, elements, lineno


def read_ply(path, scalars=()):
    """Read the vertex positions (and uchar colors, if present) of a PLY file.

    Parameters
    ----------
    path : str or PathLike
    scalars : iterable of str
        Extra vertex properties to load as named scalar channels. All other
        properties are ignored.

    Raises
    ------
    PlyFormatError
        Malformed header, big-endian or list-typed vertex data, truncated or
        short payload, non-finite coordinates. The message carries the line
        number (header and ASCII data) or byte offset (binary data).
    """
    with open(path, "rb") as fh:
        fmt, elements, header_lines = _parse_header(fh)
        header_bytes = fh.tell()
        data = fh.read()

    names = [e[0] for e in elements]
    if "vertex" not in names:
        raise PlyFormatError("no vertex element in header", header_lines)
    vi = names.index("vertex")
    _, n, props, vline = elements[vi]
    pnames = [p[0] for p in props]
    for axis in "xyz":
        if axis not in pnames:
            raise PlyFormatError(f"vertex element lacks property {axis!r}", vline)
    for pname, ptype, pline in props:
        if isinstance(ptype, tuple):
            raise PlyFormatError(f"list-typed vertex property {pname!r} unsupported", pline)
        if pname in "xyz" and ptype not in ("f4", "f8"):
            raise PlyFormatError(f"coordinate {pname!r} must be float or double", pline)
    want = list(scalars)
    for name in want:
        if name not in pnames:
            raise PlyFormatError(f"vertex element lacks property {name!r}", vline)

    if fmt == "ascii":
        table, first_line = _read_ascii(data, elements, vi, header_lines)
        pos = lambda row: ("line", first_line + row)  # noqa: E731
    else:
        table, base = _read_binary(data, elements, vi, header_bytes)
        stride = table.dtype.itemsize
        pos = lambda row: ("byte", base + row * stride)  # noqa: E731

    pts = np.column_stack([np.asarray(table[a], dtype=np.float64) for a in "xyz"])
    bad = ~np.isfinite(pts)
    if bad.any():
        row = int(np.argwhere(bad)[0, 0])
        unit, at = pos(row)
        raise PlyFormatError(f"non-finite coordinate in vertex {row}", at, unit)
    colors = None
    if all(c in pnames for c in ("red", "green", "blue")):
        colors = np.column_stack([np.asarray(table[c]) for c in ("red", "green", "blue")])
        colors = np.clip(colors, 0, 255).astype(np.uint8)
    return PointCloud(pts, colors, {name: np.asarray(table[name], dtype=np.float64) for name in want})


def _read_ascii(data, elements, vi, header_lines):
    lines = data.decode("ascii", errors="replace").split("\n")
    cursor = 0
    # skip preceding elements: one item per line
    for _, count, _, _ in elements[:vi]:
        cursor += count
    _, n, props, _ = elements[vi]
    rows = []
    for k in range(n):
        idx = cursor + k
        lineno = header_lines + 1 + idx
        if idx >= len(lines) or not lines[idx].strip():
            raise PlyFormatError(f"vertex count mismatch: header declares {n}, found {k}", lineno)
        tokens = lines[idx].split()
        if len(tokens) != len(props):
            raise PlyFormatError(
                f"expected {len(props)} values for vertex {k}, found {len(tokens)}", lineno)
        try:
            rows.append(tuple(float(t) if np.dtype(p[1]).kind == "f" else int(t)
                              for t, p in zip(tokens, props)))
        except ValueError:
            raise PlyFormatError(f"unparseable value in vertex {k}", lineno) from None
    dtype = np.dtype([(p[0], p[1]) for p in props])
    return np.array(rows, dtype=dtype), header_lines + 1 + cursor


def _read_binary(data, elements, vi, header_bytes):
    offset = 0
    for name, count, props, line in elements[:vi]:
        if any(isinstance(p[1], tuple) for p in props):
            raise PlyFormatError(
                f"list-typed element {name!r} before vertex data is unsupported in binary files", line)
        offset += count * np.dtype([(p[0], "<" + p[1]) for p in props]).itemsize
    _, n, props, _ = elements[vi]
    dtype = np.dtype([(p[0], "<" + p[1]) for p in props])
    need = offset + n * dtype.itemsize
    if len(data) < need:
        have = max(0, (len(data) - offset) // dtype.itemsize)
        raise PlyFormatError(
            f"vertex count mismatch: header declares {n}, payload holds {have}",
            header_bytes + len(data), "byte")
    table = np.frombuffer(data, dtype=dtype, count=n, offset=offset)
    return table, header_bytes + offset


def write_ply(cloud, path, format="binary_little_endian"):
    """Write ``cloud`` as PLY; binary output round-trips coordinates exactly.

    ASCII output uses 17 significant digits, which also round-trips.
    """
    if format == "binary":
        format = "binary_little_endian"
    if format not in _FORMATS:
        raise ConfigError(f"unsupported PLY output format {format!r}")
    n = len(cloud)
    fields = [("x", "<f8"), ("y", "<f8"), ("z", "<f8")]
    if cloud.colors is not None:
        fields += [("red", "u1"), ("green", "u1"), ("blue", "u1")]
    fields += [(name, "<f8") for name in cloud.scalars]
    table = np.empty(n, dtype=fields)
    for k, a in enumerate("xyz"):
        table[a] = cloud.points[:, k]
    if cloud.colors is not None:
        for k, c in enumerate(("red", "green", "blue")):
            table[c] = cloud.colors[:, k]
    for name, v in cloud.scalars.items():
        table[name] = v

    header = ["ply", f"format {format} 1.0", f"element vertex {n}"]
    for name, t in fields:
        header.append(f"property {'uchar' if t == 'u1' else 'double'} {name}")
    header.append("end_header")
    try:
        with open(path, "wb") as fh:
            fh.write(("\n".join(header) + "\n").encode("ascii"))
            if format == "ascii":
                out = []
                for row in table.tolist():
                    out.append(" ".join(
                        str(v) if isinstance(v, int) else format_float(v) for v in row))
                fh.write(("\n".join(out) + "\n").encode("ascii"))
            else:
                fh.write(table.tobytes())
    except OSError as exc:
        raise InputError(f"cannot write {os.fspath(path)}: {exc}") from exc


def format_float(v):
    return repr(float(v))


def downsample(cloud, target, seed=0):
    """Farthest-point subsample of ``cloud`` to ``min(target, N)`` points.

    Sampling starts from the point nearest the centroid and the result is in
    selection order, so the output for ``k`` is a prefix of the output for
    ``k + 1``. The procedure has no random component; ``seed`` is accepted so
    pipeline configs can carry a single seed and does not change the result.
    """
    if int(target) < 4:
        raise ConfigError(f"downsample target must be >= 4, got {target}")
    n = len(cloud)
    if target >= n:
        return cloud
    pts = cloud.points
    centroid = pts.mean(axis=0)
    start = int(np.argmin(((pts - centroid) ** 2).sum(axis=1)))
    idx = kernels.farthest_point_sampling(pts, start, int(target))
    return cloud.subset(idx)
