"""DMF1 binary field dumps.

Layout, all little-endian::

    0   magic    b"DMF1"
    4   version  u32 (= 1)
    8   sector   u8  (0 = XT, 1 = KE)
    9   n_axes   u8
    10  per axis: n_points u64, origin f64, spacing f64
    ..  samples: (real, imag) f64 pairs, row-major
"""
from __future__ import annotations

import os
import struct

import numpy as np

from .grid import Field, Grid, Sector, ValidationError

MAGIC = b"DMF1"
VERSION = 1
_HEAD = struct.Struct("<4sIBB")
_AXIS = struct.Struct("<Qdd")


class FormatError(ValueError):
    def __init__(self, offset: int, message: str):
        super().__init__(f"offset {offset}: {message}")
        self.offset = offset


def encode_field(f: Field) -> bytes:
    g = f.grid
    parts = [_HEAD.pack(MAGIC, VERSION, int(f.sector), g.ndim)]
    for n, o, h in zip(g.n_points, g.origin, g.spacing):
        parts.append(_AXIS.pack(n, o, h))
    parts.append(np.ascontiguousarray(f.samples).astype("<c16", copy=False).tobytes())
    return b"".join(parts)


def decode_field(data: bytes, label: str = "") -> Field:
    if len(data) < _HEAD.size:
        if data[:4] != MAGIC[:len(data[:4])]:
            raise FormatError(0, "bad magic")
        raise FormatError(len(data), "truncated header")
    magic, version, sector, n_axes = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(0, f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(4, f"unsupported version {version}")
    if sector not in (0, 1):
        raise FormatError(8, f"unknown sector tag {sector}")
    if n_axes not in (1, 2):
        raise FormatError(9, f"unsupported axis count {n_axes}")
    pos = _HEAD.size
    ns, origins, spacings = [], [], []
    for _ in range(n_axes):
        if len(data) < pos + _AXIS.size:
            raise FormatError(len(data), "truncated axis header")
        n, o, h = _AXIS.unpack_from(data, pos)
        ns.append(n)
        origins.append(o)
        spacings.append(h)
        pos += _AXIS.size
    try:
        grid = Grid(tuple(ns), tuple(origins), tuple(spacings))
    except ValidationError as exc:
        raise FormatError(_HEAD.size, f"invalid grid ({exc})") from exc
    want = grid.size * 16
    have = len(data) - pos
    if have != want:
        bad = len(data) if have < want else pos + want
        raise FormatError(bad, f"length mismatch: payload has {have} bytes, header declares {want}")
    samples = np.frombuffer(data, dtype="<c16", count=grid.size, offset=pos)
    try:
        return Field(Sector(sector), grid, samples.reshape(grid.shape), label)
    except ValidationError as exc:
        raise FormatError(pos, str(exc)) from exc


def dump_field(path: str | os.PathLike, f: Field) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_field(f))


def load_field(path: str | os.PathLike) -> Field:
    with open(path, "rb") as fh:
        data = fh.read()
    return decode_field(data, os.path.basename(os.fspath(path)))
