"""Flat binary container and small CSV exports for signals, phase-space arrays and operators.

Layout (little endian): magic ``TFLC``, uint32 version, uint32 dim, uint32 n,
float64 h, uint32 ndim, ndim x uint64 shape, then the payload as interleaved
``re, im`` float64 pairs in row-major order (x-major, then xi).
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .transforms import Grid, PhaseSpaceFunction, SampledSignal

MAGIC = b"TFLC"
VERSION = 1
_HEAD = struct.Struct("<4sIIIdI")


@dataclass
class Container:
    grid: Grid
    values: np.ndarray


def write_container(path, grid: Grid, values) -> None:
    v = np.ascontiguousarray(np.asarray(values, dtype=np.complex128))
    head = _HEAD.pack(MAGIC, VERSION, grid.dim, grid.n, grid.h, v.ndim)
    shape = struct.pack(f"<{v.ndim}Q", *v.shape)
    payload = v.view(np.float64).astype("<f8", copy=False).tobytes()
    Path(path).write_bytes(head + shape + payload)


def read_container(path) -> Container:
    raw = Path(path).read_bytes()
    if len(raw) < _HEAD.size:
        raise ValueError("truncated container header")
    magic, version, dim, n, h, ndim = _HEAD.unpack_from(raw)
    if magic != MAGIC or version != VERSION:
        raise ValueError(f"not a tflocal container (magic={magic!r}, version={version})")
    off = _HEAD.size
    shape = struct.unpack_from(f"<{ndim}Q", raw, off)
    off += 8 * ndim
    count = int(np.prod(shape, dtype=np.int64))
    if len(raw) - off != 16 * count:
        raise ValueError("container payload size does not match its shape")
    flat = np.frombuffer(raw, dtype="<f8", offset=off).astype(np.float64)
    values = (flat[0::2] + 1j * flat[1::2]).reshape(shape)
    return Container(Grid(dim, n, h), values)


def save(path, obj) -> None:
    """Store a ``SampledSignal``, ``PhaseSpaceFunction`` or anything with ``grid`` and ``matrix``/``values``."""
    if isinstance(obj, (SampledSignal, PhaseSpaceFunction)):
        grid = obj.grid if isinstance(obj, SampledSignal) else obj.xgrid
        write_container(path, grid, obj.values)
    elif hasattr(obj, "matrix"):
        write_container(path, obj.grid, obj.matrix)
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def signal_to_csv(path, f: SampledSignal) -> None:
    if f.grid.dim != 1:
        raise ValueError("CSV export is for 1-d signals")
    write_csv(path, ["x", "re", "im"],
              ([repr(float(x)), repr(float(v.real)), repr(float(v.imag))]
               for x, v in zip(f.grid.nodes, f.values)))
