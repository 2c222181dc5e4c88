"""Grid file formats.

Binary layout: magic ``GRIDF1``, u32 d, u32 n_1..n_d, u8 flags (bit0 =
partial mask present, bit1 = erased mask present), little-endian f64 values
in row-major order, then each present mask as packed bits (little bit
order).  A JSON mirror format exists for small hand-written fixtures.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .core import Appearance, GridFunction, Pattern, make_appearance, parse_pattern

MAGIC = b"GRIDF1"


def write_grid(path, f: GridFunction) -> None:
    flags = 0
    if f.domain_mask is not None:
        flags |= 1
    if f.erased_mask is not None:
        flags |= 2
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", f.d))
        for n in f.dims:
            fh.write(struct.pack("<I", n))
        fh.write(struct.pack("<B", flags))
        fh.write(f.values.astype("<f8").tobytes(order="C"))
        for mask in (f.domain_mask, f.erased_mask):
            if mask is not None:
                fh.write(np.packbits(mask.reshape(-1), bitorder="little").tobytes())


def read_grid(path) -> GridFunction:
    raw = Path(path).read_bytes()
    if raw[:6] != MAGIC:
        raise ValueError("not a GRIDF1 file")
    off = 6
    (d,) = struct.unpack_from("<I", raw, off)
    off += 4
    dims = []
    for _ in range(d):
        (n,) = struct.unpack_from("<I", raw, off)
        dims.append(n)
        off += 4
    (flags,) = struct.unpack_from("<B", raw, off)
    off += 1
    size = int(np.prod(dims))
    vals = np.frombuffer(raw, dtype="<f8", count=size, offset=off)
    off += size * 8
    nbytes = (size + 7) // 8
    domain_mask = erased_mask = None
    if flags & 1:
        bits = np.frombuffer(raw, dtype=np.uint8, count=nbytes, offset=off)
        domain_mask = np.unpackbits(bits, count=size, bitorder="little").astype(bool)
        off += nbytes
    if flags & 2:
        bits = np.frombuffer(raw, dtype=np.uint8, count=nbytes, offset=off)
        erased_mask = np.unpackbits(bits, count=size, bitorder="little").astype(bool)
        off += nbytes
    return GridFunction(dims, vals, domain_mask, erased_mask)


def write_grid_json(path, f: GridFunction) -> None:
    doc = {"dims": list(f.dims), "values": f.values.reshape(-1).tolist()}
    if f.domain_mask is not None:
        doc["domain_mask"] = f.domain_mask.reshape(-1).astype(int).tolist()
    if f.erased_mask is not None:
        doc["erased_mask"] = f.erased_mask.reshape(-1).astype(int).tolist()
    Path(path).write_text(json.dumps(doc))


def read_grid_json(path) -> GridFunction:
    doc = json.loads(Path(path).read_text())
    return GridFunction(
        doc["dims"],
        np.asarray(doc["values"], dtype=np.float64),
        np.asarray(doc["domain_mask"], dtype=bool) if "domain_mask" in doc else None,
        np.asarray(doc["erased_mask"], dtype=bool) if "erased_mask" in doc else None,
    )


def load_grid(path) -> GridFunction:
    p = Path(path)
    if p.suffix == ".json":
        return read_grid_json(p)
    return read_grid(p)


def write_certificate(path, *, appearances: list[Appearance] | None = None,
                      solutions: list[tuple] | None = None) -> None:
    """Sidecar certificate: planted appearances or intersection solutions."""
    doc = {}
    if appearances is not None:
        doc["appearances"] = [a.as_json() for a in appearances]
    if solutions is not None:
        doc["solutions"] = [[list(i) for i in pair] for pair in solutions]
    Path(path).write_text(json.dumps(doc))


def read_certificate(path) -> dict:
    doc = json.loads(Path(path).read_text())
    out = {}
    if "appearances" in doc:
        out["appearances"] = [
            make_appearance(a["points"], parse_pattern(a["pattern"]))
            for a in doc["appearances"]
        ]
    if "solutions" in doc:
        out["solutions"] = [tuple(tuple(i) for i in pair) for pair in doc["solutions"]]
    return out
