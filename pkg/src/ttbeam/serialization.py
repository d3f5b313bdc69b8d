"""Binary and JSON persistence for tensor trains.

Binary layout (little-endian throughout)::

    magic   4 bytes   b"TTV1"
    d       u32       number of modes
    shape   d  x u64  mode sizes
    ranks   d+1 x u64 rank chain (first and last must be 1)
    cores   d blocks of r_{i-1} * n_i * r_i IEEE-754 doubles, row-major
            (leading rank outermost, trailing rank innermost)

The JSON sidecar carries the same fields with cores as nested lists; it
is meant for debugging, not for bulk storage.  Both round-trips are
exact: binary is bit-exact, JSON serializes doubles via ``repr`` which
parses back to the identical value.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .errors import RankChainError
from .tensor import TTTensor

MAGIC = b"TTV1"


def serialize(t: TTTensor) -> bytes:
    """Encode a train into the binary format described above."""
    d = t.ndim
    parts = [MAGIC, struct.pack("<I", d)]
    parts.append(struct.pack(f"<{d}Q", *t.shape))
    parts.append(struct.pack(f"<{d + 1}Q", *t.ranks))
    for core in t.cores:
        parts.append(np.ascontiguousarray(core, dtype="<f8").tobytes())
    return b"".join(parts)


def deserialize(data: bytes) -> TTTensor:
    """Decode the binary format; validates the header and the rank chain.

    Raises
    ------
    ValueError
        On a bad magic number, truncated payload, or trailing bytes.
    RankChainError
        On an invalid rank chain; the message names the offending core.
    """
    if len(data) < 8:
        raise ValueError("truncated header: file shorter than magic + mode count")
    if data[:4] != MAGIC:
        raise ValueError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    (d,) = struct.unpack_from("<I", data, 4)
    if d < 1:
        raise ValueError("mode count must be >= 1")
    offset = 8
    need = (2 * d + 1) * 8
    if len(data) < offset + need:
        raise ValueError("truncated header: shape/rank table incomplete")
    shape = struct.unpack_from(f"<{d}Q", data, offset)
    offset += 8 * d
    ranks = struct.unpack_from(f"<{d + 1}Q", data, offset)
    offset += 8 * (d + 1)
    if min(shape) < 1:
        raise ValueError(f"mode sizes must be >= 1, got {shape}")
    if ranks[0] != 1 or ranks[d] != 1:
        raise RankChainError(
            f"boundary ranks must be 1, got r_0={ranks[0]}, r_d={ranks[d]}"
        )
    if min(ranks) < 1:
        bad = int(np.argmin(ranks))
        raise RankChainError(f"rank r_{bad} must be >= 1, got {ranks[bad]}")
    cores = []
    for i in range(d):
        count = ranks[i] * shape[i] * ranks[i + 1]
        nbytes = count * 8
        if len(data) < offset + nbytes:
            raise ValueError(f"truncated payload in core {i + 1}")
        flat = np.frombuffer(data, dtype="<f8", count=count, offset=offset)
        cores.append(flat.reshape(ranks[i], shape[i], ranks[i + 1]).copy())
        offset += nbytes
    if offset != len(data):
        raise ValueError(f"{len(data) - offset} trailing bytes after last core")
    return TTTensor(cores, copy=False)


def save(t: TTTensor, path) -> None:
    """Write the binary encoding to ``path``."""
    with open(path, "wb") as fh:
        fh.write(serialize(t))


def load(path) -> TTTensor:
    """Read a train from a binary file written by :func:`save`."""
    with open(path, "rb") as fh:
        return deserialize(fh.read())


def to_json(t: TTTensor) -> str:
    """JSON sidecar encoding (exact double round-trip via ``repr``)."""
    doc = {
        "format": "TTV1",
        "d": t.ndim,
        "shape": list(t.shape),
        "ranks": list(t.ranks),
        "cores": [core.tolist() for core in t.cores],
    }
    return json.dumps(doc, sort_keys=True)


def from_json(text: str) -> TTTensor:
    """Decode the JSON sidecar; validation mirrors :func:`deserialize`."""
    doc = json.loads(text)
    if doc.get("format") != "TTV1":
        raise ValueError(f"bad format tag {doc.get('format')!r}")
    d = int(doc["d"])
    shape = [int(n) for n in doc["shape"]]
    ranks = [int(r) for r in doc["ranks"]]
    if len(shape) != d or len(ranks) != d + 1:
        raise ValueError("shape/rank table lengths do not match mode count")
    if ranks[0] != 1 or ranks[-1] != 1:
        raise RankChainError(
            f"boundary ranks must be 1, got r_0={ranks[0]}, r_d={ranks[-1]}"
        )
    cores = []
    for i, block in enumerate(doc["cores"]):
        arr = np.asarray(block, dtype=np.float64)
        if arr.shape != (ranks[i], shape[i], ranks[i + 1]):
            raise RankChainError(
                f"core {i + 1} has shape {arr.shape}, header says "
                f"{(ranks[i], shape[i], ranks[i + 1])}"
            )
        cores.append(arr)
    if len(cores) != d:
        raise ValueError(f"expected {d} cores, found {len(cores)}")
    return TTTensor(cores, copy=False)
