"""Binary tensor container (RADT) and JSON-lines dataset manifests.

The RADT file layout is fixed little-endian:

    magic   4 bytes  b"RADT"
    version u32
    ndim    u32      (1..4)
    dims    ndim*u32 (each >= 1)
    dtype   u32      (0 = IEEE-754 binary32)
    payload prod(dims)*4 bytes, row-major float32

Round trips are bit-exact, so feature stores can be compared byte-wise.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"RADT"
VERSION = 1
DTYPE_F32 = 0


class FormatError(ValueError):
    """File is not a valid RADT container."""


class CorruptionError(ValueError):
    """Container header and payload disagree."""


class ManifestError(ValueError):
    """Dataset manifest is missing or inconsistent."""


def write_tensor(t: np.ndarray, path: str | Path) -> None:
    """Serialize a float tensor to a RADT file.

    Values are cast to float32; non-finite values are rejected.
    """
    t = np.asarray(t, dtype=np.float32)
    if t.ndim < 1 or t.ndim > 4:
        raise ValueError(f"ndim must be 1..4, got {t.ndim}")
    if any(d < 1 for d in t.shape):
        raise ValueError(f"all dims must be >= 1, got {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor contains non-finite values")
    header = struct.pack(
        f"<4sII{t.ndim}II", MAGIC, VERSION, t.ndim, *t.shape, DTYPE_F32
    )
    payload = np.ascontiguousarray(t).astype("<f4", copy=False).tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_tensor(path: str | Path) -> np.ndarray:
    """Read a RADT file back into a float32 array."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 12 or raw[:4] != MAGIC:
        raise FormatError(f"{path}: missing RADT magic")
    version, ndim = struct.unpack_from("<II", raw, 4)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if ndim < 1 or ndim > 4:
        raise FormatError(f"{path}: invalid ndim {ndim}")
    offset = 12
    if len(raw) < offset + 4 * ndim + 4:
        raise CorruptionError(f"{path}: truncated header")
    dims = struct.unpack_from(f"<{ndim}I", raw, offset)
    offset += 4 * ndim
    (dtype_code,) = struct.unpack_from("<I", raw, offset)
    offset += 4
    if dtype_code != DTYPE_F32:
        raise FormatError(f"{path}: unknown dtype code {dtype_code}")
    if any(d < 1 for d in dims):
        raise CorruptionError(f"{path}: zero-sized dim in {dims}")
    count = int(np.prod(dims))
    expected = count * 4
    if len(raw) - offset != expected:
        raise CorruptionError(
            f"{path}: payload is {len(raw) - offset} bytes, expected {expected}"
        )
    data = np.frombuffer(raw, dtype="<f4", count=count, offset=offset)
    return data.reshape(dims).astype(np.float32, copy=True)


@dataclass
class ManifestRecord:
    paths: list[str]
    label: str
    split: str
    fold: int | None = None


@dataclass
class DatasetManifest:
    records: list[ManifestRecord]
    block_count: int
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.labels:
            self.labels = sorted({r.label for r in self.records})


def read_manifest(path: str | Path, check_paths: bool = True) -> DatasetManifest:
    """Parse a JSON-lines manifest.

    Each line: {"path": str-or-list, "label": str, "split": str, "fold": int?}.
    `path` may be a single file or the list of per-block files for one image.
    All records must reference the same number of block files.
    """
    base = Path(path).parent
    records: list[ManifestRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            for key in ("path", "label", "split"):
                if key not in obj:
                    raise ManifestError(f"{path}:{lineno}: missing field '{key}'")
            raw_paths = obj["path"]
            if isinstance(raw_paths, str):
                raw_paths = [raw_paths]
            if not raw_paths:
                raise ManifestError(f"{path}:{lineno}: record has no block files")
            resolved = [
                str(p) if Path(p).is_absolute() else str(base / p) for p in raw_paths
            ]
            records.append(
                ManifestRecord(
                    paths=resolved,
                    label=str(obj["label"]),
                    split=str(obj["split"]),
                    fold=obj.get("fold"),
                )
            )
    if not records:
        raise ManifestError(f"{path}: manifest has no records")
    n = len(records[0].paths)
    for i, rec in enumerate(records):
        if len(rec.paths) != n:
            raise ManifestError(
                f"{path}: record {i} has {len(rec.paths)} blocks, expected {n}"
            )
        if check_paths:
            for p in rec.paths:
                if not Path(p).exists():
                    raise ManifestError(f"{path}: referenced file missing: {p}")
    return DatasetManifest(records=records, block_count=n)
