"""Binary spectral cache: eigenvalues + eigenvector matrix per content key.

Payloads are little-endian fixed-width blocks behind a magic header and a
version byte; writes are atomic (temp file + rename) and any corrupted or
version-mismatched entry reads as a miss.
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile
import warnings
from pathlib import Path
from typing import Optional

import numpy as np

from .spectra import SpectralData

MAGIC = b"BZSPECC"
FORMAT_VERSION = 1
MODEL_VERSION = 1  # bump when basis conventions or assembly formulas change


def content_key(observable_label: str, k: int, path: str,
                radial_order: int, angular_order: int) -> str:
    blob = "|".join(
        [
            str(MODEL_VERSION),
            observable_label,
            str(k),
            path,
            str(radial_order),
            str(angular_order),
        ]
    )
    return hashlib.sha256(blob.encode()).hexdigest()


def entry_path(cache_dir: Path, key: str) -> Path:
    return Path(cache_dir) / f"{key}.spec"


def store(cache_dir: Path, key: str, S: SpectralData) -> Path:
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    target = entry_path(cache_dir, key)
    vals = np.ascontiguousarray(S.eigenvalues, dtype="<f8")
    vecs = np.ascontiguousarray(S.vectors, dtype="<c16")
    header = MAGIC + struct.pack("<BII", FORMAT_VERSION, S.k, S.n)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(vals.tobytes())
            fh.write(vecs.tobytes())
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def load(cache_dir: Path, key: str) -> Optional[SpectralData]:
    """Cached decomposition, or None on miss (including any corruption)."""
    target = entry_path(Path(cache_dir), key)
    if not target.is_file():
        return None
    try:
        raw = target.read_bytes()
        if raw[: len(MAGIC)] != MAGIC:
            raise ValueError("bad magic")
        version, k, n = struct.unpack_from("<BII", raw, len(MAGIC))
        if version != FORMAT_VERSION or n != k + 1:
            raise ValueError("format mismatch")
        off = len(MAGIC) + struct.calcsize("<BII")
        need = off + 8 * n + 16 * n * n
        if len(raw) != need:
            raise ValueError("truncated payload")
        vals = np.frombuffer(raw, dtype="<f8", count=n, offset=off).copy()
        vecs = (
            np.frombuffer(raw, dtype="<c16", count=n * n, offset=off + 8 * n)
            .reshape(n, n)
            .copy()
        )
        return SpectralData(k, vals, vecs)
    except Exception as exc:
        warnings.warn(f"ignoring corrupted cache entry {target.name}: {exc}")
        return None
