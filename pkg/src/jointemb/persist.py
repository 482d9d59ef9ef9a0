"""Binary artifact container shared by all persisted models.

Layout: 4 magic bytes, little-endian uint32 version, uint64 header
length, a UTF-8 JSON header (kind, metadata, array manifest), then each
array's raw little-endian C-order bytes in manifest order. Writing the
same payload twice produces identical bytes, and a round trip preserves
every array bit-exactly.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .errors import ArtifactFormatError

MAGIC = b"JEMB"
VERSION = 1

# dtypes are pinned to explicit little-endian codes so files are portable
_ALLOWED_DTYPES = {"<f4", "<f8", "<i4", "<i8", "<u8"}


def _canonical_dtype(arr: np.ndarray) -> str:
    code = arr.dtype.newbyteorder("<").str
    if code not in _ALLOWED_DTYPES:
        raise ArtifactFormatError(f"dtype {arr.dtype} not supported by the container")
    return code


def write_artifact(path, kind: str, meta: dict, arrays: dict[str, np.ndarray]) -> None:
    manifest = []
    blobs = []
    for name, arr in arrays.items():
        code = _canonical_dtype(arr)
        arr = np.ascontiguousarray(arr, dtype=np.dtype(code))
        manifest.append({"name": name, "dtype": code, "shape": list(arr.shape)})
        blobs.append(arr.tobytes(order="C"))
    header = json.dumps(
        {"kind": kind, "meta": meta, "arrays": manifest},
        sort_keys=True, separators=(",", ":"), ensure_ascii=False,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IQ", VERSION, len(header)))
        fh.write(header)
        for blob in blobs:
            fh.write(blob)


def read_artifact(path, expect_kind: str | None = None) -> tuple[dict, dict[str, np.ndarray]]:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 16 or raw[:4] != MAGIC:
        raise ArtifactFormatError(f"{path}: not a recognized artifact (bad magic)")
    version, header_len = struct.unpack("<IQ", raw[4:16])
    if version != VERSION:
        raise ArtifactFormatError(f"{path}: unsupported artifact version {version}")
    if len(raw) < 16 + header_len:
        raise ArtifactFormatError(f"{path}: truncated header")
    try:
        header = json.loads(raw[16:16 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ArtifactFormatError(f"{path}: corrupt header ({exc})") from exc
    kind = header.get("kind")
    if expect_kind is not None and kind != expect_kind:
        raise ArtifactFormatError(
            f"{path}: artifact kind is {kind!r}, expected {expect_kind!r}"
        )
    arrays = {}
    pos = 16 + header_len
    for entry in header["arrays"]:
        dtype = np.dtype(entry["dtype"])
        shape = tuple(entry["shape"])
        nbytes = dtype.itemsize * int(np.prod(shape, dtype=np.int64))
        end = pos + nbytes
        if end > len(raw):
            raise ArtifactFormatError(f"{path}: truncated array {entry['name']!r}")
        arr = np.frombuffer(raw[pos:end], dtype=dtype).reshape(shape).copy()
        arrays[entry["name"]] = arr
        pos = end
    return header["meta"], arrays
