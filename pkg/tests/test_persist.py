"""Binary artifact container: layout, round trips, corruption handling."""

import numpy as np
import pytest

from jointemb.errors import ArtifactFormatError
from jointemb.persist import MAGIC, read_artifact, write_artifact


def _sample_arrays():
    rng = np.random.default_rng(4)
    return {
        "m": rng.standard_normal((3, 5)).astype(np.float32),
        "v": np.arange(7, dtype=np.int64),
    }


def test_roundtrip_values_and_meta(tmp_path):
    p = tmp_path / "a.bin"
    arrays = _sample_arrays()
    write_artifact(p, "demo", {"note": "x", "n": 3}, arrays)
    meta, out = read_artifact(p, expect_kind="demo")
    assert meta == {"note": "x", "n": 3}
    for name in arrays:
        np.testing.assert_array_equal(out[name], arrays[name])
        assert out[name].dtype == arrays[name].dtype


def test_write_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    write_artifact(a, "demo", {"k": 1}, _sample_arrays())
    write_artifact(b, "demo", {"k": 1}, _sample_arrays())
    assert a.read_bytes() == b.read_bytes()


def test_bad_magic_rejected(tmp_path):
    p = tmp_path / "a.bin"
    write_artifact(p, "demo", {}, _sample_arrays())
    raw = bytearray(p.read_bytes())
    raw[:4] = b"NOPE"
    p.write_bytes(bytes(raw))
    with pytest.raises(ArtifactFormatError):
        read_artifact(p)


def test_truncated_payload_rejected(tmp_path):
    p = tmp_path / "a.bin"
    write_artifact(p, "demo", {}, _sample_arrays())
    raw = p.read_bytes()
    p.write_bytes(raw[: len(raw) - 9])
    with pytest.raises(ArtifactFormatError):
        read_artifact(p)


def test_kind_mismatch_rejected(tmp_path):
    p = tmp_path / "a.bin"
    write_artifact(p, "demo", {}, _sample_arrays())
    with pytest.raises(ArtifactFormatError, match="demo"):
        read_artifact(p, expect_kind="other")


def test_unknown_version_rejected(tmp_path):
    p = tmp_path / "a.bin"
    write_artifact(p, "demo", {}, _sample_arrays())
    raw = bytearray(p.read_bytes())
    raw[len(MAGIC)] = 250  # little-endian version word
    p.write_bytes(bytes(raw))
    with pytest.raises(ArtifactFormatError):
        read_artifact(p)


def test_disallowed_dtype_rejected(tmp_path):
    with pytest.raises(ArtifactFormatError):
        write_artifact(tmp_path / "a.bin", "demo", {},
                       {"bad": np.zeros(3, dtype=np.complex128)})
