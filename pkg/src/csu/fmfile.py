"""Binary feature-map container format.

Layout (all multi-byte fields little-endian):

    bytes 0-7    magic, ASCII "CSUFMAP1"
    byte  8      dtype code: 0 = float32, 1 = float64
    bytes 9-11   reserved, written as zero
    bytes 12-27  B, C, H, W as four uint32
    bytes 28-    payload: B*C*H*W scalars in (b, c, h, w) row-major order

A (1, 1, 1, 1) float32 map is exactly 32 bytes.  Round-trips are bit-exact
for both element types.
"""

import struct

import numpy as np

from .featuremap import FeatureMap, make_feature_map

MAGIC = b"CSUFMAP1"
HEADER = struct.Struct("<8sB3x4I")
_CODE_TO_DTYPE = {0: np.dtype("<f4"), 1: np.dtype("<f8")}
_KIND_TO_CODE = {np.float32: 0, np.float64: 1}


def write_feature_map(path, fm):
    """Serialize a FeatureMap; returns the byte count written."""
    code = _KIND_TO_CODE[fm.dtype.type]
    header = HEADER.pack(MAGIC, code, *fm.dims)
    payload = np.ascontiguousarray(fm.data, dtype=_CODE_TO_DTYPE[code]).tobytes()
    with open(path, "wb") as f:
        f.write(header)
        f.write(payload)
    return len(header) + len(payload)


def read_feature_map(path):
    """Deserialize a FeatureMap, validating magic, dtype code, and sizes."""
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < HEADER.size:
        raise ValueError(
            f"truncated header: {len(raw)} bytes, need {HEADER.size}"
        )
    magic, code, b, c, h, w = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if code not in _CODE_TO_DTYPE:
        raise ValueError(f"bad dtype byte {code}, expected 0 (f32) or 1 (f64)")
    dtype = _CODE_TO_DTYPE[code]
    expected = b * c * h * w * dtype.itemsize
    actual = len(raw) - HEADER.size
    if actual < expected:
        raise ValueError(f"truncated payload: {actual} bytes, need {expected}")
    if actual > expected:
        raise ValueError(f"oversized payload: {actual} bytes, expected {expected}")
    flat = np.frombuffer(raw, dtype=dtype, offset=HEADER.size)
    return make_feature_map((b, c, h, w), flat, dtype=dtype.type)
