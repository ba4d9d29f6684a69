"""Batched 4-D feature-map container with shape and value discipline.

A FeatureMap is an immutable (B, C, H, W) array: B instances, C channels,
each channel an H x W spatial plane stored row-major.  Values are 32- or
64-bit floats and are guaranteed finite; NaN/Inf are rejected at
construction so downstream numerics never have to re-check.
"""

from dataclasses import dataclass

import numpy as np

SUPPORTED_DTYPES = (np.float32, np.float64)


@dataclass(frozen=True)
class FeatureMap:
    """Immutable 4-D feature-map batch.

    The backing array is made read-only at construction; views handed out
    by :func:`channel_plane` inherit that flag.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = self.data
        if not isinstance(arr, np.ndarray) or arr.ndim != 4:
            raise ValueError("feature map data must be a 4-D (B, C, H, W) array")
        if arr.dtype.type not in SUPPORTED_DTYPES:
            raise ValueError(
                f"unsupported dtype {arr.dtype}; expected float32 or float64"
            )
        if any(d < 1 for d in arr.shape):
            raise ValueError(f"all dimensions must be >= 1, got {arr.shape}")
        if not arr.flags.c_contiguous:
            arr = np.ascontiguousarray(arr)
            object.__setattr__(self, "data", arr)
        bad = ~np.isfinite(arr)
        if bad.any():
            idx = int(np.flatnonzero(bad.reshape(-1))[0])
            raise ValueError(f"non-finite value in feature map at flat index {idx}")
        arr.setflags(write=False)

    @property
    def dims(self):
        return self.data.shape

    @property
    def B(self):
        return self.data.shape[0]

    @property
    def C(self):
        return self.data.shape[1]

    @property
    def H(self):
        return self.data.shape[2]

    @property
    def W(self):
        return self.data.shape[3]

    @property
    def dtype(self):
        return self.data.dtype


def make_feature_map(dims, data, dtype=None):
    """Build a FeatureMap from dims (B, C, H, W) and a flat scalar buffer.

    `data` is laid out in (b, c, h, w) row-major order.  The element type
    is `dtype` if given, else the buffer's own float32/float64 type, else
    float64.  Length mismatches and non-finite values are errors (the
    offending flat index is reported).
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) != 4:
        raise ValueError(f"dims must have 4 entries (B, C, H, W), got {dims}")
    if any(d < 1 for d in dims):
        raise ValueError(f"all dimensions must be >= 1, got {dims}")
    arr = np.asarray(data)
    if dtype is None:
        dtype = arr.dtype.type if arr.dtype.type in SUPPORTED_DTYPES else np.float64
    elif np.dtype(dtype).type not in SUPPORTED_DTYPES:
        raise ValueError(f"unsupported dtype {dtype}; expected float32 or float64")
    total = dims[0] * dims[1] * dims[2] * dims[3]
    if arr.size != total:
        raise ValueError(
            f"dimension mismatch: dims {dims} need {total} scalars, got {arr.size}"
        )
    arr = arr.reshape(-1).astype(dtype, copy=True).reshape(dims)
    return FeatureMap(arr)


def channel_plane(fm, b, c):
    """Read-only 1-D view of instance b, channel c in (h, w) row-major order."""
    if not 0 <= b < fm.B:
        raise IndexError(f"instance index {b} out of range for B={fm.B}")
    if not 0 <= c < fm.C:
        raise IndexError(f"channel index {c} out of range for C={fm.C}")
    return fm.data[b, c].reshape(-1)
