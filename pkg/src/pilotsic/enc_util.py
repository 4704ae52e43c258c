# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT

"""Binary encoding of channel arrays for regression fixtures.

Layout: header of three little-endian uint32 (beta, K, M) followed by
beta * K * M complex64 values (little-endian, row-major).
"""

import struct
from typing import Tuple

import numpy as np

HEADER_FMT = "<III"
HEADER_LEN = struct.calcsize(HEADER_FMT)

SAMPLE_DTYPE = np.dtype("<c8")

MAX_DIM = 2 ** 32 - 1


def pack_header(beta: int, K: int, M: int) -> bytes:
    for name, dim in (("beta", beta), ("K", K), ("M", M)):
        if not 0 <= dim <= MAX_DIM:
            raise ValueError(f"Invalid dimension {name}={dim} for uint32 header")
    return struct.pack(HEADER_FMT, beta, K, M)


def unpack_header(data: bytes) -> Tuple[int, int, int]:
    if len(data) < HEADER_LEN:
        raise ValueError(f"Invalid data, too short for header: {len(data)} < {HEADER_LEN}")
    beta, K, M = struct.unpack(HEADER_FMT, data[:HEADER_LEN])
    return (beta, K, M)


def channels2bytes(h: np.ndarray) -> bytes:
    """Encode an array of shape (beta, K, M).

    Values are stored as complex64, so precision drops to float32.
    """
    if h.ndim != 3:
        raise ValueError(f"Invalid channel array with ndim={h.ndim}, expected 3")
    beta, K, M = h.shape
    body = np.ascontiguousarray(h, dtype=SAMPLE_DTYPE).tobytes(order="C")
    return pack_header(beta, K, M) + body


def bytes2channels(data: bytes) -> np.ndarray:
    beta, K, M = unpack_header(data)
    body       = data[HEADER_LEN:]
    expected   = beta * K * M * SAMPLE_DTYPE.itemsize
    if len(body) != expected:
        errmsg = f"Invalid data length {len(body)} for header (beta={beta}, K={K}, M={M})"
        raise ValueError(errmsg)
    samples = np.frombuffer(body, dtype=SAMPLE_DTYPE)
    return samples.reshape((beta, K, M)).astype(np.complex128)
