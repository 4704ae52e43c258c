# pylint: disable=wildcard-import
# pylint: disable=unused-wildcard-import

import struct

import numpy as np
import pytest

from pilotsic.enc_util import *


def test_header():
    header = pack_header(24, 100, 400)
    assert len(header) == 12
    assert header == b"\x18\x00\x00\x00" + b"\x64\x00\x00\x00" + b"\x90\x01\x00\x00"
    assert unpack_header(header) == (24, 100, 400)


def test_header_invalid():
    try:
        pack_header(2 ** 32, 1, 1)
        assert False, "expected ValueError"
    except ValueError as err:
        assert "beta" in str(err)

    try:
        unpack_header(b"\x00" * 11)
        assert False, "expected ValueError"
    except ValueError:
        pass


def test_channels2bytes_layout():
    h    = np.array([[[1 + 2j, 3 - 4j]]])
    data = channels2bytes(h)
    assert len(data) == HEADER_LEN + 2 * 8
    body = struct.unpack("<4f", data[HEADER_LEN:])
    assert body == (1.0, 2.0, 3.0, -4.0)


def test_bytes2channels():
    h    = np.arange(2 * 3 * 4).reshape(2, 3, 4) * (0.5 - 0.25j)
    data = channels2bytes(h)
    assert unpack_header(data) == (2, 3, 4)

    decoded = bytes2channels(data)
    assert decoded.dtype == np.complex128
    assert decoded.shape == (2, 3, 4)
    assert np.array_equal(decoded, h)


def test_empty_frame():
    h = np.zeros((0, 5, 3), dtype=np.complex128)
    assert bytes2channels(channels2bytes(h)).shape == (0, 5, 3)


@pytest.mark.parametrize("trim", [1, 8])
def test_bytes2channels_truncated(trim):
    data = channels2bytes(np.ones((2, 2, 2), dtype=np.complex128))
    try:
        bytes2channels(data[:-trim])
        assert False, "expected ValueError"
    except ValueError as err:
        assert "length" in str(err)


def test_channels2bytes_invalid_ndim():
    try:
        channels2bytes(np.ones((2, 2)))
        assert False, "expected ValueError"
    except ValueError:
        pass
