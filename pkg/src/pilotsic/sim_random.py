# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT
"""Seed derivation and random streams.

All randomness flows through explicitly passed numpy Generators.
There is no module level random state.
"""

import struct
import hashlib
from typing import NamedTuple

import numpy as np

from . import common_types as ct

SEED_MASK = 2 ** 64 - 1


def sha256digest(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def derive_seed(master_seed: ct.Seed, index: int) -> ct.Seed:
    """Stable 64 bit seed for item `index` of a run.

    Adding items never changes the seeds of earlier ones.

    >>> derive_seed(7, 0) == derive_seed(7, 0)
    True
    >>> derive_seed(7, 0) == derive_seed(7, 1)
    False
    """
    if index < 0:
        raise ValueError(f"Invalid index: {index}")
    data   = struct.pack("<QQ", master_seed & SEED_MASK, index & SEED_MASK)
    digest = sha256digest(b"pilotsic-trial" + data)
    seed: int = struct.unpack("<Q", digest[:8])[0]
    return seed


def init_rng(seed: ct.Seed) -> np.random.Generator:
    return np.random.default_rng(seed)


class TrialStreams(NamedTuple):
    """Independent streams, one per stage of a simulated frame.

    Using separate streams means that e.g. switching the channel
    backend does not change the drawn activity schedule.
    """

    activity: np.random.Generator
    messages: np.random.Generator
    channels: np.random.Generator
    noise   : np.random.Generator


def init_trial_streams(seed: ct.Seed) -> TrialStreams:
    seed_seq = np.random.SeedSequence(seed)
    children = seed_seq.spawn(len(TrialStreams._fields))
    return TrialStreams(*(np.random.default_rng(child) for child in children))


def complex_normal(rng: np.random.Generator, shape: tuple, variance: float = 1.0) -> np.ndarray:
    """Circularly symmetric complex gaussian samples."""
    if variance == 0:
        return np.zeros(shape, dtype=np.complex128)
    scale = np.sqrt(variance / 2)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
