# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT

"""Pilot sequences, user messages and the random activity schedule.

An ActivitySchedule holds for every slot n and user k the index of the
pilot the user applies, or INACTIVE. The sets of users per (slot, pilot)
form the bipartite collision graph which the decoder operates on.
"""

import logging
from typing import List
from typing import Tuple
from typing import Sequence
from typing import NamedTuple

import numpy as np

from . import parameters
from . import common_types as ct

logger = logging.getLogger(__name__)

INACTIVE = -1


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def make_pilot_matrix(tau: int) -> ct.ComplexMatrix:
    """Orthogonal pilots as scaled discrete Fourier columns.

    Column j is pilot s_j, the Gram matrix is tau * I.

    >>> make_pilot_matrix(1)
    array([[1.+0.j]])
    """
    if tau < 1:
        raise ValueError(f"Invalid tau={tau}, must be >= 1")

    idx    = np.arange(tau)
    phases = -2j * np.pi * np.outer(idx, idx) / tau
    pilots = np.exp(phases)
    # exp(0) is exact, keep the first row/column free of rounding noise
    pilots[0, :] = 1
    pilots[:, 0] = 1
    return _frozen(pilots)


class UserMessage(NamedTuple):

    bits   : ct.BitVector    # uint8, length L
    symbols: ct.RealVector   # +1/-1, length L


def bits2symbols(bits: ct.BitVector) -> ct.RealVector:
    """Antipodal mapping, bit 0 -> +1, bit 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def symbols2bits(symbols: np.ndarray) -> ct.BitVector:
    """Hard decision on the real part, ties map to bit 0."""
    return (np.real(symbols) < 0).astype(np.uint8)


def init_message(bits: Sequence[int]) -> UserMessage:
    bits_arr = np.asarray(bits, dtype=np.uint8)
    if not np.all(bits_arr <= 1):
        raise ValueError("Message bits must be 0 or 1")
    return UserMessage(_frozen(bits_arr), _frozen(bits2symbols(bits_arr)))


def draw_messages(config: parameters.SystemConfig, rng: np.random.Generator) -> List[UserMessage]:
    """One message per user per frame, repeated in every active slot."""
    all_bits = rng.integers(0, 2, size=(config.K, config.L), dtype=np.uint8)
    return [init_message(bits) for bits in all_bits]


class ActivitySchedule(NamedTuple):

    choice: np.ndarray  # int, shape (beta, K), values in {INACTIVE, 0..tau-1}
    tau   : int

    @property
    def beta(self) -> int:
        return int(self.choice.shape[0])

    @property
    def num_users(self) -> int:
        return int(self.choice.shape[1])

    def members(self, n: ct.SlotIdx, j: ct.PilotIdx) -> Tuple[ct.UserIdx, ...]:
        """Users in the resource block (n, j), i.e. the set A_n^j."""
        _check_block(self, n, j)
        return tuple(int(k) for k in np.flatnonzero(self.choice[n] == j))

    def active_users(self, n: ct.SlotIdx) -> Tuple[ct.UserIdx, ...]:
        return tuple(int(k) for k in np.flatnonzero(self.choice[n] != INACTIVE))

    def pattern(self, k: ct.UserIdx) -> List[ct.Block]:
        """The (slot, pilot) blocks occupied by user k, in slot order."""
        slots = np.flatnonzero(self.choice[:, k] != INACTIVE)
        return [(int(n), int(self.choice[n, k])) for n in slots]

    def degrees(self) -> np.ndarray:
        """Block degrees |A_n^j| as an array of shape (beta, tau)."""
        degrees = np.zeros((self.beta, self.tau), dtype=np.int64)
        for n in range(self.beta):
            row    = self.choice[n]
            active = row[row != INACTIVE]
            degrees[n] = np.bincount(active, minlength=self.tau)
        return degrees

    def ever_active(self) -> np.ndarray:
        return np.any(self.choice != INACTIVE, axis=0)


def _check_block(schedule: ActivitySchedule, n: int, j: int) -> None:
    if not 0 <= n < schedule.beta:
        raise ValueError(f"Invalid slot n={n}, must be in [0, {schedule.beta})")
    if not 0 <= j < schedule.tau:
        raise ValueError(f"Invalid pilot j={j}, must be in [0, {schedule.tau})")


def init_schedule(choice: Sequence[Sequence[int]], tau: int) -> ActivitySchedule:
    """Schedule from explicit per slot pilot choices (INACTIVE for idle users)."""
    choice_arr = np.array(choice, dtype=np.int64, ndmin=2)
    if choice_arr.ndim != 2:
        raise ValueError(f"Invalid schedule shape {choice_arr.shape}")
    if tau < 1:
        raise ValueError(f"Invalid tau={tau}, must be >= 1")
    if np.any((choice_arr < INACTIVE) | (choice_arr >= tau)):
        raise ValueError(f"Invalid pilot index in schedule, must be INACTIVE or in [0, {tau})")
    return ActivitySchedule(_frozen(choice_arr), tau)


def draw_activity(config: parameters.SystemConfig, rng: np.random.Generator) -> ActivitySchedule:
    """Each user is active in each slot with probability p_a.

    An active user picks one of the tau pilots uniformly at random.
    """
    shape  = (config.beta, config.K)
    active = rng.random(shape) < config.p_a
    pilots = rng.integers(0, config.tau, size=shape)
    choice = np.where(active, pilots, INACTIVE).astype(np.int64)

    logger.debug(f"activity: {int(active.sum())} transmissions in {config.beta} slots")
    return ActivitySchedule(_frozen(choice), config.tau)


def resource_degree(schedule: ActivitySchedule, n: ct.SlotIdx, j: ct.PilotIdx) -> int:
    _check_block(schedule, n, j)
    return int(np.count_nonzero(schedule.choice[n] == j))
