# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT
"""Types used across multiple modules."""

from typing import Any
from typing import Tuple
from typing import Sequence

import numpy as np

# from typing import TypeAlias
TypeAlias = Any

Seed: TypeAlias = int

SlotIdx : TypeAlias = int
PilotIdx: TypeAlias = int
UserIdx : TypeAlias = int

# (slot, pilot)
Block : TypeAlias = Tuple[SlotIdx, PilotIdx]
Blocks: TypeAlias = Sequence[Block]

# numpy arrays, shapes are noted where the alias is used
ComplexVector: TypeAlias = np.ndarray
ComplexMatrix: TypeAlias = np.ndarray
RealVector   : TypeAlias = np.ndarray
BitVector    : TypeAlias = np.ndarray

Hertz  : TypeAlias = float
Seconds: TypeAlias = float
