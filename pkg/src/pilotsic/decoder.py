# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT

"""Successive interference cancellation over the collision graph.

The SIC decoder repeatedly picks a resource block with exactly one
unresolved user, estimates that user's channel norm from the pilot
residual g and its message from the data residual f, and cancels the
user from every block it occupies. The block memberships are genie
knowledge: a real system learns a user's pilot pattern from a seed
embedded in its (decoded) message.

The ALOHA decoder only decodes blocks with a single user and does not
cancel anything.
"""

import enum
import logging
from typing import Any
from typing import Set
from typing import Dict
from typing import List
from typing import Tuple
from typing import FrozenSet
from typing import Optional
from typing import Sequence
from typing import NamedTuple

import numpy as np

from . import phy
from . import model
from . import parameters
from . import common_types as ct

logger = logging.getLogger(__name__)


class UserStatus(enum.Enum):

    NEVER_ACTIVE = "never_active"
    UNRESOLVED   = "unresolved"
    DECODED      = "decoded"


class UserOutcome(NamedTuple):

    status : UserStatus
    correct: Optional[bool]  # only set for DECODED


class ResolvedUser(NamedTuple):

    norm_estimate   : float
    soft_symbols    : ct.ComplexVector
    hard_bits       : ct.BitVector
    resolving_block : ct.Block


class DecodingReport(NamedTuple):

    outcomes       : Tuple[UserOutcome, ...]
    decoded        : int
    correct        : int
    resource_blocks: int

    @property
    def throughput(self) -> float:
        return self.decoded / self.resource_blocks

    @property
    def goodput(self) -> float:
        return self.correct / self.resource_blocks

    @property
    def bler(self) -> float:
        if self.decoded == 0:
            return 0.0
        return (self.decoded - self.correct) / self.decoded

    @property
    def decoded_users(self) -> FrozenSet[ct.UserIdx]:
        return frozenset(
            k for k, outcome in enumerate(self.outcomes) if outcome.status == UserStatus.DECODED
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'status'         : [outcome.status.value for outcome in self.outcomes],
            'correct_flags'  : [outcome.correct for outcome in self.outcomes],
            'decoded'        : self.decoded,
            'correct'        : self.correct,
            'resource_blocks': self.resource_blocks,
            'throughput'     : self.throughput,
            'goodput'        : self.goodput,
            'bler'           : self.bler,
        }


class ResidualState:
    """Residual filtered signals and the shrinking block memberships."""

    f_res   : np.ndarray
    g_res   : np.ndarray
    members : List[List[Set[ct.UserIdx]]]
    degree  : np.ndarray
    dead    : np.ndarray
    resolved: Dict[ct.UserIdx, ResolvedUser]

    def __init__(self, f: np.ndarray, g: np.ndarray, schedule: model.ActivitySchedule) -> None:
        self.f_res = np.array(f, dtype=np.complex128)
        self.g_res = np.array(g, dtype=np.complex128)
        self.members = [
            [set(schedule.members(n, j)) for j in range(schedule.tau)] for n in range(schedule.beta)
        ]
        self.degree   = schedule.degrees()
        self.dead     = np.zeros(self.degree.shape, dtype=bool)
        self.resolved = {}

    def next_singleton(self) -> Optional[ct.Block]:
        """First live block with exactly one member in (slot, pilot) order."""
        candidates = np.argwhere((self.degree == 1) & ~self.dead)
        if len(candidates) == 0:
            return None
        n, j = candidates[0]
        return (int(n), int(j))

    def remove(self, k: ct.UserIdx, block: ct.Block) -> None:
        n, j = block
        self.members[n][j].discard(k)
        self.degree[n, j] = len(self.members[n][j])

    def membership_count(self) -> int:
        return int(self.degree.sum())


def norm_estimate_from_g(g_res: ct.ComplexVector, s_j: ct.ComplexVector) -> float:
    """Re((s_j^H s_j)^-1 s_j^H g), the channel norm of a lone user."""
    return float((np.vdot(s_j, g_res) / np.vdot(s_j, s_j)).real)


def message_estimate(f_res: ct.ComplexVector, norm_est: float) -> Tuple[ct.ComplexVector, ct.BitVector]:
    if norm_est <= 0:
        raise ValueError(f"Invalid norm estimate {norm_est}, must be > 0")
    soft = np.asarray(f_res, dtype=np.complex128) / norm_est
    hard = model.symbols2bits(soft)
    return (soft, hard)


def _cancellation_signal(
    soft: ct.ComplexVector,
    hard: ct.BitVector,
    mode: parameters.CancellationMode,
) -> ct.ComplexVector:
    if mode == parameters.CancellationMode.SOFT:
        return soft
    else:
        return model.bits2symbols(hard).astype(np.complex128)


def _build_report(
    schedule: model.ActivitySchedule,
    resolved: Dict[ct.UserIdx, ResolvedUser],
    messages: Sequence[model.UserMessage],
) -> DecodingReport:
    ever_active = schedule.ever_active()
    outcomes: List[UserOutcome] = []
    num_correct = 0
    for k in range(schedule.num_users):
        if k in resolved:
            is_correct = bool(np.array_equal(resolved[k].hard_bits, messages[k].bits))
            num_correct += is_correct
            outcomes.append(UserOutcome(UserStatus.DECODED, is_correct))
        elif ever_active[k]:
            outcomes.append(UserOutcome(UserStatus.UNRESOLVED, None))
        else:
            outcomes.append(UserOutcome(UserStatus.NEVER_ACTIVE, None))

    return DecodingReport(
        outcomes=tuple(outcomes),
        decoded=len(resolved),
        correct=num_correct,
        resource_blocks=schedule.beta * schedule.tau,
    )


def _check_inputs(
    filtered: phy.FilteredFrame,
    schedule: model.ActivitySchedule,
    messages: Sequence[model.UserMessage],
) -> None:
    if filtered.f.shape[:2] != (schedule.beta, schedule.tau):
        errmsg = f"Mismatch of filtered frame {filtered.f.shape[:2]} and schedule {(schedule.beta, schedule.tau)}"
        raise ValueError(errmsg)
    if len(messages) != schedule.num_users:
        raise ValueError(f"Expected {schedule.num_users} messages, got {len(messages)}")


def run_peeling(
    filtered: phy.FilteredFrame,
    schedule: model.ActivitySchedule,
    pilots  : ct.ComplexMatrix,
    mode    : parameters.CancellationMode = parameters.CancellationMode.SOFT,
) -> ResidualState:
    """Peel singletons until none is left, returns the final residual state."""
    state    = ResidualState(filtered.f, filtered.g, schedule)
    max_iter = schedule.num_users + schedule.beta * schedule.tau

    for _ in range(max_iter):
        block = state.next_singleton()
        if block is None:
            break

        n, j = block
        (k,) = state.members[n][j]

        norm_est = norm_estimate_from_g(state.g_res[n, j], pilots[:, j])
        if norm_est <= 0:
            logger.debug(f"nonpositive norm {norm_est:.3g} for user {k} in block {block}")
            state.dead[n, j] = True
            continue

        soft, hard = message_estimate(state.f_res[n, j], norm_est)
        state.resolved[k] = ResolvedUser(norm_est, soft, hard, block)

        cancel = norm_est * _cancellation_signal(soft, hard, mode)
        for blk_n, blk_j in schedule.pattern(k):
            state.f_res[blk_n, blk_j] -= cancel
            state.g_res[blk_n, blk_j] -= norm_est * pilots[:, blk_j]
            state.remove(k, (blk_n, blk_j))
    else:
        # each iteration resolves a user or kills a block
        assert state.next_singleton() is None

    return state


def sic_decode(
    filtered: phy.FilteredFrame,
    schedule: model.ActivitySchedule,
    pilots  : ct.ComplexMatrix,
    config  : parameters.SystemConfig,
    messages: Sequence[model.UserMessage],
) -> DecodingReport:
    """Peeling decoder over the filtered frame."""
    _check_inputs(filtered, schedule, messages)
    state = run_peeling(filtered, schedule, pilots, config.cancellation_mode)
    logger.debug(f"sic: resolved {len(state.resolved)} users, {state.membership_count()} memberships left")
    return _build_report(schedule, state.resolved, messages)


def aloha_decode(
    filtered: phy.FilteredFrame,
    schedule: model.ActivitySchedule,
    pilots  : ct.ComplexMatrix,
    config  : parameters.SystemConfig,
    messages: Sequence[model.UserMessage],
) -> DecodingReport:
    """Decode collision free blocks only, each user counts once."""
    _check_inputs(filtered, schedule, messages)
    resolved: Dict[ct.UserIdx, ResolvedUser] = {}

    degrees = schedule.degrees()
    for n, j in np.argwhere(degrees == 1):
        block = (int(n), int(j))
        (k,) = schedule.members(*block)
        if k in resolved:
            continue

        norm_est = norm_estimate_from_g(filtered.g[n, j], pilots[:, j])
        if norm_est <= 0:
            continue

        soft, hard = message_estimate(filtered.f[n, j], norm_est)
        resolved[k] = ResolvedUser(norm_est, soft, hard, block)

    return _build_report(schedule, resolved, messages)


def peeling_oracle(schedule: model.ActivitySchedule) -> FrozenSet[ct.UserIdx]:
    """Users recoverable by peeling the bare collision graph.

    Works on the graph alone (no signals): repeatedly take any block of
    degree one, mark its user recovered and remove the user's edges.
    """
    blocks: Dict[ct.Block, Set[ct.UserIdx]] = {}
    for n in range(schedule.beta):
        for k in schedule.active_users(n):
            blocks.setdefault((n, int(schedule.choice[n, k])), set()).add(k)

    recovered: Set[ct.UserIdx] = set()
    pending = [blk for blk, users in blocks.items() if len(users) == 1]
    while pending:
        users = blocks[pending.pop()]
        if len(users) != 1:
            continue
        (k,) = users
        recovered.add(k)
        for blk in schedule.pattern(k):
            blocks[blk].discard(k)
            if len(blocks[blk]) == 1:
                pending.append(blk)

    return frozenset(recovered)
