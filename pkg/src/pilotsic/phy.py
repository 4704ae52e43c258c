# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT

"""Uplink signal synthesis and base station front end.

Received pilots Y_pu (M x tau) and data Y_u (M x L) per slot are
processed with least squares channel estimates phi_nj, which are
contaminated when several users share pilot j in slot n. Projecting the
received signals onto phi_nj^H yields the filtered signals

    f_nj = sum_k |h_nk|^2 x_k + noise     (length L)
    g_nj = sum_k |h_nk|^2 s_j + noise     (length tau)

which are the observations of the collision graph.
"""

import logging
from typing import Sequence
from typing import NamedTuple

import numpy as np

from . import model
from . import channel
from . import sim_random
from . import common_types as ct

logger = logging.getLogger(__name__)


class PilotObservation(NamedTuple):

    Y_pu: np.ndarray  # complex, shape (beta, M, tau)


class DataObservation(NamedTuple):

    Y_u: np.ndarray  # complex, shape (beta, M, L)


class FilteredFrame(NamedTuple):

    f: np.ndarray  # complex, shape (beta, tau, L)
    g: np.ndarray  # complex, shape (beta, tau, tau)

    @property
    def beta(self) -> int:
        return int(self.f.shape[0])

    @property
    def tau(self) -> int:
        return int(self.f.shape[1])


def _symbol_matrix(messages: Sequence[model.UserMessage]) -> np.ndarray:
    return np.stack([msg.symbols for msg in messages]).astype(np.float64)


def synthesize_pilot_slot(
    h_slot    : np.ndarray,
    choice_row: np.ndarray,
    pilots    : ct.ComplexMatrix,
    sigma_n2  : float,
    rng       : np.random.Generator,
) -> ct.ComplexMatrix:
    """Y_pu = sum_j sum_{k in A^j} h_k s_j^T + Z, shape (M, tau).

    h_slot has shape (K, M), choice_row has length K.
    """
    users = np.flatnonzero(choice_row != model.INACTIVE)
    tau   = pilots.shape[0]
    M     = h_slot.shape[1]

    H          = h_slot[users].T                     # (M, |A|)
    pilot_rows = pilots[:, choice_row[users]].T      # (|A|, tau)
    return H @ pilot_rows + sim_random.complex_normal(rng, (M, tau), sigma_n2)


def synthesize_data_slot(
    h_slot    : np.ndarray,
    choice_row: np.ndarray,
    symbols   : np.ndarray,
    sigma_n2  : float,
    rng       : np.random.Generator,
) -> ct.ComplexMatrix:
    """Y_u = sum_{k in A} h_k x_k^T + Z, shape (M, L).

    symbols has shape (K, L).
    """
    users = np.flatnonzero(choice_row != model.INACTIVE)
    M     = h_slot.shape[1]
    L     = symbols.shape[1]

    H = h_slot[users].T  # (M, |A|)
    return H @ symbols[users] + sim_random.complex_normal(rng, (M, L), sigma_n2)


def _check_dims(channels: channel.ChannelFrame, schedule: model.ActivitySchedule) -> None:
    if channels.h.shape[:2] != schedule.choice.shape:
        errmsg = (
            f"Mismatch of channel frame {channels.h.shape[:2]} "
            f"and schedule {schedule.choice.shape} dimensions"
        )
        raise ValueError(errmsg)


def synthesize_uplink_pilot(
    channels: channel.ChannelFrame,
    schedule: model.ActivitySchedule,
    pilots  : ct.ComplexMatrix,
    sigma_n2: float,
    rng     : np.random.Generator,
) -> PilotObservation:
    _check_dims(channels, schedule)
    Y_pu = np.stack(
        [
            synthesize_pilot_slot(channels.h[n], schedule.choice[n], pilots, sigma_n2, rng)
            for n in range(schedule.beta)
        ]
    )
    return PilotObservation(Y_pu)


def synthesize_uplink_data(
    channels: channel.ChannelFrame,
    schedule: model.ActivitySchedule,
    messages: Sequence[model.UserMessage],
    sigma_n2: float,
    rng     : np.random.Generator,
) -> DataObservation:
    _check_dims(channels, schedule)
    symbols = _symbol_matrix(messages)
    Y_u = np.stack(
        [
            synthesize_data_slot(channels.h[n], schedule.choice[n], symbols, sigma_n2, rng)
            for n in range(schedule.beta)
        ]
    )
    return DataObservation(Y_u)


def ls_channel_estimate(Y_pu: ct.ComplexMatrix, pilots: ct.ComplexMatrix, j: ct.PilotIdx) -> ct.ComplexVector:
    """phi_nj = ((s_j^H s_j)^-1 s_j^H Y_pu^T)^T"""
    s_j = pilots[:, j]
    return (Y_pu @ s_j.conj()) / np.vdot(s_j, s_j).real


def _ls_estimates(Y_pu: ct.ComplexMatrix, pilots: ct.ComplexMatrix) -> ct.ComplexMatrix:
    # column j is phi_nj
    energies = np.sum(np.abs(pilots) ** 2, axis=0)
    return (Y_pu @ pilots.conj()) / energies


def naive_data_estimate(phi: ct.ComplexVector, Y_u: ct.ComplexMatrix) -> ct.ComplexVector:
    """Zero forcing with a (possibly contaminated) channel estimate.

    Under contamination the result is the norm weighted mixture
    sum_k |h_k|^2 / |phi|^2 x_k, i.e. a pilot collision becomes a
    data collision.
    """
    phi_norm_sq = np.vdot(phi, phi).real
    if phi_norm_sq <= 0:
        raise ValueError("Channel estimate phi has zero norm")
    return (phi.conj() @ Y_u) / phi_norm_sq


def matched_filter_data(phi: ct.ComplexVector, Y_u: ct.ComplexMatrix) -> ct.ComplexVector:
    """f_nj = (phi^H Y_u)^T"""
    if phi.shape[0] != Y_u.shape[0]:
        raise ValueError(f"Dimension mismatch: phi {phi.shape} vs Y_u {Y_u.shape}")
    return phi.conj() @ Y_u


def matched_filter_pilot(phi: ct.ComplexVector, Y_pu: ct.ComplexMatrix) -> ct.ComplexVector:
    """g_nj = (phi^H Y_pu)^T"""
    if phi.shape[0] != Y_pu.shape[0]:
        raise ValueError(f"Dimension mismatch: phi {phi.shape} vs Y_pu {Y_pu.shape}")
    return phi.conj() @ Y_pu


def filter_observations(
    pilot_obs: PilotObservation,
    data_obs : DataObservation,
    pilots   : ct.ComplexMatrix,
) -> FilteredFrame:
    """Matched filter outputs for every resource block.

    Estimates are computed for every pilot, including pilots
    which nobody applied (those blocks only contain noise).
    """
    beta, _, tau = pilot_obs.Y_pu.shape
    L = data_obs.Y_u.shape[2]

    f = np.empty((beta, tau, L  ), dtype=np.complex128)
    g = np.empty((beta, tau, tau), dtype=np.complex128)
    for n in range(beta):
        for j in range(tau):
            phi = ls_channel_estimate(pilot_obs.Y_pu[n], pilots, j)
            f[n, j] = matched_filter_data(phi, data_obs.Y_u[n])
            g[n, j] = matched_filter_pilot(phi, pilot_obs.Y_pu[n])
    return FilteredFrame(f, g)


def filter_frame(
    channels: channel.ChannelFrame,
    schedule: model.ActivitySchedule,
    pilots  : ct.ComplexMatrix,
    messages: Sequence[model.UserMessage],
    sigma_n2: float,
    rng     : np.random.Generator,
) -> FilteredFrame:
    """Synthesize and filter one frame slot by slot.

    Equivalent to filter_observations on the full frame observations,
    but the (M x L) data matrix of only one slot is held in memory.
    """
    _check_dims(channels, schedule)
    symbols = _symbol_matrix(messages)
    tau     = pilots.shape[0]
    L       = symbols.shape[1]

    f = np.empty((schedule.beta, tau, L  ), dtype=np.complex128)
    g = np.empty((schedule.beta, tau, tau), dtype=np.complex128)
    for n in range(schedule.beta):
        choice_row = schedule.choice[n]
        Y_pu = synthesize_pilot_slot(channels.h[n], choice_row, pilots, sigma_n2, rng)
        Y_u  = synthesize_data_slot(channels.h[n], choice_row, symbols, sigma_n2, rng)

        phis_h = _ls_estimates(Y_pu, pilots).conj().T  # (tau, M)
        f[n] = phis_h @ Y_u
        g[n] = phis_h @ Y_pu

    return FilteredFrame(f, g)
