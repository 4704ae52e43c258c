# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT

"""Per slot, per user channel vectors.

Three backends are available:

 - CLARKE: sum of scatterers model, temporally correlated across slots.
 - IID_RAYLEIGH: CN(0, 1) entries, drawn fresh for every slot.
 - ORTHO_IDEAL: exactly orthogonal user channels with constant norms.
   This realizes the large array limit at finite M and is used for
   exact (noise free) checks of the decoder.
"""

import logging
import pathlib as pl
from typing import Union
from typing import NamedTuple

import numpy as np

from . import enc_util
from . import parameters
from . import sim_random
from . import common_types as ct

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 3e8


class ScattererSet(NamedTuple):
    """Angles of arrival and initial phases, uniform on [-pi, pi).

    The last axis enumerates the N_s scatterers, leading axes (if any)
    enumerate independent sets, e.g. one per (user, antenna).
    """

    alpha: np.ndarray
    phi  : np.ndarray

    @property
    def n_scatterers(self) -> int:
        return int(self.alpha.shape[-1])


class ChannelFrame(NamedTuple):

    h         : np.ndarray  # complex, shape (beta, K, M)
    doppler_hz: ct.Hertz

    @property
    def beta(self) -> int:
        return int(self.h.shape[0])

    @property
    def num_users(self) -> int:
        return int(self.h.shape[1])

    @property
    def num_antennas(self) -> int:
        return int(self.h.shape[2])


def max_doppler_hz(config: parameters.SystemConfig) -> ct.Hertz:
    """Maximum doppler shift f_d = (v / c) * f_c."""
    return config.speed_mps / SPEED_OF_LIGHT * config.carrier_hz


def draw_scatterers(n_scatterers: int, rng: np.random.Generator, shape: tuple = ()) -> ScattererSet:
    if n_scatterers < 1:
        raise ValueError(f"Invalid n_scatterers={n_scatterers}, must be >= 1")
    full_shape = shape + (n_scatterers,)
    alpha = rng.uniform(-np.pi, np.pi, size=full_shape)
    phi   = rng.uniform(-np.pi, np.pi, size=full_shape)
    return ScattererSet(alpha, phi)


def _clarke_sum(cos_alpha: np.ndarray, phi: np.ndarray, fd: ct.Hertz, t: ct.Seconds) -> np.ndarray:
    phase = 2 * np.pi * fd * t * cos_alpha + phi
    n_s   = cos_alpha.shape[-1]
    return np.exp(1j * phase).sum(axis=-1) / np.sqrt(n_s)


def clarke_coefficient(
    scatterers: ScattererSet,
    doppler_hz: ct.Hertz,
    n         : ct.SlotIdx,
    slot_s    : ct.Seconds,
) -> complex:
    """Channel coefficient at slot n for a single set of scatterers."""
    if scatterers.alpha.ndim != 1:
        raise ValueError("Expected a single ScattererSet (1d alpha/phi)")
    if scatterers.n_scatterers < 1:
        raise ValueError("Expected at least one scatterer")
    value = _clarke_sum(np.cos(scatterers.alpha), scatterers.phi, doppler_hz, n * slot_s)
    return complex(value)


def _clarke_channels(config: parameters.SystemConfig, rng: np.random.Generator) -> np.ndarray:
    # one independent scatterer set per (user, antenna), fixed for the frame
    scatterers = draw_scatterers(config.n_scatterers, rng, shape=(config.K, config.M))
    cos_alpha  = np.cos(scatterers.alpha)
    fd         = max_doppler_hz(config)

    h = np.empty((config.beta, config.K, config.M), dtype=np.complex128)
    for n in range(config.beta):
        h[n] = _clarke_sum(cos_alpha, scatterers.phi, fd, n * config.slot_s)
    return h


def _iid_rayleigh_channels(config: parameters.SystemConfig, rng: np.random.Generator) -> np.ndarray:
    return sim_random.complex_normal(rng, (config.beta, config.K, config.M))


def _ortho_ideal_channels(config: parameters.SystemConfig, rng: np.random.Generator) -> np.ndarray:
    if config.K > config.M:
        errmsg = f"Backend ortho_ideal requires K <= M, but K={config.K} > M={config.M}"
        raise ValueError(errmsg)

    # |h|^2 of a CN(0, I_M) vector is Gamma(M, 1) (chi-squared with 2M dof, scaled by 1/2)
    norm_sq   = rng.gamma(shape=config.M, scale=1.0, size=config.K)
    amplitude = np.sqrt(norm_sq)

    # Users occupy disjoint antennas, so inner products are exactly zero.
    # The antenna assignment and the phases change from slot to slot.
    h = np.zeros((config.beta, config.K, config.M), dtype=np.complex128)
    users = np.arange(config.K)
    for n in range(config.beta):
        antennas = rng.permutation(config.M)[: config.K]
        phases   = rng.uniform(-np.pi, np.pi, size=config.K)
        h[n, users, antennas] = amplitude * np.exp(1j * phases)
    return h


_BACKENDS = {
    parameters.ChannelBackend.CLARKE      : _clarke_channels,
    parameters.ChannelBackend.IID_RAYLEIGH: _iid_rayleigh_channels,
    parameters.ChannelBackend.ORTHO_IDEAL : _ortho_ideal_channels,
}


def generate_frame_channels(config: parameters.SystemConfig, rng: np.random.Generator) -> ChannelFrame:
    backend_fn = _BACKENDS[config.channel_backend]
    h = backend_fn(config, rng)
    assert h.shape == (config.beta, config.K, config.M), h.shape
    h.flags.writeable = False
    return ChannelFrame(h, max_doppler_hz(config))


def channel_norm_sq(h: ct.ComplexVector) -> float:
    """Channel power h^H h."""
    if np.size(h) == 0:
        raise ValueError("Expected a nonempty channel vector")
    return float(np.vdot(h, h).real)


def dump_frame(frame: ChannelFrame, path: Union[str, pl.Path]) -> None:
    path = pl.Path(path)
    with path.open(mode="wb") as fobj:
        fobj.write(enc_util.channels2bytes(frame.h))
    logger.debug(f"wrote channel fixture {path} with shape {frame.h.shape}")


def load_frame(path: Union[str, pl.Path], fd: ct.Hertz = 0.0) -> ChannelFrame:
    """Read a channel fixture, the doppler shift is not part of the file."""
    path = pl.Path(path)
    with path.open(mode="rb") as fobj:
        h = enc_util.bytes2channels(fobj.read())
    h.flags.writeable = False
    return ChannelFrame(h, fd)
