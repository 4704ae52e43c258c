import os
import math

import numpy as np
import pytest

from pilotsic import parameters
from pilotsic import sim_random
from pilotsic.channel import *
from pilotsic.parameters import ChannelBackend


def test_max_doppler_hz():
    config = parameters.init_config()
    assert math.isclose(max_doppler_hz(config), 5.0, rel_tol=1e-12)


def test_clarke_coefficient_single_scatterer():
    scatterers = ScattererSet(alpha=np.array([np.pi / 2]), phi=np.array([0.0]))
    for n in range(5):
        value = clarke_coefficient(scatterers, doppler_hz=5.0, n=n, slot_s=0.01)
        assert abs(value - 1.0) < 1e-12


def test_clarke_coefficient_static():
    rng        = sim_random.init_rng(2)
    scatterers = draw_scatterers(20, rng)
    values     = [clarke_coefficient(scatterers, 0.0, n, 0.01) for n in range(10)]
    assert all(value == values[0] for value in values)


def test_clarke_coefficient_value():
    alpha = np.array([0.0, np.pi])
    phi   = np.array([0.0, 0.0])
    # phases +/- 2*pi*fd*t, the sum is 2*cos(2*pi*fd*t)
    value    = clarke_coefficient(ScattererSet(alpha, phi), 5.0, 2, 0.01)
    expected = 2 * math.cos(2 * math.pi * 5.0 * 0.02) / math.sqrt(2)
    assert abs(value - expected) < 1e-12


def test_draw_scatterers_range():
    scatterers = draw_scatterers(20, sim_random.init_rng(0), shape=(3, 4))
    assert scatterers.alpha.shape == (3, 4, 20)
    assert scatterers.n_scatterers == 20
    assert np.all(scatterers.alpha >= -np.pi)
    assert np.all(scatterers.alpha < np.pi)
    assert np.all(scatterers.phi >= -np.pi)
    assert np.all(scatterers.phi < np.pi)


def test_draw_scatterers_invalid():
    try:
        draw_scatterers(0, sim_random.init_rng(0))
        assert False, "expected ValueError"
    except ValueError:
        pass


@pytest.mark.parametrize("backend", list(ChannelBackend))
def test_frame_shape_and_determinism(backend):
    config  = parameters.init_config(K=6, M=8, channel_backend=backend)
    frame_a = generate_frame_channels(config, sim_random.init_rng(9))
    frame_b = generate_frame_channels(config, sim_random.init_rng(9))
    assert frame_a.h.shape == (config.beta, 6, 8)
    assert frame_a.num_users == 6
    assert frame_a.num_antennas == 8
    assert np.all(np.isfinite(frame_a.h))
    assert np.array_equal(frame_a.h, frame_b.h)
    assert not frame_a.h.flags.writeable


def test_ortho_ideal_orthogonal():
    config = parameters.init_config(K=2, M=4, channel_backend=ChannelBackend.ORTHO_IDEAL)
    frame  = generate_frame_channels(config, sim_random.init_rng(4))
    for n in range(frame.beta):
        assert np.vdot(frame.h[n, 0], frame.h[n, 1]) == 0
    for k in range(2):
        norms = [channel_norm_sq(frame.h[n, k]) for n in range(frame.beta)]
        assert np.allclose(norms, norms[0], rtol=1e-12)


def test_ortho_ideal_requires_enough_antennas():
    config = parameters.init_config(K=5, M=4, channel_backend=ChannelBackend.ORTHO_IDEAL)
    try:
        generate_frame_channels(config, sim_random.init_rng(0))
        assert False, "expected ValueError"
    except ValueError as err:
        assert "K <= M" in str(err)


def test_channel_norm_sq():
    assert channel_norm_sq(np.array([1, 0])) == 1
    assert channel_norm_sq(np.array([1 + 1j, 1 - 1j])) == 4
    try:
        channel_norm_sq(np.array([]))
        assert False, "expected ValueError"
    except ValueError:
        pass


def test_iid_rayleigh_norm_concentration():
    rng = sim_random.init_rng(21)
    h   = sim_random.complex_normal(rng, (10 ** 5,))
    assert abs(channel_norm_sq(h) / 10 ** 5 - 1) < 0.02


@pytest.mark.parametrize("backend", [ChannelBackend.CLARKE, ChannelBackend.IID_RAYLEIGH])
def test_unit_average_power(backend):
    config = parameters.init_config(K=50, M=100, channel_backend=backend)
    frame  = generate_frame_channels(config, sim_random.init_rng(8))
    assert frame.h.size >= 10 ** 4
    mean_power = np.mean(np.abs(frame.h) ** 2)
    assert abs(mean_power - 1) < 0.05


def test_iid_rayleigh_near_orthogonal():
    M      = 64
    config = parameters.init_config(K=100, M=M, channel_backend=ChannelBackend.IID_RAYLEIGH)
    frame  = generate_frame_channels(config, sim_random.init_rng(13))
    h      = frame.h.reshape(-1, 2, M)
    assert len(h) >= 10 ** 3
    inner  = np.abs(np.einsum("pm,pm->p", h[:, 0].conj(), h[:, 1])) ** 2 / M ** 2
    assert inner.mean() <= 2 / M


@pytest.mark.skipif("slow" in os.getenv('PYTEST_SKIP', ""), reason="Statistical test")
def test_clarke_norm_variation_shrinks_with_m():
    rel_std = {}
    for M in (50, 400):
        config = parameters.init_config(K=10, M=M, channel_backend=ChannelBackend.CLARKE)
        frame  = generate_frame_channels(config, sim_random.init_rng(17))
        norms  = np.sum(np.abs(frame.h) ** 2, axis=2)  # (beta, K)
        rel_std[M] = np.mean(norms.std(axis=0) / norms.mean(axis=0))
    assert rel_std[400] < rel_std[50]


@pytest.mark.skipif("slow" in os.getenv('PYTEST_SKIP', ""), reason="Statistical test")
def test_clarke_autocorrelation_decreases():
    # 1 / (4 * fd * slot_s) = 5 slots
    config = parameters.init_config(K=100, M=40, beta=6, channel_backend=ChannelBackend.CLARKE)
    frame  = generate_frame_channels(config, sim_random.init_rng(23))
    h      = frame.h.reshape(config.beta, -1)
    corr   = [np.mean((h[lag:] * h[: config.beta - lag].conj()).real) for lag in range(6)]
    assert all(corr[i] > corr[i + 1] for i in range(5))


def test_dump_load_frame(tmp_path):
    config = parameters.init_config(K=3, M=4, channel_backend=ChannelBackend.IID_RAYLEIGH)
    frame  = generate_frame_channels(config, sim_random.init_rng(1))
    path   = tmp_path / "frame.bin"
    dump_frame(frame, path)
    loaded = load_frame(path, fd=frame.doppler_hz)
    assert loaded.h.shape == frame.h.shape
    assert np.allclose(loaded.h, frame.h, atol=1e-6)
    assert loaded.doppler_hz == frame.doppler_hz
