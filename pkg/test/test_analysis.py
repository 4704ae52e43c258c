import os
import math

import numpy as np
import pytest

from pilotsic import model
from pilotsic import parameters
from pilotsic import sim_random
from pilotsic.analysis import *


def test_degree_pmf_values():
    params = DegreeParams(K=3, p_a=1.0, tau=2)
    assert math.isclose(degree_pmf(params, 3), 0.125, rel_tol=1e-12)
    assert math.isclose(degree_pmf(params, 0), 0.125, rel_tol=1e-12)
    assert math.isclose(degree_pmf(params, 1), 0.375, rel_tol=1e-12)


def test_degree_pmf_invalid_degree():
    try:
        degree_pmf(DegreeParams(K=3, p_a=0.5, tau=2), 4)
        assert False, "expected ValueError"
    except ValueError:
        pass


def test_degree_mean_at_default_operating_point():
    params = DegreeParams(K=100, p_a=0.125, tau=5)
    pmf    = degree_distribution(params)
    assert math.isclose(float(np.arange(101) @ pmf), 2.5, rel_tol=1e-9)


@pytest.mark.parametrize("K"  , [1, 10, 100, 1000])
@pytest.mark.parametrize("p_a", [0.0, 0.05, 0.5, 1.0])
@pytest.mark.parametrize("tau", [1, 2, 5, 10])
def test_degree_pmf_normalized(K, p_a, tau):
    pmf = degree_distribution(DegreeParams(K, p_a, tau))
    assert len(pmf) == K + 1
    assert abs(pmf.sum() - 1) <= 1e-12
    assert math.isclose(degree_pmf(DegreeParams(K, p_a, tau), min(2, K)), pmf[min(2, K)], rel_tol=1e-9)


def test_init_degree_params_invalid():
    for args in [(0, 0.5, 5), (10, 1.5, 5), (10, 0.5, 0)]:
        try:
            init_degree_params(*args)
            assert False, "expected ValueError"
        except ValueError:
            pass


def test_aloha_optimal_pa():
    assert aloha_optimal_pa(100, 5) == 0.05
    assert aloha_optimal_pa(3, 5) == 1.0


@pytest.mark.parametrize("K"  , [10, 100, 1000])
@pytest.mark.parametrize("tau", [2, 5, 10])
def test_aloha_optimum_is_argmax(K, tau):
    step = 0.001
    grid = np.arange(1, 1001) * step
    prob = [degree_pmf(DegreeParams(K, p_a, tau), 1) for p_a in grid]
    best = grid[int(np.argmax(prob))]
    assert abs(best - aloha_optimal_pa(K, tau)) <= step


def test_pa_from_avg_degree():
    assert pa_from_avg_degree(2.5, 100, 5) == 0.125
    assert pa_from_avg_degree(20, 100, 5) == 1.0
    assert avg_degree(0.125, 100, 5) == 2.5


@pytest.mark.parametrize("d_bar", [0.0, -1.0, 20.5])
def test_pa_from_avg_degree_invalid(d_bar):
    try:
        pa_from_avg_degree(d_bar, 100, 5)
        assert False, "expected ValueError"
    except ValueError:
        pass


@pytest.mark.parametrize("d_bar", [0.5, 1.0, 2.5, 4.0])
def test_pa_from_avg_degree_mean(d_bar):
    p_a = pa_from_avg_degree(d_bar, 100, 5)
    pmf = degree_distribution(DegreeParams(100, p_a, 5))
    assert abs(float(np.arange(101) @ pmf) - d_bar) <= 1e-9


def test_collision_free_prob():
    assert collision_free_prob(1, 0.3, 5) == 0.3
    assert collision_free_prob(100, 0.0, 5) == 0.0
    assert math.isclose(collision_free_prob(100, 0.05, 5), 0.05 * 0.99 ** 99, rel_tol=1e-12)
    assert abs(collision_free_prob(100, 0.05, 5) - 0.0184866) < 2e-7


def test_delay_pmf():
    assert delay_pmf(1.0, 1) == 1.0
    assert delay_pmf(0.5, 1) == 0.5
    assert delay_pmf(0.5, 2) == 0.25
    total = sum(delay_pmf(0.5, delta) for delta in range(1, 200))
    assert abs(total - 1) < 1e-12


def test_delay_cdf():
    assert delay_cdf(0.5, 0) == 0.0
    assert delay_cdf(0.5, 1) == 0.5
    assert math.isclose(delay_cdf(0.5, 3), 0.875)
    pmf_sum = sum(delay_pmf(0.1, delta) for delta in range(1, 11))
    assert math.isclose(delay_cdf(0.1, 10), pmf_sum, rel_tol=1e-12)


@pytest.mark.parametrize("p_star, delta", [(0.0, 1), (1.5, 1), (0.5, 0)])
def test_delay_pmf_invalid(p_star, delta):
    try:
        delay_pmf(p_star, delta)
        assert False, "expected ValueError"
    except ValueError:
        pass


def test_expected_delay():
    assert expected_delay(0.5) == 1.0
    assert expected_delay(1.0) == 0.0
    p_star = collision_free_prob(100, 0.05, 5)
    assert abs(expected_delay(p_star) - 53.09) < 0.01
    try:
        expected_delay(0.0)
        assert False, "expected ValueError"
    except ValueError as err:
        assert "infinite" in str(err)


@pytest.mark.parametrize("p_star", [0.5, 0.1, 0.0184866])
def test_expected_delay_series(p_star):
    # truncate where the tail mass drops below 1e-12
    n_terms = int(math.ceil(math.log(1e-12) / math.log(1 - p_star))) + 1
    deltas  = np.arange(1, n_terms + 1)
    series  = float(np.sum(deltas * p_star * (1 - p_star) ** (deltas - 1)))
    assert abs(series - (expected_delay(p_star) + 1)) <= 1e-8


def test_aloha_unique_throughput():
    K, tau  = 100, 5
    beta    = parameters.default_beta(K, tau)
    p_a     = aloha_optimal_pa(K, tau)
    p_star  = collision_free_prob(K, p_a, tau)
    value   = aloha_unique_throughput(K, p_a, tau, beta)
    assert math.isclose(value, (1 - (1 - p_star) ** 24) * 100 / 120)
    assert 0 < value < 1


@pytest.mark.skipif("slow" in os.getenv('PYTEST_SKIP', ""), reason="Statistical test")
def test_collision_free_prob_monte_carlo():
    config   = parameters.init_config(K=100, tau=5, p_a=0.05, beta=20000)
    schedule = model.draw_activity(config, sim_random.init_rng(2))

    # every degree one block holds a user which is active and alone on its pilot
    alone_count = int(np.count_nonzero(schedule.degrees() == 1))
    empirical   = alone_count / (config.beta * config.K)
    expected    = collision_free_prob(100, 0.05, 5)
    assert abs(empirical / expected - 1) < 0.03


@pytest.mark.skipif("slow" in os.getenv('PYTEST_SKIP', ""), reason="Statistical test")
def test_delay_monte_carlo():
    p_star  = collision_free_prob(100, 0.05, 5)
    rng     = sim_random.init_rng(3)
    samples = rng.geometric(p_star, size=10 ** 5)

    assert abs((samples.mean() - 1) / expected_delay(p_star) - 1) < 0.02

    deltas    = np.arange(1, 400)
    empirical = np.array([np.mean(samples <= delta) for delta in deltas])
    expected  = np.array([delay_cdf(p_star, int(delta)) for delta in deltas])
    assert np.abs(empirical - expected).max() < 0.01
