# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT

"""Closed form statistics of random pilot access.

The degree of a resource block is binomial: each of the K users picks
the block with probability p_a / tau. From this follow the ALOHA
optimum, the mapping between average degree and activation probability
and the geometric delay until a user is active without collision.
"""

import math
from typing import NamedTuple

import numpy as np
from scipy import stats


class DegreeParams(NamedTuple):

    K  : int
    p_a: float
    tau: int


def init_degree_params(K: int, p_a: float, tau: int) -> DegreeParams:
    if K < 1:
        raise ValueError(f"Invalid K={K}, must be >= 1")
    if not 0 <= p_a <= 1:
        raise ValueError(f"Invalid p_a={p_a}, must be in [0, 1]")
    if tau < 1:
        raise ValueError(f"Invalid tau={tau}, must be >= 1")
    return DegreeParams(K, p_a, tau)


def degree_pmf(params: DegreeParams, d: int) -> float:
    """Pr(|A_n^j| = d) = C(K, d) (p_a/tau)^d (1 - p_a/tau)^(K - d)

    >>> round(degree_pmf(DegreeParams(K=3, p_a=1.0, tau=2), 3), 12)
    0.125
    """
    if not 0 <= d <= params.K:
        raise ValueError(f"Invalid degree d={d}, must be in [0, {params.K}]")
    p = params.p_a / params.tau
    return float(np.exp(stats.binom.logpmf(d, params.K, p)))


def degree_distribution(params: DegreeParams) -> np.ndarray:
    """The full pmf over d = 0..K."""
    p = params.p_a / params.tau
    return stats.binom.pmf(np.arange(params.K + 1), params.K, p)


def avg_degree(p_a: float, K: int, tau: int) -> float:
    """d_bar = p_a * K / tau"""
    return p_a * K / tau


def aloha_optimal_pa(K: int, tau: int) -> float:
    """Activation probability that maximizes Pr(d = 1).

    >>> aloha_optimal_pa(100, 5)
    0.05
    >>> aloha_optimal_pa(3, 5)
    1.0
    """
    if K < 1 or tau < 1:
        raise ValueError(f"Invalid K={K}, tau={tau}, both must be >= 1")
    return min(tau / K, 1.0)


def pa_from_avg_degree(d_bar: float, K: int, tau: int) -> float:
    """Inverse of avg_degree.

    >>> pa_from_avg_degree(2.5, 100, 5)
    0.125
    """
    p_a = d_bar * tau / K
    if p_a <= 0:
        raise ValueError(f"Invalid d_bar={d_bar}, must be > 0")
    if p_a > 1:
        if math.isclose(p_a, 1.0, rel_tol=1e-12):
            return 1.0
        errmsg = f"Invalid d_bar={d_bar}, implies p_a={p_a} > 1 for K={K}, tau={tau}"
        raise ValueError(errmsg)
    return p_a


def collision_free_prob(K: int, p_a: float, tau: int) -> float:
    """p_a* = p_a (1 - p_a/tau)^(K-1), a user is active and alone on its pilot."""
    return p_a * (1 - p_a / tau) ** (K - 1)


def _check_p_star(p_star: float) -> None:
    if not 0 < p_star <= 1:
        raise ValueError(f"Invalid p_star={p_star}, must be in (0, 1]")


def delay_pmf(p_star: float, delta: int) -> float:
    """Pr(Delta = delta) = p* (1 - p*)^(delta - 1), delta >= 1"""
    _check_p_star(p_star)
    if delta < 1:
        raise ValueError(f"Invalid delta={delta}, must be >= 1")
    return p_star * (1 - p_star) ** (delta - 1)


def delay_cdf(p_star: float, delta: int) -> float:
    """Pr(Delta <= delta)"""
    _check_p_star(p_star)
    if delta < 1:
        return 0.0
    return 1 - (1 - p_star) ** delta


def expected_delay(p_star: float) -> float:
    """E[Delta] = (1 - p*) / p*

    >>> expected_delay(0.5)
    1.0
    """
    if p_star == 0:
        raise ValueError("Invalid p_star=0, the expected delay is infinite")
    _check_p_star(p_star)
    return (1 - p_star) / p_star


def aloha_unique_throughput(K: int, p_a: float, tau: int, beta: int) -> float:
    """Expected unique decodes of framed slotted ALOHA per resource block.

    A user is decoded if it is alone on its pilot in at least one of
    the beta slots.
    """
    p_star = collision_free_prob(K, p_a, tau)
    return (1 - (1 - p_star) ** beta) * K / (beta * tau)
