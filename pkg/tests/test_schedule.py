import logging
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hopsets.schedule import (ConfigError, compute_schedule, hop_sequence, pad_log2,
                              phase_count)


def test_phase_count_kappa4_rho_quarter():
    # kappa*rho = 1: i0 = 0 and ell = 0 + ceil(5/1) - 1
    assert phase_count(4, 0.25) == (4, 0)


def test_phase_count_default_profile():
    # kappa*rho = 0.9: i0 = floor(log2 0.9) = -1, ell = -1 + ceil(3/0.9) - 1
    assert phase_count(2, 0.45) == (2, -1)


def test_hop_sequence_half():
    h = hop_sequence(0.5, 4)
    assert h == [1, 11, 53, 223, 905]
    # h_1 = 2/eps + 7 already exceeds (1/eps + 5)^1 = 7; twice that power holds
    assert h[1] > 7
    assert all(x <= 2 * 7 ** i for i, x in enumerate(h))


@given(st.fractions(min_value=Fraction(1, 1000), max_value=1), st.integers(0, 8))
def test_hop_sequence_growth_bound(eps, ell):
    h = hop_sequence(eps, ell)
    for i, x in enumerate(h):
        assert x <= 2 * (1 / eps + 5) ** i
        if i:
            assert x > h[i - 1]


def test_first_radius():
    s = compute_schedule(64, 0.5, 4, 0.25, 1000.0, internal_epsilon=0.5)
    k = s.k0
    assert s.radii(k)[0] == 0.0
    assert math.isclose(s.radii(k)[1], 2 * s.delta_hat(k, 0) * s.log_n, rel_tol=1e-15)


@pytest.mark.parametrize("kappa,rho,eps", [(1, 0.25, 0.5), (2, 0.6, 0.5), (2, 0.0, 0.5),
                                           (2, 0.25, 0.0), (2, 0.25, 1.5), (2.5, 0.25, 0.5)])
def test_rejects_out_of_range(kappa, rho, eps):
    with pytest.raises(ConfigError):
        compute_schedule(16, eps, kappa, rho, 10.0)


def test_epsilon_one_allowed():
    assert compute_schedule(16, 1.0, 2, 0.25, 10.0).epsilon == 1.0


def test_default_schedule_is_vacuous_at_desk_scale(caplog):
    with caplog.at_level(logging.WARNING):
        s = compute_schedule(256, 0.5, 2, 0.45, 1e9)
    assert s.beta >= 256 and s.vacuous
    assert "vacuous" in caplog.text
    assert not s.overrides


def test_overrides_recorded():
    s = compute_schedule(64, 0.5, 2, 0.45, 1e6, internal_epsilon=0.5, stretch_epsilon=0.01)
    assert s.beta == 53 and s.k0 == 5
    assert s.overrides == {"internal_epsilon": 0.5, "stretch_epsilon": 0.01}
    assert compute_schedule(64, 0.5, 2, 0.45, 1e6, hopbound=7).beta == 7


def test_lambda_and_scales():
    # Lambda = 1000: lambda = ceil(log2 1000) - 1 = 9
    s = compute_schedule(64, 0.5, 2, 0.45, 1000.0, internal_epsilon=0.5)
    assert s.lam == 9 and list(s.scales) == list(range(5, 10))


def test_degrees():
    s = compute_schedule(256, 0.5, 4, 0.25, 10.0, internal_epsilon=0.5)
    # i <= i0 = 0: n^(1/4) = 4; afterwards n^rho = 4
    assert s.degrees == (4, 4, 4, 4, 4)
    s = compute_schedule(256, 0.5, 8, 0.25, 10.0, internal_epsilon=0.5)
    # kappa*rho = 2: i0 = 1, degrees n^(1/8), n^(2/8), then n^(1/4)
    assert s.degrees[:2] == (2, 4) and set(s.degrees[2:]) == {4}


def test_stretch_growth():
    s = compute_schedule(64, 0.5, 2, 0.45, 1e6, internal_epsilon=0.5, stretch_epsilon=0.01)
    assert s.eps_k(s.k0 - 1) == 0.0
    assert math.isclose(s.eps_k(s.k0 + 2), 1.01 ** 3 - 1, rel_tol=1e-12)


def test_memory_cap():
    s = compute_schedule(64, 0.5, 2, 0.45, 1e6, internal_epsilon=0.5)
    # sigma_{i+1} = (4 log n + 1) sigma_i + 2(2 beta + 1) log n with log n = 6, beta = 53
    assert s.sigma[:3] == (0, 1284, 1284 * 25 + 1284)
    assert s.memory_hop_cap == 2 * s.sigma[s.ell] + 2 * 53 + 1


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 1), (3, 2), (16, 4), (17, 5), (64, 6)])
def test_pad_log2(n, expected):
    assert pad_log2(n) == expected
