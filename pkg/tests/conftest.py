"""Shared scenario generators for the test suite."""
from __future__ import annotations

import numpy as np
import pytest

from secrate.model import SystemParams, db_to_linear, make_split, validate


def random_params(rng: np.random.Generator, m_active: int = 1, rho_b: float = 1.0,
                  rho_ea: float = 1.0, n_lo: int = 3, n_hi: int = 8,
                  r_b_lo: float = 2.0, r_b_hi: float = 8.0) -> SystemParams:
    """A validated random scenario with moderate, well-conditioned magnitudes."""
    n_min = 3 if m_active == 1 else m_active + 2
    n = int(rng.integers(max(n_lo, n_min), n_hi + 1))
    var = lambda: float(10.0 ** rng.uniform(-0.5, 1.0))  # noqa: E731
    return validate(SystemParams(
        n_antennas=n,
        k_passive=int(rng.integers(1, 6)),
        m_active=m_active,
        var_ab=var(), var_aea=var(), var_aek=var(), var_eab=var(),
        var_jb=var(), var_jea=var(), var_jek=var(),
        p_max=float(10.0 ** rng.uniform(2.0, 4.0)),
        p_ea=float(10.0 ** rng.uniform(0.0, 1.5)),
        r_b=float(rng.uniform(r_b_lo, r_b_hi)),
        delta=float(rng.uniform(0.05, 0.3)),
        epsilon=float(10.0 ** rng.uniform(-3.0, -0.7)),
        rho_b=rho_b, rho_ea=rho_ea,
    ))


def random_point(rng: np.random.Generator, params: SystemParams):
    """(p_a, theta, r_s) strictly inside the admissible box."""
    p_a = float(rng.uniform(0.2, 0.8)) * params.p_max
    theta = float(rng.uniform(0.02, 0.98))
    r_s = float(rng.uniform(0.05, 0.9)) * params.r_b
    return p_a, theta, r_s


def random_split(rng: np.random.Generator, params: SystemParams):
    p_a, theta, r_s = random_point(rng, params)
    return make_split(params, p_a, theta), r_s


@pytest.fixture
def baseline_params() -> SystemParams:
    """The antenna-sweep scenario at N=6 (dB values converted)."""
    return validate(SystemParams(
        n_antennas=6, k_passive=1, m_active=1,
        var_ab=db_to_linear(10.0), var_aea=db_to_linear(3.0),
        var_aek=db_to_linear(3.0), var_eab=db_to_linear(3.0),
        var_jb=db_to_linear(2.0), var_jea=db_to_linear(7.0),
        var_jek=db_to_linear(7.0),
        p_max=db_to_linear(40.0), p_ea=db_to_linear(10.0),
        r_b=8.0, delta=0.1, epsilon=1e-2,
    ))
