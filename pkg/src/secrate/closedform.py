"""Closed-form SNR distributions, outage probabilities, and their derivatives.

Everything here is an analytic expression in the interference-limited regime
(receiver thermal noise negligible next to jamming); the Monte Carlo module
provides the matching sampling oracles. Probabilities are computed in
log-space (log1p/expm1) so that antenna and eavesdropper counts up to ~64
neither underflow nor lose the tails.

Mode names for the minimum Alice power:

- ``noise_limited``: Bob limited by unit thermal noise only (the default
  analysis flow when the jammer->Bob estimate is perfect).
- ``interference_limited``: Bob limited by the active eavesdropper's jamming;
  consistent with :func:`transmission_outage`.
- ``an_leakage``: Bob limited by AN leaking through the imperfect jammer->Bob
  estimate (requires rho_b < 1); consistent with
  :func:`transmission_outage_an_leakage`.
- ``auto``: ``an_leakage`` when rho_b < 1, else ``noise_limited``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AlphaZero, DegenerateDistributionWarning, RangeError, Undefined
from .model import PowerSplit, SystemParams

PA_MODES = ("noise_limited", "interference_limited", "an_leakage")

_LN2 = np.log(2.0)


def _maybe_float(x):
    arr = np.asarray(x)
    return float(arr) if arr.ndim == 0 else arr


def rate_gap_threshold(r_b: float, r_s) -> float:
    """SNR threshold 2**(r_b - r_s) - 1 for the secrecy-rate margin."""
    return _maybe_float(np.expm1(_LN2 * (r_b - np.asarray(r_s, dtype=float))))


@dataclass(frozen=True)
class DerivedRatios:
    """Normalized jamming-to-signal ratios at the secrecy threshold.

    ``alpha`` (active link), ``beta`` (passive link), and ``lambda_cap`` =
    (1 - rho_ea^2) * alpha / (N - 1), the scale of the imperfect-CSI
    theta-derivative quadratic.
    """

    alpha: float
    beta: float
    lambda_cap: float


def alpha_ratio(params: SystemParams, p_a: float, r_s: float):
    x = rate_gap_threshold(params.r_b, r_s)
    return (params.p_max / p_a - 1.0) * params.var_jea * x / params.var_aea


def beta_ratio(params: SystemParams, p_a: float, r_s: float):
    x = rate_gap_threshold(params.r_b, r_s)
    return (params.p_max / p_a - 1.0) * params.var_jek * x / params.var_aek


def derived_ratios(params: SystemParams, p_a: float, r_s: float) -> DerivedRatios:
    a = alpha_ratio(params, p_a, r_s)
    b = beta_ratio(params, p_a, r_s)
    lam = (1.0 - params.rho_ea ** 2) * a / (params.n_antennas - 1)
    return DerivedRatios(alpha=float(a), beta=float(b), lambda_cap=float(lam))


# ---------------------------------------------------------------------------
# SNR CDFs
# ---------------------------------------------------------------------------

def cdf_snr_bob(x, params: SystemParams, p_a: float):
    """CDF of Bob's SNR: the information link over the active jamming link."""
    t = np.asarray(x, dtype=float) * params.p_ea * params.var_eab / (p_a * params.var_ab)
    return _maybe_float(t / (1.0 + t))


def cdf_snr_active(x, params: SystemParams, split: PowerSplit):
    """CDF of the single active eavesdropper's SNR under perfect estimates.

    With zero AN power on the active beam the interference-limited SNR is
    unbounded; the formula's limit is 0 for every finite x, returned with a
    DegenerateDistributionWarning.
    """
    if split.p_ja == 0.0:
        warnings.warn("active-beam AN power is zero; SNR is unbounded in the "
                      "interference-limited model", DegenerateDistributionWarning,
                      stacklevel=2)
        return _maybe_float(np.zeros_like(np.asarray(x, dtype=float)))
    n = params.n_antennas
    t = split.p_ja * params.var_jea * np.asarray(x, dtype=float) / (split.p_a * params.var_aea)
    return _maybe_float(-np.expm1(-(n - 1) * np.log1p(t)))


def cdf_snr_passive(x, params: SystemParams, split: PowerSplit):
    """CDF of one passive eavesdropper's SNR under perfect estimates."""
    if split.p_ja == 0.0 and split.p_jp == 0.0:
        warnings.warn("total AN power is zero; SNR is unbounded in the "
                      "interference-limited model", DegenerateDistributionWarning,
                      stacklevel=2)
        return _maybe_float(np.zeros_like(np.asarray(x, dtype=float)))
    n = params.n_antennas
    x = np.asarray(x, dtype=float)
    scale = split.p_a * params.var_aek
    t1 = split.p_ja * x * params.var_jek / scale
    t2 = split.p_jp * x * params.var_jek / ((n - 2) * scale)
    return _maybe_float(-np.expm1(-np.log1p(t1) - (n - 2) * np.log1p(t2)))


def cdf_snr_active_imperfect(x, params: SystemParams, split: PowerSplit):
    """CDF of the active eavesdropper's SNR when its jammer-side estimate has
    correlation rho_ea: the mispointed beam plus passive-AN leakage raise the
    interference floor."""
    n = params.n_antennas
    rho_bar = 1.0 - params.rho_ea ** 2
    x = np.asarray(x, dtype=float)
    t = split.p_ja * params.var_jea * x / (split.p_a * params.var_aea)
    tp = split.p_jp * rho_bar * params.var_jea * x / ((n - 2) * split.p_a * params.var_aea)
    log_sf = (n - 2) * np.log1p(rho_bar * t) - (n - 1) * np.log1p(t) - (n - 2) * np.log1p(tp)
    return _maybe_float(-np.expm1(log_sf))


def cdf_snr_active_multi(x, params: SystemParams, split: PowerSplit):
    """CDF of one active eavesdropper's SNR with M beams sharing the AN power."""
    n, m = params.n_antennas, params.m_active
    t = (split.p_ja / m) * params.var_jea * np.asarray(x, dtype=float) / (split.p_a * params.var_aea)
    return _maybe_float(-np.expm1(-(m + n - 2) * np.log1p(t)))


def cdf_snr_passive_multi(x, params: SystemParams, split: PowerSplit):
    """CDF of one passive eavesdropper's SNR with M active beams present."""
    n, m = params.n_antennas, params.m_active
    x = np.asarray(x, dtype=float)
    scale = split.p_a * params.var_aek
    t1 = split.p_ja * x * params.var_jek / (m * scale)
    t2 = split.p_jp * x * params.var_jek / ((n - m - 1) * scale)
    return _maybe_float(-np.expm1(-m * np.log1p(t1) - (n - m - 1) * np.log1p(t2)))


# ---------------------------------------------------------------------------
# Transmission outage and minimum Alice power
# ---------------------------------------------------------------------------

def transmission_outage(params: SystemParams, p_a: float) -> float:
    """Probability Bob's capacity falls below r_b, active jamming limited."""
    return float(cdf_snr_bob(rate_gap_threshold(params.r_b, 0.0), params, p_a))


def transmission_outage_noise_limited(params: SystemParams, p_a: float) -> float:
    """Bob outage with unit thermal noise as the only impairment."""
    x = rate_gap_threshold(params.r_b, 0.0)
    return float(-np.expm1(-x / (p_a * params.var_ab)))


def transmission_outage_an_leakage(params: SystemParams, p_a: float) -> float:
    """Bob outage bound when AN leaks through the imperfect jammer->Bob estimate.

    Uses the mean leaked power (p_max - p_a)(1 - rho_b^2)var_jb as the
    interference level; by Jensen this upper-bounds the true outage of the
    leakage-limited SNR. Requires rho_b < 1.
    """
    if params.rho_b >= 1.0:
        raise RangeError("an_leakage outage requires rho_b < 1; use the perfect-CSI path")
    x = rate_gap_threshold(params.r_b, 0.0)
    c = (params.p_max / p_a - 1.0) * (1.0 - params.rho_b ** 2) * params.var_jb * x / params.var_ab
    return float(-np.expm1(-c))


def resolve_pa_mode(params: SystemParams, mode: str = "auto") -> str:
    if mode == "auto":
        return "an_leakage" if params.rho_b < 1.0 else "noise_limited"
    if mode not in PA_MODES:
        raise RangeError(f"unknown pa mode {mode!r}; expected one of {PA_MODES} or 'auto'")
    return mode


def min_pa(params: SystemParams, mode: str = "auto") -> float:
    """Smallest Alice power meeting the transmission-outage target ``delta``.

    Returns the required power even when it exceeds p_max; callers decide
    feasibility (the optimizer reports PA_EXCEEDS_PMAX).
    """
    mode = resolve_pa_mode(params, mode)
    x = rate_gap_threshold(params.r_b, 0.0)
    log_keep = np.log1p(-params.delta)  # ln(1 - delta), negative
    if mode == "noise_limited":
        return float(x / (-log_keep * params.var_ab))
    if mode == "interference_limited":
        return float(x * (1.0 - params.delta) * params.p_ea * params.var_eab
                     / (params.delta * params.var_ab))
    if params.rho_b >= 1.0:
        raise RangeError("an_leakage mode requires rho_b < 1")
    denom = 1.0 - params.var_ab * log_keep / ((1.0 - params.rho_b ** 2) * params.var_jb * x)
    return float(params.p_max / denom)


def transmission_outage_for_mode(params: SystemParams, p_a: float, mode: str) -> float:
    """The outage expression whose delta-level solution ``min_pa(mode)`` is."""
    mode = resolve_pa_mode(params, mode)
    if mode == "noise_limited":
        return transmission_outage_noise_limited(params, p_a)
    if mode == "interference_limited":
        return transmission_outage(params, p_a)
    return transmission_outage_an_leakage(params, p_a)


# ---------------------------------------------------------------------------
# Secrecy outage probabilities
# ---------------------------------------------------------------------------

def sop_active(params: SystemParams, split: PowerSplit, r_s: float):
    """Secrecy outage at the single active eavesdropper, perfect estimates."""
    n = params.n_antennas
    ta = split.theta * alpha_ratio(params, split.p_a, r_s)
    return _maybe_float(np.exp((1.0 - n) * np.log1p(ta)))


def sop_passive(params: SystemParams, split: PowerSplit, r_s: float):
    """Secrecy outage of the best of K passive eavesdroppers."""
    n, k = params.n_antennas, params.k_passive
    b = beta_ratio(params, split.p_a, r_s)
    theta = split.theta
    with np.errstate(divide="ignore"):
        log_keep = -np.log1p(b * theta) - (n - 2) * np.log1p(b * (1.0 - theta) / (n - 2))
        g = np.exp(log_keep)
        return _maybe_float(-np.expm1(k * np.log1p(-np.minimum(g, 1.0))))


def sop_active_imperfect(params: SystemParams, split: PowerSplit, r_s: float):
    """Secrecy outage at the active eavesdropper with estimate correlation rho_ea.

    Reduces exactly to :func:`sop_active` at rho_ea = 1.
    """
    n = params.n_antennas
    a = alpha_ratio(params, split.p_a, r_s)
    rho_bar = 1.0 - params.rho_ea ** 2
    theta = split.theta
    log_p = ((n - 2) * np.log1p(theta * rho_bar * a)
             - (n - 1) * np.log1p(theta * a)
             - (n - 2) * np.log1p((1.0 - theta) * rho_bar * a / (n - 2)))
    return _maybe_float(np.exp(log_p))


def sop_active_multi(params: SystemParams, split: PowerSplit, r_s: float):
    """Secrecy outage of the best of M active eavesdroppers (selection combining)."""
    n, m = params.n_antennas, params.m_active
    x = rate_gap_threshold(params.r_b, r_s)
    t = (split.p_ja / m) * params.var_jea * np.asarray(x, dtype=float) / (split.p_a * params.var_aea)
    with np.errstate(divide="ignore"):
        sf_one = np.exp(-(m + n - 2) * np.log1p(t))  # 1 - F for one eavesdropper
        # 1 - F^M = 1 - (1 - sf)^M
        return _maybe_float(-np.expm1(m * np.log1p(-np.minimum(sf_one, 1.0))))


def sop_passive_multi(params: SystemParams, split: PowerSplit, r_s: float):
    """Secrecy outage of the best of K passive eavesdroppers with M active beams."""
    n, m, k = params.n_antennas, params.m_active, params.k_passive
    x = rate_gap_threshold(params.r_b, r_s)
    scale = split.p_a * params.var_aek
    t1 = split.p_ja * np.asarray(x, dtype=float) * params.var_jek / (m * scale)
    t2 = split.p_jp * np.asarray(x, dtype=float) * params.var_jek / ((n - m - 1) * scale)
    with np.errstate(divide="ignore"):
        sf_one = np.exp(-m * np.log1p(t1) - (n - m - 1) * np.log1p(t2))
        return _maybe_float(-np.expm1(k * np.log1p(-np.minimum(sf_one, 1.0))))


@dataclass(frozen=True)
class OutageMetrics:
    p_to: float
    p_so1: float
    p_so2: float


def outage_metrics(params: SystemParams, split: PowerSplit, r_s: float) -> OutageMetrics:
    """All three outage probabilities using the forms the scenario calls for."""
    if params.rho_b < 1.0:
        p_to = transmission_outage_an_leakage(params, split.p_a)
    else:
        p_to = transmission_outage(params, split.p_a)
    if params.m_active > 1:
        p1 = float(sop_active_multi(params, split, r_s))
        p2 = float(sop_passive_multi(params, split, r_s))
    else:
        if params.rho_ea < 1.0:
            p1 = float(sop_active_imperfect(params, split, r_s))
        else:
            p1 = float(sop_active(params, split, r_s))
        p2 = float(sop_passive(params, split, r_s))
    return OutageMetrics(p_to=p_to, p_so1=p1, p_so2=p2)


# ---------------------------------------------------------------------------
# Derivatives in theta and rho, and the theta-derivative quadratic
# ---------------------------------------------------------------------------

def _quadratic_coeffs(n: int, alpha: float, rho: float) -> tuple[float, float, float]:
    """Coefficients (a, b, c) of the quadratic factor of d(sop_active)/d(theta).

    The derivative factors as A(theta) * (a theta^2 + b theta + c) with
    A > 0, so the quadratic's sign pattern is the derivative's. Requires
    rho < 1 and alpha > 0.
    """
    rho_bar = 1.0 - rho ** 2
    r = rho_bar * alpha
    a = (n - 1) * r / (n - 2)
    b = (n - 1 - r) / (n - 2)
    c = -(n - 1) * rho ** 2 / r - (n - 1) / (n - 2) + rho_bar
    return a, b, c


def _quadratic_roots(n: int, alpha: float, rho: float) -> tuple[float, float, float]:
    """(negative root, positive root, vertex value); roots always straddle 0."""
    a, b, c = _quadratic_coeffs(n, alpha, rho)
    disc = b * b - 4.0 * a * c
    sq = float(np.sqrt(disc))
    q = -0.5 * (b + sq) if b >= 0.0 else -0.5 * (b - sq)
    r1, r2 = q / a, c / q
    return min(r1, r2), max(r1, r2), c - b * b / (4.0 * a)


@dataclass(frozen=True)
class ThetaProfile:
    """Shape of the active-eavesdropper SOP as a function of the AN ratio.

    ``theta_pos`` is the SOP minimizer when it lies in (0,1);
    ``decreasing_on_unit`` is True when the SOP strictly decreases on all of
    [0,1] (equivalently theta_pos > 1).
    """

    theta_neg: float
    theta_pos: float
    min_value: float
    decreasing_on_unit: bool


def active_sop_theta_profile(params: SystemParams, p_a: float, r_s: float) -> ThetaProfile:
    """Roots and minimum of the theta-derivative quadratic for rho_ea in (0,1)."""
    rho = params.rho_ea
    if rho in (0.0, 1.0):
        raise Undefined("theta profile requires 0 < rho_ea < 1 (the quadratic degenerates)")
    alpha = float(alpha_ratio(params, p_a, r_s))
    if alpha <= 0.0:
        raise AlphaZero("alpha is zero: no AN margin at this rate/power")
    t_neg, t_pos, vmin = _quadratic_roots(params.n_antennas, alpha, rho)
    return ThetaProfile(theta_neg=float(t_neg), theta_pos=float(t_pos),
                        min_value=float(vmin), decreasing_on_unit=bool(t_pos > 1.0))


def active_sop_theta_quadratic(params: SystemParams, p_a: float, r_s: float, theta) -> float:
    """Value of the theta-derivative quadratic at ``theta`` (for root checks)."""
    alpha = float(alpha_ratio(params, p_a, r_s))
    a, b, c = _quadratic_coeffs(params.n_antennas, alpha, params.rho_ea)
    th = np.asarray(theta, dtype=float)
    return _maybe_float((a * th + b) * th + c)


def monotone_condition(params: SystemParams, p_a: float, r_s: float) -> bool:
    """Closed-form test for theta_pos > 1: rho^2 (1+L) > L (1 + (N-1) L).

    Algebraically equivalent to comparing the quadratic's positive root with
    one; kept as an independent cross-check of the root computation.
    """
    n = params.n_antennas
    rho = params.rho_ea
    alpha = float(alpha_ratio(params, p_a, r_s))
    lam = (1.0 - rho ** 2) * alpha / (n - 1)
    return rho ** 2 * (1.0 + lam) > lam * (1.0 + (n - 1) * lam)


def sop_active_dtheta(params: SystemParams, split: PowerSplit, r_s: float) -> float:
    """d(sop_active)/d(theta) at the split's theta.

    Perfect estimates give the strictly negative closed form; with
    rho_ea < 1 the derivative is A(theta) times the quadratic, where A > 0.
    """
    n = params.n_antennas
    alpha = float(alpha_ratio(params, split.p_a, r_s))
    if alpha == 0.0:
        return 0.0
    theta = split.theta
    if params.rho_ea == 1.0:
        return float((1.0 - n) * alpha * np.exp(-n * np.log1p(theta * alpha)))
    rho_bar = 1.0 - params.rho_ea ** 2
    log_a = ((n - 3) * np.log1p(theta * rho_bar * alpha)
             - n * np.log1p(theta * alpha)
             - (n - 1) * np.log1p((1.0 - theta) * rho_bar * alpha / (n - 2)))
    a_factor = rho_bar * alpha ** 2 * np.exp(log_a)
    a, b, c = _quadratic_coeffs(n, alpha, params.rho_ea)
    return float(a_factor * ((a * theta + b) * theta + c))


def sop_passive_dtheta(params: SystemParams, split: PowerSplit, r_s: float) -> float:
    """d(sop_passive)/d(theta): negative below theta = 1/(N-1), zero there,
    positive above."""
    n, k = params.n_antennas, params.k_passive
    b = float(beta_ratio(params, split.p_a, r_s))
    if b == 0.0:
        return 0.0
    theta = split.theta
    log_keep = -np.log1p(b * theta) - (n - 2) * np.log1p(b * (1.0 - theta) / (n - 2))
    g = np.exp(log_keep)
    outer = k * np.exp((k - 1) * np.log1p(-min(float(g), 1.0))) if k > 1 else 1.0
    ratio = (b / (1.0 + b * theta)) ** 2
    inner = np.exp((1.0 - n) * np.log1p(b * (1.0 - theta) / (n - 2)))
    slope = ((n - 1) * theta - 1.0) / (n - 2)
    return float(outer * ratio * inner * slope)


def sop_active_imperfect_drho(params: SystemParams, split: PowerSplit, r_s: float) -> float:
    """d(sop_active_imperfect)/d(rho_ea).

    Carries the sign of 1 - theta (N-1): a sharper estimate steers AN more
    precisely at the active eavesdropper (lowering its SOP) only when the
    active beam holds at least 1/(N-1) of the AN budget; below that, passive
    AN leaking through the estimation error was doing the jamming, and a
    better estimate removes it.
    """
    n = params.n_antennas
    rho = params.rho_ea
    alpha = float(alpha_ratio(params, split.p_a, r_s))
    if alpha == 0.0 or rho in (0.0, 1.0):
        return 0.0
    rho_bar = 1.0 - rho ** 2
    theta = split.theta
    p = float(sop_active_imperfect(params, split, r_s))
    num = -2.0 * rho * alpha * (n - 2) * (theta * (n - 1) - 1.0) * p
    den = (1.0 + theta * rho_bar * alpha) * ((n - 2) + (1.0 - theta) * rho_bar * alpha)
    return float(num / den)


# ---------------------------------------------------------------------------
# Grid evaluations (vectorized over rate and AN-ratio grids)
# ---------------------------------------------------------------------------

def sop_grid(params: SystemParams, p_a: float, rs_grid: np.ndarray,
             theta_grid: np.ndarray, which: str) -> np.ndarray:
    """Matrix of a SOP over (rate grid) x (theta grid); rows follow rs_grid.

    ``which`` is one of 'active', 'active_imperfect', 'active_multi',
    'passive', 'passive_multi'. Shares the scalar formulas' structure and
    log-space evaluation.
    """
    n, m, k = params.n_antennas, params.m_active, params.k_passive
    rs = np.asarray(rs_grid, dtype=float)[:, None]
    th = np.asarray(theta_grid, dtype=float)[None, :]
    x = np.expm1(_LN2 * (params.r_b - rs))
    residual_ratio = params.p_max / p_a - 1.0
    if which == "active":
        av = residual_ratio * params.var_jea * x / params.var_aea
        return np.exp((1.0 - n) * np.log1p(th * av))
    if which == "active_imperfect":
        av = residual_ratio * params.var_jea * x / params.var_aea
        rho_bar = 1.0 - params.rho_ea ** 2
        return np.exp((n - 2) * np.log1p(th * rho_bar * av)
                      - (n - 1) * np.log1p(th * av)
                      - (n - 2) * np.log1p((1.0 - th) * rho_bar * av / (n - 2)))
    if which == "active_multi":
        av = residual_ratio * params.var_jea * x / params.var_aea
        with np.errstate(divide="ignore"):
            sf = np.exp((2.0 - m - n) * np.log1p(th * av / m))
            return -np.expm1(m * np.log1p(-np.minimum(sf, 1.0)))
    if which == "passive":
        bv = residual_ratio * params.var_jek * x / params.var_aek
        with np.errstate(divide="ignore"):
            g = np.exp(-np.log1p(bv * th) - (n - 2) * np.log1p(bv * (1.0 - th) / (n - 2)))
            return -np.expm1(k * np.log1p(-np.minimum(g, 1.0)))
    if which == "passive_multi":
        bv = residual_ratio * params.var_jek * x / params.var_aek
        with np.errstate(divide="ignore"):
            g = np.exp(-m * np.log1p(bv * th / m)
                       - (n - m - 1) * np.log1p(bv * (1.0 - th) / (n - m - 1)))
            return -np.expm1(k * np.log1p(-np.minimum(g, 1.0)))
    raise ValueError(f"unknown grid kind {which!r}")
