"""Sampling oracle that validates every closed form in :mod:`secrate.closedform`.

Channel realizations come from a counter-based Philox stream: trial ``i``
owns the uniform slots ``[i*B, (i+1)*B)`` where ``B`` is fixed by the
scenario shape, and every Gaussian consumes its own Box-Muller pair of
slots. Identical (seed, trial_index) therefore produce bit-identical draws
no matter how trials are batched, ordered, or threaded, and whole batches
vectorize into single numpy passes.

SNRs are interference-limited to match the closed forms (receiver noise is
excluded unless ``include_noise`` is set, which is a sensitivity option
only). Complex Gaussians follow the convention CN(0, s2) = independent real
and imaginary parts of variance s2/2 each.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .closedform import (
    cdf_snr_active, cdf_snr_active_imperfect, cdf_snr_active_multi, cdf_snr_bob,
    cdf_snr_passive, cdf_snr_passive_multi, outage_metrics, rate_gap_threshold,
    transmission_outage, transmission_outage_an_leakage,
)
from .errors import DegenerateDistributionWarning, RangeError
from .model import PowerSplit, SystemParams

_PHILOX_BLOCK = 4  # Philox advances by 128-bit blocks = 4 uint64 outputs
_DEN_FLOOR = 1e-300
_CHUNK_TRIALS = 16384


# ---------------------------------------------------------------------------
# Counter-based channel sampling
# ---------------------------------------------------------------------------

def _complex_count(params: SystemParams) -> int:
    n, m, k = params.n_antennas, params.m_active, params.k_passive
    return 2 * n + 2 * n * m + n * k + 2 + m + k


def slots_per_trial(params: SystemParams) -> int:
    """Uniform slots one trial consumes (2 per Gaussian, 4 per complex entry)."""
    return 4 * _complex_count(params)


def _uniform_slots(seed: int, start_slot: int, count: int) -> np.ndarray:
    if start_slot % _PHILOX_BLOCK:
        raise ValueError("slot ranges must start on a Philox block boundary")
    bits = Philox(key=seed)
    if start_slot:
        bits.advance(start_slot // _PHILOX_BLOCK)
    return Generator(bits).random(count)


def _standard_normals(u: np.ndarray) -> np.ndarray:
    """Box-Muller on consecutive slot pairs; returns half as many normals."""
    u1 = u[..., 0::2]
    u2 = u[..., 1::2]
    return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)


@dataclass(frozen=True)
class ChannelBatch:
    """Channel realizations for a contiguous range of trials (leading axis)."""

    g_b: np.ndarray        # (T, N) true jammer->Bob
    g_b_est: np.ndarray    # (T, N) estimated jammer->Bob
    e_b: np.ndarray        # (T, N) estimation error, g_b = rho_b*g_b_est + e_b
    g_ea: np.ndarray       # (T, N, M) true jammer->active
    g_ea_est: np.ndarray   # (T, N, M)
    e_ea: np.ndarray       # (T, N, M)
    g_ek: np.ndarray       # (T, N, K) jammer->passive
    h_ab: np.ndarray       # (T,) Alice->Bob
    f_eab: np.ndarray      # (T,) active eavesdropper->Bob
    h_aea: np.ndarray      # (T, M) Alice->active
    h_aek: np.ndarray      # (T, K) Alice->passive


@dataclass(frozen=True)
class ChannelDraw:
    """One channel realization (single-trial view of :class:`ChannelBatch`)."""

    g_b: np.ndarray
    g_b_est: np.ndarray
    e_b: np.ndarray
    g_ea: np.ndarray
    g_ea_est: np.ndarray
    e_ea: np.ndarray
    g_ek: np.ndarray
    h_ab: complex
    f_eab: complex
    h_aea: np.ndarray
    h_aek: np.ndarray


def draw_batch(params: SystemParams, seed: int, start: int, stop: int) -> ChannelBatch:
    """Draw trials [start, stop); bit-identical per trial regardless of batching."""
    n, m, k = params.n_antennas, params.m_active, params.k_passive
    count = stop - start
    slots = slots_per_trial(params)
    u = _uniform_slots(seed, start * slots, count * slots).reshape(count, slots)
    z = _standard_normals(u)
    c = (z[:, 0::2] + 1j * z[:, 1::2]) / np.sqrt(2.0)  # unit-variance complex

    pos = 0

    def take(width: int) -> np.ndarray:
        nonlocal pos
        out = c[:, pos:pos + width]
        pos += width
        return out

    rho_b, rho_ea = params.rho_b, params.rho_ea
    g_b_est = take(n) * np.sqrt(params.var_jb)
    e_b = take(n) * np.sqrt((1.0 - rho_b ** 2) * params.var_jb)
    g_ea_est = take(n * m).reshape(count, m, n).swapaxes(1, 2) * np.sqrt(params.var_jea)
    e_ea = take(n * m).reshape(count, m, n).swapaxes(1, 2) * np.sqrt(
        (1.0 - rho_ea ** 2) * params.var_jea)
    g_ek = take(n * k).reshape(count, k, n).swapaxes(1, 2) * np.sqrt(params.var_jek)
    h_ab = take(1)[:, 0] * np.sqrt(params.var_ab)
    f_eab = take(1)[:, 0] * np.sqrt(params.var_eab)
    h_aea = take(m) * np.sqrt(params.var_aea)
    h_aek = take(k) * np.sqrt(params.var_aek)
    return ChannelBatch(
        g_b=rho_b * g_b_est + e_b, g_b_est=g_b_est, e_b=e_b,
        g_ea=rho_ea * g_ea_est + e_ea, g_ea_est=g_ea_est, e_ea=e_ea,
        g_ek=g_ek, h_ab=h_ab, f_eab=f_eab, h_aea=h_aea, h_aek=h_aek,
    )


def sample_channels(params: SystemParams, seed: int, trial_index: int) -> ChannelDraw:
    """One deterministic channel realization keyed by (seed, trial_index)."""
    b = draw_batch(params, seed, trial_index, trial_index + 1)
    return ChannelDraw(
        g_b=b.g_b[0], g_b_est=b.g_b_est[0], e_b=b.e_b[0],
        g_ea=b.g_ea[0], g_ea_est=b.g_ea_est[0], e_ea=b.e_ea[0],
        g_ek=b.g_ek[0], h_ab=complex(b.h_ab[0]), f_eab=complex(b.f_eab[0]),
        h_aea=b.h_aea[0], h_aek=b.h_aek[0],
    )


# ---------------------------------------------------------------------------
# Beam geometry on batches (projector identities; no explicit null basis)
# ---------------------------------------------------------------------------

def _abs2(x: np.ndarray) -> np.ndarray:
    return np.real(x) ** 2 + np.imag(x) ** 2


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _batch_beams(batch: ChannelBatch) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(unit g_b_est direction, beams (T,N,M), orthonormalized beams (T,N,M)).

    Beams are the per-eavesdropper unit MRT directions inside the complement
    of the estimated legitimate channel; the orthonormalized copy spans the
    same subspace for projection-power identities.
    """
    q_b = _unit(batch.g_b_est)
    g = batch.g_ea_est
    inner = np.einsum("tn,tnm->tm", q_b.conj(), g)
    projected = g - q_b[:, :, None] * inner[:, None, :]
    beams = projected / np.linalg.norm(projected, axis=1, keepdims=True)
    m = beams.shape[2]
    ortho = np.empty_like(beams)
    for j in range(m):
        v = beams[:, :, j]
        for i in range(j):
            v = v - ortho[:, :, i] * np.einsum("tn,tn->t", ortho[:, :, i].conj(), v)[:, None]
        ortho[:, :, j] = _unit(v)
    return q_b, beams, ortho


def _complement_power(v: np.ndarray, q_b: np.ndarray, ortho: np.ndarray) -> np.ndarray:
    """||projection of v onto the complement of span{q_b, beams}||^2."""
    total = np.sum(_abs2(v), axis=1)
    total = total - _abs2(np.einsum("tn,tn->t", q_b.conj(), v))
    total = total - np.sum(_abs2(np.einsum("tn,tnm->tm", v.conj(), ortho)), axis=1)
    return np.maximum(total, 0.0)


def _snr_bob_batch(params: SystemParams, batch: ChannelBatch, split: PowerSplit,
                   regime: str, include_noise: bool,
                   include_active_jamming: bool) -> np.ndarray:
    num = split.p_a * _abs2(batch.h_ab)
    noise = 1.0 if include_noise else 0.0
    if regime == "interference_limited":
        den = params.p_ea * _abs2(batch.f_eab) + noise
        return num / np.maximum(den, _DEN_FLOOR)
    # an_leakage: AN reaches Bob only through the estimation error.
    n, m = params.n_antennas, params.m_active
    q_b, beams, ortho = _batch_beams(batch)
    active_leak = np.sum(_abs2(np.einsum("tn,tnm->tm", batch.e_b.conj(), beams)), axis=1)
    passive_leak = _complement_power(batch.e_b, q_b, ortho)
    den = (split.p_ja / m) * active_leak + (split.p_jp / (n - m - 1)) * passive_leak + noise
    if include_active_jamming:
        den = den + params.p_ea * _abs2(batch.f_eab)
    return num / np.maximum(den, _DEN_FLOOR)


def _snr_active_batch(params: SystemParams, batch: ChannelBatch, split: PowerSplit,
                      include_noise: bool) -> np.ndarray:
    """(T, M) SNRs at the active eavesdroppers.

    Beam m is weighed against every true active channel (its own gives the
    MRT gain; the others are the cross-eavesdropper couplings of that beam),
    plus whatever passive AN reaches the channel through estimation error.
    With perfect estimates the passive term is an exact zero.
    """
    n, m = params.n_antennas, params.m_active
    q_b, beams, ortho = _batch_beams(batch)
    cross = _abs2(np.einsum("tnj,tnm->tjm", batch.g_ea.conj(), beams))  # j channels x m beams
    active_term = np.sum(cross, axis=1)  # (T, M): column sums over channels
    passive_term = np.stack(
        [_complement_power(batch.g_ea[:, :, j], q_b, ortho) for j in range(m)], axis=1)
    noise = 1.0 if include_noise else 0.0
    den = (split.p_ja / m) * active_term + (split.p_jp / (n - m - 1)) * passive_term + noise
    num = split.p_a * _abs2(batch.h_aea)
    return num / np.maximum(den, _DEN_FLOOR)


def _snr_passive_batch(params: SystemParams, batch: ChannelBatch, split: PowerSplit,
                       beam_leakage: str, include_noise: bool) -> np.ndarray:
    """(T, K) SNRs at the passive eavesdroppers.

    ``beam_leakage`` selects how the active-beam AN couples in: 'subspace'
    projects onto the beam span (the equal-power-per-dimension model the
    closed forms integrate), 'per_beam' sums the literal per-beam gains
    (sensitivity mode; the beams are not mutually orthogonal).
    """
    if beam_leakage not in ("subspace", "per_beam"):
        raise RangeError(f"unknown beam_leakage mode {beam_leakage!r}")
    n, m, k = params.n_antennas, params.m_active, params.k_passive
    q_b, beams, ortho = _batch_beams(batch)
    basis = ortho if beam_leakage == "subspace" else beams
    noise = 1.0 if include_noise else 0.0
    out = np.empty((batch.g_ek.shape[0], k))
    num = split.p_a * _abs2(batch.h_aek)
    for j in range(k):
        g = batch.g_ek[:, :, j]
        active_leak = np.sum(_abs2(np.einsum("tn,tnm->tm", g.conj(), basis)), axis=1)
        passive_leak = _complement_power(g, q_b, ortho)
        den = (split.p_ja / m) * active_leak + (split.p_jp / (n - m - 1)) * passive_leak + noise
        out[:, j] = num[:, j] / np.maximum(den, _DEN_FLOOR)
    return out


# ---------------------------------------------------------------------------
# Single-draw reference operations
# ---------------------------------------------------------------------------

def _as_batch(draw: ChannelDraw) -> ChannelBatch:
    return ChannelBatch(
        g_b=draw.g_b[None], g_b_est=draw.g_b_est[None], e_b=draw.e_b[None],
        g_ea=draw.g_ea[None], g_ea_est=draw.g_ea_est[None], e_ea=draw.e_ea[None],
        g_ek=draw.g_ek[None], h_ab=np.array([draw.h_ab]), f_eab=np.array([draw.f_eab]),
        h_aea=draw.h_aea[None], h_aek=draw.h_aek[None],
    )


def snr_bob(params: SystemParams, draw: ChannelDraw, split: PowerSplit,
            regime: str = "auto", include_noise: bool = False,
            include_active_jamming: bool = False) -> float:
    """Bob's instantaneous SNR under the chosen impairment regime."""
    if regime == "auto":
        regime = "an_leakage" if params.rho_b < 1.0 else "interference_limited"
    if regime not in ("interference_limited", "an_leakage"):
        raise RangeError(f"unknown Bob SNR regime {regime!r}")
    if regime == "an_leakage" and params.rho_b >= 1.0:
        warnings.warn("rho_b = 1 leaks no AN to Bob; denominator is floored",
                      DegenerateDistributionWarning, stacklevel=2)
    return float(_snr_bob_batch(params, _as_batch(draw), split, regime,
                                include_noise, include_active_jamming)[0])


def snr_active(params: SystemParams, draw: ChannelDraw, split: PowerSplit,
               include_noise: bool = False) -> np.ndarray:
    """Per-active-eavesdropper SNR vector (length M).

    The estimated channels steer the beams; with rho_ea = 1 they coincide
    with the true ones and the perfect-CSI expressions are recovered exactly.
    """
    return _snr_active_batch(params, _as_batch(draw), split, include_noise)[0]


def snr_passive(params: SystemParams, draw: ChannelDraw, split: PowerSplit,
                beam_leakage: str = "subspace", include_noise: bool = False) -> np.ndarray:
    """Per-passive-eavesdropper SNR vector (length K)."""
    return _snr_passive_batch(params, _as_batch(draw), split, beam_leakage,
                              include_noise)[0]


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class McEstimate:
    """Binomial estimate with its standard error sqrt(p(1-p)/n)."""

    p_hat: float
    trials: int
    std_err: float


def _make_estimate(hits: int, trials: int) -> McEstimate:
    p = hits / trials
    return McEstimate(p_hat=p, trials=trials, std_err=float(np.sqrt(p * (1.0 - p) / trials)))


def _chunks(trials: int):
    start = 0
    while start < trials:
        stop = min(start + _CHUNK_TRIALS, trials)
        yield start, stop
        start = stop


def snr_samples(params: SystemParams, split: PowerSplit, trials: int, seed: int,
                bob_regime: str = "auto", beam_leakage: str = "subspace",
                include_noise: bool = False) -> dict[str, np.ndarray]:
    """Raw SNR samples: 'bob' (T,), 'active' (T, M), 'passive' (T, K).

    Active and passive columns share each trial's channels (the physical
    coupling); independent-branch selection combining is handled by
    :func:`estimate_outages`.
    """
    if bob_regime == "auto":
        bob_regime = "an_leakage" if params.rho_b < 1.0 else "interference_limited"
    bob, active, passive = [], [], []
    for start, stop in _chunks(trials):
        batch = draw_batch(params, seed, start, stop)
        bob.append(_snr_bob_batch(params, batch, split, bob_regime, include_noise, False))
        active.append(_snr_active_batch(params, batch, split, include_noise))
        passive.append(_snr_passive_batch(params, batch, split, beam_leakage, include_noise))
    return {"bob": np.concatenate(bob), "active": np.concatenate(active),
            "passive": np.concatenate(passive)}


def estimate_outages(params: SystemParams, split: PowerSplit, r_s: float, trials: int,
                     seed: int, independent_actives: bool = True,
                     beam_leakage: str = "subspace",
                     include_noise: bool = False) -> dict[str, McEstimate]:
    """Monte Carlo estimates of the three outage probabilities.

    With several active eavesdroppers the selection-combining estimate draws
    each eavesdropper's SNR from its own block of trials (branch m uses
    trials [m*T, (m+1)*T)): the jointly-drawn maxima are coupled through the
    shared channel vectors, which the independence-based closed form does not
    model. Set ``independent_actives=False`` for the coupled variant.
    """
    if trials < 1:
        raise RangeError("need at least one trial")
    m = params.m_active
    threshold_to = rate_gap_threshold(params.r_b, 0.0)
    threshold_so = rate_gap_threshold(params.r_b, r_s)
    hits_to = 0
    hits_so2 = 0
    max_active = np.full(trials, -np.inf)
    bob_regime = "an_leakage" if params.rho_b < 1.0 else "interference_limited"
    for start, stop in _chunks(trials):
        batch = draw_batch(params, seed, start, stop)
        bob = _snr_bob_batch(params, batch, split, bob_regime, include_noise, False)
        hits_to += int(np.count_nonzero(bob < threshold_to))
        passive = _snr_passive_batch(params, batch, split, beam_leakage, include_noise)
        hits_so2 += int(np.count_nonzero(passive.max(axis=1) >= threshold_so))
        if not (independent_actives and m > 1):
            active = _snr_active_batch(params, batch, split, include_noise)
            max_active[start:stop] = active.max(axis=1)
    if independent_actives and m > 1:
        for branch in range(m):
            for start, stop in _chunks(trials):
                batch = draw_batch(params, seed, branch * trials + start, branch * trials + stop)
                active = _snr_active_batch(params, batch, split, include_noise)
                col = active[:, branch]
                np.maximum(max_active[start:stop], col, out=max_active[start:stop])
    hits_so1 = int(np.count_nonzero(max_active >= threshold_so))
    return {
        "p_to": _make_estimate(hits_to, trials),
        "p_so1": _make_estimate(hits_so1, trials),
        "p_so2": _make_estimate(hits_so2, trials),
    }


def ks_statistic(samples: np.ndarray, cdf) -> float:
    """Sup distance between the empirical CDF of ``samples`` and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise RangeError("need samples for a KS statistic")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(f - (i - 1) / n), np.max(i / n - f)))


# ---------------------------------------------------------------------------
# Closed-form vs Monte Carlo verification
# ---------------------------------------------------------------------------

KS_THRESHOLD = 0.01
Z_THRESHOLD = 3.0


def _corrupted(value: float, name: str, corrupt: str | None) -> float:
    if corrupt == name:
        return min(value * 1.3 + 0.05, 1.0)
    return value


def verification_rows(params: SystemParams, split: PowerSplit, r_s: float, trials: int,
                      seed: int, corrupt: str | None = None) -> list[dict]:
    """Compare every applicable closed form against its sampling estimate.

    Returns ordered row dicts with keys: name, kind ('cdf'|'outage'|'bound'),
    closed_form, estimate, std_err, z_score, ks_stat, threshold, passed.
    The ``corrupt`` hook perturbs one named closed form so detector failure
    paths can be exercised.
    """
    m = params.m_active
    samples = snr_samples(params, split, trials, seed)
    rows: list[dict] = []

    def cdf_row(name, data, cdf):
        if corrupt == name:
            inner = cdf
            cdf = lambda x: np.clip(np.asarray(inner(x)) + 0.05, 0.0, 1.0)  # noqa: E731
        ks = ks_statistic(data, cdf)
        rows.append({"name": name, "kind": "cdf", "closed_form": float("nan"),
                     "estimate": float("nan"), "std_err": float("nan"),
                     "z_score": float("nan"), "ks_stat": ks, "threshold": KS_THRESHOLD,
                     "passed": ks <= KS_THRESHOLD})

    def point_row(name, kind, closed, est: McEstimate):
        closed = _corrupted(closed, name, corrupt)
        se = float(np.sqrt(closed * (1.0 - closed) / est.trials))
        if se == 0.0:
            z = 0.0 if est.p_hat == closed else float("inf")
        else:
            z = (est.p_hat - closed) / se
        passed = (z <= Z_THRESHOLD) if kind == "bound" else (abs(z) <= Z_THRESHOLD)
        rows.append({"name": name, "kind": kind, "closed_form": closed,
                     "estimate": est.p_hat, "std_err": se, "z_score": z,
                     "ks_stat": float("nan"), "threshold": Z_THRESHOLD, "passed": passed})

    if params.rho_b == 1.0:
        cdf_row("cdf_snr_bob", samples["bob"], lambda x: cdf_snr_bob(x, params, split.p_a))
    if m == 1:
        if params.rho_ea == 1.0:
            cdf_row("cdf_snr_active", samples["active"][:, 0],
                    lambda x: cdf_snr_active(x, params, split))
        else:
            cdf_row("cdf_snr_active_imperfect", samples["active"][:, 0],
                    lambda x: cdf_snr_active_imperfect(x, params, split))
        cdf_row("cdf_snr_passive", samples["passive"][:, 0],
                lambda x: cdf_snr_passive(x, params, split))
    else:
        cdf_row("cdf_snr_active_multi", samples["active"][:, 0],
                lambda x: cdf_snr_active_multi(x, params, split))
        cdf_row("cdf_snr_passive_multi", samples["passive"][:, 0],
                lambda x: cdf_snr_passive_multi(x, params, split))

    estimates = estimate_outages(params, split, r_s, trials, seed)
    metrics = outage_metrics(params, split, r_s)
    if params.rho_b == 1.0:
        point_row("transmission_outage", "outage",
                  transmission_outage(params, split.p_a), estimates["p_to"])
    else:
        point_row("transmission_outage_an_leakage", "bound",
                  transmission_outage_an_leakage(params, split.p_a), estimates["p_to"])
    active_name = ("sop_active_multi" if m > 1 else
                   "sop_active_imperfect" if params.rho_ea < 1.0 else "sop_active")
    point_row(active_name, "outage", metrics.p_so1, estimates["p_so1"])
    passive_name = "sop_passive_multi" if m > 1 else "sop_passive"
    point_row(passive_name, "outage", metrics.p_so2, estimates["p_so2"])
    return rows
