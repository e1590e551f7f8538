"""Feasible AN-ratio intervals and secrecy-rate maximization.

The rate sweep fixes Alice's power at the minimum meeting the outage target
(both secrecy outages only worsen with more Alice power), then walks the
secrecy rate upward in steps of ``step`` while any AN ratio satisfies both
secrecy constraints. Feasibility is checked on the full interval
intersection, which strengthens the one-sided endpoint comparison: the
returned theta is the feasible point closest to the passive-SOP minimizer,
maximizing constraint slack.

``grid_search_oracle`` is the brute-force cross-check used by the tests; it
shares only the closed-form grid kernels with the sweep, not its interval
logic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import closedform as cf
from .errors import AlphaZero, RangeError
from .model import SystemParams, make_split

ALGORITHMS = ("perfect", "imperfect", "multi")
_ALGORITHM_ALIASES = {"alg1": "perfect", "alg2": "imperfect", "perfect": "perfect",
                      "imperfect": "imperfect", "multi": "multi"}

_BISECT_TOL = 1e-13


def resolve_algorithm(name: str) -> str:
    try:
        return _ALGORITHM_ALIASES[name]
    except KeyError:
        raise RangeError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}") from None


def default_algorithm(params: SystemParams) -> str:
    if params.m_active > 1:
        return "multi"
    return "imperfect" if params.rho_ea < 1.0 else "perfect"


@dataclass(frozen=True)
class ThetaInterval:
    """A closed subinterval of [0,1] of admissible AN ratios (or empty)."""

    lo: float = 0.0
    hi: float = 0.0
    empty: bool = False

    @staticmethod
    def nothing() -> "ThetaInterval":
        return ThetaInterval(lo=math.nan, hi=math.nan, empty=True)

    def intersect(self, other: "ThetaInterval") -> "ThetaInterval":
        if self.empty or other.empty:
            return ThetaInterval.nothing()
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            return ThetaInterval.nothing()
        return ThetaInterval(lo=lo, hi=hi)

    def clip(self, x: float) -> float:
        return min(max(x, self.lo), self.hi)


@dataclass(frozen=True)
class OptResult:
    feasible: bool
    r_s_star: float
    theta_star: float
    p_a_star: float
    steps: int
    infeasibility_reason: str = "NONE"  # PA_EXCEEDS_PMAX | NO_THETA_AT_RS0 | NONE
    trace: dict = field(default_factory=dict)


def _bisect(f, lo: float, hi: float, target: float) -> float:
    """Root of f - target on [lo, hi]; assumes exactly one sign change."""
    f_lo = f(lo) - target
    for _ in range(200):
        if hi - lo <= _BISECT_TOL:
            break
        mid = 0.5 * (lo + hi)
        f_mid = f(mid) - target
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def theta_floor_active(params: SystemParams, p_a: float, r_s: float) -> float:
    """Smallest AN ratio meeting the active-eavesdropper secrecy target
    (perfect estimates): the SOP is strictly decreasing in theta, so the
    admissible set is [floor, 1] whenever floor <= 1."""
    alpha = float(cf.alpha_ratio(params, p_a, r_s))
    if alpha == 0.0:
        raise AlphaZero("no AN margin: secrecy rate equals the transmission rate "
                        "or Alice takes the whole budget")
    n = params.n_antennas
    return float(np.expm1(np.log(params.epsilon) / (1.0 - n)) / alpha)


def theta_interval_passive(params: SystemParams, p_a: float, r_s: float) -> ThetaInterval:
    """AN ratios meeting the passive-eavesdropper secrecy target.

    The passive SOP is convex in theta with its minimum at 1/(N-1); the
    admissible set is the (possibly clipped) interval between the two
    crossings of epsilon, empty when even the minimum exceeds epsilon.
    """
    eps = params.epsilon
    theta_min = 1.0 / (params.n_antennas - 1)

    def p2(theta: float) -> float:
        return float(cf.sop_passive(params, make_split(params, p_a, theta), r_s))

    if p2(theta_min) > eps:
        return ThetaInterval.nothing()
    lo = 0.0 if p2(0.0) <= eps else _bisect(p2, 0.0, theta_min, eps)
    hi = 1.0 if p2(1.0) <= eps else _bisect(p2, theta_min, 1.0, eps)
    return ThetaInterval(lo=lo, hi=hi)


def theta_interval_active_imperfect(params: SystemParams, p_a: float, r_s: float) -> ThetaInterval:
    """AN ratios meeting the active-eavesdropper target with rho_ea <= 1.

    With a perfect estimate this is [floor, 1]. Otherwise the SOP decreases
    down to the quadratic's positive root and increases beyond it, so the
    admissible set is an interval around that root (clipped to [0,1]).
    """
    eps = params.epsilon
    alpha = float(cf.alpha_ratio(params, p_a, r_s))
    if alpha == 0.0:
        return ThetaInterval.nothing()

    if params.rho_ea == 1.0:
        floor = theta_floor_active(params, p_a, r_s)
        if floor > 1.0:
            return ThetaInterval.nothing()
        return ThetaInterval(lo=max(0.0, floor), hi=1.0)

    def p1(theta: float) -> float:
        return float(cf.sop_active_imperfect(params, make_split(params, p_a, theta), r_s))

    if params.rho_ea == 0.0:
        theta_pos = 1.0 / (params.n_antennas - 1)  # quadratic root is exact here
    else:
        theta_pos = cf.active_sop_theta_profile(params, p_a, r_s).theta_pos

    if theta_pos > 1.0:  # SOP strictly decreasing on [0,1]
        if p1(1.0) > eps:
            return ThetaInterval.nothing()
        lo = 0.0 if p1(0.0) <= eps else _bisect(p1, 0.0, 1.0, eps)
        return ThetaInterval(lo=lo, hi=1.0)

    if p1(theta_pos) > eps:
        return ThetaInterval.nothing()
    lo = 0.0 if p1(0.0) <= eps else _bisect(p1, 0.0, theta_pos, eps)
    hi = 1.0 if p1(1.0) <= eps else _bisect(p1, theta_pos, 1.0, eps)
    return ThetaInterval(lo=lo, hi=hi)


def _interval_from_shape(f, eps: float, minimizer: float) -> ThetaInterval:
    """Admissible set of a function on [0,1] whose minimum sits at ``minimizer``.

    Brackets the epsilon crossings on a coarse grid (with the minimizer
    inserted), then bisects each boundary; used where no closed-form inverse
    exists.
    """
    grid = np.unique(np.append(np.linspace(0.0, 1.0, 65), minimizer))
    ok = np.array([f(t) for t in grid]) <= eps
    if not ok.any():
        return ThetaInterval.nothing()
    first, last = int(np.argmax(ok)), int(len(ok) - 1 - np.argmax(ok[::-1]))
    lo = grid[first]
    if first > 0:
        lo = _bisect(f, grid[first - 1], grid[first], eps)
    hi = grid[last]
    if last < len(grid) - 1:
        hi = _bisect(f, grid[last], grid[last + 1], eps)
    return ThetaInterval(lo=float(lo), hi=float(hi))


def theta_interval_active_multi(params: SystemParams, p_a: float, r_s: float) -> ThetaInterval:
    """Admissible AN ratios for the best-of-M active eavesdroppers constraint
    (their SOP decreases with theta)."""
    def p1(theta: float) -> float:
        return float(cf.sop_active_multi(params, make_split(params, p_a, theta), r_s))
    return _interval_from_shape(p1, params.epsilon, minimizer=1.0)


def theta_interval_passive_multi(params: SystemParams, p_a: float, r_s: float) -> ThetaInterval:
    """Admissible AN ratios for the passive constraint with M active beams
    (convex with minimum at M/(N-1))."""
    center = params.m_active / (params.n_antennas - 1)

    def p2(theta: float) -> float:
        return float(cf.sop_passive_multi(params, make_split(params, p_a, theta), r_s))
    return _interval_from_shape(p2, params.epsilon, minimizer=center)


# ---------------------------------------------------------------------------
# Rate maximization
# ---------------------------------------------------------------------------

def _feasible_interval(params: SystemParams, p_a: float, r_s: float, algorithm: str) -> ThetaInterval:
    if algorithm == "perfect":
        try:
            floor = theta_floor_active(params, p_a, r_s)
        except AlphaZero:
            return ThetaInterval.nothing()
        if floor > 1.0:
            return ThetaInterval.nothing()
        active = ThetaInterval(lo=max(0.0, floor), hi=1.0)
        return active.intersect(theta_interval_passive(params, p_a, r_s))
    if algorithm == "imperfect":
        active = theta_interval_active_imperfect(params, p_a, r_s)
        return active.intersect(theta_interval_passive(params, p_a, r_s))
    active = theta_interval_active_multi(params, p_a, r_s)
    return active.intersect(theta_interval_passive_multi(params, p_a, r_s))


def _theta_reference(params: SystemParams, algorithm: str) -> float:
    if algorithm == "multi":
        return params.m_active / (params.n_antennas - 1)
    return 1.0 / (params.n_antennas - 1)


def _maximize(params: SystemParams, step: float, pa_mode: str, algorithm: str) -> OptResult:
    if step <= 0.0:
        raise RangeError(f"step must be positive, got {step}")
    mode = cf.resolve_pa_mode(params, pa_mode)
    p_req = cf.min_pa(params, mode)
    if p_req > params.p_max:
        return OptResult(feasible=False, r_s_star=0.0, theta_star=math.nan,
                         p_a_star=p_req, steps=0, infeasibility_reason="PA_EXCEEDS_PMAX",
                         trace={"pa_mode": mode, "algorithm": algorithm})
    best = None
    steps = 0
    i = 0
    while True:
        r_s = i * step
        if r_s >= params.r_b - 1e-12:
            break
        steps += 1
        interval = _feasible_interval(params, p_req, r_s, algorithm)
        if interval.empty:
            break
        best = (r_s, interval)
        i += 1
    trace: dict = {"pa_mode": mode, "algorithm": algorithm,
                   "p_to": cf.transmission_outage_for_mode(params, p_req, mode)}
    if best is None:
        return OptResult(feasible=False, r_s_star=0.0, theta_star=math.nan,
                         p_a_star=p_req, steps=steps,
                         infeasibility_reason="NO_THETA_AT_RS0", trace=trace)
    r_star, interval = best
    reference = _theta_reference(params, algorithm)
    theta_star = interval.clip(reference)
    trace["theta_interval"] = (interval.lo, interval.hi)
    trace["theta_reference"] = reference
    if algorithm == "perfect":
        try:
            trace["theta_floor"] = theta_floor_active(params, p_req, r_star)
        except AlphaZero:
            pass
    if algorithm == "imperfect" and 0.0 < params.rho_ea < 1.0:
        profile = cf.active_sop_theta_profile(params, p_req, r_star)
        trace["theta_pos"] = profile.theta_pos
        trace["decreasing_on_unit"] = profile.decreasing_on_unit
    return OptResult(feasible=True, r_s_star=r_star, theta_star=theta_star,
                     p_a_star=p_req, steps=steps, infeasibility_reason="NONE", trace=trace)


def maximize_secrecy_rate(params: SystemParams, step: float = 0.01,
                          pa_mode: str = "auto") -> OptResult:
    """Rate sweep under the perfect-estimate secrecy constraints."""
    return _maximize(params, step, pa_mode, "perfect")


def maximize_secrecy_rate_imperfect(params: SystemParams, step: float = 0.01,
                                    pa_mode: str = "auto") -> OptResult:
    """Rate sweep with an imperfect jammer->active-eavesdropper estimate;
    identical to the perfect sweep at rho_ea = 1."""
    return _maximize(params, step, pa_mode, "imperfect")


def maximize_secrecy_rate_multi(params: SystemParams, step: float = 0.01,
                                pa_mode: str = "auto") -> OptResult:
    """Rate sweep with M >= 2 active eavesdroppers (perfect estimates)."""
    return _maximize(params, step, pa_mode, "multi")


def maximize_for(params: SystemParams, algorithm: str | None = None, step: float = 0.01,
                 pa_mode: str = "auto") -> OptResult:
    """Dispatch to the sweep matching ``algorithm`` (default: inferred)."""
    algorithm = default_algorithm(params) if algorithm is None else resolve_algorithm(algorithm)
    return _maximize(params, step, pa_mode, algorithm)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def _sop_pair_grids(params: SystemParams, p_a: float, rs_grid: np.ndarray,
                    theta_grid: np.ndarray, algorithm: str) -> tuple[np.ndarray, np.ndarray]:
    if algorithm == "perfect":
        return (cf.sop_grid(params, p_a, rs_grid, theta_grid, "active"),
                cf.sop_grid(params, p_a, rs_grid, theta_grid, "passive"))
    if algorithm == "imperfect":
        return (cf.sop_grid(params, p_a, rs_grid, theta_grid, "active_imperfect"),
                cf.sop_grid(params, p_a, rs_grid, theta_grid, "passive"))
    return (cf.sop_grid(params, p_a, rs_grid, theta_grid, "active_multi"),
            cf.sop_grid(params, p_a, rs_grid, theta_grid, "passive_multi"))


def grid_search_oracle(params: SystemParams, rs_grid_points: int = 1000,
                       theta_grid_points: int = 1000, algorithm: str | None = None,
                       pa_mode: str = "auto") -> OptResult:
    """Exhaustive feasibility scan over a (rate, theta) grid at the minimum power.

    Test-side cross-check for the sweeps: returns the largest feasible grid
    rate and, at that rate, the feasible theta closest to the passive-SOP
    minimizer (ties toward the smaller theta).
    """
    if rs_grid_points < 100 or theta_grid_points < 100:
        raise RangeError("oracle grids need at least 100 points per axis")
    algorithm = default_algorithm(params) if algorithm is None else resolve_algorithm(algorithm)
    mode = cf.resolve_pa_mode(params, pa_mode)
    p_req = cf.min_pa(params, mode)
    if p_req > params.p_max:
        return OptResult(feasible=False, r_s_star=0.0, theta_star=math.nan,
                         p_a_star=p_req, steps=0, infeasibility_reason="PA_EXCEEDS_PMAX",
                         trace={"oracle": True, "pa_mode": mode})
    rs_grid = np.linspace(0.0, params.r_b, rs_grid_points, endpoint=False)
    theta_grid = np.linspace(0.0, 1.0, theta_grid_points)
    p1, p2 = _sop_pair_grids(params, p_req, rs_grid, theta_grid, algorithm)
    feasible = (p1 <= params.epsilon) & (p2 <= params.epsilon)
    any_theta = feasible.any(axis=1)
    trace = {"oracle": True, "pa_mode": mode, "algorithm": algorithm}
    if not any_theta.any():
        return OptResult(feasible=False, r_s_star=0.0, theta_star=math.nan,
                         p_a_star=p_req, steps=rs_grid_points,
                         infeasibility_reason="NO_THETA_AT_RS0", trace=trace)
    row = int(np.max(np.nonzero(any_theta)[0]))
    mask = feasible[row]
    reference = _theta_reference(params, algorithm)
    candidates = theta_grid[mask]
    theta_star = float(candidates[np.argmin(np.abs(candidates - reference))])
    return OptResult(feasible=True, r_s_star=float(rs_grid[row]), theta_star=theta_star,
                     p_a_star=p_req, steps=rs_grid_points, infeasibility_reason="NONE",
                     trace=trace)


def feasible_any_theta(params: SystemParams, p_a: float, r_s: float,
                       algorithm: str, theta_grid_points: int = 10_000) -> bool:
    """Whether any theta on a fine grid meets both secrecy targets at ``r_s``."""
    if r_s >= params.r_b:
        return False
    theta_grid = np.linspace(0.0, 1.0, theta_grid_points)
    rs_grid = np.array([r_s])
    p1, p2 = _sop_pair_grids(params, p_a, rs_grid, theta_grid,
                             resolve_algorithm(algorithm))
    return bool(((p1 <= params.epsilon) & (p2 <= params.epsilon)).any())
