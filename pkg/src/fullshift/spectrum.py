"""Multifractal spectrum as the Legendre transform of the temperature function.

``f(alpha) = inf_q {T(q) + q*alpha}``.  On the analytic branch the infimum
sits at the unique q* with alpha(q*) = alpha; frozen-set endpoints open gaps
where the spectrum is exactly affine with slope q0/q1; an infinite weight
ratio limit (geometric phi) produces a plateau at T(0).  Phase transitions
are located structurally from the frozen-set geometry, with slopes deciding
first- versus second-order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np

from .potentials import PiecewisePartition, PotentialPair, alpha_lim
from .pressure import t_inf, t_tilde, t_tilde_lines
from .temperature import (
    AlphaDiverges,
    QSet,
    QSetKind,
    Regime,
    TemperatureResult,
    _moment_ratio,
    _solve_t,
    endpoint_alpha,
    q_set,
    temperature,
    temperature_grid,
    weights_finite,
)

__all__ = [
    "SLOPE_TOL",
    "PLATEAU_EDGE_TOL",
    "Branch",
    "GridSpec",
    "SpectrumPoint",
    "Transition",
    "TransitionReport",
    "OutOfRange",
    "legendre",
    "spectrum_curve",
    "phase_transitions",
    "classify",
]

SLOPE_TOL = 1e-6
PLATEAU_EDGE_TOL = 1e-11  # plateau edge reported where T(0) - f(alpha(q)) hits this
_JUNCTION_ATOL = 1e-6


class Branch(Enum):
    STRICTLY_CONCAVE = "strictly_concave"
    LINEAR_SEGMENT = "linear_segment"
    PLATEAU = "plateau"


class OutOfRange(ValueError):
    """alpha lies outside the scanned spectrum domain."""


@dataclass(frozen=True)
class GridSpec:
    """Sampling request: q-scan bounds and the point budget (>= 64)."""

    points: int = 257
    q_min: float = -8.0
    q_max: float = 8.0

    def __post_init__(self):
        if self.points < 64:
            raise ValueError("grid needs at least 64 points")
        if not self.q_min < self.q_max:
            raise ValueError("empty q range")


@dataclass(frozen=True)
class SpectrumPoint:
    alpha: float
    f: float
    q_star: float
    branch: Branch
    segment_q: Optional[float] = None  # endpoint slope for linear segments


@dataclass(frozen=True)
class Transition:
    alpha: float
    order: int  # 1 = slope jump, 2 = curvature-only (structural)
    label: str


@dataclass(frozen=True)
class TransitionReport:
    locations: tuple[float, ...]
    count: int
    case_label: str
    concave_ok: bool
    transitions: tuple[Transition, ...] = ()


@dataclass(frozen=True)
class _Structure:
    """Junction geometry of the spectrum for one pair and scan range."""

    qset: QSet
    alpha_lim: Optional[float]
    alpha_minus: Optional[float]  # alpha at q0, limit from the analytic side
    alpha_plus: Optional[float]  # alpha at q1
    plateau_level: Optional[float]
    plateau_edge: Optional[float]
    plateau_edge_q: Optional[float]
    segments: tuple[tuple[float, float, float], ...]  # (alpha_lo, alpha_hi, slope q)
    transitions: tuple[Transition, ...]
    partition_steps: tuple[tuple[float, float], ...] = ()  # (breakpoint q, alpha level)


def _alpha_at(pair: PotentialPair, q: float) -> float:
    t_val, regime = _solve_t(pair, q)
    if regime is Regime.FROZEN:
        from .temperature import _envelope_neg_slope

        return _envelope_neg_slope(pair, q)
    if not weights_finite(pair, q, t_val):
        return math.inf
    return _moment_ratio(pair, q, t_val)


def _plateau_edge(pair: PotentialPair, level: float, q_hi: float) -> tuple[float, float]:
    """Smallest resolvable q > 0 where the spectrum is within PLATEAU_EDGE_TOL of T(0)."""

    def gap(q: float) -> float:
        t_val, _ = _solve_t(pair, q)
        a = _alpha_at(pair, q)
        return level - (t_val + q * a)

    lo, hi = 1e-13, min(1.0, q_hi)
    if gap(hi) < PLATEAU_EDGE_TOL:
        return hi, _alpha_at(pair, hi)
    for _ in range(80):
        mid = math.sqrt(lo * hi)  # log-space bisection
        if gap(mid) >= PLATEAU_EDGE_TOL:
            hi = mid
        else:
            lo = mid
        if hi / lo < 1.05:
            break
    return hi, _alpha_at(pair, hi)


@lru_cache(maxsize=256)
def _structure(pair: PotentialPair, q_min: float, q_max: float) -> _Structure:
    qset = q_set(pair, (q_min, q_max))
    alim = alpha_lim(pair)
    if pair.phi.is_partition:
        return _partition_structure(pair, qset, q_min, q_max)

    a_minus = a_plus = None
    plateau_level = plateau_edge = plateau_edge_q = None
    segments: list[tuple[float, float, float]] = []
    transitions: list[Transition] = []

    if qset.kind is QSetKind.RAY_DOWN and alim is not None and math.isinf(alim):
        plateau_level = temperature(pair, 0.0).T
        plateau_edge_q, plateau_edge = _plateau_edge(pair, plateau_level, q_max)
        transitions.append(Transition(plateau_edge, 2, "plateau edge at alpha(0)"))
    elif qset.kind in (QSetKind.RAY_UP, QSetKind.CLOSED_INTERVAL, QSetKind.POINT):
        if qset.q0 is not None:
            a_minus = endpoint_alpha(pair, qset.q0)
        if qset.kind is QSetKind.CLOSED_INTERVAL and qset.q1 is not None:
            a_plus = endpoint_alpha(pair, qset.q1)
        if qset.kind is QSetKind.POINT:
            a_plus = a_minus
        if alim is not None and not math.isinf(alim):
            if a_plus is not None and a_plus < alim - _JUNCTION_ATOL:
                segments.append((a_plus, alim, qset.q1))
                transitions.append(Transition(a_plus, 2, "segment meets concave branch at alpha(q1)"))
            if a_minus is not None and a_minus > alim + _JUNCTION_ATOL:
                segments.append((alim, a_minus, qset.q0))
                transitions.append(Transition(a_minus, 2, "segment meets concave branch at alpha(q0)"))
            if qset.kind is QSetKind.CLOSED_INTERVAL:
                # the junction at alpha_lim itself: slope jumps q1 -> q0 across it
                order = 1 if abs(qset.q1 - qset.q0) > SLOPE_TOL else 2
                transitions.append(Transition(alim, order, "junction at alpha_lim"))
            elif qset.kind is QSetKind.POINT and a_minus is not None:
                if abs(a_minus - alim) <= _JUNCTION_ATOL:
                    transitions.append(Transition(alim, 2, "point frozen set at alpha_lim"))
                else:
                    transitions.append(Transition(a_minus, 2, "point frozen set at alpha(q0)"))
    elif qset.kind is QSetKind.RAY_DOWN and alim is not None and not math.isinf(alim):
        if qset.q1 is not None:
            a_plus = endpoint_alpha(pair, qset.q1)
            if a_plus < alim - _JUNCTION_ATOL:
                segments.append((a_plus, alim, qset.q1))
                transitions.append(Transition(a_plus, 2, "segment meets concave branch at alpha(q1)"))

    # a ray-up with a degenerate endpoint (alpha(q0) = alpha_lim) has no junction;
    # drop transitions whose two sides coincide
    if qset.kind is QSetKind.RAY_UP and a_minus is not None and alim is not None:
        if not math.isinf(alim) and abs(a_minus - alim) <= _JUNCTION_ATOL:
            transitions = []
            segments = []

    transitions.sort(key=lambda tr: tr.alpha)
    return _Structure(
        qset,
        alim,
        a_minus,
        a_plus,
        plateau_level,
        plateau_edge,
        plateau_edge_q,
        tuple(segments),
        tuple(transitions),
    )


def _partition_structure(pair, qset, q_min, q_max) -> _Structure:
    """Frozen-envelope geometry for partition families: one step per class line."""
    lines = t_tilde_lines(pair)
    segments: list[tuple[float, float, float]] = []
    transitions: list[Transition] = []
    steps: list[tuple[float, float]] = []
    if qset.kind in (QSetKind.RAY_UP, QSetKind.CLOSED_INTERVAL) and qset.q0 is not None:
        q_hi = qset.q1 if qset.kind is QSetKind.CLOSED_INTERVAL else q_max
        # envelope breakpoints between consecutive active lines inside Q
        for (s0, c0), (s1, c1) in zip(lines[:-1], lines[1:]):
            if s1 == s0:
                continue
            q_b = (c1 - c0) / (s0 - s1)
            if qset.q0 < q_b < q_hi:
                hi_a, lo_a = -s0, -s1  # alpha levels left/right of the breakpoint
                segments.append((lo_a, hi_a, q_b))
                transitions.append(Transition(hi_a, 1, f"envelope breakpoint at q={q_b:.6g}"))
                steps.append((q_b, hi_a))
        a_minus = endpoint_alpha(pair, qset.q0)
        transitions.append(Transition(a_minus, 2, "segment meets concave branch at alpha(q0)"))
        transitions.sort(key=lambda tr: tr.alpha)
        return _Structure(qset, None, a_minus, None, None, None, None, tuple(segments), tuple(transitions), tuple(steps))
    return _Structure(qset, None, None, None, None, None, None, (), (), ())


def _analytic_intervals(st: _Structure, q_min: float, q_max: float) -> list[tuple[float, float]]:
    k, q0, q1 = st.qset.kind, st.qset.q0, st.qset.q1
    if k is QSetKind.EMPTY:
        return [(q_min, q_max)]
    if k is QSetKind.ALL:
        return []
    if k is QSetKind.RAY_UP:
        return [(q_min, q0)]
    if k is QSetKind.RAY_DOWN:
        return [(q1, q_max)]
    if k is QSetKind.POINT:
        return [(q_min, q0), (q0, q_max)]
    return [(q_min, q0), (q1, q_max)]


def legendre(pair: PotentialPair, alpha: float, grid: GridSpec = GridSpec()) -> SpectrumPoint:
    """Spectrum value at one alpha via the Legendre transform.

    Analytic range: bisection on the strictly decreasing alpha(q) locates the
    arg-inf q*.  Frozen gaps return the exact affine value with the endpoint
    slope; the infinite-ratio plateau returns T(0).  Raises
    :class:`OutOfRange` outside the scanned alpha window.
    """
    st = _structure(pair, grid.q_min, grid.q_max)

    if st.plateau_edge is not None and alpha >= st.plateau_edge:
        return SpectrumPoint(alpha, st.plateau_level, 0.0, Branch.PLATEAU)
    for lo_a, hi_a, q_e in st.segments:
        if lo_a - 1e-12 <= alpha <= hi_a + 1e-12:
            t_val, _ = _solve_t(pair, q_e)
            return SpectrumPoint(alpha, t_val + q_e * alpha, q_e, Branch.LINEAR_SEGMENT, q_e)

    for q_lo, q_hi in _analytic_intervals(st, grid.q_min, grid.q_max):
        shrink = 1e-9 * (1.0 + abs(q_lo) + abs(q_hi))
        a_hi = _alpha_at(pair, q_lo + shrink)  # alpha decreasing in q
        a_lo = _alpha_at(pair, q_hi - shrink)
        if not (a_lo - 1e-12 <= alpha <= a_hi + 1e-12):
            continue
        lo, hi = q_lo + shrink, q_hi - shrink
        for _ in range(200):
            if hi - lo <= 1e-12 * (1.0 + abs(lo)):
                break
            mid = 0.5 * (lo + hi)
            a_mid = _alpha_at(pair, mid)
            if abs(a_mid - alpha) <= 1e-10 * (1.0 + abs(alpha)):
                lo = hi = mid
                break
            if a_mid > alpha:
                lo = mid
            else:
                hi = mid
        q_star = 0.5 * (lo + hi)
        t_val, _ = _solve_t(pair, q_star)
        return SpectrumPoint(alpha, t_val + q_star * alpha, q_star, Branch.STRICTLY_CONCAVE)

    raise OutOfRange(f"alpha={alpha} outside the scanned spectrum range")


def _atan_grid(q_min: float, q_max: float, n: int) -> np.ndarray:
    th = np.linspace(math.atan(q_min), math.atan(q_max), n)
    return np.tan(th)


def spectrum_curve(pair: PotentialPair, grid: GridSpec = GridSpec()) -> list[SpectrumPoint]:
    """Sampled spectrum, ordered by alpha, with branch labels from the frozen-set geometry.

    The alpha grid is the image of a q-grid uniform in atan(q), plus the
    junction alphas inserted exactly and extra resolution toward a plateau
    edge.
    """
    st = _structure(pair, grid.q_min, grid.q_max)
    pts: list[SpectrumPoint] = []

    intervals = _analytic_intervals(st, grid.q_min, grid.q_max)
    base = _atan_grid(grid.q_min, grid.q_max, grid.points)
    if grid.q_min < 0.0 < grid.q_max:
        base = np.unique(np.append(base, 0.0))  # the maximum sits exactly at q = 0
    for q_lo, q_hi in intervals:
        shrink = 1e-9 * (1.0 + abs(q_lo) + abs(q_hi))
        qs = [q for q in base if q_lo + shrink < q < q_hi - shrink]
        if st.plateau_edge_q is not None and q_lo <= 0.0 <= q_hi:
            # resolve the approach to the plateau: log-spaced below the grid pitch
            smallest = min((q for q in qs if q > 0), default=1.0)
            if smallest > st.plateau_edge_q:
                extra = np.geomspace(st.plateau_edge_q, smallest, 17)[:-1]
                qs = sorted(set(qs) | set(float(x) for x in extra))
        results = temperature_grid(pair, qs)
        for r in results:
            if r.regime is not Regime.ANALYTIC or not math.isfinite(r.alpha):
                continue
            pts.append(SpectrumPoint(r.alpha, r.T + r.q * r.alpha, r.q, Branch.STRICTLY_CONCAVE))

    n_seg = max(8, grid.points // 8)
    for lo_a, hi_a, q_e in st.segments:
        t_val, _ = _solve_t(pair, q_e)
        alphas = np.linspace(lo_a, hi_a, n_seg + 2)
        if st.qset.kind is QSetKind.RAY_UP and not pair.phi.is_partition:
            alphas = alphas[1:]  # lo = alpha_lim is the open domain edge there
        for a in alphas:
            pts.append(SpectrumPoint(float(a), t_val + q_e * float(a), q_e, Branch.LINEAR_SEGMENT, q_e))

    if st.plateau_edge is not None:
        width = max(st.plateau_edge * 0.5, 2.0)
        for a in np.linspace(st.plateau_edge, st.plateau_edge + width, max(8, grid.points // 16))[1:]:
            pts.append(SpectrumPoint(float(a), st.plateau_level, 0.0, Branch.PLATEAU))

    pts.sort(key=lambda p: p.alpha)
    dedup: list[SpectrumPoint] = []
    for p in pts:
        if dedup and abs(p.alpha - dedup[-1].alpha) <= 1e-12 * (1.0 + abs(p.alpha)):
            continue
        dedup.append(p)
    return dedup


def _concave_ok(curve: list[SpectrumPoint], tol: float = 1e-8) -> bool:
    alphas = np.asarray([p.alpha for p in curve])
    fs = np.asarray([p.f for p in curve])
    if len(alphas) < 3:
        return True
    d1 = np.diff(fs) / np.diff(alphas)
    return bool(np.all(np.diff(d1) <= tol))


def phase_transitions(pair: PotentialPair, curve: list[SpectrumPoint], grid: GridSpec = GridSpec()) -> TransitionReport:
    """Locate and classify the spectrum's non-analyticity points.

    Junctions come from the frozen-set structure (a slope-continuous junction
    is still a transition, second order); the report also carries the curve's
    concavity check and the case label.
    """
    st = _structure(pair, grid.q_min, grid.q_max)
    trans = list(st.transitions)
    alphas = [p.alpha for p in curve]
    if alphas:
        lo, hi = min(alphas), max(alphas)
        trans = [t for t in trans if lo - 1e-9 <= t.alpha <= hi + 1e-9]
    label = classify(st.qset, st.alpha_minus, st.alpha_lim, st.alpha_plus)
    return TransitionReport(
        locations=tuple(t.alpha for t in trans),
        count=len(trans),
        case_label=label,
        concave_ok=_concave_ok(curve),
        transitions=tuple(trans),
    )


def classify(
    qset: QSet,
    alpha_minus: Optional[float] = None,
    alpha_lim: Optional[float] = None,
    alpha_plus: Optional[float] = None,
) -> str:
    """Case label from the frozen-set kind and the junction alphas."""
    k = qset.kind
    if k is QSetKind.EMPTY:
        return "Q empty: spectrum analytic, no phase transitions"
    if k is QSetKind.ALL:
        return "Q = R: constant spectrum"
    if k is QSetKind.POINT:
        return "Q a point: isolated non-analyticity"
    if k is QSetKind.RAY_UP:
        if alpha_lim is None:
            return "Q = [q0, inf) (partition family): staircase of transitions"
        if alpha_minus is not None and not math.isinf(alpha_lim):
            if abs(alpha_minus - alpha_lim) <= _JUNCTION_ATOL:
                return "Q = [q0, inf) with alpha(q0) = alpha_lim: no transition"
        return "Q = [q0, inf): one transition at alpha(q0)"
    if k is QSetKind.RAY_DOWN:
        if alpha_lim is not None and math.isinf(alpha_lim):
            return "Q = (-inf, q1]: plateau at T(0), one transition at alpha(0)"
        if alpha_plus is not None and alpha_lim is not None and abs(alpha_plus - alpha_lim) <= _JUNCTION_ATOL:
            return "Q = (-inf, q1] with alpha(q1) = alpha_lim: no transition"
        return "Q = (-inf, q1]: one transition at alpha(q1)"
    if alpha_minus is None or alpha_plus is None or alpha_lim is None:
        return "Q a closed interval (partition family): staircase of transitions"
    gt_minus = alpha_minus > alpha_lim + _JUNCTION_ATOL
    gt_plus = alpha_plus < alpha_lim - _JUNCTION_ATOL
    if gt_minus and gt_plus:
        return "case 1: alpha(q0) > alpha_lim > alpha(q1), three transitions"
    if not gt_minus and gt_plus:
        return "case 3: alpha(q0) = alpha_lim > alpha(q1), two transitions"
    if gt_minus and not gt_plus:
        return "case 2: alpha(q0) > alpha_lim = alpha(q1), two transitions"
    return "case 4: alpha(q0) = alpha_lim = alpha(q1), single possible transition"
