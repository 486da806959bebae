"""The temperature function T(q), Gibbs weights, alpha(q), and the frozen set Q.

``T(q) = inf{t : pressure(q*phi - t*psi) <= 0}``.  On the analytic branch it
is the unique pressure root in t; on the frozen set it sticks to the
finiteness boundary ``t_tilde(q)``.  The frozen test follows the boundary
series itself: q is frozen exactly when ``Z1(q, t_tilde(q))`` converges with
sum <= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np

from . import series
from .potentials import PiecewisePartition, PotentialPair, alpha_lim
from .pressure import REL_TOL, _combined_verdict, t_tilde, t_tilde_lines, z1, z1_compare, z1_probe

__all__ = [
    "T_TOL",
    "ENDPOINT_TOL",
    "Regime",
    "QSetKind",
    "TemperatureResult",
    "QSet",
    "GibbsWeights",
    "NoGibbsState",
    "AlphaDiverges",
    "NoFiniteRoot",
    "frozen",
    "temperature",
    "gibbs_weights",
    "alpha_of_q",
    "endpoint_alpha",
    "q_set",
    "weights_finite",
]

T_TOL = 1e-12
ENDPOINT_TOL = 1e-9
_ROOT_OFFSET = 1e-6  # initial probe distance above the boundary


class NoGibbsState(ValueError):
    """No normalized weights exist: the partition series diverges."""


class AlphaDiverges(ValueError):
    """The Gibbs moments of the potentials diverge at this q."""


class NoFiniteRoot(RuntimeError):
    """The pressure stays positive (or infinite) over the whole search range."""


class Regime(Enum):
    ANALYTIC = "analytic_branch"
    FROZEN = "frozen"


class QSetKind(Enum):
    EMPTY = "empty"
    POINT = "point"
    CLOSED_INTERVAL = "closed_interval"
    RAY_UP = "ray_up"  # [q0, +inf)
    RAY_DOWN = "ray_down"  # (-inf, q1]
    ALL = "all"


@dataclass(frozen=True)
class TemperatureResult:
    q: float
    T: float
    regime: Regime
    alpha: float
    weights_finite: bool


@dataclass(frozen=True)
class QSet:
    """The set {q : T(q) = t_tilde(q)} as an interval with endpoint data."""

    kind: QSetKind
    q0: Optional[float] = None  # lower endpoint (frozen side start)
    q1: Optional[float] = None  # upper endpoint

    def contains(self, q: float) -> bool:
        if self.kind is QSetKind.EMPTY:
            return False
        if self.kind is QSetKind.ALL:
            return True
        if self.kind is QSetKind.POINT:
            return self.q0 is not None and abs(q - self.q0) <= ENDPOINT_TOL
        if self.kind is QSetKind.RAY_UP:
            return q >= self.q0
        if self.kind is QSetKind.RAY_DOWN:
            return q <= self.q1
        return self.q0 <= q <= self.q1


def _boundary_series(pair: PotentialPair, q: float):
    tt = t_tilde(pair, q)
    if not math.isfinite(tt):
        return tt, None
    return tt, series.build_series(pair.phi, q, pair.psi, tt)


def frozen(pair: PotentialPair, q: float) -> bool:
    """True iff the boundary series converges with sum <= 1 (ties count as frozen).

    An infinite boundary (+inf from a geometric phi at q < 0) freezes by
    convention (T and t_tilde are both +inf there); a -inf boundary never
    freezes.
    """
    tt, comb = _boundary_series(pair, q)
    if comb is None:
        return tt == math.inf
    if _combined_verdict(comb) is not series.Verdict.CONVERGENT:
        return False
    enc = series.combined_enclosure(comb, rel_tol=REL_TOL, compare=1.0)
    return enc.cmp is None or enc.cmp <= 0


def _envelope_neg_slope(pair: PotentialPair, q: float) -> float:
    """-d/dq t_tilde at q (right derivative), i.e. alpha on the frozen set."""
    alim = alpha_lim(pair)
    if alim is None:
        lines = t_tilde_lines(pair)
        vals = [s * q + c for s, c in lines]
        best = max(range(len(lines)), key=lambda i: (vals[i], lines[i][0]))
        return -lines[best][0]
    return alim


@lru_cache(maxsize=65536)
def _solve_t(pair: PotentialPair, q: float) -> tuple[float, Regime]:
    tt = t_tilde(pair, q)
    if tt == math.inf:
        return math.inf, Regime.FROZEN
    if tt != -math.inf and frozen(pair, q):
        return tt, Regime.FROZEN

    hint = 64

    def probe(t: float) -> tuple[int, Optional[float]]:
        """Sign of Z1 - 1 plus a usable value of Z1 - 1 when tight enough."""
        nonlocal hint
        enc = z1_probe(pair, q, t, 1.0, n_start=hint)
        if math.isfinite(enc.hi):
            hint = max(64, min(enc.terms_used, 1 << 18))
        g = enc.mid - 1.0
        if math.isfinite(g) and enc.width <= 0.75 * abs(g):
            return enc.cmp, g
        return enc.cmp, (0.0 if enc.cmp == 0 else None)

    if tt == -math.inf:
        lo, hi = -1.0, 1.0
        g_lo = None
        for _ in range(200):
            s, g = probe(lo)
            if s == 0:
                return lo, Regime.ANALYTIC
            if s > 0:
                g_lo = g
                break
            hi = lo
            lo = 2.0 * lo - 1.0
        else:
            raise NoFiniteRoot("pressure never becomes positive while lowering t")
    else:
        lo = tt  # pressure is positive (possibly +inf) at the boundary
        hi = tt + max(_ROOT_OFFSET, 1e-3 * (1.0 + abs(tt)))
        g_lo = None
    g_hi = None
    step = hi - lo
    for _ in range(200):
        s, g = probe(hi)
        if s < 0:
            g_hi = g
            break
        if s == 0:
            return hi, Regime.ANALYTIC
        lo, g_lo = hi, g
        step *= 2.0
        hi = lo + step
    else:
        raise NoFiniteRoot("pressure never becomes negative while raising t")

    # bracketed false position (Illinois) with bisection fallback
    return _bisect_between(pair, q, lo, hi, g_lo, g_hi), Regime.ANALYTIC


def weights_finite(pair: PotentialPair, q: float, t: float) -> bool:
    """Whether both potential moments converge under the (q, t) weights."""
    for moment in ("phi", "psi"):
        comb = series.build_series(pair.phi, q, pair.psi, t, moment=moment)
        if _combined_verdict(comb) is not series.Verdict.CONVERGENT:
            return False
    return True


def _moment_ratio(pair: PotentialPair, q: float, t: float, rel_tol: float = 1e-10) -> float:
    """``sum w |log p| / sum w |log s|`` at unnormalized weights ``p^q s^t``.

    Very close to the finiteness boundary the full tolerance can exceed the
    summation budget; the ratio then falls back to a looser (still certified)
    enclosure, ample for every downstream 1e-6-level consumer.
    """
    for rel in (rel_tol, 3e-9, 1e-7):
        try:
            num = series.combined_enclosure(
                series.build_series(pair.phi, q, pair.psi, t, moment="phi"), rel
            )
            den = series.combined_enclosure(
                series.build_series(pair.phi, q, pair.psi, t, moment="psi"), rel
            )
            return num.mid / den.mid
        except series.SeriesBudgetExceeded:
            continue
    raise series.SeriesBudgetExceeded(f"moment ratio unattainable at q={q}, t={t}")


def temperature(pair: PotentialPair, q: float) -> TemperatureResult:
    """Temperature at q, with regime tag, alpha, and moment-finiteness flag.

    Analytic branch: the pressure root located by bisection (absolute
    tolerance 1e-12) above the boundary.  Frozen: T = t_tilde(q) with alpha
    the boundary-line slope.  A geometric phi at q < 0 has no finite root and
    yields the +inf sentinel (frozen by convention).
    """
    t_val, regime = _solve_t(pair, q)
    if regime is Regime.FROZEN:
        if not math.isfinite(t_val):
            return TemperatureResult(q, t_val, regime, _envelope_neg_slope(pair, q), False)
        return TemperatureResult(
            q, t_val, regime, _envelope_neg_slope(pair, q), weights_finite(pair, q, t_val)
        )
    wfin = weights_finite(pair, q, t_val)
    alpha = _moment_ratio(pair, q, t_val) if wfin else math.inf
    return TemperatureResult(q, t_val, regime, alpha, wfin)


def temperature_grid(pair: PotentialPair, qs, want_alpha: bool = True) -> list[TemperatureResult]:
    """Temperature along a q-grid, warm-starting each root from its neighbor.

    Equivalent to calling :func:`temperature` per point, but an order of
    magnitude faster on dense grids.  ``want_alpha=False`` skips the Gibbs
    moment sums (alpha reported as nan) when only T is needed.
    """
    out: list[TemperatureResult] = []
    prev: Optional[TemperatureResult] = None
    for q in np.asarray(qs, dtype=np.float64):
        q = float(q)
        if prev is not None and prev.regime is Regime.ANALYTIC and math.isfinite(prev.T):
            tt = t_tilde(pair, q)
            if tt == math.inf or (tt != -math.inf and frozen(pair, q)):
                out.append(temperature(pair, q))
                prev = out[-1]
                continue
            span = max(4.0 * abs(prev.T) * abs(q - prev.q), 8.0 * abs(q - prev.q), 1e-9)
            lo = prev.T - span if tt == -math.inf else max(prev.T - span, tt)
            hi = prev.T + span
            s_lo = z1_compare(pair, q, lo, 1.0) if lo > tt else +1
            s_hi = z1_compare(pair, q, hi, 1.0)
            if s_lo > 0 and s_hi < 0:
                t_val = _bisect_between(pair, q, lo, hi)
                if want_alpha:
                    wfin = weights_finite(pair, q, t_val)
                    alpha = _moment_ratio(pair, q, t_val) if wfin else math.inf
                else:
                    wfin = weights_finite(pair, q, t_val)
                    alpha = math.nan
                out.append(TemperatureResult(q, t_val, Regime.ANALYTIC, alpha, wfin))
                prev = out[-1]
                continue
        if want_alpha:
            out.append(temperature(pair, q))
        else:
            t_val, regime = _solve_t(pair, q)
            if regime is Regime.FROZEN:
                alpha = _envelope_neg_slope(pair, q) if math.isfinite(t_val) else math.inf
                out.append(TemperatureResult(q, t_val, regime, alpha, False))
            else:
                out.append(TemperatureResult(q, t_val, regime, math.nan, weights_finite(pair, q, t_val)))
        prev = out[-1]
    return out


def _bisect_between(
    pair: PotentialPair,
    q: float,
    lo: float,
    hi: float,
    g_lo: Optional[float] = None,
    g_hi: Optional[float] = None,
) -> float:
    """Illinois false position on sign(Z1 - 1) over a bracketing t-interval."""
    hint = 64
    side = 0
    while hi - lo > T_TOL:
        if g_lo is not None and g_hi is not None and g_lo > 0 > g_hi:
            mid = (lo * g_hi - hi * g_lo) / (g_hi - g_lo)
            span = hi - lo
            mid = min(max(mid, lo + 0.01 * span), hi - 0.01 * span)
        else:
            mid = 0.5 * (lo + hi)
        enc = z1_probe(pair, q, mid, 1.0, n_start=hint)
        if math.isfinite(enc.hi):
            hint = max(64, min(enc.terms_used, 1 << 18))
        g = enc.mid - 1.0
        usable = math.isfinite(g) and enc.width <= 0.75 * abs(g)
        s = enc.cmp
        if s == 0:
            return mid
        if s > 0:
            lo, g_lo = mid, (g if usable else None)
            if side == +1 and g_hi is not None:
                g_hi *= 0.5
            side = +1
        else:
            hi, g_hi = mid, (g if usable else None)
            if side == -1 and g_lo is not None:
                g_lo *= 0.5
            side = -1
    return 0.5 * (lo + hi)


def alpha_of_q(pair: PotentialPair, q: float) -> float:
    """Exact Gibbs-weight value of alpha(q) = -T'(q).

    On the analytic branch this is the moment ratio
    ``sum w log p / sum w log s`` at (q, T(q)); on the frozen set it is the
    boundary-line slope (alpha_lim away from partition families).  Raises
    :class:`AlphaDiverges` when the moments are infinite.
    """
    t_val, regime = _solve_t(pair, q)
    if regime is Regime.FROZEN:
        return _envelope_neg_slope(pair, q)
    if not weights_finite(pair, q, t_val):
        raise AlphaDiverges(f"potential moments diverge at q={q}")
    return _moment_ratio(pair, q, t_val)


def endpoint_alpha(pair: PotentialPair, q_end: float) -> float:
    """alpha at a frozen-set endpoint, as the limit along the analytic branch.

    Equals the boundary-weight moment ratio when those moments converge, and
    the boundary slope (alpha_lim) when they diverge.  The endpoint is known
    only to the bisection tolerance, so a moment criticality within that
    tolerance counts as divergent (the limit is then tail-dominated).
    """
    tt = t_tilde(pair, q_end)
    if not math.isfinite(tt):
        return _envelope_neg_slope(pair, q_end)
    delta = 8.0 * ENDPOINT_TOL * (1.0 + abs(q_end))
    for q_probe in (q_end - delta, q_end, q_end + delta):
        if not weights_finite(pair, q_probe, t_tilde(pair, q_probe)):
            return _envelope_neg_slope(pair, q_end)
    return _moment_ratio(pair, q_end, tt)


class GibbsWeights:
    """Normalized symbol weights ``p_i^q s_i^t / Z1`` with certified tail mass."""

    def __init__(self, pair: PotentialPair, q: float, t: float, z: "series.Enclosure"):
        self.pair = pair
        self.q = q
        self.t = t
        self._z = z
        self._comb = series.build_series(pair.phi, q, pair.psi, t)

    @property
    def z_value(self) -> float:
        return self._z.mid

    def log_weight(self, i) -> np.ndarray:
        arr = np.asarray(i, dtype=np.float64)
        out = self.q * self.pair.phi.log_weight(arr) + self.t * self.pair.psi.log_weight(arr)
        return out - math.log(self.z_value)

    def weight(self, i) -> np.ndarray:
        out = np.exp(self.log_weight(i))
        return float(out) if out.shape == () else out

    def tail_mass(self, n: int) -> float:
        """Upper bound on the normalized weight mass beyond symbol n (n past the term peak)."""
        total = 0.0
        for comp in self._comb.components:
            val, err = series.tail_integral(comp, float(n) + 0.5)
            total += val + err
        return total / self.z_value

    def cutoff(self, mass_tol: float = 1e-12, cap: int = 1 << 62) -> int:
        """Smallest power-of-two symbol bound whose tail mass is below mass_tol."""
        n = 1024
        while n < cap:
            if self.tail_mass(n) <= mass_tol:
                return n
            n *= 2
        return cap


def gibbs_weights(pair: PotentialPair, q: float, t: float) -> GibbsWeights:
    """Normalized weights at (q, t); raises :class:`NoGibbsState` on divergence."""
    comb = series.build_series(pair.phi, q, pair.psi, t)
    if _combined_verdict(comb) is not series.Verdict.CONVERGENT:
        raise NoGibbsState(f"Z1 diverges at q={q}, t={t}")
    enc = series.combined_enclosure(comb, rel_tol=REL_TOL)
    return GibbsWeights(pair, q, t, enc)


def q_set(
    pair: PotentialPair,
    q_range: tuple[float, float] = (-50.0, 50.0),
    endpoint_tol: float = ENDPOINT_TOL,
    grid: int = 201,
) -> QSet:
    """Locate the frozen set on a scan grid and bisect its endpoints.

    Endpoints beyond the scan range are reported as rays; a frozen set
    narrower than the grid pitch (a single point) is below scan resolution.
    """
    qa, qb = q_range
    qs = np.linspace(qa, qb, grid)
    flags = [frozen(pair, float(qv)) for qv in qs]

    changes = [i for i in range(1, grid) if flags[i] != flags[i - 1]]
    if not changes:
        return QSet(QSetKind.ALL if flags[0] else QSetKind.EMPTY)

    def bisect(i: int) -> float:
        lo, hi = float(qs[i - 1]), float(qs[i])
        f_lo = flags[i - 1]
        while hi - lo > endpoint_tol:
            mid = 0.5 * (lo + hi)
            if frozen(pair, mid) == f_lo:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    points = [bisect(i) for i in changes]
    if len(changes) == 1:
        if flags[0]:  # frozen on the left: (-inf, q1]
            return QSet(QSetKind.RAY_DOWN, q1=points[0])
        return QSet(QSetKind.RAY_UP, q0=points[0])
    if len(changes) == 2 and not flags[0] and not flags[-1]:
        q0, q1 = points
        if q1 - q0 <= 2 * endpoint_tol:
            return QSet(QSetKind.POINT, q0=q0, q1=q0)
        return QSet(QSetKind.CLOSED_INTERVAL, q0=q0, q1=q1)
    raise RuntimeError("frozen set is not an interval on the scan grid")
