"""Certified summation of symbol-weight series.

Everything the pressure/temperature machinery sums has the form
``sum_j exp(q*log p_j + t*log s_j) * (optional moment factor)`` over the
symbols ``j >= 1``.  This module turns such a series into a rigorous
enclosure ``[lo, hi]``:

* the head is summed exactly (vectorized, pairwise-accurate);
* the tail beyond ``N`` is bracketed by the monotone integral comparison for
  convex decreasing terms, ``integral(N+1) + f(N+1)/2 <= tail <= integral(N+1/2)``,
  with the integrals evaluated by adaptive quadrature after a decay-adapted
  substitution (quadrature error estimates are folded into the bracket);
* ``N`` doubles until the bracket width meets the requested relative
  tolerance, or until a comparison against a threshold is decided.

Divergence is always decided symbolically from the family exponents (see
``verdict_for``); no numeric probing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .potentials import (
    Decay,
    Family,
    GaussMetric,
    Geometric,
    PartitionClass,
    PiecewisePartition,
    PowerLog,
    ShiftedPower,
    SpikedPowerLog,
    SymbolPotential,
)

__all__ = [
    "Verdict",
    "SeriesTerms",
    "CombinedSeries",
    "Enclosure",
    "SeriesBudgetExceeded",
    "build_series",
    "verdict_for",
    "enclosure",
    "combined_enclosure",
    "family_mass_enclosure",
]

MAX_TERMS = 1 << 23
LOG_HUGE = 600.0  # refuse to materialize sums beyond e^600
_QUAD = dict(epsabs=1e-300, epsrel=1e-13, limit=200)
_ERR_SAFETY = 10.0


class Verdict(Enum):
    CONVERGENT = "convergent"
    DIVERGENT_AT_BOUNDARY = "divergent_at_boundary"  # exactly on the finiteness line
    DIVERGENT = "divergent"


class SeriesBudgetExceeded(RuntimeError):
    """The requested tolerance needs more terms (or magnitude) than the budget allows."""


@dataclass(frozen=True)
class SeriesTerms:
    """One positive series ``sum_{j>=start} f(j)`` with smooth log-term formulas.

    ``log_H`` is ``log(f(e^w) * e^w)`` with the power exponent fused as
    ``-(u-1)*w`` so that huge opposing linear terms never cancel in float.
    """

    log_at: Callable[[np.ndarray], np.ndarray]
    log_at_logx: Callable[[float], float]
    decay: Decay
    start: int = 1
    u_scale: float = 1.0  # magnitude scale for the boundary corridor test
    log_H_fused: Optional[Callable] = None

    def log_f(self, j: int) -> float:
        return float(self.log_at(np.asarray([j], dtype=np.int64))[0])

    def log_H(self, w):
        if self.log_H_fused is not None:
            return self.log_H_fused(w)
        return self.log_at_logx(w) + w


@dataclass(frozen=True)
class CombinedSeries:
    """A signed sum of component series plus an exact scalar adjustment.

    Signs carry the inclusion-exclusion structure of partition families;
    plain families have a single +1 component.
    """

    components: tuple[SeriesTerms, ...]
    delta: float = 0.0
    signs: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.signs:
            object.__setattr__(self, "signs", (1,) * len(self.components))


@dataclass(frozen=True)
class Enclosure:
    lo: float
    hi: float
    terms_used: int
    cmp: Optional[int] = None  # -1 / 0 / +1 against a compare threshold

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)


def _on_boundary(u: float, scale: float) -> bool:
    # the finiteness line is hit through float arithmetic on t_tilde, whose
    # rounding is ~1e-14*scale; anything past 1e-12*scale is genuinely off it
    return abs(u - 1.0) <= 1e-12 * (1.0 + abs(scale))


def verdict_for(decay: Decay, u_scale: float = 1.0) -> Verdict:
    """Symbolic convergence classification from the combined exponents."""
    if decay.geo < 0:
        return Verdict.DIVERGENT
    if decay.geo > 0:
        return Verdict.CONVERGENT
    u, v = decay.power, decay.logpow
    if _on_boundary(u, u_scale):
        return Verdict.CONVERGENT if v > 1.0 else Verdict.DIVERGENT_AT_BOUNDARY
    return Verdict.CONVERGENT if u > 1.0 else Verdict.DIVERGENT


# ---------------------------------------------------------------------------
# tail integrals
# ---------------------------------------------------------------------------


_QUAD_FAST = dict(epsabs=1e-300, epsrel=1e-9, limit=100)


def _quad_pos(fn, a, b, fast=False, **kw):
    opts = _QUAD_FAST if fast else _QUAD
    val, err = quad(fn, a, b, **{**opts, **kw})
    return max(val, 0.0), abs(err)


@lru_cache(maxsize=None)
def _legendre_nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _exp_decay_integral(log_f, z_max: float, fast: bool = False, z_0: float = 0.0) -> tuple[float, float]:
    """``integral_z0^z_max exp(log_f(z)) dz`` for exponentially damped integrands.

    Composite Gauss-Legendre on dyadic segments; the error estimate compares
    half- and full-order rules per segment.
    """
    if z_max <= z_0:
        return 0.0, 0.0
    edges = [z_0, min(z_0 + 1.0, z_max)]
    while edges[-1] < z_max:
        edges.append(min(z_0 + 2.0 * (edges[-1] - z_0), z_max))
    n_hi = 16 if fast else 32
    total = {n_hi // 2: 0.0, n_hi: 0.0}
    for n in (n_hi // 2, n_hi):
        x, w = _legendre_nodes(n)
        a = np.asarray(edges[:-1])
        b = np.asarray(edges[1:])
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        z = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        lf = np.asarray(log_f(z), dtype=np.float64)
        vals = np.exp(np.minimum(lf, 700.0)).reshape(len(a), n)
        total[n] = float(np.sum(vals @ w * half))
    err = 4.0 * abs(total[n_hi] - total[n_hi // 2]) + 1e-280
    return max(total[n_hi], 0.0), err


def _log_space_integral(log_G, xi0: float, xi1: float, fast: bool = False) -> tuple[float, float]:
    """``integral exp(log_G(xi)) dxi`` over [xi0, xi1] with fixed width-2 segments.

    Suits integrands whose structure lives on a log scale (slow power decay
    with a far double-exponential cutoff); each segment is smooth enough for
    a 32-point rule at machine accuracy.
    """
    if xi1 <= xi0:
        return 0.0, 0.0
    n_seg = max(1, int(math.ceil((xi1 - xi0) / 2.0)))
    edges = np.linspace(xi0, xi1, n_seg + 1)
    n_hi = 32  # node count is not the cost; an 8-node error estimate stalls the caller
    total = {}
    for n in (n_hi // 2, n_hi):
        x, w = _legendre_nodes(n)
        a, b = edges[:-1], edges[1:]
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        xi = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        lg = np.asarray(log_G(xi), dtype=np.float64)
        if float(lg.max(initial=-math.inf)) > 690.0:
            raise SeriesBudgetExceeded("tail integrand magnitude exceeds e^690")
        vals = np.exp(lg).reshape(len(a), n)
        total[n] = float(np.sum(vals @ w * half))
    err = 4.0 * abs(total[n_hi] - total[n_hi // 2]) + 1e-280
    return max(total[n_hi], 0.0), err


def tail_integral(terms: SeriesTerms, a: float, fast: bool = False) -> tuple[float, float]:
    """``integral_a^inf f(x) dx`` with an error estimate, for convergent tails."""
    d = terms.decay
    w0 = math.log(a)

    def H(w):  # f(e^w) * e^w, the log-substituted integrand
        lf = float(terms.log_H(w))
        return math.exp(lf) if lf > -745.0 else 0.0

    if d.geo > 0:
        # geometric factor: integrate in x once it dominates, in w before that
        x_dom = max(max(abs(d.power), 1.0) / d.geo, a)
        lam = d.geo + max(d.power, 0.0) / x_dom

        def G(y):
            w = math.log(x_dom + y / lam)
            lf = terms.log_at_logx(w)
            return math.exp(lf) / lam if lf > -745.0 else 0.0

        val2, err2 = _quad_pos(G, 0.0, np.inf, fast)
        if x_dom > a * (1.0 + 1e-12):
            val1, err1 = _quad_pos(H, w0, math.log(x_dom), fast)
            return val1 + val2, _ERR_SAFETY * (err1 + err2)
        return val2, _ERR_SAFETY * err2

    u, v = d.power, d.logpow
    if _on_boundary(u, terms.u_scale):
        if v <= 1.0:
            raise ValueError("tail integral of a divergent boundary series")
        # H(w) = K * w^-v * (1 + exponentially small); split off the closed form
        w_ref = 1e6
        log_k = float(terms.log_H(w_ref)) + v * math.log(w_ref)
        k_const = math.exp(log_k)
        main = k_const * w0 ** (1.0 - v) / (v - 1.0)
        w_cut = w0 + 45.0

        def R(w):
            lb = log_k - v * math.log(w)
            la = float(terms.log_H(w))
            if lb < -745.0 and la < -745.0:
                return 0.0
            return math.exp(lb) * math.expm1(la - lb)

        rem, err = quad(R, w0, w_cut, **(_QUAD_FAST if fast else _QUAD))
        beyond = 4.0 * (v + 2.0) * k_const * math.exp(-w_cut) * w_cut ** (-v)
        cancel = 64.0 * np.finfo(float).eps * k_const * w0 ** (-v) * (w_cut - w0)
        return max(main + rem, 0.0), _ERR_SAFETY * err + beyond + cancel

    if u <= 1.0:
        raise ValueError("tail integral of a divergent series")
    s = u - 1.0

    # integrate H in xi = log(w): power-law decay in w is exponential in xi,
    # the e^{-(u-1)w} factor a far cutoff; fixed log-width segments resolve
    # both the O(1)-in-w corrections near a and the slow middle range
    grow = max(-v, 0.0)
    budget = 150.0 + 8.0 * grow * max(1.0, math.log((grow + 2.0) / s))
    w_cut = w0 + budget / s

    def log_G(xi):
        w = np.exp(np.asarray(xi, dtype=np.float64))
        return np.asarray(terms.log_H(w)) + xi

    val, err = _log_space_integral(log_G, math.log(w0), math.log(w_cut), fast)
    resid = 10.0 * math.exp(min(float(log_G(math.log(w_cut))), 700.0))
    return val, _ERR_SAFETY * err + resid


# ---------------------------------------------------------------------------
# enclosure machinery
# ---------------------------------------------------------------------------


def _peak_estimate(d: Decay) -> float:
    """Index past which the terms decrease (rough, biased high)."""
    peak = 1.0
    if d.geo > 0 and d.power < 0:
        peak = max(peak, -d.power / d.geo)
    if d.geo == 0 and d.logpow < 0 and d.power > 0:
        peak = max(peak, math.exp(min(-d.logpow / d.power, 80.0)))
    return peak


def _tail_shape_ok(terms: SeriesTerms, n: int) -> bool:
    """Spot-check that terms decrease convexly from n onward."""
    for base in (n, 2 * n, 8 * n):
        idx = np.asarray([base, base + 1, base + 2], dtype=np.int64)
        lf = terms.log_at(idx)
        if not (lf[0] >= lf[1] >= lf[2]):
            return False
        f = np.exp(lf - lf[0])  # scaled; convexity is scale-free
        if f[0] - 2.0 * f[1] + f[2] < -1e-12:
            return False
    return True


def enclosure(
    terms: SeriesTerms,
    rel_tol: float = 1e-12,
    compare: Optional[float] = None,
    tie_tol: float = 1e-13,
    max_terms: int = MAX_TERMS,
    n_start: int = 64,
    _allow_loose: bool = False,
) -> Enclosure:
    """Certified enclosure of the series (terms must be symbolically convergent).

    With ``compare`` set, returns as soon as the threshold comparison is
    decided; ``cmp`` is -1/+1 for a decided comparison and 0 for a tie within
    ``tie_tol``.  ``n_start`` seeds the head length (a warm-start hint).
    """
    head_parts: list[float] = []
    summed_to = terms.start - 1
    target = max(64, n_start, terms.start + 63)
    peak = _peak_estimate(terms.decay)
    if peak > max_terms:
        if compare is not None:
            # the single term at the peak may already settle the comparison
            lf_pk = max(
                float(terms.log_at_logx(math.log(math.floor(peak)))),
                float(terms.log_at_logx(math.log(math.floor(peak) + 1.0))),
            )
            if lf_pk > math.log(max(compare, 1e-300)):
                return Enclosure(math.exp(min(lf_pk, 700.0)), math.inf, 0, +1)
        raise SeriesBudgetExceeded("term peak beyond the summation budget")
    target = max(target, int(min(2 * peak + 16, max_terms)))
    target = min(target, max_terms)
    lo = hi = None

    while True:
        idx = np.arange(summed_to + 1, target + 1, dtype=np.int64)
        lf = terms.log_at(idx)
        if lf.size:
            mx = float(lf.max())
            if compare is not None and mx > math.log(max(compare, 1e-300)) + 2.0:
                return Enclosure(math.exp(mx), math.inf, int(target), +1)
            if mx > LOG_HUGE:
                raise SeriesBudgetExceeded("series magnitude exceeds e^600")
            head_parts.append(float(np.exp(lf).sum()))
        summed_to = target
        head = math.fsum(head_parts)
        if compare is not None and head > compare:
            return Enclosure(head, math.inf, summed_to, +1)

        shape_ok = summed_to >= 2 * peak and _tail_shape_ok(terms, summed_to)
        if shape_ok:
            # rigorous width proxy (monotone terms): bracket width never exceeds
            # (f(N+1/2) - f(N+1))/2; skip quadrature while that alone is too wide
            w_half = math.log(summed_to + 0.5)
            f_half = math.exp(min(terms.log_at_logx(w_half) + 0.0, 700.0))
            f_next = math.exp(terms.log_f(summed_to + 1))
            proxy = 0.5 * (f_half - f_next)
            need_width = rel_tol * max(head, 1e-300)
            if compare is not None:
                need_width = max(need_width, 0.25 * abs(head - compare))
                need_width = max(need_width, 0.5 * tie_tol * max(1.0, abs(compare)))
            if proxy <= need_width or summed_to >= max_terms:
                fast = compare is not None
                i_mid, e_mid = tail_integral(terms, summed_to + 0.5, fast=fast)
                t_hi = i_mid + e_mid
                hi = head + t_hi
                if compare is not None and hi < compare:
                    return Enclosure(head, hi, summed_to, -1)
                # integral from N+1 = integral from N+1/2 minus one bridge segment
                seg, seg_err = _exp_decay_integral(
                    lambda w: np.asarray(terms.log_H(w)),
                    math.log(summed_to + 1.0),
                    fast,
                    z_0=w_half,
                )
                i_lo, e_lo = max(i_mid - seg, 0.0), e_mid + seg_err
                t_lo = max(i_lo + 0.5 * f_next - e_lo, 0.0)
                t_lo = min(t_lo, t_hi)
                lo = head + t_lo
                if compare is not None:
                    if lo > compare:
                        return Enclosure(lo, hi, summed_to, +1)
                    if hi < compare:
                        return Enclosure(lo, hi, summed_to, -1)
                width = hi - lo
                if width <= rel_tol * max(lo, 1e-300):
                    return Enclosure(lo, hi, summed_to, 0 if compare is not None else None)
                if compare is not None and width <= tie_tol * max(1.0, abs(compare)):
                    return Enclosure(lo, hi, summed_to, 0)

        if summed_to >= max_terms:
            if shape_ok and lo is not None:
                if _allow_loose:
                    return Enclosure(lo, hi, summed_to, None)
                if compare is not None:
                    return Enclosure(lo, hi, summed_to, 0 if lo <= compare <= hi else None)
            raise SeriesBudgetExceeded(
                f"needed more than {max_terms} terms for relative tolerance {rel_tol}"
            )
        target = min(2 * summed_to, max_terms)


def combined_enclosure(
    series: CombinedSeries,
    rel_tol: float = 1e-12,
    compare: Optional[float] = None,
    tie_tol: float = 1e-13,
    max_terms: int = MAX_TERMS,
    n_start: int = 64,
) -> Enclosure:
    """Enclosure of a signed component sum plus its exact scalar adjustment."""
    comps = series.components
    if len(comps) == 1 and series.signs[0] > 0:
        cmp_shift = None if compare is None else compare - series.delta
        enc = enclosure(comps[0], rel_tol, cmp_shift, tie_tol, max_terms, n_start)
        return Enclosure(enc.lo + series.delta, enc.hi + series.delta, enc.terms_used, enc.cmp)

    def pass_once(level: float) -> Enclosure:
        lo = hi = series.delta
        used = 0
        for sign, comp in zip(series.signs, comps):
            enc = enclosure(comp, level, None, tie_tol, max_terms, n_start)
            if sign > 0:
                lo += enc.lo
                hi += enc.hi
            else:
                lo -= enc.hi
                hi -= enc.lo
            used = max(used, enc.terms_used)
        cmp = None
        if compare is not None:
            cmp = +1 if lo > compare else (-1 if hi < compare else 0)
        return Enclosure(lo, hi, used, cmp)

    per_comp = rel_tol / max(len(comps), 1)
    if compare is None:
        return pass_once(per_comp)
    # threshold mode: loose passes usually decide the sign already
    for level in (1e-4, 1e-8, per_comp):
        try:
            enc = pass_once(level)
        except SeriesBudgetExceeded:
            if level == per_comp:
                raise
            continue
        if enc.cmp != 0 or level == per_comp:
            if enc.cmp == 0 and enc.width > tie_tol * max(1.0, abs(compare)):
                continue
            return enc
    return Enclosure(enc.lo, enc.hi, enc.terms_used, 0)


# ---------------------------------------------------------------------------
# building series from potential pairs
# ---------------------------------------------------------------------------


def _coerce_family(obj) -> Family:
    return obj.family if isinstance(obj, SymbolPotential) else obj


def build_series(
    phi: Optional[Family | SymbolPotential],
    q: float,
    psi: Optional[Family | SymbolPotential] = None,
    t: float = 0.0,
    moment: Optional[str] = None,
) -> CombinedSeries:
    """Series for ``sum_j p_j^q s_j^t [* (-log p_j) | * (-log s_j)]``.

    ``moment`` is ``None``, ``"phi"`` or ``"psi"``; either potential may be
    omitted (coefficient zero).  Spiked families contribute a base series plus
    an exact single-symbol adjustment; partition families decompose into the
    residual dense class and one sparse component per prime-power class.
    """
    phi_fam = _coerce_family(phi) if phi is not None else None
    psi_fam = _coerce_family(psi) if psi is not None else None
    if isinstance(phi_fam, PiecewisePartition):
        return _partition_series(phi_fam, q, psi_fam, t, moment)

    base_phi = phi_fam.base if isinstance(phi_fam, SpikedPowerLog) else phi_fam

    # fuse the power exponents once: evaluating q*log p + t*log s as separate
    # near-opposite linear terms would lose ~eps*|q*a|*log(x) of the exponent
    a_phi = base_phi.decay().power if base_phi is not None else 0.0
    a_psi = psi_fam.decay().power if psi_fam is not None else 0.0
    u_lin = q * a_phi + t * a_psi

    def log_arr(idx):
        x = np.asarray(idx, dtype=np.float64)
        lx = np.log(x)
        out = -u_lin * lx
        if base_phi is not None and q != 0.0:
            out = out + q * base_phi.sub_log_weight(x)
        if psi_fam is not None and t != 0.0:
            out = out + t * psi_fam.sub_log_weight(x)
        if moment == "phi":
            out = out + np.log(a_phi * lx - base_phi.sub_log_weight(x))
        elif moment == "psi":
            out = out + np.log(a_psi * lx - psi_fam.sub_log_weight(x))
        return out

    def log_sub(w):
        scalar = isinstance(w, (float, int))
        out = 0.0
        if base_phi is not None and q != 0.0:
            out = out + q * base_phi.sub_log_weight_logx(w)
        if psi_fam is not None and t != 0.0:
            out = out + t * psi_fam.sub_log_weight_logx(w)
        if moment == "phi":
            mf = a_phi * w - base_phi.sub_log_weight_logx(w)
            out = out + (math.log(mf) if scalar else np.log(mf))
        elif moment == "psi":
            mf = a_psi * w - psi_fam.sub_log_weight_logx(w)
            out = out + (math.log(mf) if scalar else np.log(mf))
        return out

    def log_logx(w):
        ww = w if isinstance(w, (float, int)) else np.asarray(w, dtype=np.float64)
        return -u_lin * ww + log_sub(w)

    def log_h(w):
        ww = w if isinstance(w, (float, int)) else np.asarray(w, dtype=np.float64)
        return -(u_lin - 1.0) * ww + log_sub(w)

    logpow = 0.0
    geo = 0.0
    scale = 1.0
    if base_phi is not None:
        d = base_phi.decay()
        logpow += q * d.logpow
        geo += q * d.geo
        scale += abs(q) * abs(d.power)
    if psi_fam is not None:
        d = psi_fam.decay()
        logpow += t * d.logpow
        geo += t * d.geo
        scale += abs(t) * abs(d.power)
    u_decay = u_lin
    if moment is not None:
        mfam = base_phi if moment == "phi" else psi_fam
        if isinstance(mfam, Geometric):
            u_decay -= 1.0  # |log p_j| grows linearly
        else:
            logpow -= 1.0  # |log weight| grows like log j
    decay = Decay(power=u_decay, logpow=logpow, geo=geo)

    terms = SeriesTerms(log_arr, log_logx, decay, start=1, u_scale=scale, log_H_fused=log_h)

    delta = 0.0
    if isinstance(phi_fam, SpikedPowerLog):
        k = phi_fam.k
        lw_old = float(base_phi.log_weight(np.asarray([k], dtype=np.float64))[0])
        lw_new = phi_fam.spike_log_weight()
        ls = float(psi_fam.log_weight(np.asarray([k], dtype=np.float64))[0]) if psi_fam is not None else 0.0
        log_old = q * lw_old + t * ls
        log_new = q * lw_new + t * ls
        if moment == "phi":
            log_old += math.log(-lw_old)
            log_new += math.log(-lw_new)
        elif moment == "psi":
            log_old += math.log(-ls)
            log_new += math.log(-ls)
        delta = math.exp(log_new) - math.exp(log_old)

    return CombinedSeries(components=(terms,), delta=delta)


def _partition_series(
    fam: PiecewisePartition,
    q: float,
    psi_fam: Optional[Family],
    t: float,
    moment: Optional[str],
) -> CombinedSeries:
    log_scale = math.log(fam.scale)
    psi_decay = psi_fam.decay() if psi_fam is not None else Decay()
    a_psi = psi_decay.power

    def class_sub(cls: PartitionClass, w):
        # class log weight plus l*w: the sublinear remainder at m = e^w
        w = np.asarray(w, dtype=np.float64)
        shift = np.log1p(2.0 * np.exp(-np.minimum(w, 745.0)))
        return log_scale + math.log(cls.coeff) - cls.M * np.log(w + shift)

    def comp_sub(cls: PartitionClass, r: int, wn):
        # sublinear part of the log-term at symbol m = e^{r*wn}
        wm = r * np.asarray(wn, dtype=np.float64)
        out = np.zeros_like(wm)
        if q != 0.0:
            out = out + q * class_sub(cls, wm)
        if psi_fam is not None and t != 0.0:
            out = out + t * psi_fam.sub_log_weight_logx(wm)
        if moment == "phi":
            out = out + np.log(cls.l * wm - class_sub(cls, wm))
        elif moment == "psi":
            out = out + np.log(a_psi * wm - np.asarray(psi_fam.sub_log_weight_logx(wm)))
        return out

    def comp_logx(cls: PartitionClass, r: int, wn):
        # power exponents fused once (cancellation-safe)
        wn = np.asarray(wn, dtype=np.float64)
        return -(r * (q * cls.l + t * a_psi)) * wn + comp_sub(cls, r, wn)

    def comp_decay(cls: PartitionClass, r: int) -> Decay:
        u = r * (q * cls.l + t * a_psi)
        logpow = q * cls.M + t * psi_decay.logpow
        if moment is not None:
            logpow -= 1.0
        return Decay(power=u, logpow=logpow, geo=0.0)

    def make_terms(cls: PartitionClass, r: int) -> SeriesTerms:
        def log_arr(idx):
            wn = np.log(np.asarray(idx, dtype=np.float64))
            return np.asarray(comp_logx(cls, r, wn), dtype=np.float64)

        u_n = r * (q * cls.l + t * a_psi)

        def log_h(wn):
            wn = np.asarray(wn, dtype=np.float64)
            return -(u_n - 1.0) * wn + comp_sub(cls, r, wn)

        scale = 1.0 + abs(q) * cls.l * r + abs(t) * abs(psi_decay.power) * r
        return SeriesTerms(
            log_arr,
            lambda w: comp_logx(cls, r, w),
            comp_decay(cls, r),
            start=1 if r == 1 else 2,
            u_scale=scale,
            log_H_fused=log_h,
        )

    def subsets(values):
        out = [()]
        for v in values:
            out += [s + (v,) for s in out]
        return out[1:]  # nonempty subsets

    # exact inclusion-exclusion over the prime-power lattice: every piece is a
    # clean unmasked series over n >= 2 with symbols m = n^(product of powers)
    comps: list[SeriesTerms] = []
    signs: list[int] = []
    residual = fam.classes[0]
    primes = [cls.power for cls in fam.classes if cls.power > 1]

    comps.append(make_terms(residual, 1))
    signs.append(+1)
    for sub in subsets(primes):
        comps.append(make_terms(residual, math.prod(sub)))
        signs.append(-1 if len(sub) % 2 == 1 else +1)

    for cls in fam.classes:
        if cls.power == 1:
            continue
        comps.append(make_terms(cls, cls.power))
        signs.append(+1)
        higher = [p for p in primes if p > cls.power]
        for sub in subsets(higher):
            comps.append(make_terms(cls, cls.power * math.prod(sub)))
            signs.append(-1 if len(sub) % 2 == 1 else +1)

    return CombinedSeries(components=tuple(comps), delta=0.0, signs=tuple(signs))


def family_mass_enclosure(fam: Family) -> tuple[float, float]:
    """Certified enclosure of ``sum_i w_i`` for a unit-scale family."""
    enc = combined_enclosure(build_series(fam, 1.0), rel_tol=1e-12)
    return enc.lo, enc.hi
