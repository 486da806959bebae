"""Partition sums Z1, topological pressure, and the finiteness boundary.

For locally constant potentials on the full shift the pressure of
``q*phi - t*psi`` is exactly ``log sum_i p_i^q s_i^t``, so everything here
reduces to certified evaluation of that one series plus symbolic bookkeeping
of where it is finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import series
from .potentials import PiecewisePartition, PotentialPair, alpha_lim

__all__ = [
    "REL_TOL",
    "NotPolynomial",
    "SeriesValue",
    "PressureValue",
    "z1",
    "z1_compare",
    "pressure",
    "pressure_sign",
    "t_inf",
    "t_tilde",
    "t_tilde_lines",
]

REL_TOL = 1e-12
Verdict = series.Verdict


class NotPolynomial(ValueError):
    """The metric potential has no polynomial decay, so no finiteness threshold."""


@dataclass(frozen=True)
class SeriesValue:
    """Result of summing Z1: a certified enclosure or a divergence verdict.

    For a convergent series the true sum lies in
    ``[partial_sum, partial_sum + tail_bound]`` with
    ``tail_bound <= rel_tol * partial_sum``; divergent verdicts carry an
    infinite ``partial_sum`` sentinel.
    """

    verdict: Verdict
    partial_sum: float
    tail_bound: float
    terms_used: int

    @property
    def convergent(self) -> bool:
        return self.verdict is Verdict.CONVERGENT

    @property
    def value(self) -> float:
        return self.partial_sum + 0.5 * self.tail_bound if self.convergent else math.inf


@dataclass(frozen=True)
class PressureValue:
    """``log Z1`` when finite, the +inf sentinel otherwise."""

    value: float
    finite: bool


def _combined_verdict(comb: series.CombinedSeries) -> Verdict:
    worst = Verdict.CONVERGENT
    for comp in comb.components:
        v = series.verdict_for(comp.decay, comp.u_scale)
        if v is Verdict.DIVERGENT:
            return Verdict.DIVERGENT
        if v is Verdict.DIVERGENT_AT_BOUNDARY:
            worst = Verdict.DIVERGENT_AT_BOUNDARY
    return worst


def z1(pair: PotentialPair, q: float, t: float, rel_tol: float = REL_TOL) -> SeriesValue:
    """Certified evaluation of ``Z1(q*phi - t*psi) = sum_i p_i^q s_i^t``.

    Convergence is classified symbolically from the combined exponents;
    divergence is a verdict, never an error.
    """
    comb = series.build_series(pair.phi, q, pair.psi, t)
    verdict = _combined_verdict(comb)
    if verdict is not Verdict.CONVERGENT:
        return SeriesValue(verdict, math.inf, 0.0, 0)
    enc = series.combined_enclosure(comb, rel_tol=rel_tol)
    return SeriesValue(Verdict.CONVERGENT, enc.lo, enc.width, enc.terms_used)


def z1_compare(pair: PotentialPair, q: float, t: float, threshold: float = 1.0) -> int:
    """Sign of ``Z1 - threshold`` (+1/-1, 0 when tied at full resolution)."""
    return z1_probe(pair, q, t, threshold).cmp or 0


def z1_probe(
    pair: PotentialPair, q: float, t: float, threshold: float = 1.0, n_start: int = 64
) -> "series.Enclosure":
    """Adaptive enclosure of Z1, stopping once the threshold comparison is decided."""
    comb = series.build_series(pair.phi, q, pair.psi, t)
    if _combined_verdict(comb) is not Verdict.CONVERGENT:
        return series.Enclosure(math.inf, math.inf, 0, +1)
    enc = series.combined_enclosure(comb, rel_tol=REL_TOL, compare=threshold, n_start=n_start)
    if enc.cmp is None:
        enc = series.Enclosure(enc.lo, enc.hi, enc.terms_used, 0)
    return enc


def pressure(pair: PotentialPair, q: float, t: float, rel_tol: float = REL_TOL) -> PressureValue:
    """Pressure of ``q*phi - t*psi``: ``log Z1`` when finite, +inf otherwise."""
    sv = z1(pair, q, t, rel_tol=rel_tol)
    if not sv.convergent:
        return PressureValue(math.inf, False)
    return PressureValue(math.log(sv.value), True)


def pressure_sign(pair: PotentialPair, q: float, t: float) -> int:
    """Sign of the pressure (+1/-1/0), cheap enough for bisection loops."""
    return z1_compare(pair, q, t, threshold=1.0)


def t_inf(pair: PotentialPair) -> float:
    """Threshold ``inf{t : pressure(-t*psi) < inf}``, from the metric decay exponent."""
    d = pair.psi.decay()
    if d.geo > 0 or d.power <= 0:
        raise NotPolynomial("the metric potential must decay polynomially")
    return 1.0 / d.power


def t_tilde_lines(pair: PotentialPair) -> list[tuple[float, float]]:
    """Slope/intercept of the per-class finiteness lines (partition families)."""
    a_psi = pair.psi.decay().power
    fam = pair.phi.family
    assert isinstance(fam, PiecewisePartition)
    return [(-cls.l / a_psi, 1.0 / (cls.power * a_psi)) for cls in fam.classes]


def t_tilde(pair: PotentialPair, q: float) -> float:
    """Boundary ``inf{t : pressure(q*phi - t*psi) < inf}`` as an extended real.

    Affine ``-alpha_lim*q + t_inf`` when the weight-ratio limit exists; the
    +inf/finite/-inf sentinel ladder when it is infinite (geometric phi); the
    upper envelope of the class lines for partition families.
    """
    tinf = t_inf(pair)
    alim = alpha_lim(pair)
    if alim is None:
        return max(s * q + c for s, c in t_tilde_lines(pair))
    if math.isinf(alim):
        if q < 0:
            return math.inf
        if q == 0:
            return tinf
        return -math.inf
    return -alim * q + tinf
