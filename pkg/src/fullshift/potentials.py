"""Per-symbol weight families for locally constant potentials on the full shift.

A locally constant potential is determined by one weight per symbol.  Two
roles appear throughout:

* a probability-like role (``Sign.NEGATIVE_POTENTIAL``): weights ``p_i`` in
  (0, 1) with ``sum p_i = 1``, the potential value on the cylinder ``[i]``
  being ``log p_i < 0``;
* a metric role (``Sign.POSITIVE_METRIC``): contraction scales ``s_i`` in
  (0, 1), the metric potential value being ``-log s_i > 0``.

Every family exposes its symbol weights in log space, a smooth real-argument
extension of the same formula (used by the certified tail integrals), and its
asymptotic decay data ``log w(x) ~ log K - g*x - a*log x - b*log log x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Union

import numpy as np

__all__ = [
    "Sign",
    "Decay",
    "PowerLog",
    "ShiftedPower",
    "Geometric",
    "GaussMetric",
    "SpikedPowerLog",
    "PartitionClass",
    "PiecewisePartition",
    "SymbolPotential",
    "PotentialPair",
    "NotNormalizable",
    "log_weight",
    "normalize",
    "alpha_lim",
    "gauss_metric_pair",
]

LOG_GAUSS_SCALE = math.log(6.0 / math.pi**2)

# Primes used for the prime-power index classes; class k covers perfect
# r_{k+1}-th powers, with r = (0, 1, 2, 3, 5, 7, ...).
_CLASS_POWERS = (1, 2, 3, 5, 7, 11, 13)


class Sign(Enum):
    """Role of a symbol potential."""

    NEGATIVE_POTENTIAL = "negative_potential"  # log p_i, strictly negative, sums to 1
    POSITIVE_METRIC = "positive_metric"  # log s_i, strictly negative scales


class NotNormalizable(ValueError):
    """The family's weights are not summable, so no scale makes them sum to 1."""


@dataclass(frozen=True)
class Decay:
    """Asymptotics of a log weight: ``log w(x) ~ -geo*x - power*log x - logpow*log log x``."""

    power: float = 0.0
    logpow: float = 0.0
    geo: float = 0.0

    def scaled(self, coeff: float) -> "Decay":
        return Decay(self.power * coeff, self.logpow * coeff, self.geo * coeff)

    def __add__(self, other: "Decay") -> "Decay":
        return Decay(self.power + other.power, self.logpow + other.logpow, self.geo + other.geo)


def _aslog(i) -> np.ndarray:
    arr = np.asarray(i, dtype=np.float64)
    return np.log(arr)


@dataclass(frozen=True)
class PowerLog:
    """Weights ``scale / (i**a * log(i + c)**b)``."""

    a: float
    b: float = 0.0
    c: float = 2.0
    scale: float = 1.0

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("log shift c must be nonnegative")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def log_weight(self, i) -> np.ndarray:
        x = np.asarray(i, dtype=np.float64)
        return -self.a * np.log(x) + self.sub_log_weight(x)

    def sub_log_weight(self, x) -> np.ndarray:
        # log weight plus a*log(x): the sublinear remainder
        return math.log(self.scale) - self.b * np.log(np.log(np.asarray(x, dtype=np.float64) + self.c))

    def log_weight_logx(self, w):
        # value at x = e^w without forming e^w; log(x+c) = w + log1p(c*e^-w)
        if isinstance(w, (float, int)):
            return -self.a * w + self.sub_log_weight_logx(w)
        return -self.a * np.asarray(w, dtype=np.float64) + self.sub_log_weight_logx(w)

    def sub_log_weight_logx(self, w):
        if isinstance(w, (float, int)):
            logshift = math.log1p(self.c * math.exp(-w)) if w < 745.0 else 0.0
            return math.log(self.scale) - self.b * math.log(w + logshift)
        w = np.asarray(w, dtype=np.float64)
        logshift = np.log1p(self.c * np.exp(-np.minimum(w, 745.0)))
        return math.log(self.scale) - self.b * np.log(w + logshift)

    def decay(self) -> Decay:
        return Decay(power=self.a, logpow=self.b)

    def summable(self) -> bool:
        return self.a > 1 or (self.a == 1 and self.b > 1)

    def with_scale(self, scale: float) -> "PowerLog":
        return replace(self, scale=scale)


@dataclass(frozen=True)
class ShiftedPower:
    """Weights ``scale / (i + 1)**a``."""

    a: float
    scale: float = 1.0

    def log_weight(self, i) -> np.ndarray:
        x = np.asarray(i, dtype=np.float64)
        return -self.a * np.log(x) + self.sub_log_weight(x)

    def sub_log_weight(self, x) -> np.ndarray:
        # log(x+1) = log(x) + log1p(1/x)
        return math.log(self.scale) - self.a * np.log1p(1.0 / np.asarray(x, dtype=np.float64))

    def log_weight_logx(self, w):
        if isinstance(w, (float, int)):
            return -self.a * w + self.sub_log_weight_logx(w)
        return -self.a * np.asarray(w, dtype=np.float64) + self.sub_log_weight_logx(w)

    def sub_log_weight_logx(self, w):
        if isinstance(w, (float, int)):
            corr = math.log1p(math.exp(-w)) if w < 745.0 else 0.0
            return math.log(self.scale) - self.a * corr
        w = np.asarray(w, dtype=np.float64)
        corr = np.log1p(np.exp(-np.minimum(w, 745.0)))
        return math.log(self.scale) - self.a * corr

    def decay(self) -> Decay:
        return Decay(power=self.a)

    def summable(self) -> bool:
        return self.a > 1

    def with_scale(self, scale: float) -> "ShiftedPower":
        return replace(self, scale=scale)


@dataclass(frozen=True)
class Geometric:
    """Weights ``scale * r**i`` with ratio ``r`` in (0, 1).

    The normalized family has ``scale = (1 - r)/r`` so the weights sum to 1;
    ``r = 1/2`` needs no rescaling.
    """

    r: float
    scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ValueError("geometric ratio must lie in (0, 1)")

    def log_weight(self, i) -> np.ndarray:
        x = np.asarray(i, dtype=np.float64)
        return math.log(self.scale) + x * math.log(self.r)

    def sub_log_weight(self, x) -> np.ndarray:
        return self.log_weight(x)  # no power-linear part to split off

    def log_weight_logx(self, w):
        if isinstance(w, (float, int)):
            if w > 700.0:
                return -math.inf
            return math.log(self.scale) + math.exp(w) * math.log(self.r)
        w = np.asarray(w, dtype=np.float64)
        x = np.exp(np.minimum(w, 700.0))
        return np.where(w > 700.0, -np.inf, math.log(self.scale) + x * math.log(self.r))

    def sub_log_weight_logx(self, w):
        return self.log_weight_logx(w)

    def decay(self) -> Decay:
        return Decay(geo=-math.log(self.r))

    def summable(self) -> bool:
        return True

    def with_scale(self, scale: float) -> "Geometric":
        return replace(self, scale=scale)


@dataclass(frozen=True)
class GaussMetric:
    """Contraction scales ``s_i = (6/pi^2) / i**2`` of the continued-fraction coding."""

    def log_weight(self, i) -> np.ndarray:
        x = np.asarray(i, dtype=np.float64)
        return LOG_GAUSS_SCALE - 2.0 * np.log(x)

    def sub_log_weight(self, x) -> np.ndarray:
        return np.full(np.shape(x), LOG_GAUSS_SCALE)

    def log_weight_logx(self, w):
        return LOG_GAUSS_SCALE - 2.0 * w

    def sub_log_weight_logx(self, w):
        if isinstance(w, (float, int)):
            return LOG_GAUSS_SCALE
        return np.full(np.shape(w), LOG_GAUSS_SCALE)

    def decay(self) -> Decay:
        return Decay(power=2.0)

    def summable(self) -> bool:
        return True  # sums to exactly 1

    def with_scale(self, scale: float) -> "GaussMetric":
        raise ValueError("the Gauss metric family carries no free scale")


@dataclass(frozen=True)
class SpikedPowerLog:
    """A PowerLog base with one symbol's weight replaced by ``spike_scale * base shape``.

    ``p_k = spike_scale / (k**a * log(k + c)**b)`` with ``spike_scale > 1``;
    normalization rescales the base so the total mass stays 1.
    """

    base: PowerLog
    k: int = 2
    spike_scale: float = 2.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("spiked symbol index must be >= 1")
        if self.spike_scale <= 1.0:
            raise ValueError("spike_scale must exceed 1")

    def log_weight(self, i) -> np.ndarray:
        x = np.asarray(i)
        out = self.base.log_weight(x)
        spike = np.asarray(x == self.k)
        if spike.any():
            delta = math.log(self.spike_scale) - math.log(self.base.scale)
            out = np.where(spike, out + delta, out)
        return out

    def sub_log_weight(self, x) -> np.ndarray:
        return self.base.sub_log_weight(x)

    def log_weight_logx(self, w):
        return self.base.log_weight_logx(w)

    def sub_log_weight_logx(self, w):
        return self.base.sub_log_weight_logx(w)

    def decay(self) -> Decay:
        return self.base.decay()

    def summable(self) -> bool:
        return self.base.summable()

    def with_scale(self, scale: float) -> "SpikedPowerLog":
        return replace(self, base=self.base.with_scale(scale))

    def spike_log_weight(self) -> float:
        return float(
            math.log(self.spike_scale)
            - self.base.a * math.log(self.k)
            - self.base.b * math.log(math.log(self.k + self.base.c))
        )


@dataclass(frozen=True)
class PartitionClass:
    """One index class of a :class:`PiecewisePartition`.

    ``power`` r means the class holds the perfect r-th powers not claimed by a
    higher configured power (power 1 is the residual class).  Weights on the
    class are ``coeff * scale / (m**l * log(m + 2)**M)``.
    """

    power: int
    l: float
    M: float
    coeff: float = 1.0

    def log_weight(self, m) -> np.ndarray:
        x = np.asarray(m, dtype=np.float64)
        return math.log(self.coeff) - self.l * np.log(x) - self.M * np.log(np.log(x + 2.0))


@dataclass(frozen=True)
class PiecewisePartition:
    """Weights defined class-by-class over a prime-power partition of the symbols.

    Index m belongs to the class with the largest configured ``power`` r such
    that m is a perfect r-th power (m = 1 and non-powers fall in the power-1
    residual class).  A single global ``scale`` multiplies every class.
    """

    classes: tuple[PartitionClass, ...]
    scale: float = 1.0

    def __post_init__(self):
        powers = [c.power for c in self.classes]
        if sorted(powers) != list(powers) or len(set(powers)) != len(powers):
            raise ValueError("class powers must be strictly increasing")
        if powers[0] != 1:
            raise ValueError("a power-1 residual class is required")
        for p in powers[1:]:
            if p not in _CLASS_POWERS:
                raise ValueError(f"class power {p} is not in the prime-power ladder")

    def class_index(self, m) -> np.ndarray:
        """Class (position in ``self.classes``) of each symbol, largest power wins."""
        marr = np.asarray(m, dtype=np.int64)
        out = np.zeros(marr.shape, dtype=np.int64)
        for pos, cls in enumerate(self.classes):
            if cls.power == 1:
                continue
            root = np.round(np.power(marr.astype(np.float64), 1.0 / cls.power)).astype(np.int64)
            hit = np.zeros(marr.shape, dtype=bool)
            for delta in (-1, 0, 1):  # guard float rounding of the integer root
                cand = root + delta
                ok = cand >= 1
                hit |= ok & (_ipow(cand, cls.power) == marr)
            out = np.where(hit & (marr > 1), pos, out)
        return out

    def log_weight(self, m) -> np.ndarray:
        marr = np.asarray(m, dtype=np.int64)
        idx = self.class_index(marr)
        out = np.empty(marr.shape, dtype=np.float64)
        for pos, cls in enumerate(self.classes):
            mask = idx == pos
            if mask.any():
                out[mask] = cls.log_weight(marr[mask])
        return out + math.log(self.scale)

    def log_weight_logx(self, w):
        # smooth extension of the residual class (density-one part)
        cls = self.classes[0]
        if isinstance(w, (float, int)):
            return -cls.l * w + self.sub_log_weight_logx(w)
        return -cls.l * np.asarray(w, dtype=np.float64) + self.sub_log_weight_logx(w)

    def sub_log_weight_logx(self, w):
        cls = self.classes[0]
        if isinstance(w, (float, int)):
            logshift = math.log1p(2.0 * math.exp(-w)) if w < 745.0 else 0.0
            return math.log(self.scale) + math.log(cls.coeff) - cls.M * math.log(w + logshift)
        w = np.asarray(w, dtype=np.float64)
        logshift = np.log1p(2.0 * np.exp(-np.minimum(w, 745.0)))
        return math.log(self.scale) + math.log(cls.coeff) - cls.M * np.log(w + logshift)

    def decay(self) -> Decay:
        cls = self.classes[0]
        return Decay(power=cls.l, logpow=cls.M)

    def summable(self) -> bool:
        for cls in self.classes:
            u = cls.power * cls.l
            if not (u > 1 or (u == 1 and cls.power * 0 + cls.M > 1)):
                return False
        return True

    def with_scale(self, scale: float) -> "PiecewisePartition":
        return replace(self, scale=scale)


def _ipow(base: np.ndarray, exp: int) -> np.ndarray:
    """Integer power with saturation instead of int64 overflow."""
    out = np.ones_like(base)
    cap = np.int64(2**62)
    for _ in range(exp):
        big = np.abs(out) > cap // np.maximum(np.abs(base), 1)
        out = np.where(big, cap, out * base)
    return out


Family = Union[PowerLog, ShiftedPower, Geometric, GaussMetric, SpikedPowerLog, PiecewisePartition]


@dataclass(frozen=True)
class SymbolPotential:
    """A weight family playing a definite sign role."""

    family: Family
    sign: Sign

    def log_weight(self, i) -> np.ndarray:
        return self.family.log_weight(i)

    def log_weight_logx(self, w: float) -> float:
        return self.family.log_weight_logx(w)

    def decay(self) -> Decay:
        return self.family.decay()

    @property
    def is_geometric(self) -> bool:
        return isinstance(self.family, Geometric)

    @property
    def is_partition(self) -> bool:
        return isinstance(self.family, PiecewisePartition)


@dataclass(frozen=True)
class PotentialPair:
    """The (phi, psi) pair: probability weights and metric scales."""

    phi: SymbolPotential
    psi: SymbolPotential

    def __post_init__(self):
        if self.phi.sign is not Sign.NEGATIVE_POTENTIAL:
            raise ValueError("phi must carry Sign.NEGATIVE_POTENTIAL")
        if self.psi.sign is not Sign.POSITIVE_METRIC:
            raise ValueError("psi must carry Sign.POSITIVE_METRIC")
        if isinstance(self.psi.family, (SpikedPowerLog, PiecewisePartition)):
            raise ValueError("spiked/partition families are probability-role only")
        probes = [1, 2, 3, 4]
        if isinstance(self.phi.family, SpikedPowerLog):
            probes.append(self.phi.family.k)
        for pot, name in ((self.phi, "phi"), (self.psi, "psi")):
            lw = pot.log_weight(np.asarray(probes, dtype=np.int64))
            if not np.all(lw < 0):
                raise ValueError(f"{name} weights must stay below 1 (log weight < 0)")


def log_weight(pot: SymbolPotential, i: int) -> float:
    """Log of the family weight at symbol ``i`` (``log p_i`` or ``log s_i``), always < 0.

    Raises ``ValueError`` for indices below 1.
    """
    arr = np.asarray(i)
    if np.any(arr < 1):
        raise ValueError("symbol indices start at 1")
    out = pot.log_weight(arr)
    return float(out) if np.isscalar(i) or arr.shape == () else out


def normalize(pot: SymbolPotential) -> SymbolPotential:
    """Return the same family rescaled so its weights sum to 1.

    The scale is computed from a certified partial-sum enclosure (relative
    width 1e-12), not from tabulated constants.  Raises
    :class:`NotNormalizable` when the weights are not summable.
    """
    from . import series  # local import; series depends on potentials

    fam = pot.family
    if isinstance(fam, GaussMetric):
        return pot  # sums to (6/pi^2) * zeta(2) = 1 already
    if not fam.summable():
        raise NotNormalizable(f"{type(fam).__name__} weights are not summable")
    if isinstance(fam, SpikedPowerLog):
        # the spiked symbol's weight is absolute; only the base rescales
        unit_base = replace(fam.base, scale=1.0)
        lo, hi = series.family_mass_enclosure(unit_base)
        g_total = 0.5 * (lo + hi)
        g_k = float(np.exp(unit_base.log_weight(np.asarray([float(fam.k)])))[0])
        spike_mass = fam.spike_scale * g_k
        if spike_mass >= 1.0:
            raise NotNormalizable("spike weight alone reaches the full mass")
        scale = (1.0 - spike_mass) / (g_total - g_k)
        return SymbolPotential(replace(fam, base=replace(fam.base, scale=scale)), pot.sign)
    unit = replace_scale(fam, 1.0)
    lo, hi = series.family_mass_enclosure(unit)
    total = 0.5 * (lo + hi)
    scaled = unit.with_scale(1.0 / total)
    return SymbolPotential(scaled, pot.sign)


def replace_scale(fam: Family, scale: float) -> Family:
    if isinstance(fam, SpikedPowerLog):
        return replace(fam, base=replace(fam.base, scale=scale))
    return replace(fam, scale=scale)


def alpha_lim(pair: PotentialPair) -> Optional[float]:
    """Limit of ``log p_i / log s_i`` as i grows, decided from family exponents.

    Returns ``math.inf`` when phi decays super-polynomially against psi
    (geometric phi over a polynomial metric), and ``None`` when the limit
    does not exist (partition classes with distinct exponent ratios).
    """
    dphi, dpsi = pair.phi.decay(), pair.psi.decay()
    if dpsi.geo > 0:
        raise ValueError("alpha_lim needs a polynomially decaying metric potential")
    if pair.phi.is_geometric:
        return math.inf
    if pair.phi.is_partition:
        fam: PiecewisePartition = pair.phi.family  # type: ignore[assignment]
        ratios = {cls.l / dpsi.power for cls in fam.classes}
        if len(ratios) == 1:
            return ratios.pop()
        return None
    return dphi.power / dpsi.power


def gauss_metric_pair(phi_family: Family) -> PotentialPair:
    """Convenience constructor: the given probability family over the Gauss metric."""
    return PotentialPair(
        phi=SymbolPotential(phi_family, Sign.NEGATIVE_POTENTIAL),
        psi=SymbolPotential(GaussMetric(), Sign.POSITIVE_METRIC),
    )
