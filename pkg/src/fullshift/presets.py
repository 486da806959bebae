"""Built-in potential pairs reproducing the canonical phase-transition counts.

Every preset pairs a normalized probability family with the Gauss metric
scales ``s_i = (6/pi^2)/i^2``.  The names state what the multifractal
spectrum does:

* ``zero-transitions``   -- shifted cubic weights; the frozen set is empty.
* ``one-transition``     -- power-log weights (exponent 6/5, squared log);
                            the frozen set is a right ray.
* ``two-transitions``    -- exponent-1 base with one spiked symbol; the
                            frozen set is [1, q1] with a degenerate left
                            endpoint.
* ``three-transitions``  -- exponent-6/5 base with a spiked symbol far
                            enough out that both endpoints are regular.
* ``minkowski``          -- geometric weights (the Minkowski ?-function
                            measure); infinite weight-ratio limit, plateau.
* ``infinite-transitions`` -- prime-power partition classes whose
                            finiteness boundary is a polyline with breaks
                            at q = 1, 2, 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .potentials import (
    Geometric,
    PartitionClass,
    PiecewisePartition,
    PotentialPair,
    PowerLog,
    ShiftedPower,
    Sign,
    SpikedPowerLog,
    SymbolPotential,
    gauss_metric_pair,
    normalize,
)

__all__ = ["Preset", "PRESETS", "preset_pair", "preset_names"]


@dataclass(frozen=True)
class Preset:
    name: str
    summary: str
    build: Callable[[], PotentialPair]
    q_min: float = -6.0
    q_max: float = 8.0
    dimension_q: float = 0.0


def _normalized(family) -> PotentialPair:
    phi = normalize(SymbolPotential(family, Sign.NEGATIVE_POTENTIAL))
    return gauss_metric_pair(phi.family)


def _zero() -> PotentialPair:
    return _normalized(ShiftedPower(a=3.0))


def _one() -> PotentialPair:
    return _normalized(PowerLog(a=1.2, b=2.0, c=2.0))


def _two() -> PotentialPair:
    return _normalized(SpikedPowerLog(base=PowerLog(a=1.0, b=2.0, c=2.0), k=2, spike_scale=2.0))


def _three() -> PotentialPair:
    return _normalized(SpikedPowerLog(base=PowerLog(a=1.2, b=2.0, c=2.0), k=10, spike_scale=11.6))


def _minkowski() -> PotentialPair:
    return _normalized(Geometric(r=0.5))


def _infinite() -> PotentialPair:
    # class slopes chosen so consecutive boundary lines cross at q = 1, 2, 3
    l1 = Fraction(7, 10)
    l2 = l1 - Fraction(1, 12)
    l3 = l2 - Fraction(2, 45)
    classes = (
        PartitionClass(power=1, l=1.2, M=2.0, coeff=1.0),
        PartitionClass(power=2, l=float(l1), M=3.0, coeff=1.2),
        PartitionClass(power=3, l=float(l2), M=4.0, coeff=1.44),
        PartitionClass(power=5, l=float(l3), M=5.0, coeff=1.728),
    )
    return _normalized(PiecewisePartition(classes=classes))


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        Preset("zero-transitions", "empty frozen set, analytic spectrum", _zero),
        Preset("one-transition", "frozen ray [q0, inf), one transition at alpha(q0)", _one),
        Preset("two-transitions", "spiked base, degenerate left endpoint: two transitions", _two, q_max=8.0),
        Preset("three-transitions", "spiked base, regular endpoints: three transitions", _three, q_max=8.0),
        Preset("minkowski", "geometric weights, plateau at T(0) past alpha(0)", _minkowski, q_min=-4.0, q_max=12.0),
        Preset("infinite-transitions", "prime-power classes, boundary breaks at q = 1, 2, 3", _infinite, q_min=-4.0, q_max=6.0),
    )
}


@lru_cache(maxsize=None)
def preset_pair(name: str) -> PotentialPair:
    try:
        return PRESETS[name].build()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None


def preset_names() -> list[str]:
    return list(PRESETS)
