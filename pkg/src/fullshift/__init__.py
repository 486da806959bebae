"""Thermodynamic formalism and multifractal spectra on the countable full shift.

Computes the pressure of two-parameter potential families ``q*phi - t*psi``,
the temperature function T(q), the finiteness boundary and frozen set, the
Legendre-transform multifractal spectrum with its phase transitions, and a
Gauss-map Monte-Carlo cross-check of pointwise dimension.
"""

from .potentials import (
    GaussMetric,
    Geometric,
    PartitionClass,
    PiecewisePartition,
    PotentialPair,
    PowerLog,
    ShiftedPower,
    Sign,
    SpikedPowerLog,
    SymbolPotential,
    alpha_lim,
    gauss_metric_pair,
    log_weight,
    normalize,
)
from .pressure import PressureValue, SeriesValue, pressure, t_inf, t_tilde, z1
from .temperature import (
    GibbsWeights,
    QSet,
    QSetKind,
    Regime,
    TemperatureResult,
    alpha_of_q,
    frozen,
    gibbs_weights,
    q_set,
    temperature,
)

__version__ = "0.1.0"
