"""Continued-fraction coding of the Gauss map and Monte-Carlo pointwise dimension.

The Gauss map ``G(x) = 1/x mod 1`` codes irrationals by their continued
fraction digits; cylinder diameters follow the chain-rule derivative product
of the orbit.  ``sample_dimension`` draws i.i.d. digit strings from the
symbol weights (the locally constant Gibbs state is a product measure) and
averages the per-orbit log-weight / log-scale ratio, which converges to
alpha(q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import series
from .potentials import PotentialPair
from .temperature import Regime, gibbs_weights, temperature

__all__ = [
    "DigitSequence",
    "DimensionEstimate",
    "ShortExpansion",
    "HeavyTailError",
    "gauss_step",
    "encode",
    "decode",
    "cylinder_interval",
    "cylinder_log_diameter",
    "sample_dimension",
]

MASS_CUTOFF = 1e-12  # sampling ignores symbols beyond cumulative mass 1 - this
_TABLE_CAP = 1 << 20


class ShortExpansion(ValueError):
    """A rational input ran out of continued-fraction digits."""

    def __init__(self, digits: tuple[int, ...]):
        super().__init__(f"expansion ended after {len(digits)} digits")
        self.digits = DigitSequence(digits)


class HeavyTailError(RuntimeError):
    """The weight distribution cannot be sampled (moments or tail unusable)."""


@dataclass(frozen=True)
class DigitSequence:
    """A finite continued-fraction digit string (all digits >= 1)."""

    digits: tuple[int, ...]

    def __post_init__(self):
        if any(d < 1 for d in self.digits):
            raise ValueError("continued-fraction digits start at 1")

    def __len__(self):
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)


@dataclass(frozen=True)
class DimensionEstimate:
    """Monte-Carlo estimate of the pointwise dimension carried by the weights."""

    mean: float
    std_error: float
    samples: int
    digits_per_sample: int


def gauss_step(x: float) -> float:
    """One Gauss-map step ``1/x mod 1`` for x in (0, 1)."""
    if not 0.0 < x < 1.0:
        raise ValueError("the Gauss map acts on (0, 1)")
    y = 1.0 / x
    return y - math.floor(y)


def encode(x: float, n: int) -> DigitSequence:
    """First n continued-fraction digits of x in (0, 1).

    Raises :class:`ShortExpansion` (carrying the digits found) when a
    rational x exhausts its expansion early.
    """
    if not 0.0 < x < 1.0:
        raise ValueError("the coding map acts on (0, 1)")
    digits: list[int] = []
    cur = x
    for _ in range(n):
        # a remainder at float-noise level means the expansion ended (rational x)
        if cur <= 1e-12:
            raise ShortExpansion(tuple(digits))
        y = 1.0 / cur
        d = int(math.floor(y))
        digits.append(d)
        cur = y - d
    return DigitSequence(tuple(digits))


def decode(d: DigitSequence | tuple[int, ...]) -> Fraction:
    """Exact value of the finite continued fraction [d1, d2, ..., dn]."""
    digits = tuple(d.digits if isinstance(d, DigitSequence) else d)
    if not digits:
        raise ValueError("empty digit sequence")
    value = Fraction(0)
    for digit in reversed(digits):
        value = Fraction(1, 1) / (digit + value)
    return value


def cylinder_interval(d: DigitSequence | tuple[int, ...]) -> tuple[Fraction, Fraction]:
    """Exact endpoints of the cylinder of all x whose expansion starts with d."""
    digits = tuple(d.digits if isinstance(d, DigitSequence) else d)
    a = decode(digits)
    b = decode(digits[:-1] + (digits[-1] + 1,))
    return (a, b) if a < b else (b, a)


def cylinder_log_diameter(d: DigitSequence | tuple[int, ...]) -> float:
    """Log cylinder diameter from the orbit derivative product.

    Follows the chain rule along the exact rational orbit of a representative
    inside the cylinder: ``log|[d]| = -sum log|G'(G^i z)| = 2 sum log(G^i z)``.
    Agrees with the exact endpoint diameter within the bounded distortion
    constant (a factor of at most 2).
    """
    digits = tuple(d.digits if isinstance(d, DigitSequence) else d)
    if not digits:
        raise ValueError("empty digit sequence")
    z = decode(digits + (2,))  # strictly interior; survives len(digits) steps
    total = 0.0
    cur = z
    for _ in range(len(digits)):
        total += 2.0 * math.log(float(cur))
        inv = 1 / cur
        cur = inv - math.floor(inv)
    return total


class _WeightSampler:
    """Inverse-CDF table for the symbol weights plus an exact power-law tail sampler."""

    def __init__(self, pair: PotentialPair, q: float, t: float):
        gw = gibbs_weights(pair, q, t)
        comb = series.build_series(pair.phi, q, pair.psi, t)
        if len(comb.components) != 1:
            raise HeavyTailError("partition families are not supported by the sampler")
        terms = comb.components[0]
        self._terms = terms
        self._log_z = math.log(gw.z_value)
        decay = terms.decay

        cutoff = gw.cutoff(MASS_CUTOFF)
        n_tab = min(cutoff, _TABLE_CAP)
        idx = np.arange(1, n_tab + 1, dtype=np.int64)
        probs = np.exp(terms.log_at(idx) - self._log_z)
        if comb.delta:  # spiked symbol adjustment
            k = pair.phi.family.k
            if k <= n_tab:
                probs[k - 1] += comb.delta / gw.z_value
        self._cum = np.cumsum(probs)
        self._n_tab = n_tab
        self._cutoff = cutoff

        self._tail_ready = cutoff > n_tab
        if self._tail_ready:
            u, v = decay.power, decay.logpow
            if not (u > 1.0 and v >= 0.0 and decay.geo == 0.0):
                raise HeavyTailError("tail sampler needs a plain power-log decay")
            self._u, self._v = u, v
            # envelope constant: f(j) <= E * j^-u * log(j+2)^-v beyond the table
            probes = np.unique(
                np.clip(
                    np.array([n_tab + 1, 2 * n_tab, 8 * n_tab, 64 * n_tab, cutoff], dtype=np.int64),
                    n_tab + 1,
                    None,
                )
            )
            log_env = terms.log_at(probes) + u * np.log(probes) + v * np.log(np.log(probes + 2.0))
            self._log_env = float(log_env.max()) + 1e-9

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        u01 = rng.random(count)
        out = np.searchsorted(self._cum, u01, side="right") + 1
        # draws beyond the tabulated mass fall into the exact tail sampler
        over = u01 > self._cum[-1]
        if over.any():
            if not self._tail_ready:
                out[over] = self._n_tab  # mass-cutoff clamp (< 1e-12 of the mass)
            else:
                out[over] = [self._draw_tail(rng) for _ in range(int(over.sum()))]
        return out.astype(np.int64)

    def _draw_tail(self, rng: np.random.Generator) -> int:
        """Exact rejection sampler for the conditional tail j > n_tab.

        Proposes floor of a continuous Pareto from n_tab + 1/2 and accepts
        with ``f(j) / (M * cell(j))``, where the envelope constant M makes the
        ratio provably <= 1 for a power-log decaying f.
        """
        u, v = self._u, self._v
        n = self._n_tab
        # M = E * L(n+1) * (1 + 1/(n+1))^u / (u-1), cell(j) in proposal mass units
        log_m = (
            self._log_env
            - v * math.log(math.log(n + 3.0))
            + u * math.log1p(1.0 / (n + 1.0))
            - math.log(u - 1.0)
        )
        for _ in range(10_000):
            x = (n + 0.5) * rng.random() ** (-1.0 / (u - 1.0))
            if x > 9e15:  # beyond exact float integers; mass ~ (n/x)^(u-1) is dust
                continue
            j = int(x)
            if j <= n or j > self._cutoff:
                continue
            log_cell = math.log(j ** (1.0 - u) - (j + 1.0) ** (1.0 - u))
            log_f = float(self._terms.log_at(np.asarray([j], dtype=np.int64))[0])
            log_a = log_f - log_m - log_cell
            if log_a > 1e-9:
                raise HeavyTailError("tail envelope violated; unsupported weight shape")
            if math.log(max(rng.random(), 1e-300)) <= log_a:
                return j
        raise HeavyTailError("tail rejection sampler failed to accept")


def sample_dimension(
    pair: PotentialPair,
    q: float,
    samples: int,
    digits_per_sample: int,
    seed: int = 0,
) -> DimensionEstimate:
    """Monte-Carlo estimate of the pointwise dimension under the (q, T(q)) weights.

    Draws i.i.d. digit strings from the symbol weights and forms the pooled
    Birkhoff ratio ``sum log p / sum log s``; its standard error comes from
    the per-sample ratio residuals.  Frozen q or divergent moments cannot be
    sampled and raise :class:`HeavyTailError`.
    """
    res = temperature(pair, q)
    if res.regime is Regime.FROZEN:
        raise HeavyTailError("frozen q: boundary weights need not normalize")
    if not res.weights_finite:
        raise HeavyTailError("potential moments diverge; the ratio has no mean")
    sampler = _WeightSampler(pair, q, res.T)

    rng = np.random.default_rng(seed)
    sum_a = np.zeros(samples)
    sum_b = np.zeros(samples)
    batch_rows = max(1, min(samples, 10_000_000 // max(digits_per_sample, 1)))
    row = 0
    while row < samples:
        rows = min(batch_rows, samples - row)
        js = sampler.draw(rng, rows * digits_per_sample).reshape(rows, digits_per_sample)
        sum_a[row : row + rows] = pair.phi.log_weight(js).sum(axis=1)
        sum_b[row : row + rows] = pair.psi.log_weight(js).sum(axis=1)
        row += rows

    ratio = float(sum_a.sum() / sum_b.sum())
    resid = sum_a - ratio * sum_b
    var = float(np.sum(resid**2)) / max(samples - 1, 1)
    se = math.sqrt(var / samples) / abs(float(np.mean(sum_b)))
    return DimensionEstimate(ratio, se, samples, digits_per_sample)
