"""Brute-force cross-checks, deliberately independent of the main machinery.

Finite-alphabet truncations of the temperature function converge upward to
T(q); a dense-grid minimization evaluates the Legendre transform directly.
Neither shares series or root-finding code with the pressure/temperature
modules: these are the second route of every dual check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .potentials import PotentialPair

__all__ = ["TruncatedResult", "truncated_temperature", "brute_legendre"]


@dataclass(frozen=True)
class TruncatedResult:
    """Temperature of the n-symbol truncation (exact finite sum, no tails)."""

    n: int
    T_n: float


def truncated_temperature(pair: PotentialPair, q: float, n: int) -> TruncatedResult:
    """Solve ``sum_{i<=n} p_i^q s_i^t = 1`` by plain bisection on the exact finite sum.

    The finite sum is strictly decreasing in t, blows up as t -> -inf, and
    vanishes as t -> +inf, so a root always exists; T_n increases with n
    toward the full temperature.
    """
    if n < 2:
        raise ValueError("truncation needs at least two symbols")
    idx = np.arange(1, n + 1, dtype=np.float64)
    log_p = np.asarray(pair.phi.log_weight(idx), dtype=np.float64)
    log_s = np.asarray(pair.psi.log_weight(idx), dtype=np.float64)

    def log_sum(t: float) -> float:
        e = q * log_p + t * log_s
        m = float(e.max())
        return m + math.log(float(np.exp(e - m).sum()))

    lo, hi = -1.0, 1.0
    for _ in range(200):
        if log_sum(lo) > 0.0:
            break
        lo = 2.0 * lo - 1.0
    else:
        raise RuntimeError("no lower bracket for the truncated temperature")
    for _ in range(200):
        if log_sum(hi) < 0.0:
            break
        hi = 2.0 * hi + 1.0
    else:
        raise RuntimeError("no upper bracket for the truncated temperature")
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if log_sum(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return TruncatedResult(n, 0.5 * (lo + hi))


def brute_legendre(t_samples, alpha: float) -> float:
    """Direct Legendre transform: min over a (q, T) sample grid of ``T + q*alpha``.

    ``t_samples`` is a sequence of (q, T) pairs or a 2-column array; the grid
    should span the q-range of interest densely (>= 1e4 points for the
    acceptance checks).
    """
    arr = np.asarray(t_samples, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("t_samples must be (q, T) pairs")
    qs, ts = arr[:, 0], arr[:, 1]
    finite = np.isfinite(ts)
    return float(np.min(ts[finite] + qs[finite] * alpha))
