import math

import numpy as np
import pytest

from fullshift.oracle import TruncatedResult, brute_legendre, truncated_temperature
from fullshift.pressure import t_tilde
from fullshift.temperature import q_set, temperature, temperature_grid


def test_truncated_monotone_in_n(pairs):
    pair = pairs["zero-transitions"]
    values = [truncated_temperature(pair, 0.0, n).T_n for n in (10, 100, 1000, 10_000)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert values[-1] < 1.0  # never exceeds the full temperature T(0) = 1


def test_truncated_converges_to_full_temperature(pairs):
    for name, q in (("zero-transitions", 0.4), ("one-transition", -0.5), ("minkowski", 1.0)):
        pair = pairs[name]
        full = temperature(pair, q).T
        tn = truncated_temperature(pair, q, 10_000).T_n
        assert tn <= full + 1e-12
        assert full - tn <= 1e-3


def test_truncated_geometric_sequence_upward(pairs):
    pair = pairs["minkowski"]
    seq = [truncated_temperature(pair, 0.0, n).T_n for n in (2, 4, 16, 256, 10_000)]
    assert all(a < b for a, b in zip(seq, seq[1:]))
    assert seq[-1] == pytest.approx(1.0, abs=1e-3)


def test_truncation_never_freezes(pairs):
    pair = pairs["one-transition"]
    q = 3.0  # frozen for the full alphabet
    tt = t_tilde(pair, q)
    tn = truncated_temperature(pair, q, 10_000).T_n
    assert tn <= tt + 1e-3


def test_brute_legendre_basics(pairs):
    pair = pairs["zero-transitions"]
    qs = np.linspace(-4.0, 6.0, 2001)
    res = temperature_grid(pair, qs, want_alpha=False)
    samples = [(r.q, r.T) for r in res]
    from fullshift.temperature import alpha_of_q

    a0 = alpha_of_q(pair, 0.0)
    assert brute_legendre(samples, a0) == pytest.approx(temperature(pair, 0.0).T, abs=1e-5)


def test_brute_legendre_linear_gap_argmin_is_endpoint(pairs):
    pair = pairs["one-transition"]
    qs = np.linspace(-4.0, 6.0, 2001)
    res = temperature_grid(pair, qs, want_alpha=False)
    arr = np.array([(r.q, r.T) for r in res])
    q0 = q_set(pair, (-6.0, 8.0)).q0
    alpha = 0.8  # inside the linear gap (alpha_lim, alpha(q0))
    vals = arr[:, 1] + arr[:, 0] * alpha
    argmin_q = arr[np.argmin(vals), 0]
    assert argmin_q == pytest.approx(q0, abs=2 * (qs[1] - qs[0]))


def test_brute_legendre_validates_shape():
    with pytest.raises(ValueError):
        brute_legendre(np.zeros((3, 3)), 1.0)
