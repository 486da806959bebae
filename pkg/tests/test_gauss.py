import math
from fractions import Fraction

import numpy as np
import pytest

from fullshift.gauss import (
    DigitSequence,
    HeavyTailError,
    ShortExpansion,
    cylinder_interval,
    cylinder_log_diameter,
    decode,
    encode,
    gauss_step,
    sample_dimension,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def test_gauss_step_values():
    assert gauss_step(2.0 / 3.0) == pytest.approx(0.5, abs=1e-14)
    assert gauss_step(GOLDEN) == pytest.approx(GOLDEN, abs=1e-12)
    assert gauss_step(math.sqrt(2.0) - 1.0) == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-12)


def test_gauss_step_domain():
    for bad in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(ValueError):
            gauss_step(bad)


def test_encode_fixed_points():
    assert encode(GOLDEN, 5).digits == (1, 1, 1, 1, 1)
    assert encode(math.sqrt(2.0) - 1.0, 4).digits == (2, 2, 2, 2)


def test_encode_rational_short_expansion():
    with pytest.raises(ShortExpansion) as err:
        encode(0.75, 3)
    assert err.value.digits.digits == (1, 3)


def test_decode_rational():
    assert decode((1, 2, 1)) == Fraction(3, 4)
    assert decode((2,)) == Fraction(1, 2)
    assert decode((1, 1, 1, 1)) == Fraction(3, 5)


def test_round_trip_within_cylinder():
    rng = np.random.default_rng(7)
    for x in rng.random(20) * 0.98 + 0.01:
        try:
            d = encode(float(x), 8)
        except ShortExpansion:
            continue
        lo, hi = cylinder_interval(d)
        assert float(lo) - 1e-12 <= x <= float(hi) + 1e-12
        assert float(lo) <= float(decode(d)) <= float(hi)


def test_cylinder_log_diameter_single_digit():
    # exact endpoints of [k] give diameter 1/(k(k+1)); the derivative-based
    # value is within the distortion constant log 2
    for k in (1, 2, 5, 17):
        exact = math.log(1.0 / (k * (k + 1)))
        got = cylinder_log_diameter((k,))
        assert abs(got - exact) <= math.log(2.0) + 1e-12


def test_cylinder_log_diameter_distortion_bound():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = int(rng.integers(2, 13))
        digits = tuple(int(d) for d in rng.integers(1, 9, size=n))
        lo, hi = cylinder_interval(digits)
        exact = math.log(float(hi - lo))
        got = cylinder_log_diameter(digits)
        assert abs(got - exact) <= math.log(2.0) + 1e-9


def test_cylinder_log_diameter_golden_asymptotics():
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    for n in (10, 20, 40):
        got = cylinder_log_diameter((1,) * n)
        assert got / n == pytest.approx(-2.0 * math.log(phi), abs=4.0 / n)


def test_sample_dimension_one_digit_expectation(pairs):
    # with one digit per sample the pooled ratio estimates
    # sum(w log p) / sum(w log s) directly
    pair = pairs["one-transition"]
    est = sample_dimension(pair, 0.0, samples=60_000, digits_per_sample=1, seed=3)
    from fullshift.temperature import alpha_of_q

    target = alpha_of_q(pair, 0.0)
    assert abs(est.mean - target) <= 4.0 * est.std_error


def test_sample_dimension_matches_alpha(pairs):
    pair = pairs["one-transition"]
    est = sample_dimension(pair, 0.5, samples=3000, digits_per_sample=1500, seed=5)
    from fullshift.temperature import alpha_of_q

    assert abs(est.mean - alpha_of_q(pair, 0.5)) <= 4.0 * est.std_error


def test_sample_dimension_reproducible(pairs):
    pair = pairs["one-transition"]
    a = sample_dimension(pair, 0.0, samples=500, digits_per_sample=200, seed=12)
    b = sample_dimension(pair, 0.0, samples=500, digits_per_sample=200, seed=12)
    assert a == b


def test_sample_dimension_seed_stability(pairs):
    pair = pairs["one-transition"]
    a = sample_dimension(pair, 0.0, samples=4000, digits_per_sample=500, seed=1)
    b = sample_dimension(pair, 0.0, samples=4000, digits_per_sample=500, seed=2)
    pooled = math.hypot(a.std_error, b.std_error)
    assert abs(a.mean - b.mean) < 4.0 * pooled


def test_sample_dimension_rejects_frozen_and_heavy(pairs):
    with pytest.raises(HeavyTailError):
        sample_dimension(pairs["one-transition"], 3.0, 10, 10, seed=0)  # frozen interior
    with pytest.raises(HeavyTailError):
        sample_dimension(pairs["minkowski"], 0.0, 10, 10, seed=0)  # divergent moments
