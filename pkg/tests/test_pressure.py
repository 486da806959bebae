import math

import numpy as np
import pytest
from scipy.special import zeta

from fullshift.potentials import Geometric, PowerLog, ShiftedPower, gauss_metric_pair
from fullshift.pressure import (
    NotPolynomial,
    Verdict,
    pressure,
    t_inf,
    t_tilde,
    t_tilde_lines,
    z1,
)
from fullshift.series import SeriesBudgetExceeded


@pytest.fixture(scope="module")
def shifted(pairs):
    return pairs["zero-transitions"]


@pytest.fixture(scope="module")
def powerlog(pairs):
    return pairs["one-transition"]


@pytest.fixture(scope="module")
def mink(pairs):
    return pairs["minkowski"]


def test_z1_basel_identity(shifted):
    # at q=0, t=1 the sum is (6/pi^2) * zeta(2) = 1 exactly
    sv = z1(shifted, 0.0, 1.0)
    assert sv.verdict is Verdict.CONVERGENT
    assert sv.partial_sum <= 1.0 <= sv.partial_sum + sv.tail_bound
    assert sv.tail_bound <= 1e-12 * sv.partial_sum


def test_z1_boundary_divergence(shifted):
    sv = z1(shifted, 1.0, t_tilde(shifted, 1.0))
    assert sv.verdict is not Verdict.CONVERGENT  # exponent exactly on the line, no log decay
    assert math.isinf(sv.partial_sum)


def test_z1_against_independent_partial_sums(powerlog):
    # moderate interior point: certified enclosure vs long direct summation
    q, t = 0.7, 0.9
    sv = z1(powerlog, q, t)
    j = np.arange(1, 3_000_001, dtype=np.float64)
    terms = np.exp(q * powerlog.phi.log_weight(j) + t * powerlog.psi.log_weight(j))
    head = float(terms.sum())
    assert head <= sv.partial_sum + sv.tail_bound
    # integral-test bracket around the rest, coarse but independent
    f = lambda x: math.exp(
        q * float(powerlog.phi.log_weight(np.array([x]))[0])
        + t * float(powerlog.psi.log_weight(np.array([x]))[0])
    )
    from scipy.integrate import quad

    t_hi, _ = quad(lambda w: f(math.exp(w)) * math.exp(w), math.log(3_000_000.5), 200, limit=500)
    t_lo, _ = quad(lambda w: f(math.exp(w)) * math.exp(w), math.log(3_000_001.0), 200, limit=500)
    assert head + t_lo <= sv.partial_sum + sv.tail_bound + 1e-13
    assert head + t_hi >= sv.partial_sum - 1e-13


def test_z1_enclosure_nested_under_refinement(powerlog):
    from fullshift import series

    comb = series.build_series(powerlog.phi, 0.7, powerlog.psi, 0.9)
    coarse = series.combined_enclosure(comb, rel_tol=1e-8)
    fine = series.combined_enclosure(comb, rel_tol=1e-13)
    assert fine.terms_used >= coarse.terms_used
    assert coarse.lo - 1e-15 <= fine.lo and fine.hi <= coarse.hi + 1e-15


def test_paper_partial_sum_exceeds_one_at_q115(powerlog):
    q = 1.15
    tt = t_tilde(powerlog, q)
    j = np.arange(1, 26, dtype=np.float64)
    s25 = float(np.exp(q * powerlog.phi.log_weight(j) + tt * powerlog.psi.log_weight(j)).sum())
    assert s25 > 1.0
    sv = z1(powerlog, q, tt)
    assert sv.verdict is Verdict.CONVERGENT and sv.partial_sum > 1.0


def test_pressure_values(shifted, mink):
    assert pressure(shifted, 0.0, 1.0).value == pytest.approx(0.0, abs=2e-12)
    pv = pressure(mink, -1.0, 5.0)
    assert not pv.finite and math.isinf(pv.value)
    assert pressure(mink, 0.0, 1.0).value == pytest.approx(0.0, abs=2e-12)


def test_pressure_strictly_decreasing_in_t(powerlog):
    ts = [0.8, 0.9, 1.0, 1.2, 1.6]
    vals = [pressure(powerlog, 0.5, t).value for t in ts]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_pressure_convex_in_q(shifted):
    # finite segment: 3q + 2.2 > 1 keeps the sum convergent throughout
    qs = np.linspace(-0.3, 2.0, 9)
    vals = np.array([pressure(shifted, float(q), 1.1).value for q in qs])
    assert np.all(np.isfinite(vals))
    d2 = vals[:-2] - 2 * vals[1:-1] + vals[2:]
    assert np.all(d2 >= -1e-9)


def test_t_inf_values(shifted, mink):
    assert t_inf(shifted) == 0.5
    pl_psi = gauss_metric_pair(ShiftedPower(a=3.0, scale=4.9491))
    assert t_inf(pl_psi) == 0.5
    from fullshift.potentials import PotentialPair, Sign, SymbolPotential

    quartic = PotentialPair(
        phi=SymbolPotential(Geometric(r=0.5), Sign.NEGATIVE_POTENTIAL),
        psi=SymbolPotential(PowerLog(a=4.0, b=0.0, scale=0.9), Sign.POSITIVE_METRIC),
    )
    assert t_inf(quartic) == pytest.approx(0.25)
    geo_psi = PotentialPair(
        phi=SymbolPotential(Geometric(r=0.5), Sign.NEGATIVE_POTENTIAL),
        psi=SymbolPotential(Geometric(r=0.5), Sign.POSITIVE_METRIC),
    )
    with pytest.raises(NotPolynomial):
        t_inf(geo_psi)


def test_t_inf_threshold_brackets(shifted):
    assert z1(shifted, 0.0, 0.5 + 1e-3).verdict is Verdict.CONVERGENT
    assert z1(shifted, 0.0, 0.5 - 1e-3).verdict is Verdict.DIVERGENT


def test_t_tilde_affine_exact(shifted, powerlog):
    for q in (-2.0, 0.0, 1.0, 3.0):
        assert t_tilde(shifted, q) == -1.5 * q + 0.5
    assert t_tilde(powerlog, 0.0) == 0.5
    assert t_tilde(powerlog, 1.0) == pytest.approx(-0.1, abs=1e-15)


def test_t_tilde_sentinels_for_geometric_phi(mink):
    assert t_tilde(mink, -1.0) == math.inf
    assert t_tilde(mink, 0.0) == 0.5
    assert t_tilde(mink, 1.0) == -math.inf


def test_t_tilde_partition_envelope(pairs):
    part = pairs["infinite-transitions"]
    lines = t_tilde_lines(part)
    for q in (0.5, 1.5, 2.5, 4.0):
        assert t_tilde(part, q) == max(s * q + c for s, c in lines)
    # breakpoints of consecutive lines at the configured integers
    for k, ((s0, c0), (s1, c1)) in enumerate(zip(lines[:-1], lines[1:]), start=1):
        assert (c1 - c0) / (s0 - s1) == pytest.approx(k, abs=1e-9)


@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
def test_finiteness_boundary_two_sided(shifted, powerlog, eps):
    for pair, qs in ((shifted, (-2.0, 0.0, 1.5)), (powerlog, (-1.0, 0.5, 2.0))):
        for q in qs:
            tt = t_tilde(pair, q)
            assert z1(pair, q, tt + eps).verdict is Verdict.CONVERGENT
            assert z1(pair, q, tt - eps).verdict is Verdict.DIVERGENT
