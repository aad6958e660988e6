"""Aggregate claim totals: moments, joint transform, and the two samplers."""

import math

import numpy as np
import pytest
from scipy import stats

from shockrisk import (
    AggregateModel,
    CountingModel,
    ExponentialClaim,
    HypoexponentialSum,
    UnsupportedDistributionError,
)
from shockrisk.aggregate import joint_lst, moments, sample_direct, sample_type1


def _exponential_aggregate(lambda0, lambda1, lambda2, means):
    y1, y2, y3, y4 = (ExponentialClaim(m) for m in means)
    return AggregateModel(
        counting=CountingModel(lambda0=lambda0, lambda1=lambda1, lambda2=lambda2),
        y1=y1, y2=y2, y3=y3, y4=y4,
    )


SHOCK_HEAVY = _exponential_aggregate(10.0, 11.0, 12.0, (1.0, 2.0, 3.0, 3.0))


def test_moments_closed_values():
    mom = moments(SHOCK_HEAVY, 1.0)
    assert mom.mean1 == 41.0
    assert mom.mean2 == 54.0
    assert mom.var1 == 202.0
    assert mom.var2 == 276.0
    assert mom.cov == 90.0
    assert abs(mom.cor - 90.0 / math.sqrt(202.0 * 276.0)) < 1e-15
    assert abs(mom.cor - 0.3811643579313398) < 1e-15
    assert mom.cross_moment == 90.0 + 41.0 * 54.0
    assert mom.mean_total == 95.0
    assert mom.var_total == 658.0


def test_moment_identities_across_windows():
    for t in (0.5, 1.0, 3.7):
        mom = moments(SHOCK_HEAVY, t)
        assert abs(mom.var_total - (mom.var1 + mom.var2 + 2.0 * mom.cov)) < 1e-9
        assert abs(mom.cross_moment - (mom.cov + mom.mean1 * mom.mean2)) < 1e-9
        assert abs(mom.cor - moments(SHOCK_HEAVY, 1.0).cor) < 1e-15
        assert abs(mom.mean_total - 95.0 * t) < 1e-12


def test_joint_lst_point_values():
    assert abs(float(joint_lst(SHOCK_HEAVY, 1.0, 0.1, 0.0)) - 0.03660053915427086) < 1e-15
    assert float(joint_lst(SHOCK_HEAVY, 1.0, 0.0, 0.0)) == 1.0
    # Setting one argument to zero marginalizes to a single-line compound
    # Poisson transform with the shock component of that line.
    z1 = 0.37
    cm = SHOCK_HEAVY.counting
    marginal = math.exp(
        -(
            cm.lambda1 * (1.0 - float(SHOCK_HEAVY.y1.lst(z1)))
            + cm.lambda0 * (1.0 - float(SHOCK_HEAVY.y3.lst(z1)))
        )
    )
    assert abs(float(joint_lst(SHOCK_HEAVY, 1.0, z1, 0.0)) - marginal) < 1e-14


def test_joint_lst_window_power_identity():
    base = joint_lst(SHOCK_HEAVY, 1.0, 0.05, 0.02)
    for t in (0.5, 2.0, 3.7):
        assert abs(float(joint_lst(SHOCK_HEAVY, t, 0.05, 0.02)) - float(base) ** t) < 1e-12


def test_joint_lst_matches_sampling():
    rng = np.random.default_rng(301)
    draws = sample_direct(SHOCK_HEAVY, 1.0, rng, size=300_000)
    for z1, z2 in ((0.02, 0.03), (0.05, 0.01), (0.1, 0.1)):
        values = np.exp(-z1 * draws.s1 - z2 * draws.s2)
        se = values.std(ddof=1) / math.sqrt(values.size)
        expected = float(joint_lst(SHOCK_HEAVY, 1.0, z1, z2))
        assert abs(values.mean() - expected) < 6.0 * se + 1e-5


def test_samplers_agree_in_distribution():
    rng = np.random.default_rng(302)
    n = 100_000
    a = sample_direct(SHOCK_HEAVY, 1.0, rng, size=n)
    b = sample_type1(SHOCK_HEAVY, 1.0, rng, size=n)
    assert a.method == "direct" and b.method == "type1"
    for x, y in ((a.s1, b.s1), (a.s2, b.s2), (a.s1 + a.s2, b.s1 + b.s2)):
        assert stats.ks_2samp(x, y).statistic < 0.01
    mom = moments(SHOCK_HEAVY, 1.0)
    for sample in (a, b):
        assert abs(sample.s1.mean() - mom.mean1) < 6.0 * math.sqrt(mom.var1 / n)
        assert abs(sample.s2.mean() - mom.mean2) < 6.0 * math.sqrt(mom.var2 / n)
        assert abs(sample.s1.var() / mom.var1 - 1.0) < 0.05
        assert abs(sample.s2.var() / mom.var2 - 1.0) < 0.05
        sample_cov = np.cov(sample.s1, sample.s2)[0, 1]
        se_cov = math.sqrt((mom.var1 * mom.var2 + mom.cov**2) / n)
        assert abs(sample_cov - mom.cov) < 6.0 * se_cov


def test_zero_shock_rate_decouples_the_lines():
    independent = _exponential_aggregate(0.0, 5.0, 3.0, (1.0, 2.0, 3.0, 3.0))
    mom = moments(independent, 1.0)
    assert mom.cov == 0.0
    assert mom.cor == 0.0
    lst_joint = float(joint_lst(independent, 1.0, 0.2, 0.4))
    lst_split = float(joint_lst(independent, 1.0, 0.2, 0.0)) * float(
        joint_lst(independent, 1.0, 0.0, 0.4)
    )
    assert abs(lst_joint - lst_split) < 1e-14
    # A vanishing shock rate drives the covariance to zero continuously.
    faint = _exponential_aggregate(1e-15, 5.0, 3.0, (1.0, 2.0, 3.0, 3.0))
    assert abs(moments(faint, 1.0).cov) < 1e-13


def test_shock_pair_sum_law():
    law = SHOCK_HEAVY.shock_pair_sum()
    assert isinstance(law, HypoexponentialSum)
    assert law.mean == 6.0
    assert law.second_moment == 54.0
    odd = AggregateModel(
        counting=SHOCK_HEAVY.counting,
        y1=SHOCK_HEAVY.y1,
        y2=SHOCK_HEAVY.y2,
        y3=HypoexponentialSum(1.0, 2.0),
        y4=SHOCK_HEAVY.y4,
    )
    with pytest.raises(UnsupportedDistributionError):
        odd.shock_pair_sum()


def test_time_zero_and_scalar_contracts():
    rng = np.random.default_rng(303)
    zero = sample_direct(SHOCK_HEAVY, 0.0, rng, size=20)
    assert np.all(zero.s1 == 0.0) and np.all(zero.s2 == 0.0)
    zero1 = sample_type1(SHOCK_HEAVY, 0.0, rng, size=20)
    assert np.all(zero1.s1 == 0.0) and np.all(zero1.s2 == 0.0)
    mom = moments(SHOCK_HEAVY, 0.0)
    assert mom.mean_total == 0.0 and mom.var_total == 0.0
    with pytest.raises(ValueError):
        sample_direct(SHOCK_HEAVY, -1.0, rng)
    single = sample_direct(SHOCK_HEAVY, 1.0, rng)
    assert isinstance(single.s1, float) and isinstance(single.s2, float)
    assert single.s1 >= 0.0 and single.s2 >= 0.0
