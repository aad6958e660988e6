"""Bivariate claim counts: pmf/pgf, moments, conditioning, and samplers."""

import math

import numpy as np
import pytest
from scipy import stats

from shockrisk import CountingModel
from shockrisk.counting import (
    conditional_mean,
    joint_pgf,
    joint_pmf,
    moments,
    sample_poisson,
    sample_superposition,
    sample_type1,
    sum_process_stats,
)

SHOCK_HEAVY = CountingModel(lambda0=10.0, lambda1=11.0, lambda2=12.0)
UNIT = CountingModel(lambda0=1.0, lambda1=1.0, lambda2=1.0)
SKEWED = CountingModel(lambda0=2.0, lambda1=3.0, lambda2=1.5)


def _pmf_matrix(model, t, k1, k2):
    return np.array(
        [[joint_pmf(model, t, i, j) for j in range(k2 + 1)] for i in range(k1 + 1)]
    )


def _box_pmf(m1, m2, k1, k2):
    """Empirical pmf of the pairs on the box {0..k1} x {0..k2}."""
    inside = (m1 <= k1) & (m2 <= k2)
    flat = m1[inside] * (k2 + 1) + m2[inside]
    counts = np.bincount(flat, minlength=(k1 + 1) * (k2 + 1))
    return counts.reshape(k1 + 1, k2 + 1) / m1.size


def test_model_validation_and_derived_rates():
    assert SHOCK_HEAVY.total_rate == 33.0
    p1, p2, p0 = SHOCK_HEAVY.type_probabilities
    assert abs(p1 - 11.0 / 33.0) < 1e-15
    assert abs(p2 - 12.0 / 33.0) < 1e-15
    assert abs(p0 - 10.0 / 33.0) < 1e-15
    with pytest.raises(ValueError):
        CountingModel(lambda0=-1.0, lambda1=2.0, lambda2=2.0)
    with pytest.raises(ValueError):
        CountingModel(lambda0=0.0, lambda1=0.0, lambda2=0.0)
    # Single-line reduction is allowed as long as one rate is positive.
    assert CountingModel(lambda0=0.0, lambda1=1.0, lambda2=0.0).total_rate == 1.0


def test_joint_pmf_point_values():
    assert abs(joint_pmf(UNIT, 1.0, 0, 0) - math.exp(-3.0)) < 1e-16
    assert abs(joint_pmf(UNIT, 1.0, 1, 1) - 2.0 * math.exp(-3.0)) < 1e-15
    assert abs(joint_pmf(UNIT, 1.0, 2, 1) - 1.5 * math.exp(-3.0)) < 1e-15


def test_joint_pmf_normalizes_and_marginalizes():
    t = 1.2
    pmf = _pmf_matrix(SKEWED, t, 40, 40)
    assert abs(pmf.sum() - 1.0) < 1e-9
    # Each margin is Poisson with the line rate plus the shock rate.
    row_sums = pmf.sum(axis=1)
    ref1 = stats.poisson.pmf(np.arange(41), (3.0 + 2.0) * t)
    assert np.max(np.abs(row_sums - ref1)) < 1e-12
    col_sums = pmf.sum(axis=0)
    ref2 = stats.poisson.pmf(np.arange(41), (1.5 + 2.0) * t)
    assert np.max(np.abs(col_sums - ref2)) < 1e-12


def test_joint_pmf_factorizes_without_shocks():
    model = CountingModel(lambda0=0.0, lambda1=3.0, lambda2=1.5)
    t = 0.8
    for i in range(6):
        for j in range(6):
            ref = stats.poisson.pmf(i, 3.0 * t) * stats.poisson.pmf(j, 1.5 * t)
            assert abs(joint_pmf(model, t, i, j) - ref) < 1e-13


def test_joint_pmf_input_validation():
    with pytest.raises(ValueError):
        joint_pmf(UNIT, 0.0, 1, 1)
    with pytest.raises(ValueError):
        joint_pmf(UNIT, -1.0, 1, 1)
    with pytest.raises(ValueError):
        joint_pmf(UNIT, 1.0, -1, 1)


def test_joint_pgf_matches_pmf_series():
    z1, z2 = 0.5, 0.7
    pmf = _pmf_matrix(UNIT, 1.0, 30, 30)
    series = (pmf * np.outer(z1 ** np.arange(31), z2 ** np.arange(31))).sum()
    assert abs(float(joint_pgf(UNIT, 1.0, z1, z2)) - series) < 1e-12
    assert abs(float(joint_pgf(SHOCK_HEAVY, 2.0, 1.0, 1.0)) - 1.0) < 1e-15


def test_joint_pgf_partial_derivatives_give_means():
    h = 1e-6
    mom = moments(SHOCK_HEAVY, 1.0)
    d1 = (joint_pgf(SHOCK_HEAVY, 1.0, 1.0 + h, 1.0) - joint_pgf(SHOCK_HEAVY, 1.0, 1.0 - h, 1.0)) / (2 * h)
    d2 = (joint_pgf(SHOCK_HEAVY, 1.0, 1.0, 1.0 + h) - joint_pgf(SHOCK_HEAVY, 1.0, 1.0, 1.0 - h)) / (2 * h)
    assert abs(float(d1) - mom.mean1) < 1e-6
    assert abs(float(d2) - mom.mean2) < 1e-6


def test_moments_closed_values():
    mom = moments(SHOCK_HEAVY, 1.0)
    assert mom.mean1 == 21.0
    assert mom.mean2 == 22.0
    assert mom.var1 == 21.0
    assert mom.var2 == 22.0
    assert mom.cov == 10.0
    assert abs(mom.cor - 10.0 / math.sqrt(21.0 * 22.0)) < 1e-15
    assert abs(mom.cor - 0.4652421051992354) < 1e-15
    assert mom.cross_moment == 472.0
    assert abs(mom.cross_moment - (mom.cov + mom.mean1 * mom.mean2)) < 1e-12
    # Correlation does not depend on the window length.
    assert abs(moments(SHOCK_HEAVY, 2.5).cor - mom.cor) < 1e-15
    assert moments(SHOCK_HEAVY, 2.5).cov == 25.0


def test_moments_match_sampling():
    rng = np.random.default_rng(201)
    draws = sample_superposition(SHOCK_HEAVY, 1.0, rng, size=400_000)
    n = 400_000
    assert abs(draws.m1.mean() - 21.0) < 6.0 * math.sqrt(21.0 / n)
    assert abs(draws.m2.mean() - 22.0) < 6.0 * math.sqrt(22.0 / n)
    assert abs(draws.m1.var() - 21.0) < 6.0 * 21.0 * math.sqrt(3.0 / n)
    sample_cov = np.cov(draws.m1, draws.m2)[0, 1]
    assert abs(sample_cov - 10.0) < 6.0 * math.sqrt((21.0 * 22.0 + 100.0) / n)


def test_conditional_mean_closed_values():
    assert abs(conditional_mean(SHOCK_HEAVY, 1.0, 1, 5) - 14.380952380952381) < 1e-12
    assert abs(conditional_mean(SHOCK_HEAVY, 1.0, 2, 5) - 13.272727272727273) < 1e-12
    # Affine in the conditioning count with slope lambda0 / (lambda_r + lambda0).
    slope = conditional_mean(SHOCK_HEAVY, 1.0, 1, 8) - conditional_mean(SHOCK_HEAVY, 1.0, 1, 7)
    assert abs(slope - 10.0 / 21.0) < 1e-12
    assert abs(conditional_mean(SHOCK_HEAVY, 1.0, 1, 0) - 12.0) < 1e-12


def test_conditional_mean_matches_pmf():
    t, m = 1.2, 4
    weights = np.array([joint_pmf(SKEWED, t, m, j) for j in range(80)])
    ref = (np.arange(80) * weights).sum() / weights.sum()
    assert abs(conditional_mean(SKEWED, t, 1, m) - ref) < 1e-9


def test_conditional_mean_matches_sampling():
    rng = np.random.default_rng(202)
    draws = sample_superposition(UNIT, 1.0, rng, size=300_000)
    hits = draws.m1 == 2
    est = draws.m2[hits].mean()
    se = draws.m2[hits].std(ddof=1) / math.sqrt(hits.sum())
    assert abs(est - conditional_mean(UNIT, 1.0, 1, 2)) < 5.0 * se


def test_conditional_mean_validation():
    with pytest.raises(ValueError):
        conditional_mean(UNIT, 1.0, 3, 1)
    with pytest.raises(ValueError):
        conditional_mean(UNIT, 1.0, 1, -1)
    lopsided = CountingModel(lambda0=0.0, lambda1=0.0, lambda2=1.0)
    with pytest.raises(ValueError):
        conditional_mean(lopsided, 1.0, 1, 0)


def test_sum_process_stats_closed_forms():
    stats_1 = sum_process_stats(SHOCK_HEAVY, 1.0)
    assert stats_1.mean == 43.0
    assert stats_1.variance == 63.0
    row = stats_1.q_row(5)
    assert row == {5: -33.0, 6: 23.0, 7: 10.0}
    assert abs(sum(row.values())) < 1e-12
    # The pgf of M1 + M2 is the joint pgf on the diagonal.
    for z in (0.0, 0.3, 0.9, 1.0):
        assert abs(float(stats_1.pgf(z)) - float(joint_pgf(SHOCK_HEAVY, 1.0, z, z))) < 1e-15


def test_sum_process_pgf_matches_sampling():
    rng = np.random.default_rng(203)
    draws = sample_type1(SHOCK_HEAVY, 1.0, rng, size=200_000)
    z = 0.9
    values = z ** (draws.m1 + draws.m2)
    expected = float(sum_process_stats(SHOCK_HEAVY, 1.0).pgf(z))
    se = values.std(ddof=1) / math.sqrt(values.size)
    assert abs(values.mean() - expected) < 6.0 * se


def test_samplers_agree_with_pmf_in_total_variation():
    n = 200_000
    k = 10
    pmf = _pmf_matrix(UNIT, 1.0, k, k)
    # Expected total variation of an n-sample empirical pmf against the
    # truth, by the normal approximation of each cell count.
    expected_tv = float(np.sqrt(pmf / (2.0 * math.pi * n)).sum())
    rng = np.random.default_rng(204)
    a = sample_superposition(UNIT, 1.0, rng, size=n)
    b = sample_type1(UNIT, 1.0, rng, size=n)
    pmf_a = _box_pmf(a.m1, a.m2, k, k)
    pmf_b = _box_pmf(b.m1, b.m2, k, k)
    tv_a = 0.5 * np.abs(pmf_a - pmf).sum()
    tv_b = 0.5 * np.abs(pmf_b - pmf).sum()
    tv_ab = 0.5 * np.abs(pmf_a - pmf_b).sum()
    assert tv_a < 4.0 * expected_tv + 1e-4
    assert tv_b < 4.0 * expected_tv + 1e-4
    assert tv_ab < 4.0 * math.sqrt(2.0) * expected_tv + 1e-4
    assert a.method == "superposition"
    assert b.method == "type1"


def test_sample_poisson_contract():
    rng = np.random.default_rng(205)
    assert np.all(sample_poisson(0.0, rng, size=100) == 0)
    with pytest.raises(ValueError):
        sample_poisson(-1.0, rng)
    single = sample_poisson(2.0, rng)
    assert int(single) == single
    # Small-mean and large-mean regimes both match their Poisson law.
    small = sample_poisson(0.3, rng, size=100_000)
    p0 = math.exp(-0.3)
    assert abs((small == 0).mean() - p0) < 6.0 * math.sqrt(p0 * (1 - p0) / 100_000)
    large = sample_poisson(50.0, rng, size=100_000)
    assert abs(large.mean() - 50.0) < 6.0 * math.sqrt(50.0 / 100_000)
    assert abs(large.var() / 50.0 - 1.0) < 0.05


def test_time_zero_window_and_tags():
    rng = np.random.default_rng(206)
    zero = sample_superposition(UNIT, 0.0, rng, size=50)
    assert np.all(zero.m1 == 0) and np.all(zero.m2 == 0)
    zero1 = sample_type1(UNIT, 0.0, rng, size=50)
    assert np.all(zero1.m1 == 0) and np.all(zero1.m2 == 0)
    assert float(joint_pgf(UNIT, 0.0, 0.4, 0.9)) == 1.0
    mom = moments(UNIT, 0.0)
    assert mom.mean1 == 0.0 and mom.cov == 0.0
    with pytest.raises(ValueError):
        sample_superposition(UNIT, -0.5, rng)
    single = sample_type1(UNIT, 1.0, rng)
    assert isinstance(single.m1, int) and isinstance(single.m2, int)
