"""Aggregate claim totals for the two lines over a time window.

Line 1 pays a claim Y1 at each of its own arrivals and a claim Y3 at each
common shock; line 2 pays Y2 at its own arrivals and Y4 at each shock.
The totals (S1(t), S2(t)) form a bivariate compound Poisson vector that is
dependent through the shared shock count only.

As with the counting layer there are two equal-in-law samplers: the
direct three-stream construction and the one-counter construction that
splits a single stream by event type.  The joint Laplace-Stieltjes
transform and all first and second moments are closed-form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .claims import ClaimDistribution, HypoexponentialSum, ExponentialClaim
from .claims import UnsupportedDistributionError
from .counting import CountingModel, _check_window, sample_poisson

__all__ = [
    "AggregateModel",
    "AggregateMoments",
    "AggregateSample",
    "joint_lst",
    "moments",
    "sample_direct",
    "sample_type1",
]


@dataclass(frozen=True)
class AggregateModel:
    """Counting rates plus the four claim-size laws.

    ``y1`` and ``y2`` are the line-specific claim sizes; ``y3`` and ``y4``
    are the two components of a common-shock claim pair, independent of
    each other given the shock.
    """

    counting: CountingModel
    y1: ClaimDistribution
    y2: ClaimDistribution
    y3: ClaimDistribution
    y4: ClaimDistribution

    def shock_pair_sum(self) -> ClaimDistribution:
        """Law of the combined shock payment Y3 + Y4.

        Only exponential components have a built-in sum law; other
        combinations would need a numeric convolution that this model
        does not provide.
        """
        if isinstance(self.y3, ExponentialClaim) and isinstance(self.y4, ExponentialClaim):
            return HypoexponentialSum(self.y3.mean, self.y4.mean)
        raise UnsupportedDistributionError(
            "shock pair sum law is only available for exponential components"
        )


@dataclass(frozen=True)
class AggregateSample:
    s1: float | np.ndarray
    s2: float | np.ndarray
    t: float
    method: str


@dataclass(frozen=True)
class AggregateMoments:
    mean1: float
    mean2: float
    var1: float
    var2: float
    cov: float
    cor: float
    cross_moment: float
    mean_total: float
    var_total: float


def _compound_sums(dist: ClaimDistribution, counts, rng):
    """Sum ``counts[i]`` fresh draws of ``dist`` for each i, vectorized."""
    counts = np.asarray(counts)
    if counts.ndim == 0:
        return dist.sample(rng, int(counts)).sum() if int(counts) > 0 else 0.0
    total = int(counts.sum())
    if total == 0:
        return np.zeros(counts.size)
    draws = dist.sample(rng, total)
    owner = np.repeat(np.arange(counts.size), counts)
    return np.bincount(owner, weights=draws, minlength=counts.size)


def sample_direct(model: AggregateModel, t: float, rng, size=None) -> AggregateSample:
    """Draw (S1, S2) from the three independent streams; the same shock
    count feeds both lines."""
    t = _check_window(t)
    cm = model.counting
    n0 = sample_poisson(cm.lambda0 * t, rng, size)
    n1 = sample_poisson(cm.lambda1 * t, rng, size)
    n2 = sample_poisson(cm.lambda2 * t, rng, size)
    s1 = _compound_sums(model.y1, n1, rng) + _compound_sums(model.y3, n0, rng)
    s2 = _compound_sums(model.y2, n2, rng) + _compound_sums(model.y4, n0, rng)
    return AggregateSample(s1=s1, s2=s2, t=t, method="direct")


def sample_type1(model: AggregateModel, t: float, rng, size=None) -> AggregateSample:
    """Draw (S1, S2) from one stream at the total rate split by event
    type; shock events contribute a Y3 draw to line 1 and a Y4 draw to
    line 2."""
    t = _check_window(t)
    cm = model.counting
    n = sample_poisson(cm.total_rate * t, rng, size)
    counts = rng.multinomial(n, cm.type_probabilities)
    n1, n2, n0 = counts[..., 0], counts[..., 1], counts[..., 2]
    s1 = _compound_sums(model.y1, n1, rng) + _compound_sums(model.y3, n0, rng)
    s2 = _compound_sums(model.y2, n2, rng) + _compound_sums(model.y4, n0, rng)
    return AggregateSample(s1=s1, s2=s2, t=t, method="type1")


def joint_lst(model: AggregateModel, t: float, z1, z2):
    """Joint transform E[exp(-z1 S1 - z2 S2)].

    Equals exp(-lam t (1 - (l1/lam) L1(z1) - (l0/lam) L3(z1) L4(z2)
    - (l2/lam) L2(z2))) where L_k are the component claim transforms; the
    shock term couples z1 and z2 through the claim pair.
    """
    t = _check_window(t)
    cm = model.counting
    lam = cm.total_rate
    mix = (
        cm.lambda1 * model.y1.lst(z1)
        + cm.lambda0 * model.y3.lst(z1) * model.y4.lst(z2)
        + cm.lambda2 * model.y2.lst(z2)
    )
    return np.exp(-t * (lam - mix))


def moments(model: AggregateModel, t: float) -> AggregateMoments:
    """Closed-form first and second moments of (S1(t), S2(t))."""
    t = _check_window(t)
    cm = model.counting
    l0, l1, l2 = cm.lambda0, cm.lambda1, cm.lambda2
    e1, e2, e3, e4 = (model.y1.mean, model.y2.mean, model.y3.mean, model.y4.mean)
    mean1 = t * (l1 * e1 + l0 * e3)
    mean2 = t * (l2 * e2 + l0 * e4)
    var1 = t * (l1 * model.y1.second_moment + l0 * model.y3.second_moment)
    var2 = t * (l2 * model.y2.second_moment + l0 * model.y4.second_moment)
    cov = t * l0 * e3 * e4
    rate_den = np.sqrt(
        (l1 * model.y1.second_moment + l0 * model.y3.second_moment)
        * (l2 * model.y2.second_moment + l0 * model.y4.second_moment)
    )
    cor = l0 * e3 * e4 / rate_den if rate_den > 0 else 0.0
    pair_second = (
        model.y3.second_moment + 2.0 * e3 * e4 + model.y4.second_moment
    )
    return AggregateMoments(
        mean1=mean1,
        mean2=mean2,
        var1=var1,
        var2=var2,
        cov=cov,
        cor=cor,
        cross_moment=cov + mean1 * mean2,
        mean_total=mean1 + mean2,
        var_total=t
        * (
            l1 * model.y1.second_moment
            + l0 * pair_second
            + l2 * model.y2.second_moment
        ),
    )
