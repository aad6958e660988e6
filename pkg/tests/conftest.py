"""Shared fixtures: the two reference models used across the suite."""

import pytest

from shockrisk import AggregateModel, CountingModel, ExponentialClaim, RiskModel


def exponential_risk_model(lambda0, lambda1, lambda2, means, premium_rate, initial_capital=0.0):
    """Build a RiskModel whose four claim laws are exponential with the given means."""
    counting = CountingModel(lambda0=lambda0, lambda1=lambda1, lambda2=lambda2)
    y1, y2, y3, y4 = (ExponentialClaim(m) for m in means)
    aggregate = AggregateModel(counting=counting, y1=y1, y2=y2, y3=y3, y4=y4)
    return RiskModel(
        aggregate=aggregate, premium_rate=premium_rate, initial_capital=initial_capital
    )


@pytest.fixture
def two_line_model():
    """Two lines with a strong common shock; safety loading about 2.1 percent.

    Rates (lambda0, lambda1, lambda2) = (10, 11, 12), claim means
    (1, 2, 3, 3), premium rate 97.  Aggregate claim rate is exactly 95,
    so psi(0) = 95/97.
    """
    return exponential_risk_model(10.0, 11.0, 12.0, (1.0, 2.0, 3.0, 3.0), 97.0)


@pytest.fixture
def one_line_model():
    """Single line with unit-mean exponential claims and no shock stream.

    Classical closed forms apply: psi(u) = (2/3) exp(-u/3) at premium
    rate 1.5, so every ruin quantity has an exact reference value.
    """
    return exponential_risk_model(0.0, 1.0, 0.0, (1.0, 1.0, 1.0, 1.0), 1.5)
