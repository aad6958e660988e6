"""Claim-size distributions and their integrated-tail companions.

The risk model needs, for every claim-size law: the first two moments, the
Laplace-Stieltjes transform (LST), the CDF/survival pair, random sampling,
and the integrated-tail (equilibrium) companion distribution whose CDF is

    F_I(x) = (1 / E[Y]) * integral_0^x  P(Y > y) dy.

Two concrete laws cover the exponential model: ``ExponentialClaim`` and
``HypoexponentialSum`` (the law of the sum of two independent exponentials,
which degenerates to a Gamma(2) law when the two means coincide).
``IntegratedTail`` wraps any base law and uses closed forms where they
exist, falling back to adaptive quadrature otherwise.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

__all__ = [
    "ClaimDistribution",
    "ExponentialClaim",
    "HypoexponentialSum",
    "IntegratedTail",
    "OccurrenceIndicator",
    "UnsupportedDistributionError",
]

# Relative parameter gap below which the two-mean sum switches to the
# equal-parameter (Gamma(2)) branch; the distinct-parameter closed forms
# lose all precision as the means coincide.
EQUAL_PARAMETER_GAP = 1e-9

# Absolute tolerance for bisection inversion of integrated-tail CDFs.
INVERSION_TOL = 1e-12


class UnsupportedDistributionError(ValueError):
    """Raised when an operation needs structure the distribution lacks."""


def _check_transform_arg(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("transform argument must be nonnegative")
    return s


class ClaimDistribution(abc.ABC):
    """Behavioral interface shared by all claim-size laws.

    Subclasses expose ``mean``, ``second_moment``, ``pdf``, ``cdf``, ``sf``,
    ``lst``, ``mgf`` (with ``mgf_radius`` marking its abscissa of
    convergence), ``sample``, and ``integrated_tail``.  The array-valued
    methods accept scalars or numpy arrays and broadcast elementwise.
    """

    mean: float
    second_moment: float

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean**2

    @abc.abstractmethod
    def pdf(self, x): ...

    @abc.abstractmethod
    def cdf(self, x): ...

    def sf(self, x):
        return 1.0 - self.cdf(x)

    @abc.abstractmethod
    def lst(self, s):
        """Laplace-Stieltjes transform E[exp(-s Y)] for s >= 0."""

    @abc.abstractmethod
    def mgf(self, s):
        """Moment generating function E[exp(s Y)], finite for s < mgf_radius."""

    @property
    @abc.abstractmethod
    def mgf_radius(self) -> float: ...

    @abc.abstractmethod
    def sample(self, rng, size=None): ...

    @abc.abstractmethod
    def integrated_tail(self) -> "ClaimDistribution": ...


class ExponentialClaim(ClaimDistribution):
    """Exponential claim sizes parameterized by their mean."""

    def __init__(self, mean: float):
        mean = float(mean)
        if not mean > 0 or not math.isfinite(mean):
            raise ValueError(f"exponential mean must be positive and finite, got {mean}")
        self.mean = mean
        self.second_moment = 2.0 * mean**2
        self.third_moment = 6.0 * mean**3

    def __repr__(self):
        return f"ExponentialClaim(mean={self.mean})"

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        return np.where(x < 0, 0.0, np.exp(-xp / self.mean) / self.mean)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        return np.where(x < 0, 0.0, -np.expm1(-xp / self.mean))

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        return np.where(x < 0, 1.0, np.exp(-xp / self.mean))

    def lst(self, s):
        s = _check_transform_arg(s)
        return 1.0 / (1.0 + self.mean * s)

    def mgf(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s >= self.mgf_radius):
            raise ValueError("mgf argument at or beyond abscissa of convergence")
        return 1.0 / (1.0 - self.mean * s)

    @property
    def mgf_radius(self) -> float:
        return 1.0 / self.mean

    def sample(self, rng, size=None):
        return rng.exponential(self.mean, size=size)

    def integrated_tail(self) -> "ExponentialClaim":
        # The equilibrium law of an exponential is the same exponential.
        return ExponentialClaim(self.mean)


class HypoexponentialSum(ClaimDistribution):
    """Law of the sum of two independent exponential claims.

    ``nu3`` and ``nu4`` are the two component means.  When they agree to
    within a relative gap of ``EQUAL_PARAMETER_GAP`` the Gamma(2) branch is
    used; the distinct-parameter closed forms below are

        P(Y > x) = (nu3 exp(-x/nu3) - nu4 exp(-x/nu4)) / (nu3 - nu4).
    """

    def __init__(self, nu3: float, nu4: float):
        nu3, nu4 = float(nu3), float(nu4)
        if not (nu3 > 0 and nu4 > 0):
            raise ValueError("component means must be positive")
        self.nu3 = nu3
        self.nu4 = nu4
        self.mean = nu3 + nu4
        self.second_moment = 2.0 * (nu3**2 + nu3 * nu4 + nu4**2)
        self.third_moment = 6.0 * (nu3**3 + nu3**2 * nu4 + nu3 * nu4**2 + nu4**3)
        self._equal = abs(nu3 - nu4) <= EQUAL_PARAMETER_GAP * max(nu3, nu4)
        self._nu0 = 0.5 * (nu3 + nu4)

    def __repr__(self):
        return f"HypoexponentialSum(nu3={self.nu3}, nu4={self.nu4})"

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        if self._equal:
            n = self._nu0
            out = xp * np.exp(-xp / n) / n**2
        else:
            out = (np.exp(-xp / self.nu3) - np.exp(-xp / self.nu4)) / (self.nu3 - self.nu4)
        return np.where(x < 0, 0.0, out)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        if self._equal:
            n = self._nu0
            out = (1.0 + xp / n) * np.exp(-xp / n)
        else:
            out = (self.nu3 * np.exp(-xp / self.nu3) - self.nu4 * np.exp(-xp / self.nu4)) / (
                self.nu3 - self.nu4
            )
        return np.where(x < 0, 1.0, out)

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def lst(self, s):
        s = _check_transform_arg(s)
        return 1.0 / ((1.0 + self.nu3 * s) * (1.0 + self.nu4 * s))

    def mgf(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s >= self.mgf_radius):
            raise ValueError("mgf argument at or beyond abscissa of convergence")
        return 1.0 / ((1.0 - self.nu3 * s) * (1.0 - self.nu4 * s))

    @property
    def mgf_radius(self) -> float:
        return 1.0 / max(self.nu3, self.nu4)

    def sample(self, rng, size=None):
        return rng.exponential(self.nu3, size=size) + rng.exponential(self.nu4, size=size)

    def integrated_tail(self) -> "IntegratedTail":
        return IntegratedTail(self)


class IntegratedTail(ClaimDistribution):
    """Integrated-tail (equilibrium) companion of a base claim law.

    Closed forms are used for exponential and two-exponential-sum bases;
    any other base is handled by adaptive quadrature of its survival
    function (absolute tolerance 1e-10).  Sampling inverts the CDF by
    bracketed bisection to absolute tolerance ``INVERSION_TOL``, except
    where an exact sampler exists:

    * exponential base: the equilibrium law is the base itself;
    * equal-mean sum base: an even mixture of Gamma(2, nu0) and
      Exponential(nu0) draws.
    """

    def __init__(self, base: ClaimDistribution):
        if not math.isfinite(base.mean):
            raise UnsupportedDistributionError("integrated tail needs a finite-mean base")
        self.base = base
        self.mean = base.second_moment / (2.0 * base.mean)
        if isinstance(base, ExponentialClaim):
            self._kind = "exp"
        elif isinstance(base, HypoexponentialSum):
            self._kind = "hypo_equal" if base._equal else "hypo_distinct"
        else:
            self._kind = "generic"

    def __repr__(self):
        return f"IntegratedTail({self.base!r})"

    @property
    def second_moment(self) -> float:
        third = getattr(self.base, "third_moment", None)
        if third is None:
            raise UnsupportedDistributionError(
                "second moment of the integrated tail needs the base third moment"
            )
        return third / (3.0 * self.base.mean)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, self.base.sf(x) / self.base.mean)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        if self._kind == "exp":
            out = -np.expm1(-xp / self.base.mean)
        elif self._kind == "hypo_equal":
            n = self.base._nu0
            out = 1.0 - (xp / (2.0 * n)) * np.exp(-xp / n) - np.exp(-xp / n)
        elif self._kind == "hypo_distinct":
            n3, n4 = self.base.nu3, self.base.nu4
            out = 1.0 - (n4**2 * np.exp(-xp / n4) - n3**2 * np.exp(-xp / n3)) / (n4**2 - n3**2)
        else:
            out = self._quadrature_cdf(xp)
        return np.where(x < 0, 0.0, out)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        if self._kind == "exp":
            out = np.exp(-xp / self.base.mean)
        elif self._kind == "hypo_equal":
            n = self.base._nu0
            out = (1.0 + xp / (2.0 * n)) * np.exp(-xp / n)
        elif self._kind == "hypo_distinct":
            n3, n4 = self.base.nu3, self.base.nu4
            out = (n4**2 * np.exp(-xp / n4) - n3**2 * np.exp(-xp / n3)) / (n4**2 - n3**2)
        else:
            out = 1.0 - self._quadrature_cdf(xp)
        return np.where(x < 0, 1.0, out)

    def _quadrature_cdf(self, x):
        def one(xi):
            if xi <= 0:
                return 0.0
            val, _ = integrate.quad(
                lambda y: float(self.base.sf(y)), 0.0, xi, epsabs=1e-10, limit=200
            )
            return min(val / self.base.mean, 1.0)

        return np.vectorize(one, otypes=[float])(x)

    def lst(self, s):
        s = _check_transform_arg(s)
        base_lst = self.base.lst(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (1.0 - base_lst) / (self.base.mean * s)
        return np.where(s == 0, 1.0, out)

    def mgf(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s >= self.mgf_radius):
            raise ValueError("mgf argument at or beyond abscissa of convergence")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (self.base.mgf(s) - 1.0) / (self.base.mean * s)
        return np.where(s == 0, 1.0, out)

    @property
    def mgf_radius(self) -> float:
        return self.base.mgf_radius

    def sample(self, rng, size=None):
        if self._kind == "exp":
            return rng.exponential(self.base.mean, size=size)
        if self._kind == "hypo_equal":
            n = self.base._nu0
            shape = size if size is not None else ()
            gamma2 = rng.gamma(2.0, n, size=shape)
            single = rng.exponential(n, size=shape)
            pick_gamma = rng.random(shape) < 0.5
            out = np.where(pick_gamma, gamma2, single)
            return out if size is not None else float(out)
        return self._sample_by_inversion(rng, size)

    def _sample_by_inversion(self, rng, size):
        u = rng.random(size if size is not None else 1)
        u = np.atleast_1d(u)
        lo = np.zeros_like(u)
        hi = np.full_like(u, max(self.mean, self.base.mean))
        # Grow the bracket until it covers every target quantile.
        for _ in range(200):
            short = self.cdf(hi) < u
            if not np.any(short):
                break
            hi[short] *= 2.0
        while np.max(hi - lo) > INVERSION_TOL:
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return out if size is not None else float(out[0])

    def integrated_tail(self) -> "IntegratedTail":
        return IntegratedTail(self)


@dataclass(frozen=True)
class OccurrenceIndicator:
    """One-hot event-type indicator with probabilities (p1, p2, p0).

    ``p1`` and ``p2`` mark line-specific events, ``p0`` a common shock
    hitting both lines.  Probabilities must be in [0, 1] and sum to one.
    """

    p1: float
    p2: float
    p0: float

    def __post_init__(self):
        probs = (self.p1, self.p2, self.p0)
        if any(p < 0 or p > 1 for p in probs):
            raise ValueError(f"indicator probabilities must lie in [0, 1], got {probs}")
        if abs(sum(probs) - 1.0) > 1e-9:
            raise ValueError(f"indicator probabilities must sum to 1, got {probs}")

    @classmethod
    def from_rates(cls, lambda0: float, lambda1: float, lambda2: float) -> "OccurrenceIndicator":
        lam = lambda0 + lambda1 + lambda2
        if lam <= 0:
            raise ValueError("total rate must be positive")
        return cls(lambda1 / lam, lambda2 / lam, lambda0 / lam)

    @property
    def probabilities(self) -> tuple[float, float, float]:
        return (self.p1, self.p2, self.p0)

    def sample(self, rng) -> tuple[int, int, int]:
        """Draw one indicator triple (i1, i2, i0); exactly one entry is 1."""
        k = rng.choice(3, p=self.probabilities)
        triple = [0, 0, 0]
        triple[k] = 1
        return tuple(triple)

    def sample_counts(self, rng, n: int) -> np.ndarray:
        """Multinomial counts (n1, n2, n0) of n independent indicator draws."""
        return rng.multinomial(n, self.probabilities)
