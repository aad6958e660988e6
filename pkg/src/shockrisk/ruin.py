"""Ruin quantities for the combined surplus of the two lines.

The combined surplus is a classical risk process

    R(t) = u + c t - S(t),        S = S1 + S2,

where S is compound Poisson at the total event rate with per-event claims
drawn as Y1, Y2, or the shock pair total Y3 + Y4.  Everything ruin-related
for the two-line model therefore reduces to a single-line model with a
three-component claim mixture, and the quantities below follow:

* net profit condition c > lambda_mu, safety loading rho = c/lambda_mu - 1;
* ruin starting from zero: psi(0) = lambda_mu / c;
* survival probability delta(u) via three independent routes: a defective
  renewal (Volterra) integral equation, Monte Carlo sampling of the
  maximal aggregate loss M (compound geometric in the ladder heights),
  and a closed form for single-line exponential models;
* the deficit at ruin from zero, distributed as an integrated-tail
  mixture over the three claim components;
* adjustment coefficient, Lundberg bound, and the exponential
  (Cramer-Lundberg) tail approximation.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .aggregate import AggregateModel
from .claims import ClaimDistribution, IntegratedTail

__all__ = [
    "MaximalLossSample",
    "NetProfitConditionError",
    "NoAdjustmentCoefficientError",
    "PathBatch",
    "PathOutcome",
    "RiskModel",
    "RuinAnalytics",
    "SurvivalCurve",
    "analytics",
    "cramer_lundberg_approximation",
    "default_grid",
    "deficit_cdf",
    "deficit_pdf",
    "find_adjustment_coefficient",
    "joint_deficit_surplus_tail",
    "lundberg_bound",
    "maximal_loss_lst",
    "sample_eta",
    "sample_maximal_loss",
    "simulate_path",
    "simulate_paths",
    "survival_curve_mc",
    "survival_curve_volterra",
]

# Paths per reproducibility chunk; each chunk owns the rng substream
# seeded by (master seed, chunk index), so results do not depend on how
# chunks are scheduled across workers.
MC_CHUNK = 16384
PATH_CHUNK = 8192

# A surviving path is abandoned once the Lundberg bound at its current
# reserve drops below this residual ruin mass.
EARLY_EXIT_MASS = 1e-3


class NetProfitConditionError(ValueError):
    """Raised when an operation requires premiums to exceed the claim rate."""


class NoAdjustmentCoefficientError(ValueError):
    """Raised when no positive adjustment coefficient exists."""


@dataclass(frozen=True)
class RiskModel:
    """Aggregate claim model plus premium rate c and initial capital u."""

    aggregate: AggregateModel
    premium_rate: float
    initial_capital: float = 0.0

    def __post_init__(self):
        if not self.premium_rate > 0:
            raise ValueError("premium rate must be positive")
        if self.initial_capital < 0:
            raise ValueError("initial capital must be nonnegative")


@dataclass(frozen=True)
class RuinAnalytics:
    """Closed-form ruin quantities; None/NaN entries mark quantities that
    need the net profit condition when it fails."""

    lambda_mu: float
    mean_per_event: float
    rho: float
    psi0: float
    delta0: float
    p1: float
    p2: float
    p0: float
    mean_deficit: float
    expected_ruin_time_at_zero: float
    adjustment_coefficient: float | None
    net_profit: bool


@dataclass(frozen=True)
class MaximalLossSample:
    value: float
    ladder_count: int


@dataclass(frozen=True)
class SurvivalCurve:
    """delta(u) on an evenly spaced grid, with the producing route tagged."""

    u: np.ndarray
    delta: np.ndarray
    density: np.ndarray | None
    method: str
    meta: dict
    seed: int | None = None


@dataclass(frozen=True)
class PathOutcome:
    ruined: bool
    ruin_time: float
    deficit: float
    surplus_before: float


@dataclass(frozen=True)
class PathBatch:
    """Vectorized path results; outcome fields are NaN where not ruined."""

    ruined: np.ndarray
    ruin_time: np.ndarray
    deficit: np.ndarray
    surplus_before: np.ndarray
    horizon: float
    seed: int | None = None

    @property
    def n_paths(self) -> int:
        return self.ruined.size

    @property
    def ruin_frequency(self) -> float:
        return float(np.mean(self.ruined))


def _rates_and_claims(model: RiskModel) -> list[tuple[float, ClaimDistribution]]:
    """Positive-rate claim components of the combined per-event mixture."""
    agg = model.aggregate
    cm = agg.counting
    out = []
    if cm.lambda1 > 0:
        out.append((cm.lambda1, agg.y1))
    if cm.lambda2 > 0:
        out.append((cm.lambda2, agg.y2))
    if cm.lambda0 > 0:
        out.append((cm.lambda0, agg.shock_pair_sum()))
    return out


def _aggregate_claim_rate(model: RiskModel) -> float:
    agg = model.aggregate
    cm = agg.counting
    return (
        cm.lambda1 * agg.y1.mean
        + cm.lambda2 * agg.y2.mean
        + cm.lambda0 * (agg.y3.mean + agg.y4.mean)
    )


def _ladder_mixture(model: RiskModel):
    """Ladder-height weights and integrated-tail components.

    Returns (weights, components) aligned by position; components with a
    zero weight are None and never sampled.
    """
    agg = model.aggregate
    cm = agg.counting
    lam_mu = _aggregate_claim_rate(model)
    weights = (
        cm.lambda1 * agg.y1.mean / lam_mu,
        cm.lambda2 * agg.y2.mean / lam_mu,
        cm.lambda0 * (agg.y3.mean + agg.y4.mean) / lam_mu,
    )
    components = (
        IntegratedTail(agg.y1) if weights[0] > 0 else None,
        IntegratedTail(agg.y2) if weights[1] > 0 else None,
        IntegratedTail(agg.shock_pair_sum()) if weights[2] > 0 else None,
    )
    return weights, components


def analytics(model: RiskModel) -> RuinAnalytics:
    """All closed-form ruin quantities of the model.

    When the net profit condition fails, psi(0) is clamped to 1, the
    expected ruin time is NaN, the adjustment coefficient is None, and a
    warning is emitted.
    """
    c = model.premium_rate
    lam = model.aggregate.counting.total_rate
    lam_mu = _aggregate_claim_rate(model)
    net_profit = c > lam_mu
    if not net_profit:
        warnings.warn(
            f"net profit condition violated: premium rate {c} <= aggregate claim rate {lam_mu}",
            RuntimeWarning,
            stacklevel=2,
        )
    psi0 = min(1.0, lam_mu / c)
    weights, _ = _ladder_mixture(model)
    agg = model.aggregate
    cm = agg.counting
    pair_second = (
        agg.y3.second_moment + 2.0 * agg.y3.mean * agg.y4.mean + agg.y4.second_moment
    )
    second_sum = (
        cm.lambda1 * agg.y1.second_moment
        + cm.lambda2 * agg.y2.second_moment
        + cm.lambda0 * pair_second
    )
    mean_deficit = second_sum / (2.0 * lam_mu)
    return RuinAnalytics(
        lambda_mu=lam_mu,
        mean_per_event=lam_mu / lam,
        rho=c / lam_mu - 1.0,
        psi0=psi0,
        delta0=1.0 - psi0,
        p1=weights[0],
        p2=weights[1],
        p0=weights[2],
        mean_deficit=mean_deficit,
        expected_ruin_time_at_zero=(mean_deficit / (c - lam_mu) if net_profit else math.nan),
        adjustment_coefficient=(find_adjustment_coefficient(model) if net_profit else None),
        net_profit=net_profit,
    )


def deficit_cdf(model: RiskModel, x):
    """CDF of the deficit at ruin starting from zero capital, given ruin.

    This is the ladder-height law: a mixture of the integrated tails of
    the three claim components with weights proportional to rate * mean.
    """
    weights, components = _ladder_mixture(model)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for w, comp in zip(weights, components):
        if w > 0:
            out = out + w * comp.cdf(x)
    return out


def deficit_pdf(model: RiskModel, x):
    """Density of the deficit at ruin from zero: the rate-weighted claim
    survival functions scaled by the aggregate claim rate."""
    x = np.asarray(x, dtype=float)
    lam_mu = _aggregate_claim_rate(model)
    out = np.zeros_like(x)
    for rate, dist in _rates_and_claims(model):
        out = out + rate * dist.sf(x)
    return np.where(x < 0, 0.0, out / lam_mu)


def _mixture_draws(weights, components, rng, n: int) -> np.ndarray:
    comp_idx = rng.choice(len(weights), size=n, p=weights)
    vals = np.empty(n)
    for j, dist in enumerate(components):
        mask = comp_idx == j
        cnt = int(mask.sum())
        if cnt:
            vals[mask] = dist.sample(rng, cnt)
    return vals


def sample_eta(model: RiskModel, rng, size=None):
    """Draw ladder heights (the deficit law on zero capital)."""
    weights, components = _ladder_mixture(model)
    n = 1 if size is None else int(size)
    vals = _mixture_draws(weights, components, rng, n)
    return vals if size is not None else float(vals[0])


def sample_maximal_loss(model: RiskModel, rng) -> MaximalLossSample:
    """One draw of the maximal aggregate loss M.

    M is compound geometric: the ladder count K takes values {0, 1, ...}
    with P(K = k) = delta(0) psi(0)^k, and M sums K ladder heights.
    Requires the net profit condition.
    """
    ana = analytics(model)
    if not ana.net_profit:
        raise NetProfitConditionError("maximal loss is finite only when c > lambda_mu")
    k = int(rng.geometric(ana.delta0)) - 1
    value = float(np.sum(sample_eta(model, rng, size=k))) if k > 0 else 0.0
    return MaximalLossSample(value=value, ladder_count=k)


def default_grid(model: RiskModel) -> tuple[float, float]:
    """Default (grid_max, grid_step) for survival curves: the grid spans
    twenty mean deficits per unit of safety loading in 1000 steps."""
    ana = analytics(model)
    if not ana.net_profit:
        raise NetProfitConditionError("default grid needs a positive safety loading")
    grid_max = 20.0 * ana.mean_deficit / ana.rho
    return grid_max, grid_max / 1000.0


def _mc_chunk_counts(model, grid, delta0, weights, components, seed, chunk_index, n_chunk):
    """Counts of M <= u per grid point for one reproducibility chunk."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, chunk_index]))
    k = rng.geometric(delta0, n_chunk).astype(np.int64) - 1
    total = int(k.sum())
    if total > 0:
        vals = _mixture_draws(weights, components, rng, total)
        owner = np.repeat(np.arange(n_chunk), k)
        m = np.bincount(owner, weights=vals, minlength=n_chunk)
    else:
        m = np.zeros(n_chunk)
    m.sort()
    return np.searchsorted(m, grid, side="right").astype(np.int64)


def survival_curve_mc(
    model: RiskModel,
    grid_max: float,
    grid_step: float,
    samples: int,
    seed: int,
    workers: int = 1,
) -> SurvivalCurve:
    """Estimate delta(u) = P(M <= u) by sampling the maximal loss.

    Sampling proceeds in fixed-size chunks, each drawing from its own
    substream seeded by (seed, chunk index); per-grid-point counts are
    summed over chunks in exact integer arithmetic, so the curve is
    bit-identical for a given seed regardless of worker count.  A
    central-finite-difference density estimate accompanies the curve.
    """
    if grid_max <= 0 or grid_step <= 0:
        raise ValueError("grid_max and grid_step must be positive")
    if samples <= 0:
        raise ValueError("samples must be positive")
    ana = analytics(model)
    if not ana.net_profit:
        raise NetProfitConditionError("survival sampling needs c > lambda_mu")
    weights, components = _ladder_mixture(model)
    n_points = int(round(grid_max / grid_step)) + 1
    grid = np.arange(n_points) * grid_step

    n_chunks = (samples + MC_CHUNK - 1) // MC_CHUNK
    sizes = [MC_CHUNK] * (n_chunks - 1) + [samples - MC_CHUNK * (n_chunks - 1)]

    def chunk(i):
        return _mc_chunk_counts(
            model, grid, ana.delta0, weights, components, seed, i, sizes[i]
        )

    counts = np.zeros(n_points, dtype=np.int64)
    if workers <= 1:
        for i in range(n_chunks):
            counts += chunk(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(chunk, range(n_chunks)):
                counts += part

    delta = counts / float(samples)
    density = np.empty_like(delta)
    if n_points >= 3:
        density[1:-1] = (delta[2:] - delta[:-2]) / (2.0 * grid_step)
    density[0] = (delta[1] - delta[0]) / grid_step if n_points > 1 else 0.0
    density[-1] = (delta[-1] - delta[-2]) / grid_step if n_points > 1 else 0.0
    return SurvivalCurve(
        u=grid,
        delta=delta,
        density=density,
        method="monte-carlo",
        meta={"samples": samples, "grid_step": grid_step, "chunk": MC_CHUNK},
        seed=seed,
    )


def survival_curve_volterra(model: RiskModel, grid_max: float, step: float) -> SurvivalCurve:
    """Solve the survival probability integral equation by trapezoidal
    marching.

    delta satisfies  delta(u) = delta(0) + (1/c) int_0^u delta(u - y) k(y) dy
    with kernel k(y) = sum_k rate_k * P(claim_k > y).  Kernel values on
    the grid are computed once; each step solves the implicit trapezoid
    update for delta(u_n).
    """
    if grid_max <= 0 or step <= 0:
        raise ValueError("grid_max and step must be positive")
    ana = analytics(model)
    if not ana.net_profit:
        raise NetProfitConditionError("the survival equation needs c > lambda_mu")
    c = model.premium_rate
    n = int(round(grid_max / step))
    u = np.arange(n + 1) * step
    kernel = np.zeros(n + 1)
    for rate, dist in _rates_and_claims(model):
        kernel += rate * np.asarray(dist.sf(u), dtype=float)

    delta = np.empty(n + 1)
    delta[0] = ana.delta0
    denom = 1.0 - step * kernel[0] / (2.0 * c)
    for i in range(1, n + 1):
        inner = float(np.dot(kernel[1:i], delta[i - 1:0:-1])) if i > 1 else 0.0
        rhs = ana.delta0 + (step / c) * (inner + 0.5 * kernel[i] * delta[0])
        delta[i] = rhs / denom
    np.clip(delta, 0.0, 1.0, out=delta)
    return SurvivalCurve(
        u=u,
        delta=delta,
        density=None,
        method="volterra",
        meta={"step": step},
        seed=None,
    )


def _early_exit_level(model: RiskModel, mass: float) -> float:
    eps = find_adjustment_coefficient(model)
    if eps is None or mass is None or mass <= 0:
        return math.inf
    return math.log(1.0 / mass) / eps


def simulate_path(model: RiskModel, horizon: float, rng) -> PathOutcome:
    """Simulate one surplus path event by event up to the horizon.

    Exponential inter-arrival times at the total rate, per-event type by
    the one-hot indicator probabilities, claim drawn from the matching
    law (a shock pays Y3 + Y4).  A surviving path ends early once its
    reserve is high enough that the residual ruin probability, bounded by
    the Lundberg exponent, falls below EARLY_EXIT_MASS.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    agg = model.aggregate
    cm = agg.counting
    lam = cm.total_rate
    probs = cm.type_probabilities
    c = model.premium_rate
    exit_level = _early_exit_level(model, EARLY_EXIT_MASS)
    reserve = float(model.initial_capital)
    t = 0.0
    while True:
        dt = rng.exponential(1.0 / lam)
        if t + dt > horizon:
            return PathOutcome(False, math.nan, math.nan, math.nan)
        t += dt
        reserve += c * dt
        kind = int(rng.choice(3, p=probs))
        if kind == 0:
            claim = float(agg.y1.sample(rng))
        elif kind == 1:
            claim = float(agg.y2.sample(rng))
        else:
            claim = float(agg.y3.sample(rng)) + float(agg.y4.sample(rng))
        surplus_before = reserve
        reserve -= claim
        if reserve < 0:
            return PathOutcome(True, t, -reserve, surplus_before)
        if reserve > exit_level:
            return PathOutcome(False, math.nan, math.nan, math.nan)


def simulate_paths(
    model: RiskModel,
    n_paths: int,
    horizon: float,
    seed: int,
    early_exit_mass: float | None = EARLY_EXIT_MASS,
) -> PathBatch:
    """Simulate many surplus paths, chunked into per-substream batches.

    Semantics per path match simulate_path; chunk i draws from the
    substream seeded by (seed, i), so results are reproducible for a
    given seed independent of scheduling.
    """
    if n_paths <= 0:
        raise ValueError("n_paths must be positive")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    exit_level = (
        _early_exit_level(model, early_exit_mass) if early_exit_mass else math.inf
    )
    ruined = np.zeros(n_paths, dtype=bool)
    ruin_time = np.full(n_paths, np.nan)
    deficit = np.full(n_paths, np.nan)
    surplus_before = np.full(n_paths, np.nan)
    n_chunks = (n_paths + PATH_CHUNK - 1) // PATH_CHUNK
    for i in range(n_chunks):
        lo = i * PATH_CHUNK
        hi = min(lo + PATH_CHUNK, n_paths)
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        res = _simulate_chunk(model, hi - lo, horizon, rng, exit_level)
        ruined[lo:hi], ruin_time[lo:hi], deficit[lo:hi], surplus_before[lo:hi] = res
    return PathBatch(
        ruined=ruined,
        ruin_time=ruin_time,
        deficit=deficit,
        surplus_before=surplus_before,
        horizon=horizon,
        seed=seed,
    )


def _simulate_chunk(model: RiskModel, n: int, horizon: float, rng, exit_level: float):
    agg = model.aggregate
    cm = agg.counting
    lam = cm.total_rate
    probs = cm.type_probabilities
    c = model.premium_rate
    reserve = np.full(n, float(model.initial_capital))
    t = np.zeros(n)
    ruined = np.zeros(n, dtype=bool)
    ruin_time = np.full(n, np.nan)
    deficit = np.full(n, np.nan)
    surplus_before = np.full(n, np.nan)
    active = np.arange(n)
    while active.size:
        na = active.size
        dt = rng.exponential(1.0 / lam, na)
        comp = rng.choice(3, size=na, p=probs)
        claims = np.empty(na)
        own1 = comp == 0
        own2 = comp == 1
        shock = comp == 2
        if own1.any():
            claims[own1] = agg.y1.sample(rng, int(own1.sum()))
        if own2.any():
            claims[own2] = agg.y2.sample(rng, int(own2.sum()))
        if shock.any():
            ns = int(shock.sum())
            claims[shock] = agg.y3.sample(rng, ns) + agg.y4.sample(rng, ns)
        new_t = t[active] + dt
        pre_claim = reserve[active] + c * dt
        post_claim = pre_claim - claims
        # A claim falling beyond the horizon does not count: survived.
        in_time = new_t <= horizon
        ruin_now = in_time & (post_claim < 0)
        idx = active[ruin_now]
        ruined[idx] = True
        ruin_time[idx] = new_t[ruin_now]
        deficit[idx] = -post_claim[ruin_now]
        surplus_before[idx] = pre_claim[ruin_now]
        keep = in_time & ~ruin_now & (post_claim <= exit_level)
        idx = active[keep]
        t[idx] = new_t[keep]
        reserve[idx] = post_claim[keep]
        active = idx
    return ruined, ruin_time, deficit, surplus_before


def joint_deficit_surplus_tail(model: RiskModel, x: float, y: float) -> float:
    """P(deficit > x, surplus before ruin > y | ruin from zero capital).

    Equals the integral of the rate-weighted claim survival functions
    over (x + y, infinity) divided by the aggregate claim rate; it
    depends on (x, y) only through x + y.
    """
    if x < 0 or y < 0:
        raise ValueError("x and y must be nonnegative")
    lam_mu = _aggregate_claim_rate(model)
    terms = _rates_and_claims(model)

    def integrand(s):
        return sum(rate * float(dist.sf(s)) for rate, dist in terms)

    val, _ = integrate.quad(integrand, x + y, np.inf, limit=200)
    return val / lam_mu


def find_adjustment_coefficient(model: RiskModel) -> float | None:
    """Positive root of the Lundberg equation, or None when absent.

    The root solves  sum_k rate_k (M_k(eps) - 1) = c eps  on the interval
    between zero and the smallest abscissa of convergence of the claim
    MGFs; it exists when the net profit condition holds and the claim
    tails are light.  Located by bracketed root refinement to relative
    tolerance 1e-12.
    """
    c = model.premium_rate
    if c <= _aggregate_claim_rate(model):
        return None
    terms = _rates_and_claims(model)
    radius = min(dist.mgf_radius for _, dist in terms)

    def g(eps):
        return sum(rate * (float(dist.mgf(eps)) - 1.0) for rate, dist in terms) - c * eps

    if math.isinf(radius):
        hi = 1.0
        for _ in range(200):
            if g(hi) > 0:
                break
            hi *= 2.0
        else:
            return None
    else:
        hi = None
        for k in range(1, 60):
            cand = radius * (1.0 - 0.5**k)
            if g(cand) > 0:
                hi = cand
                break
        if hi is None:
            return None
    lo = hi / 2.0
    while g(lo) >= 0:
        lo /= 2.0
        if lo < 1e-300:
            return None
    return float(optimize.brentq(g, lo, hi, rtol=1e-12, maxiter=200))


def lundberg_bound(model: RiskModel, u):
    """Exponential ruin bound psi(u) <= exp(-eps u)."""
    eps = find_adjustment_coefficient(model)
    if eps is None:
        raise NoAdjustmentCoefficientError("no adjustment coefficient for this model")
    u = np.asarray(u, dtype=float)
    return np.exp(-eps * u)


def cramer_lundberg_approximation(model: RiskModel, u):
    """Asymptotic ruin approximation C exp(-eps u).

    The constant is C = (c - lambda_mu) / (eps * I) with
    I = int_0^infty y exp(eps y) k(y) dy over the rate-weighted claim
    survival kernel k, evaluated by adaptive quadrature.
    """
    eps = find_adjustment_coefficient(model)
    if eps is None:
        raise NoAdjustmentCoefficientError("no adjustment coefficient for this model")
    terms = _rates_and_claims(model)

    def integrand(y):
        # Each product exp(eps y) * sf(y) decays since eps lies strictly
        # inside every component's convergence radius; combining the
        # exponents avoids spurious overflow at large y.
        total = 0.0
        for rate, dist in terms:
            tail = float(dist.sf(y))
            if tail > 0.0:
                total += rate * math.exp(eps * y + math.log(tail))
        return y * total

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(integrand, 0.0, np.inf, limit=400)
        except integrate.IntegrationWarning as exc:
            raise NoAdjustmentCoefficientError(
                "tail-weighted moment integral did not converge"
            ) from exc
    if not math.isfinite(val) or val <= 0:
        raise NoAdjustmentCoefficientError("tail-weighted moment integral diverges")
    c_const = (model.premium_rate - _aggregate_claim_rate(model)) / (eps * val)
    u = np.asarray(u, dtype=float)
    return c_const * np.exp(-eps * u)


def maximal_loss_lst(model: RiskModel, s):
    """Laplace-Stieltjes transform of the maximal aggregate loss M,

        E[exp(-s M)] = (c - lambda_mu) s / (c s - lam + sum_k rate_k L_k(s)),

    valid under the net profit condition for s > 0.
    """
    lam_mu = _aggregate_claim_rate(model)
    c = model.premium_rate
    if c <= lam_mu:
        raise NetProfitConditionError("the maximal loss is defective when c <= lambda_mu")
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise ValueError("transform argument must be positive")
    cm = model.aggregate.counting
    lam = cm.total_rate
    mix = np.zeros_like(s)
    for rate, dist in _rates_and_claims(model):
        mix = mix + rate * dist.lst(s)
    return (c - lam_mu) * s / (c * s - lam + mix)
