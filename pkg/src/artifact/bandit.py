"""Two-state two-armed Bernoulli bandit: problem data and belief arithmetic.

The environment hides a static state s in {-1, +1}.  Pulling arm a in
{-1, +1} returns a Bernoulli reward that pays 1 with probability theta_a
when s = a and with probability 1 - theta_a otherwise, so each arm is the
better one exactly in its namesake state.  Beliefs over the hidden state
are a single number beta in [-1, 1] through b(s) = (1 + s*beta) / 2.

Everything in this module is a pure scalar function (entropy also accepts
arrays).  Vectorized grid machinery lives in the solver modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import ZeroLikelihood

__all__ = [
    "BanditSpec",
    "Belief",
    "ActionDistribution",
    "Observation",
    "win_prob",
    "obs_prob",
    "expected_reward",
    "belief_update",
    "entropy",
    "mutual_information",
    "regret_gap",
    "one_step_regret",
]


@dataclass(frozen=True)
class BanditSpec:
    """Win probabilities of the two arms in their namesake states."""

    theta_minus: float
    theta_plus: float

    def __post_init__(self):
        for name in ("theta_minus", "theta_plus"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    def theta(self, a: int) -> float:
        return self.theta_plus if a == 1 else self.theta_minus

    def bias(self, a: int) -> float:
        """2*theta_a - 1, the edge of arm a over a fair coin."""
        return 2.0 * self.theta(a) - 1.0

    @property
    def bias_minus(self) -> float:
        return 2.0 * self.theta_minus - 1.0

    @property
    def bias_plus(self) -> float:
        return 2.0 * self.theta_plus - 1.0

    @property
    def symmetric(self) -> bool:
        return self.theta_minus == self.theta_plus


@dataclass(frozen=True)
class Belief:
    """Belief over the hidden state, parametrized by beta in [-1, 1]."""

    beta: float

    def __post_init__(self):
        if not -1.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [-1, 1], got {self.beta}")

    def prob(self, s: int) -> float:
        """b(s) = (1 + s*beta) / 2."""
        return (1.0 + s * self.beta) / 2.0


@dataclass(frozen=True)
class ActionDistribution:
    """Stochastic action choice; q is the probability of playing +1."""

    q: float

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {self.q}")

    def prob(self, a: int) -> float:
        return self.q if a == 1 else 1.0 - self.q


@dataclass(frozen=True)
class Observation:
    """Binary outcome of one pull; the reward equals the outcome."""

    y: int

    def __post_init__(self):
        if self.y not in (0, 1):
            raise ValueError(f"y must be 0 or 1, got {self.y}")

    @property
    def reward(self) -> float:
        return float(self.y)


def _check_sign(name, v):
    if v not in (-1, 1):
        raise ValueError(f"{name} must be -1 or +1, got {v}")


def _check_outcome(y):
    if isinstance(y, Observation):
        return y.y
    if y not in (0, 1):
        raise ValueError(f"y must be 0 or 1, got {y}")
    return y


def _check_beta(b):
    """Belief values may arrive as Belief objects or bare floats."""
    if isinstance(b, Belief):
        return b.beta
    b = float(b)
    if not -1.0 <= b <= 1.0:
        raise ValueError(f"beta must lie in [-1, 1], got {b}")
    return b


def win_prob(spec: BanditSpec, s: int, a: int) -> float:
    """Probability of a unit reward from arm a in state s."""
    _check_sign("s", s)
    _check_sign("a", a)
    th = spec.theta(a)
    return th if s == a else 1.0 - th


def obs_prob(spec: BanditSpec, beta: float, a: int, y: int) -> float:
    """Predictive probability of outcome y under belief beta when playing a.

    Marginalizing the state gives the closed form
    p_b(y|a) = [1 + a*(2y-1)*beta*(2*theta_a-1)] / 2.
    """
    _check_sign("a", a)
    y = _check_outcome(y)
    beta = _check_beta(beta)
    return (1.0 + a * (2 * y - 1) * beta * spec.bias(a)) / 2.0


def expected_reward(spec: BanditSpec, beta: float, a: int) -> float:
    """Expected immediate reward of arm a under belief beta."""
    _check_sign("a", a)
    beta = _check_beta(beta)
    return (1.0 + a * beta * spec.bias(a)) / 2.0


def belief_update(spec: BanditSpec, beta: float, a: int, y: int) -> float:
    """Bayes posterior belief after observing outcome y from arm a.

    Raises ZeroLikelihood when the observation has probability zero, which
    can only happen for deterministic arms (theta_a in {0, 1}) combined
    with a contradicting certain belief.  The result is clamped to [-1, 1]
    to absorb last-bit rounding.
    """
    y = _check_outcome(y)
    beta = _check_beta(beta)
    p = obs_prob(spec, beta, a, y)
    if p <= 0.0:
        raise ZeroLikelihood(
            f"observation y={y} from arm a={a} has probability zero at beta={beta}"
        )
    d = spec.bias(a)
    bp = (beta + a * (2 * y - 1) * d) / (2.0 * p)
    return min(1.0, max(-1.0, bp))


def entropy(beta):
    """Shannon entropy of the belief in nats, with 0*log(0) taken as 0.

    Accepts a scalar, a Belief, or an ndarray of beta values; lies in
    [0, log 2].
    """
    if isinstance(beta, Belief):
        beta = beta.beta
    b = np.asarray(beta, dtype=float)
    bm = (1.0 - b) / 2.0
    bp = (1.0 + b) / 2.0
    h = -xlogy(bm, bm) - xlogy(bp, bp) + 0.0
    if np.ndim(beta) == 0:
        return float(h)
    return h


def mutual_information(spec: BanditSpec, beta: float, a: int) -> float:
    """Mutual information (nats) between the state and one outcome of arm a.

    Computed as the exact four-term sum
    sum_{s,y} b(s) p(y|s,a) log[p(y|s,a) / p_b(y|a)], skipping zero terms.
    """
    _check_sign("a", a)
    beta = _check_beta(beta)
    out = 0.0
    for y in (0, 1):
        pb = obs_prob(spec, beta, a, y)
        if pb <= 0.0:
            continue
        for s in (-1, 1):
            bs = (1.0 + s * beta) / 2.0
            pys = win_prob(spec, s, a) if y == 1 else 1.0 - win_prob(spec, s, a)
            if bs > 0.0 and pys > 0.0:
                out += bs * pys * math.log(pys / pb)
    # information is nonnegative; rounding can leave a tiny negative residue
    return out if out > 0.0 else 0.0


def regret_gap(spec: BanditSpec, beta: float, a: int) -> float:
    """Expected shortfall of arm a against the state-wise best arm."""
    _check_sign("a", a)
    beta = _check_beta(beta)
    out = 0.0
    for s in (-1, 1):
        best = max(win_prob(spec, s, -1), win_prob(spec, s, 1))
        out += (1.0 + s * beta) / 2.0 * (best - win_prob(spec, s, a))
    return out


def one_step_regret(spec: BanditSpec, beta: float, dist) -> float:
    """One-step regret of a mixed action under belief beta.

    `dist` is an ActionDistribution or the bare probability of arm +1.
    Affine in q by construction: (1-q)*gap(-1) + q*gap(+1).
    """
    q = dist.q if isinstance(dist, ActionDistribution) else float(dist)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    beta = _check_beta(beta)
    return (1.0 - q) * regret_gap(spec, beta, -1) + q * regret_gap(spec, beta, 1)
