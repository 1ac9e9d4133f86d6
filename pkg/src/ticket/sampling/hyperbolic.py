"""Hyperbolic (log-uniform) weight distributions.

The positive density is ``p(v) = c / v`` on ``[lo, hi]`` with
``c = 1 / ln(hi / lo)``; the signed variant puts half the mass on each side
of zero. Sampling is by inverse CDF: ``v = lo * (hi / lo) ** u``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ticket.errors import ParameterError, SamplingRangeError

FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class HyperbolicDist:
    """Density proportional to 1/v on [lo, hi], 0 < lo < hi."""

    lo: float
    hi: float
    norm_const: float = field(init=False)

    def __post_init__(self) -> None:
        if not (0.0 < self.lo < self.hi) or not math.isfinite(self.hi):
            raise ParameterError(f"Need 0 < lo < hi, got lo={self.lo}, hi={self.hi}", "lo")
        object.__setattr__(self, "norm_const", 1.0 / math.log(self.hi / self.lo))

    def density(self, v: float) -> float:
        """Probability density at v (zero outside the support)."""
        if self.lo <= v <= self.hi:
            return self.norm_const / v
        return 0.0

    def scaled(self, factor: float) -> "HyperbolicDist":
        """The same distribution with its support multiplied by factor > 0."""
        return HyperbolicDist(self.lo * factor, self.hi * factor)


@dataclass(frozen=True)
class SignedHyperbolicDist:
    """Symmetric density 1/(2|w| ln(hi/lo)) on [-hi, -lo] U [lo, hi]."""

    base: HyperbolicDist

    def density(self, w: float) -> float:
        """Probability density at w."""
        return 0.5 * self.base.density(abs(w))


@dataclass(frozen=True)
class RangeSpec:
    """Individual-weight range [alpha, beta] whose product range is [alpha', beta'].

    With q = (alpha' beta')^(1/4), alpha = alpha'/q and beta = beta'/q, so
    alpha * sqrt(alpha beta) = alpha' and beta * sqrt(alpha beta) = beta'.
    """

    alpha_prime: float
    beta_prime: float
    q: float
    alpha: float
    beta: float

    def weight_dist(self) -> SignedHyperbolicDist:
        """Distribution every weight of the large network is drawn from."""
        return SignedHyperbolicDist(HyperbolicDist(self.alpha, self.beta))


def _check_u(u: float) -> None:
    if not 0.0 <= u <= 1.0:
        raise SamplingRangeError(f"Uniform variate must lie in [0, 1], got {u}")


def sample_pos(dist: HyperbolicDist, u: float) -> float:
    """Inverse-CDF sample lo * (hi/lo)**u for a uniform variate u."""
    _check_u(u)
    if u == 1.0:
        return dist.hi
    return dist.lo * (dist.hi / dist.lo) ** u


def sample_signed(dist: SignedHyperbolicDist, u: float, s: int) -> float:
    """Signed sample (-1)**s * sample_pos(base, u)."""
    if s not in (0, 1):
        raise SamplingRangeError(f"Sign coin must be 0 or 1, got {s}")
    value = sample_pos(dist.base, u)
    return -value if s else value


def sample_pos_array(dist: HyperbolicDist, u: FloatArray) -> FloatArray:
    """Vectorised sample_pos."""
    u = np.asarray(u, dtype=np.float64)
    if u.size and (u.min() < 0.0 or u.max() > 1.0):
        raise SamplingRangeError("Uniform variates must lie in [0, 1]")
    return dist.lo * np.power(dist.hi / dist.lo, u)


def sample_signed_array(dist: SignedHyperbolicDist, u: FloatArray, s: NDArray) -> FloatArray:
    """Vectorised sample_signed."""
    magnitude = sample_pos_array(dist.base, u)
    return np.where(np.asarray(s) == 1, -magnitude, magnitude)


def draw_signed(
    dist: SignedHyperbolicDist, rng: np.random.Generator, shape: tuple[int, ...]
) -> FloatArray:
    """Draw an array of signed samples, consuming uniforms then coins from rng."""
    u = rng.random(shape)
    s = rng.integers(0, 2, size=shape)
    return sample_signed_array(dist, u, s)


def draw_pos(dist: HyperbolicDist, rng: np.random.Generator, size: int) -> FloatArray:
    """Draw positive samples from rng."""
    return sample_pos_array(dist, rng.random(size))


def ranges_for_accuracy(eps_w: float, w_max: float) -> RangeSpec:
    """Sampling ranges that make products cover [2 eps_w / 9, 2 w_max / 3].

    Accepts 0 < eps_w < 1.5 w_max; at 1.5 w_max the decomposition has no
    interval left to fill.

    Raises:
        ParameterError: If eps_w is outside the accepted range.
    """
    if not eps_w > 0 or not w_max > 0:
        raise ParameterError(f"eps_w and w_max must be positive, got {eps_w}, {w_max}", "eps_w")
    if not eps_w < 1.5 * w_max:
        raise ParameterError(
            f"eps_w={eps_w} is too large for w_max={w_max}: need eps_w < 1.5 w_max", "eps_w"
        )
    alpha_prime = 2.0 * eps_w / 9.0
    beta_prime = 2.0 * w_max / 3.0
    q = (alpha_prime * beta_prime) ** 0.25
    return RangeSpec(
        alpha_prime=alpha_prime,
        beta_prime=beta_prime,
        q=q,
        alpha=alpha_prime / q,
        beta=beta_prime / q,
    )


def product_range(lo: float, hi: float) -> tuple[float, float]:
    """Range [lo sqrt(lo hi), hi sqrt(lo hi)] where the product density is controlled."""
    root = math.sqrt(lo * hi)
    return lo * root, hi * root


def product_density_lower_bound(w: float, lo: float, hi: float) -> float:
    """Lower bound c / (2w) on the density of v*v' inside product_range(lo, hi)."""
    return 1.0 / (2.0 * w * math.log(hi / lo))
