"""Order statistics of shifted-exponential service times.

The k-th smallest of n i.i.d. shifted-exponential draws has closed-form
mean and variance built from truncated harmonic sums.  This module holds
the harmonic-number cache, the service-law abstraction used everywhere
else, and the two order-statistic moment formulas.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

import numpy as np

__all__ = [
    "HarmonicCache",
    "OrderStatMoments",
    "ServiceDistribution",
    "harmonic",
    "harmonic2",
    "order_stat_mean",
    "order_stat_moments",
    "order_stat_var",
    "sample",
]

# Enough for second-order harmonic lookups H_{k^2} with k up to 2048.
DEFAULT_CAPACITY = 1 << 22


class HarmonicCache:
    """Prefix sums of 1/j and 1/j**2, served as H(n) and H2(n).

    The arrays are built lazily and grown geometrically on demand, so a
    cache instance costs nothing until the first lookup.  Lookups beyond
    ``capacity`` raise rather than silently approximate.
    """

    def __init__(self, capacity: int = DEFAULT_CAPACITY) -> None:
        capacity = operator.index(capacity)
        if capacity < 1:
            raise ValueError(f"capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._h1 = np.zeros(1)
        self._h2 = np.zeros(1)

    def _ensure(self, n: int) -> int:
        n = operator.index(n)
        if n < 0:
            raise ValueError(f"harmonic index must be nonnegative, got {n}")
        if n > self.capacity:
            raise ValueError(
                f"harmonic index {n} exceeds cache capacity {self.capacity}"
            )
        if n >= self._h1.size:
            size = min(self.capacity, max(n, 2 * (self._h1.size - 1), 1024))
            j = np.arange(1, size + 1, dtype=np.float64)
            # np.cumsum is pairwise-blocked: relative error stays near 1e-14
            # even at the full default capacity.
            self._h1 = np.concatenate(([0.0], np.cumsum(1.0 / j)))
            self._h2 = np.concatenate(([0.0], np.cumsum(1.0 / j**2)))
        return n

    def harmonic(self, n: int) -> float:
        """H(n) = sum_{j=1..n} 1/j, with H(0) = 0."""
        n = self._ensure(n)
        return float(self._h1[n])

    def harmonic2(self, n: int) -> float:
        """H2(n) = sum_{j=1..n} 1/j**2, with H2(0) = 0."""
        n = self._ensure(n)
        return float(self._h2[n])


_CACHE = HarmonicCache()


def harmonic(n: int) -> float:
    """H(n) = sum_{j=1..n} 1/j from the shared cache."""
    return _CACHE.harmonic(n)


def harmonic2(n: int) -> float:
    """H2(n) = sum_{j=1..n} 1/j**2 from the shared cache."""
    return _CACHE.harmonic2(n)


@dataclass(frozen=True)
class ServiceDistribution:
    """Shifted-exponential service law: ``shift`` plus an Exp(``rate``) tail.

    ``shift == 0`` recovers the plain exponential.  The CDF is
    F(x) = 1 - exp(-rate * (x - shift)) for x >= shift and 0 below.
    """

    rate: float
    shift: float = 0.0

    def __post_init__(self) -> None:
        if not (isinstance(self.rate, (int, float)) and math.isfinite(self.rate)):
            raise ValueError(f"rate must be a finite number, got {self.rate!r}")
        if self.rate <= 0:
            raise ValueError(f"rate must be positive, got {self.rate}")
        if not (isinstance(self.shift, (int, float)) and math.isfinite(self.shift)):
            raise ValueError(f"shift must be a finite number, got {self.shift!r}")
        if self.shift < 0:
            raise ValueError(f"shift must be nonnegative, got {self.shift}")
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "shift", float(self.shift))

    @classmethod
    def exponential(cls, rate: float) -> "ServiceDistribution":
        return cls(rate=rate, shift=0.0)

    @classmethod
    def shifted_exponential(cls, rate: float, shift: float) -> "ServiceDistribution":
        return cls(rate=rate, shift=shift)

    @property
    def kind(self) -> str:
        """``"exp"`` when the shift is zero, ``"sexp"`` otherwise."""
        return "exp" if self.shift == 0.0 else "sexp"

    def mean(self) -> float:
        return self.shift + 1.0 / self.rate

    def cdf(self, x):
        """F(x), elementwise for array input."""
        arr = np.asarray(x, dtype=np.float64)
        out = np.where(arr > self.shift, -np.expm1(-self.rate * (arr - self.shift)), 0.0)
        return float(out) if out.ndim == 0 else out

    def quantile(self, u):
        """Inverse CDF on [0, 1), elementwise for array input."""
        arr = np.asarray(u, dtype=np.float64)
        if np.any((arr < 0.0) | (arr >= 1.0)):
            raise ValueError("quantile argument must lie in [0, 1)")
        out = self.shift - np.log1p(-arr) / self.rate
        return float(out) if out.ndim == 0 else out

    def sample(self, rng: np.random.Generator, size=None):
        """Inverse-CDF draw(s); a scalar for ``size=None``, else an array.

        Consumes exactly one uniform per sample so a seeded stream
        reproduces runs deterministically.
        """
        return self.quantile(rng.random(size))


def sample(dist: ServiceDistribution, rng: np.random.Generator, size=None):
    """Draw from ``dist`` via its inverse CDF; see ServiceDistribution.sample."""
    return dist.sample(rng, size)


@dataclass(frozen=True)
class OrderStatMoments:
    """Mean and variance of the k-th smallest of n i.i.d. service times."""

    mean: float
    var: float
    k: int
    n: int


def _check_rank(k: int, n: int) -> tuple[int, int]:
    k = operator.index(k)
    n = operator.index(n)
    if n < 1:
        raise ValueError(f"sample size n must be positive, got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"order index k must satisfy 1 <= k <= n, got k={k}, n={n}")
    return k, n


def order_stat_mean(dist: ServiceDistribution, k: int, n: int) -> float:
    """Mean of the k-th smallest of n draws: shift + (H(n) - H(n-k)) / rate."""
    k, n = _check_rank(k, n)
    return dist.shift + (harmonic(n) - harmonic(n - k)) / dist.rate


def order_stat_var(dist: ServiceDistribution, k: int, n: int) -> float:
    """Variance of the k-th smallest of n draws: (H2(n) - H2(n-k)) / rate**2.

    The shift drops out; only the exponential tail contributes spread.
    """
    k, n = _check_rank(k, n)
    return (harmonic2(n) - harmonic2(n - k)) / dist.rate**2


def order_stat_moments(dist: ServiceDistribution, k: int, n: int) -> OrderStatMoments:
    """Both moments of the k-th smallest of n draws in one record."""
    k, n = _check_rank(k, n)
    return OrderStatMoments(
        mean=order_stat_mean(dist, k, n),
        var=order_stat_var(dist, k, n),
        k=k,
        n=n,
    )
