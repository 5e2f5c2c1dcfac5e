"""Edge-weight statistics of the alignment graph under additive noise.

For a segmentation pair whose true differences are ``a`` and ``b``, each
noisy difference is the true value plus e[n] - e[n-1].  With Gaussian
sample noise of standard deviation sigma that perturbation is N(0, 2 sigma^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dp_align import WEIGHT_KINDS
from .noise import derive_rng

_SQRT2 = math.sqrt(2.0)
_SQRTPI = math.sqrt(math.pi)


@dataclass(frozen=True)
class EdgeNoiseContext:
    a: float
    b: float
    v: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.v > 0:
            raise ValueError("threshold must be positive")


def q_function(z: float) -> float:
    """Upper tail of the standard normal, 0.5 * erfc(z / sqrt(2))."""
    return 0.5 * math.erfc(z / _SQRT2)


def prob_w1_positive(ctx: EdgeNoiseContext) -> float:
    s = ctx.sigma * _SQRT2
    a, b, v = ctx.a, ctx.b, ctx.v
    return q_function((v - a) / s) * q_function((v - b) / s) + q_function((v + a) / s) * q_function((v + b) / s)


def _upper_moment(c, v, sigma):
    # E[X 1{X >= v}] for X ~ N(c, 2 sigma^2)
    return c * q_function((v - c) / (sigma * _SQRT2)) + sigma / _SQRTPI * math.exp(-((v - c) ** 2) / (4 * sigma**2))


def _lower_moment(c, v, sigma):
    # E[X 1{X <= -v}] for X ~ N(c, 2 sigma^2)
    return c * q_function((v + c) / (sigma * _SQRT2)) - sigma / _SQRTPI * math.exp(-((v + c) ** 2) / (4 * sigma**2))


def expected_w2(ctx: EdgeNoiseContext) -> float:
    a, b, v, s = ctx.a, ctx.b, ctx.v, ctx.sigma
    return _upper_moment(a, v, s) * _upper_moment(b, v, s) + _lower_moment(a, v, s) * _lower_moment(b, v, s)


@dataclass(frozen=True)
class EdgeStats:
    positive_rate: float
    mean_weight: float
    rate_stderr: float
    mean_stderr: float
    trials: int


def _weights(kind: str, d1: np.ndarray, d2: np.ndarray, v: float) -> np.ndarray:
    gate = (d1 * d2 > 0) & (np.abs(d1) >= v) & (np.abs(d2) >= v)
    if kind == "w1":
        w = np.ones_like(d1)
    elif kind == "w2":
        w = d1 * d2
    else:
        w = np.minimum(d1 * d1, d2 * d2)
    return np.where(gate, w, 0.0)


def monte_carlo_edge_stats(
    kind: str,
    ctx: EdgeNoiseContext,
    trials: int,
    seed: int = 0,
    noise: str = "gaussian",
    chunk: int = 250_000,
) -> EdgeStats:
    """Simulate one edge weight.

    ``noise`` is "gaussian" or "uniform"; both use per-sample standard
    deviation ``ctx.sigma`` (the uniform half width is sigma * sqrt(3)).
    Chunk c draws from the stream (seed, c), so results do not depend on
    how chunks are scheduled.
    """
    kind = kind.lower()
    if kind not in WEIGHT_KINDS:
        raise ValueError(f"unknown weight kind {kind!r}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if noise not in ("gaussian", "uniform"):
        raise ValueError(f"unknown noise family {noise!r}")
    pos = 0
    s1 = s2 = 0.0
    done = 0
    c = 0
    while done < trials:
        n = min(chunk, trials - done)
        rng = derive_rng(seed, c)
        if noise == "gaussian":
            e = rng.normal(0.0, ctx.sigma, size=(4, n))
        else:
            w = ctx.sigma * math.sqrt(3.0)
            e = rng.uniform(-w, w, size=(4, n))
        d1 = ctx.a + e[0] - e[1]
        d2 = ctx.b + e[2] - e[3]
        wts = _weights(kind, d1, d2, ctx.v)
        pos += int(np.count_nonzero(wts > 0))
        s1 += float(wts.sum())
        s2 += float((wts * wts).sum())
        done += n
        c += 1
    rate = pos / trials
    mean = s1 / trials
    var = max(s2 / trials - mean * mean, 0.0)
    return EdgeStats(
        rate,
        mean,
        math.sqrt(rate * (1 - rate) / trials),
        math.sqrt(var / trials),
        trials,
    )
