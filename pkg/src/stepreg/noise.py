"""Additive noise models and reproducible random streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal_model import SampleSequence

KINDS = ("symmetric_binary", "gaussian", "uniform", "fixed")


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator keyed by (seed, *keys).

    Distinct key tuples give independent streams, so results do not depend on
    the order in which sequences or Monte Carlo chunks are evaluated.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


@dataclass(frozen=True)
class NoiseSpec:
    """One of the supported noise laws.

    ``param`` is x for symmetric_binary (values +-x with probability 1/2),
    the standard deviation for gaussian, and the half width w for uniform
    (density 1/(2w) on [-w, w]).  ``pattern`` is only used by ``fixed``.
    """

    kind: str
    param: float = 0.0
    pattern: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pattern", tuple(self.pattern))
        self.validate()

    @classmethod
    def symmetric_binary(cls, x):
        return cls("symmetric_binary", x)

    @classmethod
    def gaussian(cls, sigma):
        return cls("gaussian", sigma)

    @classmethod
    def uniform(cls, halfwidth):
        return cls("uniform", halfwidth)

    @classmethod
    def fixed(cls, pattern):
        return cls("fixed", 0.0, tuple(pattern))

    @property
    def stochastic(self) -> bool:
        return self.kind != "fixed"

    def validate(self, example_range: bool = False):
        if self.kind not in KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "symmetric_binary":
            if self.param < 0:
                raise ValueError("symmetric_binary needs x >= 0")
            if example_range and self.param > 0.5:
                raise ValueError("symmetric_binary x must lie in [0, 0.5]")
        elif self.kind in ("gaussian", "uniform") and not self.param > 0:
            raise ValueError(f"{self.kind} noise needs a positive scale")

    @property
    def std(self) -> float:
        """Per-sample standard deviation of the law."""
        if self.kind == "symmetric_binary":
            return float(self.param)
        if self.kind == "gaussian":
            return float(self.param)
        if self.kind == "uniform":
            return float(self.param) / np.sqrt(3.0)
        return float(np.std(np.asarray(self.pattern, dtype=float)))

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "symmetric_binary":
            signs = rng.integers(0, 2, size=size) * 2 - 1
            return self.param * signs.astype(float)
        if self.kind == "gaussian":
            return rng.normal(0.0, self.param, size=size)
        if self.kind == "uniform":
            return rng.uniform(-self.param, self.param, size=size)
        raise ValueError("fixed patterns are not drawn")


def apply_noise(seq: SampleSequence, spec: NoiseSpec, seed: int = 0, stream: int = 0) -> SampleSequence:
    """y = gamma + e.  ``stream`` separates the two sequences of a pair."""
    values = seq.values
    if spec.kind == "fixed":
        if len(spec.pattern) != len(values):
            raise ValueError(f"noise pattern has length {len(spec.pattern)}, sequence has {len(values)}")
        noisy = tuple(g + e for g, e in zip(values, spec.pattern))
    else:
        e = spec.draw(derive_rng(seed, stream), len(values))
        noisy = tuple(float(g) + float(x) for g, x in zip(values, e))
    return SampleSequence(noisy, grid=seq.grid, noisy=True)


def sample_statistics(spec: NoiseSpec, trials: int, seed: int = 0) -> tuple[float, float]:
    """Empirical mean and (population) variance of ``trials`` draws."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if spec.kind == "fixed":
        draws = np.asarray(spec.pattern, dtype=float)
    else:
        draws = spec.draw(derive_rng(seed, 0), trials)
    return float(draws.mean()), float(draws.var())
