"""Random problem instances and their ground truth."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .segmentation import Segmentation
from .signal_model import (
    PiecewiseConstantFunction,
    SamplingGrid,
    SampleSequence,
    region_counts,
    sample,
    validate_function,
)


def random_function(
    rng: np.random.Generator,
    m_range=(1, 4),
    length_range=(1.0, 3.5),
    jump_range=(0.5, 2.0),
    T: float = 1.0,
    max_tries: int = 1000,
) -> PiecewiseConstantFunction:
    """Valid step function with every jump magnitude inside ``jump_range``."""
    for _ in range(max_tries):
        m = int(rng.integers(m_range[0], m_range[1] + 1))
        lengths = rng.uniform(*length_range, size=m) * T
        levels = []
        prev = 0.0
        for k in range(m):
            while True:
                step = rng.uniform(*jump_range) * rng.choice((-1.0, 1.0))
                nxt = prev + step
                if k == m - 1 and abs(nxt) < jump_range[0]:
                    continue
                break
            levels.append(nxt)
            prev = nxt
        f = PiecewiseConstantFunction(tuple(levels), tuple(float(r) for r in lengths), T)
        if not validate_function(f):
            return f
    raise RuntimeError("could not draw a valid function")


def covering_grids(
    f: PiecewiseConstantFunction,
    rng: np.random.Generator,
    lead=(0, 2),
    trail=(1, 3),
) -> tuple[SamplingGrid, SamplingGrid]:
    """Two grids of equal length that both sample past each end of the support."""
    T = f.sampling_interval
    starts = [-(rng.uniform(0.0, 1.0) + rng.integers(lead[0], lead[1] + 1)) * T for _ in range(2)]
    extra = int(rng.integers(trail[0], trail[1] + 1))
    N = max(math.floor((f.support_end - s) / T) + 1 for s in starts) + extra
    return SamplingGrid(starts[0], N, T), SamplingGrid(starts[1], N, T)


def true_boundaries(f, grid: SamplingGrid) -> Segmentation:
    """1-based index of the first sample at or after each discontinuity."""
    T = grid.interval
    out = []
    for D in f.breakpoints:
        k = math.ceil((D - grid.first_sample_time) / T - 1e-12)
        out.append(max(k, 0) + 1)
    return Segmentation(tuple(out))


def min_jump(f) -> float:
    g = (0, *f.levels, 0)
    return min(abs(b - a) for a, b in zip(g, g[1:]))


@dataclass(frozen=True)
class Instance:
    f: PiecewiseConstantFunction
    grids: tuple
    clean: tuple
    truth: tuple

    @property
    def counts(self):
        return tuple(region_counts(self.f, g) for g in self.grids)


def random_instance(rng: np.random.Generator, **kwargs) -> Instance:
    f = random_function(rng, **kwargs)
    grids = covering_grids(f, rng)
    clean = tuple(sample(f, g) for g in grids)
    return Instance(f, grids, clean, tuple(true_boundaries(f, g) for g in grids))


def add_bounded_noise(seq: SampleSequence, rng: np.random.Generator, bound: float) -> SampleSequence:
    e = rng.uniform(-bound, bound, size=len(seq))
    return SampleSequence(tuple(float(g) + float(x) for g, x in zip(seq.values, e)), seq.grid, True)
