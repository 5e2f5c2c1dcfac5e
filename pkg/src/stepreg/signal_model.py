"""Ground-truth piecewise constant functions, sampling grids and ideal sampling.

All arithmetic is generic over the number type: pass ``fractions.Fraction``
lengths and offsets to get exact sample times, or floats for simulation.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Sequence

INTEGER_SUM_TOL = 1e-9
SNAP_TOL = 1e-12


@dataclass(frozen=True)
class PiecewiseConstantFunction:
    """Spatially limited step function with ``m`` regions starting at t = 0.

    Attributes:
        levels: Amplitudes g_1..g_m.
        region_lengths: Durations R_1..R_m in time units.
        sampling_interval: Grid spacing T.
    """

    levels: tuple
    region_lengths: tuple
    sampling_interval: float = 1

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "region_lengths", tuple(self.region_lengths))
        if len(self.levels) != len(self.region_lengths):
            raise ValueError("levels and region_lengths differ in length")
        if self.sampling_interval <= 0:
            raise ValueError("sampling_interval must be positive")
        if any(r <= 0 for r in self.region_lengths):
            raise ValueError("region lengths must be positive")

    @classmethod
    def from_lengths_in_T(cls, levels, lengths_in_T, T=1):
        return cls(tuple(levels), tuple(r * T for r in lengths_in_T), T)

    @property
    def m(self) -> int:
        return len(self.levels)

    @property
    def breakpoints(self) -> tuple:
        """Discontinuity locations D_0 = 0 < D_1 < ... < D_m."""
        return (0 * self.sampling_interval,) + tuple(accumulate(self.region_lengths))

    @property
    def support_end(self):
        return self.breakpoints[-1]

    def region_of(self, t) -> int:
        return _locate(t, self.breakpoints, self.sampling_interval)

    def __call__(self, t):
        k = self.region_of(t)
        return self.levels[k - 1] if 1 <= k <= self.m else 0


@dataclass(frozen=True)
class RegionDecomposition:
    """Integer/fractional split R_i = (n_i - f_i) T."""

    n: tuple
    f: tuple
    sampling_interval: float = 1

    @property
    def m(self) -> int:
        return len(self.n)

    def lengths(self) -> tuple:
        return tuple((n - f) * self.sampling_interval for n, f in zip(self.n, self.f))


@dataclass(frozen=True)
class SamplingGrid:
    first_sample_time: float
    count: int
    interval: float = 1

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("grid needs at least one sample")
        if self.interval <= 0:
            raise ValueError("grid interval must be positive")

    @property
    def times(self) -> tuple:
        return tuple(self.first_sample_time + k * self.interval for k in range(self.count))


@dataclass(frozen=True)
class SampleSequence:
    """Samples y[1..N]; ``grid`` is known for simulated data only."""

    values: tuple
    grid: SamplingGrid | None = None
    noisy: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class RegionCounts:
    """Per-region sample counts for one grid.

    Attributes:
        eta: Samples landing in each region.
        delta: Offset from each region's left end to its first sample, in [0, T).
        leading_zeros: Samples before the support.
        trailing_zeros: Samples after the support.
    """

    eta: tuple
    delta: tuple
    leading_zeros: int
    trailing_zeros: int

    @property
    def total(self) -> int:
        return sum(self.eta) + self.leading_zeros + self.trailing_zeros


@dataclass(frozen=True)
class CumulativeCountRule:
    """Closed-form count over regions i..i+K as a function of the grid offset."""

    i: int
    K: int
    kappa: int
    d: int
    delta_threshold: float

    def predict(self, delta) -> int:
        return self.d if delta < self.delta_threshold else self.d - 1


@dataclass(frozen=True)
class TranslatedFunction:
    """g shifted so that discontinuity ``l`` sits at t = 0."""

    base: PiecewiseConstantFunction
    l: int
    discontinuities: tuple = field(default=())

    @property
    def levels(self) -> tuple:
        return self.base.levels

    @property
    def sampling_interval(self):
        return self.base.sampling_interval

    @property
    def breakpoints(self) -> tuple:
        return self.discontinuities

    @property
    def m(self) -> int:
        return self.base.m

    def __call__(self, t):
        k = _locate(t, self.discontinuities, self.sampling_interval)
        return self.levels[k - 1] if 1 <= k <= self.m else 0


def _locate(t, breakpoints: Sequence, T) -> int:
    # Index of the half-open region containing t: 0 before the support,
    # m + 1 after it.  Times within SNAP_TOL*T below a breakpoint snap onto it.
    if isinstance(t, float) or any(isinstance(b, float) for b in breakpoints):
        return bisect_right(breakpoints, t + SNAP_TOL * T)
    return bisect_right(breakpoints, t)


def _near_integer(x, tol=INTEGER_SUM_TOL) -> bool:
    return abs(x - round(x)) <= tol


def validate_function(f: PiecewiseConstantFunction) -> list[str]:
    """Return human-readable invariant violations; empty when ``f`` is valid."""
    problems = []
    m = f.m
    T = f.sampling_interval
    if m < 1:
        return ["no regions"]
    if f.levels[0] == 0:
        problems.append("first level is zero")
    if f.levels[-1] == 0:
        problems.append("last level is zero")
    for i in range(m - 1):
        if f.levels[i] == f.levels[i + 1]:
            problems.append(f"adjacent equal levels at regions {i + 1} and {i + 2}")
    short = [i + 1 for i, r in enumerate(f.region_lengths) if r / T < 1 - INTEGER_SUM_TOL]
    for i in short:
        problems.append(f"region {i} shorter than T")
    if short:
        return problems
    dec = decompose_lengths(f)
    for i in range(m):
        total = 0
        for K in range(m - i):
            total += dec.f[i + K]
            if _near_integer(total):
                problems.append(f"f partial sum integral for i={i + 1}, K={K} (sum {float(total):g})")
    return problems


def decompose_lengths(f: PiecewiseConstantFunction) -> RegionDecomposition:
    T = f.sampling_interval
    ns, fs = [], []
    for i, R in enumerate(f.region_lengths, start=1):
        r = R / T
        if r < 1 - INTEGER_SUM_TOL:
            raise ValueError(f"region {i} is shorter than the sampling interval")
        k = round(r)
        if abs(r - k) <= INTEGER_SUM_TOL * max(1.0, abs(float(r))):
            ns.append(int(k) + 1)
            fs.append(type(r)(1))
        else:
            n = math.floor(r) + 1
            ns.append(n)
            fs.append(n - r)
    return RegionDecomposition(tuple(ns), tuple(fs), T)


def sample(f, grid: SamplingGrid) -> SampleSequence:
    """Ideal noiseless samples of ``f`` (plain or translated) on ``grid``."""
    if grid.interval != f.sampling_interval:
        raise ValueError("grid interval differs from the function's sampling interval")
    return SampleSequence(tuple(f(t) for t in grid.times), grid=grid, noisy=False)


def region_counts(f: PiecewiseConstantFunction, grid: SamplingGrid) -> RegionCounts:
    if grid.interval != f.sampling_interval:
        raise ValueError("grid interval differs from the function's sampling interval")
    T = grid.interval
    bps = f.breakpoints
    times = grid.times
    if f.region_of(times[0] - T) != 0 or f.region_of(times[-1] + T) != f.m + 1:
        raise ValueError("grid does not cover the support of the function")
    eta = [0] * f.m
    first = [None] * f.m
    leading = trailing = 0
    for t in times:
        k = f.region_of(t)
        if k == 0:
            leading += 1
        elif k == f.m + 1:
            trailing += 1
        else:
            eta[k - 1] += 1
            if first[k - 1] is None:
                first[k - 1] = t
    empty = [i + 1 for i, e in enumerate(eta) if e == 0]
    if empty:
        raise ValueError(f"regions {empty} receive no samples")
    delta = []
    for i in range(f.m):
        dlt = first[i] - bps[i]
        if isinstance(dlt, float) and abs(dlt) <= SNAP_TOL * T:
            dlt = 0.0
        delta.append(dlt)
    return RegionCounts(tuple(eta), tuple(delta), leading, trailing)


def cumulative_count_rule(dec: RegionDecomposition, i: int, K: int) -> CumulativeCountRule:
    """Count rule for regions i..i+K (1-based ``i``)."""
    if i < 1 or K < 0 or i + K > dec.m:
        raise IndexError(f"regions {i}..{i + K} outside 1..{dec.m}")
    fsum = sum(dec.f[i - 1:i + K])
    kappa = math.floor(fsum)
    d = sum(dec.n[i - 1:i + K]) - kappa
    return CumulativeCountRule(i, K, kappa, d, (1 + kappa - fsum) * dec.sampling_interval)


def translate_reference(f: PiecewiseConstantFunction, l: int) -> TranslatedFunction:
    m = f.m
    if not 0 <= l <= m:
        raise IndexError(f"reference index {l} outside 0..{m}")
    R = (0,) + f.region_lengths  # R_0 = 0
    D = []
    for i in range(m + 1):
        if i < l:
            D.append(-sum(R[i + 1:l + 1]))
        elif i == l:
            D.append(0 * f.sampling_interval)
        else:
            D.append(sum(R[l + 1:i + 1]))
    return TranslatedFunction(f, l, tuple(D))
