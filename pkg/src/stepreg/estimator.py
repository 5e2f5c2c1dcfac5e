"""Reconstruction of a translated step function from two sample-count patterns.

Discontinuity locations are only known to lie in open intervals whose ends
are integer multiples of T.  All interval arithmetic below is done in units
of T with exact integers and ``Fraction``s, so energies come out exact when
the level values are exact.

At each time t the estimate is the midrange of the levels that the true
function could take at t given the intervals.  When the intervals are
disjoint this is the familiar form: a level between intervals, the average
of two neighbouring levels inside an interval and zero outside.  When
intervals overlap, three or more levels can be feasible and the midrange
still minimises the worst-case squared error at t.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction


class PreconditionWarning(UserWarning):
    """Counts leave a single-sample region next to a poorly located discontinuity."""


def _eta(counts) -> tuple:
    for attr in ("eta", "region_counts"):
        if hasattr(counts, attr):
            return tuple(getattr(counts, attr))
    return tuple(counts)


@dataclass(frozen=True)
class IndexClassification:
    """Split of discontinuity indices by how well two count patterns locate them.

    Attributes:
        l: Reference discontinuity placed at t = 0.
        m: Number of regions.
        U: Indices located only to within 2T.
        U_c: Indices located to within T.
        C: C[i] count bound per index, C[l] = 0.
        precondition_ok: Whether every region holding one sample in both
            patterns has its far-side neighbour located to within T.
        issues: Regions breaking that condition.
    """

    l: int
    m: int
    U: frozenset
    U_c: frozenset
    C: tuple
    precondition_ok: bool = True
    issues: tuple = ()


def classify_indices(counts1, counts2, l: int) -> IndexClassification:
    eta1, eta2 = _eta(counts1), _eta(counts2)
    m = len(eta1)
    if len(eta2) != m:
        raise ValueError(f"count patterns disagree on m ({m} vs {len(eta2)})")
    if not 0 <= l <= m:
        raise IndexError(f"reference index {l} outside 0..{m}")
    # eta[j - 1] is the count for region j
    U, Uc, C = set(), set(), [0] * (m + 1)
    for i in range(m + 1):
        if i == l:
            continue
        regions = range(i + 1, l + 1) if i < l else range(l + 1, i + 1)
        s1 = sum(eta1[j - 1] for j in regions)
        s2 = sum(eta2[j - 1] for j in regions)
        if abs(s1 - s2) > 1:
            raise ValueError(f"partial sums for index {i} differ by more than one ({s1} vs {s2})")
        if s1 == s2:
            U.add(i)
            C[i] = s1
        else:
            Uc.add(i)
            C[i] = max(s1, s2)
    issues = []
    for i in range(1, m + 1):
        if eta1[i - 1] == 1 and eta2[i - 1] == 1:
            if i > l and (i - 1) in U:
                issues.append(i)
            elif i < l and (i + 1) in U:
                issues.append(i)
    return IndexClassification(l, m, frozenset(U), frozenset(Uc), tuple(C), not issues, tuple(issues))


@dataclass(frozen=True)
class IntervalBounds:
    """Open intervals (left[i], right[i]) * T holding each discontinuity.

    Entries are integers in units of T; index ``l`` holds (0, 0).
    """

    l: int
    left: tuple
    right: tuple
    T: object = 1

    @property
    def m(self) -> int:
        return len(self.left) - 1

    def interval(self, i: int) -> tuple:
        return self.left[i] * self.T, self.right[i] * self.T

    def width(self, i: int):
        return (self.right[i] - self.left[i]) * self.T


def interval_bounds(cls: IndexClassification, T=1) -> IntervalBounds:
    left, right = [0] * (cls.m + 1), [0] * (cls.m + 1)
    for i in range(cls.m + 1):
        c = cls.C[i]
        if i == cls.l:
            continue
        if i in cls.U_c:
            lo, hi = (-c, -(c - 1)) if i < cls.l else (c - 1, c)
        else:
            lo, hi = (-(c + 1), -(c - 1)) if i < cls.l else (c - 1, c + 1)
        left[i], right[i] = lo, hi
    return IntervalBounds(cls.l, tuple(left), tuple(right), T)


def _orderable(bounds: IntervalBounds, pin=None) -> bool:
    # Is there D_0 < ... < D_m with D_i in (left_i, right_i), D_l = 0 and, when
    # ``pin = (k, t)``, D_{k-1} <= t < D_k?  Greedy lowest placement decides
    # it exactly.  Ends are integers and t a multiple of 1/2, so after scaling
    # by S a step of 1 is smaller than any gap that matters.
    S = 4 * (bounds.m + 2)
    k = t = None
    if pin is not None:
        k, t = pin
        t = Fraction(t) * S
        if t.denominator != 1:
            raise ValueError("pinned time must be a multiple of 1/2")
        t = int(t)
    lo = None
    for i in range(bounds.m + 1):
        if i == bounds.l:
            x = 0
            if lo is not None and x <= lo:
                return False
        else:
            x = bounds.left[i] * S
            if lo is not None and lo > x:
                x = lo
            x += 1
        if i == k and x <= t:
            if i == bounds.l:
                return False
            x = t + 1
        if k is not None and i == k - 1 and x > t:
            return False
        if i != bounds.l and not x < bounds.right[i] * S:
            return False
        lo = x
    return True


@dataclass(frozen=True)
class ReconstructedFunction:
    """Piecewise constant estimate on breakpoints given in units of T.

    ``values[k]`` holds on the open interval (breakpoints[k], breakpoints[k+1])
    and ``point_values[k]`` at breakpoints[k]; the function is zero outside.
    """

    breakpoints: tuple
    values: tuple
    point_values: tuple
    T: object = 1
    l: int = 0
    overlapping: bool = False

    def value_at(self, t_in_T):
        """Evaluate at a time expressed in units of T."""
        b = self.breakpoints
        if not b or t_in_T < b[0] or t_in_T > b[-1]:
            return 0
        for k, p in enumerate(b):
            if t_in_T == p:
                return self.point_values[k]
            if t_in_T < p:
                return self.values[k - 1]
        return 0

    def __call__(self, t):
        return self.value_at(t / self.T)

    def pieces(self) -> list[tuple]:
        """(start, end, value) for every open piece, in time units."""
        b = self.breakpoints
        return [(b[k] * self.T, b[k + 1] * self.T, self.values[k]) for k in range(len(self.values))]

    def to_json(self) -> dict:
        def num(x):
            return float(x) if not isinstance(x, int) else x

        return {
            "reference_index": self.l,
            "T": num(self.T),
            "breakpoints_in_T": [num(x) for x in self.breakpoints],
            "values": [num(x) for x in self.values],
            "point_values": [num(x) for x in self.point_values],
            "overlapping_intervals": self.overlapping,
        }


def _midrange(vals):
    lo, hi = min(vals), max(vals)
    return lo if lo == hi else (lo + hi) / 2


def reconstruct(levels, bounds: IntervalBounds, l: int | None = None) -> ReconstructedFunction:
    """Minimax estimate of the translated function from levels and intervals."""
    levels = tuple(levels)
    m = bounds.m
    if len(levels) != m:
        raise ValueError(f"{len(levels)} levels for {m} regions")
    if l is not None and l != bounds.l:
        raise ValueError(f"bounds were built for reference index {bounds.l}, not {l}")
    if not _orderable(bounds):
        raise ValueError("interval bounds admit no increasing placement of the discontinuities")
    zero = 0 * levels[0] if levels else 0
    padded = (zero, *levels, zero)

    def at(t):
        feasible = [padded[k] for k in range(m + 2) if _orderable(bounds, (k, t))]
        return _midrange(feasible)

    overlapping = any(bounds.right[i] > bounds.left[i + 1] for i in range(m))
    if overlapping:
        warnings.warn("uncertainty intervals overlap; using the pointwise midrange estimate", PreconditionWarning)
    points = sorted({Fraction(x) for i in range(m + 1) for x in (bounds.left[i], bounds.right[i])})
    points = [int(p) if p.denominator == 1 else p for p in points]
    values = tuple(at((a + b) / Fraction(2)) for a, b in zip(points, points[1:]))
    point_values = tuple(at(Fraction(p)) for p in points)
    return ReconstructedFunction(tuple(points), values, point_values, bounds.T, bounds.l, overlapping)


def error_energy(cls: IndexClassification, levels, T=1):
    """Energy of the estimation error for the true levels g_1..g_m."""
    levels = tuple(levels)
    if len(levels) != cls.m:
        raise ValueError(f"{len(levels)} levels for {cls.m} regions")
    g = (0, *levels, 0)
    total = 0
    for i in cls.U_c:
        total += ((g[i] - g[i + 1]) / 2) ** 2 * T
    for i in cls.U:
        total += ((g[i] - g[i + 1]) / 2) ** 2 * (2 * T)
    return total


def energy_between(f1: ReconstructedFunction, f2: ReconstructedFunction):
    """Integral of (f1 - f2)^2, exact over the merged breakpoints."""
    if f1.T != f2.T:
        raise ValueError("functions use different sampling intervals")
    points = sorted(set(f1.breakpoints) | set(f2.breakpoints))
    total = 0
    for a, b in zip(points, points[1:]):
        mid = Fraction(a + b) / 2
        diff = f1.value_at(mid) - f2.value_at(mid)
        total += diff * diff * (b - a)
    return total * f1.T
