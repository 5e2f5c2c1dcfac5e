"""Cross-correlation template matching, the alignment baseline."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CorrelationProfile:
    """r[i] = sum_n y1[n] * y2[n + i] for shifts i = -(N-1)..(N-1)."""

    shifts: tuple
    values: tuple

    def __getitem__(self, shift: int):
        return self.values[shift - self.shifts[0]]

    def as_dict(self) -> dict:
        return dict(zip(self.shifts, self.values))


def _values(seq) -> tuple:
    return tuple(getattr(seq, "values", seq))


def cross_correlation(y1, y2) -> CorrelationProfile:
    """Zero-padded correlation; exact when the inputs are exact numbers."""
    a, b = _values(y1), _values(y2)
    if len(a) != len(b):
        raise ValueError(f"sequence lengths differ ({len(a)} vs {len(b)})")
    n = len(a)
    shifts = tuple(range(-(n - 1), n))
    values = []
    for i in shifts:
        lo, hi = max(0, -i), min(n, n - i)
        values.append(sum((a[k] * b[k + i] for k in range(lo, hi)), 0 * a[0]))
    return CorrelationProfile(shifts, tuple(values))


def best_shifts(profile: CorrelationProfile, tol: float = 1e-9) -> list[int]:
    """Every shift within ``tol`` of the maximum, smallest |shift| first.

    Values are compared exactly when ``tol`` is 0.
    """
    top = max(profile.values)
    winners = [s for s, r in zip(profile.shifts, profile.values) if top - r <= tol]
    return sorted(winners, key=lambda s: (abs(s), s))
