"""Segmentations of a sample sequence and the pairwise count constraints."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Segmentation:
    """1-based positions of the first sample after each discontinuity.

    ``boundaries`` has m + 1 entries: the starts of regions 1..m and the start
    of the trailing all-zero region.
    """

    boundaries: tuple

    def __post_init__(self):
        b = tuple(int(x) for x in self.boundaries)
        object.__setattr__(self, "boundaries", b)
        if any(q <= p for p, q in zip(b, b[1:])):
            raise ValueError(f"boundaries must be strictly increasing: {b}")

    @property
    def m(self) -> int:
        return len(self.boundaries) - 1

    @property
    def valid(self) -> bool:
        return self.m >= 1

    @property
    def region_counts(self) -> tuple:
        b = self.boundaries
        return tuple(q - p for p, q in zip(b, b[1:]))

    def region_slices(self):
        """0-based slices of the samples belonging to each region."""
        b = self.boundaries
        return [slice(p - 1, q - 1) for p, q in zip(b, b[1:])]


def count_constraint_violation(eta1, eta2) -> tuple[str, str] | None:
    """First violated pairwise count constraint as (criterion, message), or None.

    Per-region counts of two grids differ by at most one, and so does every
    cumulative count over consecutive regions.
    """
    eta1, eta2 = tuple(eta1), tuple(eta2)
    if len(eta1) != len(eta2):
        return "region_number", f"region numbers differ ({len(eta1)} vs {len(eta2)})"
    for k, (a, b) in enumerate(zip(eta1, eta2), start=1):
        if abs(a - b) > 1:
            return "per_region", f"region {k} counts differ by more than one ({a} vs {b})"
    m = len(eta1)
    for i in range(m):
        s1 = s2 = 0
        for j in range(i, m):
            s1 += eta1[j]
            s2 += eta2[j]
            if abs(s1 - s2) > 1:
                return "cumulative", (
                    f"cumulative counts over regions {i + 1}..{j + 1} differ by more than one ({s1} vs {s2})"
                )
    return None
