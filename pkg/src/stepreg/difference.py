"""First-order difference sequences and their non-zero structure."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import accumulate


@dataclass(frozen=True)
class DifferenceSequence:
    values: tuple
    source: object = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    def at(self, position: int):
        """Component at a 1-based position."""
        return self.values[position - 1]


@dataclass(frozen=True)
class SignatureEntry:
    position: int
    value: object
    sign: int


@dataclass(frozen=True)
class NonzeroSignature:
    entries: tuple

    def __len__(self):
        return len(self.entries)

    @property
    def positions(self) -> tuple:
        return tuple(e.position for e in self.entries)

    @property
    def values(self) -> tuple:
        return tuple(e.value for e in self.entries)

    @property
    def signs(self) -> tuple:
        return tuple(e.sign for e in self.entries)


def difference_sequence(seq) -> DifferenceSequence:
    """d[n] = y[n] - y[n-1] with y[0] = 0."""
    values = tuple(getattr(seq, "values", seq))
    if not values:
        raise ValueError("empty sequence")
    prev = (0 * values[0],) + values[:-1]
    return DifferenceSequence(tuple(a - b for a, b in zip(values, prev)), source=seq)


def nonzero_signature(d, zero_tolerance=0) -> NonzeroSignature:
    values = tuple(getattr(d, "values", d))
    entries = tuple(
        SignatureEntry(k, v, 1 if v > 0 else -1)
        for k, v in enumerate(values, start=1)
        if abs(v) > zero_tolerance
    )
    return NonzeroSignature(entries)


def integrate(d) -> tuple:
    """Prefix sums; inverts ``difference_sequence``."""
    return tuple(accumulate(getattr(d, "values", d)))
