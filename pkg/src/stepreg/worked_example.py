"""The four-region example used throughout: function, grids, noise and the published correlation table.

Everything is exact (``Fraction``) so the example can be checked without
floating point slack.
"""

from __future__ import annotations

from fractions import Fraction

from .noise import NoiseSpec, apply_noise
from .signal_model import PiecewiseConstantFunction, SamplingGrid, sample

LEVELS = (1, -1, 1, -1)
LENGTHS_IN_T = (Fraction("1.3"), Fraction("1.45"), Fraction("1.35"), Fraction("1.3"))
OFFSETS_IN_T = (Fraction("-0.95"), Fraction("-0.5"))
N = 9
SIGNS_1 = (-1, 1, -1, 1, 1, -1, -1, 1, 1)
SIGNS_2 = (-1, -1, 1, -1, -1, 1, 1, 1, -1)

# Published cross-correlation r[i] = c0 + c1 x + c2 x^2 for each shift i.
TABLE_1 = {
    -8: (0, 0, -1),
    -7: (0, 1, -2),
    -6: (0, 1, 1),
    -5: (-1, -3, 2),
    -4: (2, -3, -3),
    -3: (1, 5, -2),
    -2: (-4, 0, 5),
    -1: (3, -9, 2),
    0: (1, 3, -5),
    1: (-4, 1, 0),
    2: (1, -2, 1),
    3: (0, 2, 2),
    4: (-1, -2, 1),
    5: (0, 4, -2),
    6: (0, 0, 1),
    7: (0, -1, -2),
    8: (0, 0, 1),
}

ARGMAX_SWITCH = None  # filled below: (7 - sqrt(41)) / 4

TRUE_BOUNDARIES = ((2, 4, 5, 7, 8), (2, 3, 5, 6, 7))


def example_function(T=1) -> PiecewiseConstantFunction:
    return PiecewiseConstantFunction.from_lengths_in_T(LEVELS, LENGTHS_IN_T, T)


def example_grids(T=1) -> tuple[SamplingGrid, SamplingGrid]:
    return tuple(SamplingGrid(o * T, N, T) for o in OFFSETS_IN_T)


def noiseless_pair(T=1):
    f = example_function(T)
    return tuple(sample(f, g) for g in example_grids(T))


def noise_patterns(x) -> tuple[tuple, tuple]:
    return tuple(s * x for s in SIGNS_1), tuple(s * x for s in SIGNS_2)


def observed_pair(x, T=1):
    """Corrupted sequences y1, y2 for the fixed sign patterns at amplitude x."""
    e1, e2 = noise_patterns(x)
    g1, g2 = noiseless_pair(T)
    return apply_noise(g1, NoiseSpec.fixed(e1)), apply_noise(g2, NoiseSpec.fixed(e2))


def table_1_value(shift: int, x):
    c0, c1, c2 = TABLE_1[shift]
    return c0 + c1 * x + c2 * x * x


def argmax_switch() -> float:
    """x at which shifts -1 and -3 tie."""
    return (7 - 41 ** 0.5) / 4


ARGMAX_SWITCH = argmax_switch()
