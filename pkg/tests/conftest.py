from fractions import Fraction

import numpy as np
import pytest

from stepreg import worked_example as wx
from stepreg.difference import difference_sequence
from stepreg.simulate import add_bounded_noise, min_jump, random_instance


@pytest.fixture
def example():
    return wx.example_function()


@pytest.fixture
def grids():
    return wx.example_grids()


def observed_diffs(x):
    y1, y2 = wx.observed_pair(Fraction(x))
    return difference_sequence(y1), difference_sequence(y2)


def low_noise_instances(n, seed, fraction=0.25):
    """Random instances with per-sample noise below ``fraction`` of the smallest jump.

    With fraction 1/4 the difference noise stays below half the smallest
    jump, so a threshold separating zero and non-zero differences exists.
    """
    rng = np.random.default_rng(seed)
    for _ in range(n):
        inst = random_instance(rng)
        bound = fraction * min_jump(inst.f) * rng.uniform(0.05, 1.0)
        noisy = tuple(add_bounded_noise(c, rng, bound) for c in inst.clean)
        yield inst, noisy


def margin(clean_diffs, noisy_diffs):
    """(low, high) with every zero-set |d| <= low < high <= every non-zero |d|, or None.

    Signs on the non-zero set must also survive the noise.
    """
    zero, keep = [], []
    for delta, d in zip(clean_diffs, noisy_diffs):
        for a, b in zip(delta, d):
            if a == 0:
                zero.append(abs(b))
            elif a * b <= 0:
                return None
            else:
                keep.append(abs(b))
    low, high = max(zero, default=0.0), min(keep)
    return (low, high) if low < high else None
