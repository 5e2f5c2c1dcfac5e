import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import trapezoid

from stepreg import worked_example as wx
from stepreg.estimator import (
    IntervalBounds,
    PreconditionWarning,
    classify_indices,
    energy_between,
    error_energy,
    interval_bounds,
    reconstruct,
)
from stepreg.pipeline import run_dp
from stepreg.segmentation import Segmentation
from stepreg.signal_model import translate_reference
from stepreg.simulate import random_instance
from stepreg.threshold import estimate_levels

ETA1, ETA2 = (2, 1, 2, 1), (1, 2, 1, 1)
SEGS = tuple(Segmentation(b) for b in wx.TRUE_BOUNDARIES)


def example_estimate(x, l=2):
    y1, y2 = wx.observed_pair(Fraction(x))
    levels = estimate_levels(y1, y2, *SEGS).values
    return reconstruct(levels, interval_bounds(classify_indices(*SEGS, l)))


def display_oracle(levels, bounds):
    """Piecewise form for disjoint intervals, written directly from the bounds."""
    m = bounds.m
    g = (0, *levels, 0)
    L, R = bounds.left, bounds.right

    def at(t):
        for i in range(m + 1):
            if i != bounds.l and L[i] < t < R[i]:
                return (g[i] + g[i + 1]) / 2
        if t < L[0] or t > R[m]:
            return 0
        for i in range(1, m + 1):
            lo = R[i - 1]
            hi = L[i] if i != bounds.l else 0
            if lo <= t <= hi:
                return g[i]
        return 0

    return at


class TestClassify:
    def test_example(self):
        cls = classify_indices(ETA1, ETA2, 2)
        assert cls.U == {0} and cls.U_c == {1, 3, 4}
        assert cls.C == (3, 2, 0, 2, 3)
        assert cls.precondition_ok

    def test_accepts_segmentations(self):
        assert classify_indices(*SEGS, 2) == classify_indices(ETA1, ETA2, 2)

    @pytest.mark.parametrize("l", range(5))
    def test_identical_counts(self, l):
        cls = classify_indices(ETA1, ETA1, l)
        assert cls.U == set(range(5)) - {l} and not cls.U_c
        assert cls.C[l] == 0 and all(c > 0 for i, c in enumerate(cls.C) if i != l)

    def test_partition(self):
        for l in range(5):
            cls = classify_indices(ETA1, ETA2, l)
            assert cls.U | cls.U_c | {l} == set(range(5))
            assert not cls.U & cls.U_c

    def test_precondition_flagged(self):
        cls = classify_indices((1, 1), (1, 1), 0)
        assert not cls.precondition_ok and cls.issues == (2,)

    def test_errors(self):
        with pytest.raises(ValueError, match="more than one"):
            classify_indices((3, 1), (1, 1), 0)
        with pytest.raises(ValueError):
            classify_indices((1, 1), (1,), 0)
        with pytest.raises(IndexError):
            classify_indices((1, 1), (1, 1), 3)


class TestBounds:
    def test_example(self):
        b = interval_bounds(classify_indices(ETA1, ETA2, 2))
        assert [b.interval(i) for i in (0, 1, 3, 4)] == [(-4, -2), (-2, -1), (1, 2), (2, 3)]
        assert b.interval(2) == (0, 0)

    def test_rational_T(self):
        b = interval_bounds(classify_indices(ETA1, ETA2, 2), T=Fraction(1, 3))
        assert b.interval(0) == (Fraction(-4, 3), Fraction(-2, 3))

    def test_width_law_and_containment(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            inst = random_instance(rng)
            c1, c2 = inst.counts
            for l in range(inst.f.m + 1):
                cls = classify_indices(c1, c2, l)
                b = interval_bounds(cls, inst.f.sampling_interval)
                D = translate_reference(inst.f, l).discontinuities
                for i in range(inst.f.m + 1):
                    if i == l:
                        continue
                    lo, hi = b.interval(i)
                    assert lo < D[i] < hi
                    assert b.width(i) == (1 if i in cls.U_c else 2) * inst.f.sampling_interval


class TestReconstruct:
    def test_display_at_03(self):
        r = example_estimate(Fraction(3, 10))
        probes = {Fraction(-3): 0.45, Fraction(1, 2): 0.9, Fraction(-1, 2): -0.9, Fraction(3, 2): -0.05, Fraction(5, 2): -0.5}
        for t, want in probes.items():
            assert r.value_at(t) == Fraction(str(want))
        assert r.value_at(-5) == r.value_at(4) == 0

    def test_display_at_0(self):
        r = example_estimate(0)
        got = [r.value_at(Fraction(t)) for t in ("-3", "0.5", "-0.5", "1.5", "2.5")]
        assert got == [Fraction(1, 2), 1, -1, 0, Fraction(-1, 2)]

    def test_matches_display_oracle(self):
        rng = np.random.default_rng(12)
        checked = 0
        for _ in range(300):
            inst = random_instance(rng)
            c1, c2 = inst.counts
            for l in range(inst.f.m + 1):
                b = interval_bounds(classify_indices(c1, c2, l))
                if any(b.right[i] > b.left[i + 1] for i in range(b.m)):
                    continue
                levels = [Fraction(v).limit_denominator(1000) for v in inst.f.levels]
                r = reconstruct(levels, b)
                oracle = display_oracle(levels, b)
                for t in np.arange(b.left[0] - 1, b.right[-1] + 1.01, 0.25):
                    t = Fraction(float(t))
                    if t in (*b.left, *b.right):
                        continue
                    assert r.value_at(t) == oracle(t)
                checked += 1
        assert checked > 100

    def test_zero_levels(self):
        r = reconstruct((0, 0, 0, 0), interval_bounds(classify_indices(ETA1, ETA2, 2)))
        assert set(r.values) == {0} and set(r.point_values) == {0}

    def test_overlap_uses_midrange(self):
        b = IntervalBounds(0, (0, 1, 1), (0, 3, 3))
        with pytest.warns(PreconditionWarning):
            r = reconstruct((1, 3), b)
        assert r.overlapping
        # at t = 2 the function could be 1, 3 or already back to 0
        assert r.value_at(2) == Fraction(3, 2)
        assert r.value_at(Fraction(1, 2)) == 1

    def test_unorderable_bounds(self):
        with pytest.raises(ValueError, match="no increasing placement"):
            reconstruct((1, 2), IntervalBounds(0, (0, 2, 1), (0, 3, 2)))

    def test_level_count_mismatch(self):
        with pytest.raises(ValueError):
            reconstruct((1, 2), interval_bounds(classify_indices(ETA1, ETA2, 2)))

    def test_json(self):
        doc = example_estimate(0).to_json()
        assert doc["reference_index"] == 2 and doc["breakpoints_in_T"][0] == -4


class TestEnergy:
    def test_error_energy_example(self):
        assert error_energy(classify_indices(ETA1, ETA2, 2), wx.LEVELS) == Fraction(11, 4)

    def test_error_energy_degenerate_and_doubling(self):
        cls = classify_indices((), (), 0)
        assert error_energy(cls, ()) == 0
        all_u = classify_indices((2, 2), (2, 2), 0)
        all_uc = classify_indices((2, 1), (1, 1), 0)
        assert all_u.U == {1, 2} and all_uc.U_c == {1, 2}
        assert error_energy(all_u, (1, -1)) == 2 * error_energy(all_uc, (1, -1))

    def test_error_energy_depends_on_l(self):
        values = {error_energy(classify_indices(ETA1, ETA2, l), wx.LEVELS) for l in range(5)}
        assert len(values) > 1

    def test_threshold_limit_energy(self):
        assert energy_between(example_estimate(0), example_estimate(Fraction(1, 2))) == Fraction(11, 144)

    def test_dp_tie_energy(self):
        ref = example_estimate(0)
        dp = run_dp(*wx.observed_pair(Fraction(1, 2)), v=Fraction(3, 4), reference=ref)
        best = min(dp["estimates"], key=lambda e: e.energy_vs_reference)
        assert (best.energy_vs_reference, best.l) == (Fraction(41, 144), 3)

    def test_energy_scales_with_T(self):
        cls = classify_indices(ETA1, ETA2, 2)
        f0 = reconstruct((1, -1, 1, -1), interval_bounds(cls, Fraction(1, 2)))
        f1 = reconstruct((0, 0, 0, 0), interval_bounds(cls, Fraction(1, 2)))
        g0 = reconstruct((1, -1, 1, -1), interval_bounds(cls))
        g1 = reconstruct((0, 0, 0, 0), interval_bounds(cls))
        assert energy_between(f0, f1) == energy_between(g0, g1) / 2

    def test_matches_numerical_integral(self):
        a, b = example_estimate(0), example_estimate(Fraction(3, 10))
        ts = np.linspace(-6, 5, 11_001)
        fa = np.array([float(a.value_at(Fraction(float(t)))) for t in ts])
        fb = np.array([float(b.value_at(Fraction(float(t)))) for t in ts])
        approx = trapezoid((fa - fb) ** 2, ts)
        assert math.isclose(approx, float(energy_between(a, b)), abs_tol=1e-3)

    @pytest.mark.filterwarnings("ignore::stepreg.estimator.PreconditionWarning")
    def test_metric_properties(self):
        rng = np.random.default_rng(13)
        cls = classify_indices(ETA1, ETA2, 2)
        bounds = interval_bounds(cls)
        fs = [reconstruct([Fraction(int(v), 4) for v in rng.integers(-8, 9, size=4)], bounds) for _ in range(20)]
        others = [example_estimate(Fraction(k, 10), l) for k in range(5) for l in (1, 2, 3)]
        fs += others
        for i in range(len(fs) - 2):
            f, g, h = fs[i], fs[i + 1], fs[i + 2]
            assert energy_between(f, f) == 0
            assert energy_between(f, g) == energy_between(g, f)
            fg, gh, fh = (math.sqrt(energy_between(p, q)) for p, q in ((f, g), (g, h), (f, h)))
            assert fh <= fg + gh + 1e-12

    def test_mixed_T_rejected(self):
        cls = classify_indices(ETA1, ETA2, 2)
        with pytest.raises(ValueError):
            energy_between(reconstruct(wx.LEVELS, interval_bounds(cls)), reconstruct(wx.LEVELS, interval_bounds(cls, 2)))


def test_precondition_warning_is_quiet_for_example():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        example_estimate(Fraction(3, 10))
