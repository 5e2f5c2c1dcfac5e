"""Thresholded difference sequences: alignment, segmentation and level estimates."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .difference import DifferenceSequence, NonzeroSignature, nonzero_signature
from .segmentation import Segmentation, count_constraint_violation


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    criterion: str | None = None
    reason: str = ""


@dataclass(frozen=True)
class ThresholdedPair:
    v: float
    t1: DifferenceSequence
    t2: DifferenceSequence
    sig1: NonzeroSignature
    sig2: NonzeroSignature


@dataclass(frozen=True)
class Candidate:
    """One rung of the threshold ladder.

    Every v in (``lower``, ``upper``] zeroes the same components as ``v``.
    """

    v: float
    lower: float
    upper: float
    verdict: Verdict


@dataclass(frozen=True)
class ThresholdSearch:
    feasible: bool
    ladder: tuple
    v: float | None = None
    pair: ThresholdedPair | None = None
    seg1: Segmentation | None = None
    seg2: Segmentation | None = None

    @property
    def accepted(self) -> tuple:
        return tuple(c.v for c in self.ladder if c.verdict.accepted)

    @property
    def chosen(self) -> Candidate | None:
        return next((c for c in self.ladder if c.verdict.accepted), None)

    def failure_reasons(self) -> list[str]:
        return [f"v={float(c.v):g}: {c.verdict.reason}" for c in self.ladder if not c.verdict.accepted]


@dataclass(frozen=True)
class LevelEstimate:
    values: tuple
    counts: tuple = field(default=())


def apply_threshold(d, v) -> DifferenceSequence:
    """Zero every component with magnitude strictly below ``v``."""
    if not v > 0:
        raise ValueError("threshold must be positive")
    values = tuple(getattr(d, "values", d))
    zero = 0 * values[0] if values else 0
    return DifferenceSequence(tuple(x if abs(x) >= v else zero for x in values), source=d)


def compatibility_check(sig1: NonzeroSignature, sig2: NonzeroSignature) -> Verdict:
    """Whether two thresholded signatures can mark the same discontinuities."""
    n1, n2 = len(sig1), len(sig2)
    if n1 != n2:
        return Verdict(False, "count", f"unequal counts ({n1} vs {n2})")
    if n1 < 2:
        return Verdict(False, "count", f"too few non-zero terms ({n1})")
    bad = [k for k, (a, b) in enumerate(zip(sig1.signs, sig2.signs), start=1) if a != b]
    if bad:
        which = ", ".join(map(str, bad))
        return Verdict(False, "sign", f"signs differ for pairs {which}")
    eta1 = Segmentation(sig1.positions).region_counts
    eta2 = Segmentation(sig2.positions).region_counts
    violation = count_constraint_violation(eta1, eta2)
    if violation:
        return Verdict(False, *violation)
    return Verdict(True, None, f"consistent, m={n1 - 1}")


def threshold_pair(d1, d2, v) -> ThresholdedPair:
    t1, t2 = apply_threshold(d1, v), apply_threshold(d2, v)
    return ThresholdedPair(v, t1, t2, nonzero_signature(t1), nonzero_signature(t2))


def candidate_thresholds(d1, d2) -> list[tuple]:
    """(v, lower, upper) rungs: midpoints between consecutive distinct magnitudes.

    A rung below the smallest magnitude is added when that magnitude is
    positive.
    """
    mags = sorted({abs(x) for x in (*getattr(d1, "values", d1), *getattr(d2, "values", d2))})
    rungs = []
    if mags and mags[0] > 0:
        rungs.append((mags[0] / 2, 0 * mags[0], mags[0]))
    for a, b in zip(mags, mags[1:]):
        rungs.append(((a + b) / 2, a, b))
    return rungs


def search_threshold(d1, d2) -> ThresholdSearch:
    """Raise the threshold from the smallest magnitude up; stop at the first fit."""
    if len(d1) != len(d2):
        raise ValueError("difference sequences differ in length")
    ladder = []
    first = None
    for v, lo, hi in candidate_thresholds(d1, d2):
        pair = threshold_pair(d1, d2, v)
        verdict = compatibility_check(pair.sig1, pair.sig2)
        ladder.append(Candidate(v, lo, hi, verdict))
        if verdict.accepted and first is None:
            first = pair
    if first is None:
        return ThresholdSearch(False, tuple(ladder))
    return ThresholdSearch(
        True,
        tuple(ladder),
        first.v,
        first,
        Segmentation(first.sig1.positions),
        Segmentation(first.sig2.positions),
    )


def estimate_levels(y1, y2, seg1: Segmentation, seg2: Segmentation) -> LevelEstimate:
    """Average the samples of each region pooled over both sequences."""
    if seg1.m != seg2.m:
        raise ValueError(f"segmentations disagree on m ({seg1.m} vs {seg2.m})")
    a = tuple(getattr(y1, "values", y1))
    b = tuple(getattr(y2, "values", y2))
    values, counts = [], []
    for s1, s2 in zip(seg1.region_slices(), seg2.region_slices()):
        pooled = a[s1] + b[s2]
        total = sum(pooled[1:], pooled[0])
        values.append(Fraction(total, len(pooled)) if isinstance(total, int) else total / len(pooled))
        counts.append(len(pooled))
    return LevelEstimate(tuple(values), tuple(counts))


def max_jump(levels) -> float:
    """Largest |g_{k+1} - g_k| with zero padding; simulation-side diagnostic only."""
    g = (0, *levels, 0)
    return max(abs(b - a) for a, b in zip(g, g[1:]))
