"""End-to-end reproduction of the four-region worked example with pass/fail checks."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from . import worked_example as wx
from .dp_align import Align, Seg, START, TERMINAL
from .estimator import classify_indices, energy_between, interval_bounds, reconstruct
from .pipeline import best_by, jsonable, public, run_dp, run_threshold, xcorr_summary
from .segmentation import Segmentation
from .threshold import estimate_levels
from .xcorr import best_shifts, cross_correlation

XS = (Fraction(0), Fraction(3, 20), Fraction(3, 10), Fraction(49, 100), Fraction(1, 2))
THRESHOLD_XS = (Fraction(0), Fraction(1, 10), Fraction(1, 5), Fraction(3, 10), Fraction(2, 5), Fraction(49, 100))
DP_XS = (Fraction(0), Fraction(1, 5), Fraction(49, 100))

OPTIMAL_PATH = (
    START,
    Align(0, 0),
    Seg(2, 2, 0),
    Seg(4, 3, 1),
    Seg(5, 5, 0),
    Seg(7, 6, 1),
    Seg(8, 7, 1),
    TERMINAL,
)
TIED_PATH_SEGMENTATIONS = {
    ((2, 3, 4, 5, 6, 8), (2, 3, 4, 5, 6, 7)),
    ((2, 3, 4, 5, 7, 8), (2, 3, 4, 5, 6, 7)),
}


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def expected_levels(x):
    return (1 - x / 3, -1 + x / 3, 1 - x / 3, -1)


def _segs():
    return tuple(Segmentation(b) for b in wx.TRUE_BOUNDARIES)


def reference_estimate(x, l=2):
    """Reconstruction at reference index ``l`` from the true segmentation."""
    y1, y2 = wx.observed_pair(x)
    s1, s2 = _segs()
    levels = estimate_levels(y1, y2, s1, s2).values
    return reconstruct(levels, interval_bounds(classify_indices(s1, s2, l)))


def table_1_check(samples: int = 101, tol: float = 1e-9) -> Check:
    worst = 0.0
    for k in range(samples):
        x = k * 0.5 / (samples - 1)
        y1, y2 = wx.observed_pair(x)
        prof = cross_correlation(y1, y2)
        for i in range(-8, 9):
            worst = max(worst, abs(prof[i] - wx.table_1_value(i, x)))
    return Check("table 1", worst <= tol, f"max |r - polynomial| = {worst:.3g} over {samples} x values")


def argmax_check(tol: float = 1e-9) -> Check:
    got = {}
    for x in (0.10, 0.20, wx.ARGMAX_SWITCH):
        y1, y2 = wx.observed_pair(x)
        got[x] = best_shifts(cross_correlation(y1, y2), tol)
    ok = got[0.10][0] == -1 and got[0.20][0] == -3 and {-1, -3} <= set(got[wx.ARGMAX_SWITCH])
    return Check(
        "argmax transition",
        ok,
        f"x=0.1 -> {got[0.10]}, x=0.2 -> {got[0.20]}, x={wx.ARGMAX_SWITCH:.6f} -> {got[wx.ARGMAX_SWITCH]}",
    )


def threshold_checks(tol: float = 1e-12) -> list[Check]:
    out = []
    for x in THRESHOLD_XS:
        y1, y2 = wx.observed_pair(x)
        res = run_threshold(y1, y2)["_search"]
        chosen = res.chosen
        ok = (
            res.feasible
            and chosen.lower < 1 <= chosen.upper
            and (res.seg1.boundaries, res.seg2.boundaries) == wx.TRUE_BOUNDARIES
            and res.seg1.m == 4
        )
        levels = estimate_levels(y1, y2, res.seg1, res.seg2).values if res.feasible else ()
        if ok:
            ok = all(abs(a - b) <= tol for a, b in zip(levels, expected_levels(x)))
        out.append(
            Check(
                f"threshold x={float(x):g}",
                ok,
                f"v={float(res.v) if res.v is not None else None}, levels={[float(g) for g in levels]}",
            )
        )
    res = run_threshold(*wx.observed_pair(Fraction(1, 2)))["_search"]
    sign_ok = count_ok = True
    for c in res.ladder:
        if c.upper <= Fraction(1, 2) or c.lower >= 2:
            continue
        if c.upper <= 1:
            sign_ok &= c.verdict.criterion == "sign"
        else:
            count_ok &= c.verdict.reason == "unequal counts (4 vs 1)"
    out.append(
        Check(
            "threshold x=0.5 infeasible",
            not res.feasible and sign_ok and count_ok,
            "; ".join(res.failure_reasons()),
        )
    )
    return out


def dp_checks() -> list[Check]:
    out = []
    for x in DP_XS:
        dp = run_dp(*wx.observed_pair(x), v=1)
        res = dp["_result"]
        ok = res.weight == 5 and res.count == 1 and res.paths == (OPTIMAL_PATH,)
        out.append(Check(f"dp x={float(x):g}", ok, f"weight {res.weight}, {res.count} path(s)"))
    dp = run_dp(*wx.observed_pair(Fraction(1, 2)), v=Fraction(3, 4))
    res = dp["_result"]
    segs = {tuple(tuple(s) for s in p["segmentation"]) for p in dp["paths"] if p["valid"]}
    ok = res.weight == 6 and res.count == 2 and segs == TIED_PATH_SEGMENTATIONS and all(p["m"] == 5 for p in dp["paths"])
    out.append(Check("dp x=0.5 tie", ok, f"weight {res.weight}, {res.count} path(s), m=5"))
    return out


def energy_checks() -> tuple[list[Check], dict]:
    ref = reference_estimate(Fraction(0))
    limit = reference_estimate(Fraction(1, 2))
    e1 = energy_between(ref, limit)
    dp = run_dp(*wx.observed_pair(Fraction(1, 2)), v=Fraction(3, 4), reference=ref)
    best_ref = best_by(dp["estimates"], "energy_vs_reference")
    best_pred = best_by(dp["estimates"], "predicted_energy")
    tie_path = next(k for k, p in enumerate(dp["paths"]) if Seg(7, 6, 1) in dp["_result"].paths[k])
    checks = [
        Check("energy threshold limit", e1 == Fraction(11, 144), f"{e1} T"),
        Check(
            "energy dp tie",
            best_ref.energy_vs_reference == Fraction(41, 144) and best_ref.l == 3 and best_ref.source == tie_path,
            f"{best_ref.energy_vs_reference} T at path {best_ref.source}, l={best_ref.l}",
        ),
    ]
    info = {
        "threshold_limit_T": e1,
        "dp_best_vs_reference": {
            "path": best_ref.source,
            "l": best_ref.l,
            "energy_T": best_ref.energy_vs_reference,
        },
        "dp_best_by_predicted_error": {
            "path": best_pred.source,
            "l": best_pred.l,
            "predicted_T": best_pred.predicted_energy,
            "energy_vs_reference_T": best_pred.energy_vs_reference,
        },
        "dp_candidates": [
            {"path": e.source, "l": e.l, "energy_vs_reference_T": e.energy_vs_reference, "predicted_T": e.predicted_energy}
            for e in dp["estimates"]
        ],
    }
    return checks, info


def per_x_sections() -> dict:
    out = {}
    for x in XS:
        y1, y2 = wx.observed_pair(x)
        v = Fraction(3, 4) if x == Fraction(1, 2) else 1
        out[str(float(x))] = {
            "x": x,
            "y": [y1.values, y2.values],
            "xcorr": xcorr_summary(y1, y2),
            "threshold": public(run_threshold(y1, y2)),
            "dp": public(run_dp(y1, y2, v=v)) | {"v": v},
        }
    return out


def run_paper_repro() -> dict:
    """Every check on the worked example plus the per-x method outputs."""
    t0 = time.perf_counter()
    checks = [table_1_check(), argmax_check(), *threshold_checks(), *dp_checks()]
    energy, info = energy_checks()
    checks += energy
    report = {
        "passed": all(c.passed for c in checks),
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
        "energies": jsonable(info),
        "runs": jsonable(per_x_sections()),
        "timing": {"wall_clock_s": time.perf_counter() - t0},
    }
    report["_checks"] = checks
    return report
