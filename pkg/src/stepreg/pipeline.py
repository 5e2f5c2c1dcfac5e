"""End-to-end runs: simulate, corrupt, align/segment, estimate and score."""

from __future__ import annotations

import csv
import json
import time
import warnings
from functools import lru_cache
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .config import ExperimentConfig
from .difference import difference_sequence
from .dp_align import build_graph, longest_paths, path_to_segmentation, to_dot
from .estimator import (
    PreconditionWarning,
    classify_indices,
    energy_between,
    error_energy,
    interval_bounds,
    reconstruct,
)
from .noise import apply_noise
from .segmentation import Segmentation
from .signal_model import PiecewiseConstantFunction, SamplingGrid, region_counts, sample
from .simulate import true_boundaries
from .threshold import estimate_levels, search_threshold
from .xcorr import best_shifts, cross_correlation


def num(x):
    """JSON-friendly scalar: ints stay ints, everything else becomes float."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return float(x)


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(jsonable(v) for v in obj)
    return num(obj)


# ---------------------------------------------------------------- estimates


@dataclass(frozen=True)
class Estimate:
    """One (segmentation, reference index) reconstruction candidate."""

    source: int
    l: int
    levels: tuple
    predicted_energy: object
    reconstruction: object
    precondition_ok: bool
    overlapping: bool
    energy_vs_truth: object = None
    energy_vs_reference: object = None

    def to_json(self) -> dict:
        return jsonable(
            {
                "source": self.source,
                "l": self.l,
                "levels": self.levels,
                "predicted_error_energy_T": self.predicted_energy,
                "energy_vs_truth_T": self.energy_vs_truth,
                "energy_vs_reference_T": self.energy_vs_reference,
                "precondition_ok": self.precondition_ok,
                "overlapping_intervals": self.overlapping,
                "reconstruction": self.reconstruction.to_json(),
            }
        )


@lru_cache(maxsize=256)
def truth_reconstruction(f: PiecewiseConstantFunction, grids, l: int):
    """Estimate built from the true levels and the true count patterns."""
    c1, c2 = (region_counts(f, g) for g in grids)
    cls = classify_indices(c1, c2, l)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PreconditionWarning)
        return reconstruct(f.levels, interval_bounds(cls))


def estimate_candidates(y1, y2, seg_pairs, ls=None, truth=None, reference=None) -> list[Estimate]:
    """Reconstructions for every segmentation pair and reference index.

    ``truth`` is an optional ``(f, grids)`` pair; when given, each candidate
    is scored against the true-count reconstruction at the same l.
    ``reference`` is an optional fixed reconstruction to score against.
    Energies are in units of T.
    """
    out = []
    for k, (s1, s2) in enumerate(seg_pairs):
        if s1.m < 1 or s1.m != s2.m:
            continue
        levels = estimate_levels(y1, y2, s1, s2).values
        for l in ls if ls is not None else range(s1.m + 1):
            if l > s1.m:
                continue
            try:
                cls = classify_indices(s1.region_counts, s2.region_counts, l)
            except ValueError:
                continue
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", PreconditionWarning)
                try:
                    rec = reconstruct(levels, interval_bounds(cls))
                except ValueError:
                    continue
            overlapping = any(issubclass(w.category, PreconditionWarning) for w in caught)
            vs_truth = None
            if truth is not None:
                f, grids = truth
                if l <= f.m:
                    vs_truth = energy_between(rec, truth_reconstruction(f, grids, l))
            vs_ref = energy_between(rec, reference) if reference is not None else None
            out.append(
                Estimate(
                    k,
                    l,
                    tuple(levels),
                    error_energy(cls, levels),
                    rec,
                    cls.precondition_ok,
                    overlapping,
                    vs_truth,
                    vs_ref,
                )
            )
    return out


def best_by(estimates, attr: str):
    scored = [e for e in estimates if getattr(e, attr) is not None]
    if not scored:
        return None
    return min(scored, key=lambda e: (getattr(e, attr), e.source, e.l))


# ------------------------------------------------------------------ methods


def xcorr_summary(y1, y2, tol=1e-9) -> dict:
    prof = cross_correlation(y1, y2)
    shifts = best_shifts(prof, tol)
    return {"profile": prof.as_dict(), "best_shifts": shifts, "offset": shifts[0]}


def ladder_rows(search) -> list[dict]:
    return [
        {
            "v": c.v,
            "lower": c.lower,
            "upper": c.upper,
            "accepted": c.verdict.accepted,
            "criterion": c.verdict.criterion,
            "reason": c.verdict.reason,
        }
        for c in search.ladder
    ]


def run_threshold(y1, y2, ls=None, truth=None, reference=None) -> dict:
    d1, d2 = difference_sequence(y1), difference_sequence(y2)
    res = search_threshold(d1, d2)
    out = {
        "feasible": res.feasible,
        "v": res.v,
        "accepted": res.accepted,
        "ladder": ladder_rows(res),
        "segmentation": None,
        "levels": None,
        "estimates": [],
        "_search": res,
    }
    if res.feasible:
        out["segmentation"] = (res.seg1, res.seg2)
        out["levels"] = estimate_levels(y1, y2, res.seg1, res.seg2).values
        out["estimates"] = estimate_candidates(y1, y2, [(res.seg1, res.seg2)], ls, truth, reference)
    return out


def run_dp(y1, y2, v, kind="w1", cap=64, ls=None, truth=None, reference=None) -> dict:
    d1, d2 = difference_sequence(y1), difference_sequence(y2)
    graph = build_graph(d1, d2, v, kind)
    res = longest_paths(graph, cap)
    paths = []
    pairs = []
    for p in res.paths:
        entry = {"vertices": [list(u) if not isinstance(u, str) else u for u in p], "valid": False}
        try:
            ps = path_to_segmentation(p)
        except ValueError as exc:
            entry["error"] = str(exc)
        else:
            entry.update(
                offset=ps.offset,
                m=ps.m,
                valid=ps.valid,
                segmentation=(ps.seg1.boundaries, ps.seg2.boundaries),
            )
            if ps.valid:
                entry["levels"] = estimate_levels(y1, y2, ps.seg1, ps.seg2).values
        paths.append(entry)
        pairs.append((ps.seg1, ps.seg2) if entry["valid"] else (Segmentation(()), Segmentation(())))
    return {
        "weight": res.weight,
        "count": res.count,
        "truncated": res.truncated,
        "paths": paths,
        "estimates": estimate_candidates(y1, y2, pairs, ls, truth, reference),
        "_graph": graph,
        "_result": res,
        "_pairs": pairs,
    }


def public(section: dict) -> dict:
    """Drop in-memory helpers (keys starting with an underscore)."""
    out = {}
    for k, v in section.items():
        if k.startswith("_"):
            continue
        if k == "estimates":
            v = [e.to_json() for e in v]
        elif k == "segmentation" and v is not None:
            v = [getattr(s, "boundaries", s) for s in v]
        out[k] = jsonable(v)
    return out


# ----------------------------------------------------------- configured runs


def build_problem(cfg: ExperimentConfig):
    fc, gc = cfg.function, cfg.grids
    f = PiecewiseConstantFunction.from_lengths_in_T(fc.levels, fc.lengths_in_T, fc.T)
    grids = tuple(SamplingGrid(o * fc.T, gc.N, fc.T) for o in gc.offsets_in_T)
    clean = tuple(sample(f, g) for g in grids)
    return f, grids, clean


def corrupt(clean, cfg: ExperimentConfig, trial: int = 0):
    specs = cfg.noise.specs()
    return tuple(apply_noise(c, s, seed=cfg.seed, stream=2 * trial + k) for k, (c, s) in enumerate(zip(clean, specs)))


def _truth(f, grids):
    try:
        return tuple(true_boundaries(f, g) for g in grids)
    except ValueError:
        return None


def run_config(cfg: ExperimentConfig) -> dict:
    t0 = time.perf_counter()
    f, grids, clean = build_problem(cfg)
    y1, y2 = corrupt(clean, cfg)
    truth = _truth(f, grids)
    try:
        for g in grids:
            region_counts(f, g)
        scoring = (f, grids)
    except ValueError:
        scoring = None
    report = {
        "config": cfg.to_dict(),
        "sequences": {"clean": [c.values for c in clean], "noisy": [y1.values, y2.values]},
        "truth": {
            "boundaries": [s.boundaries for s in truth] if truth else None,
            "levels": f.levels,
        },
        "methods": {},
    }
    if "xcorr" in cfg.methods:
        report["methods"]["xcorr"] = xcorr_summary(y1, y2, cfg.tol)
    if "threshold" in cfg.methods:
        report["methods"]["threshold"] = run_threshold(y1, y2, cfg.l, scoring)
    if "dp" in cfg.methods:
        report["methods"]["dp"] = run_dp(y1, y2, cfg.v, cfg.weight, cfg.max_paths, cfg.l, scoring)
    for name in ("threshold", "dp"):
        sec = report["methods"].get(name)
        if sec is None:
            continue
        best = best_by(sec["estimates"], "predicted_energy")
        sec["selected"] = None if best is None else {"source": best.source, "l": best.l}
    report["timing"] = {"wall_clock_s": time.perf_counter() - t0}
    return report


def serialise(report: dict) -> dict:
    out = {}
    for k, v in report.items():
        if k == "methods":
            out[k] = {name: public(sec) for name, sec in v.items()}
        else:
            out[k] = jsonable(v)
    return out


# --------------------------------------------------------------- reporting


def emit_report(
    report: dict,
    path,
    tables: dict | None = None,
    include_timing: bool = False,
    csv_dir=None,
) -> list[Path]:
    """Write ``report`` as JSON and each entry of ``tables`` as a CSV.

    CSVs go next to the JSON file unless ``csv_dir`` is given.

    Timing is left out unless asked for, so equal inputs give identical files.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = {k: v for k, v in report.items() if include_timing or k != "timing"}
    path.write_text(json.dumps(jsonable(body), indent=2, sort_keys=True) + "\n")
    written = [path]
    for name, rows in (tables or {}).items():
        folder = Path(csv_dir) if csv_dir else path.parent
        target = folder / f"{path.stem}_{name}.csv"
        write_csv(rows, target)
        written.append(target)
    return written


def write_csv(rows, target):
    rows = [jsonable(r) for r in rows]
    target = Path(target)
    target.parent.mkdir(parents=True, exist_ok=True)
    cols = list(rows[0]) if rows else []
    with target.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})


def load_summary(path) -> dict:
    return json.loads(Path(path).read_text())


# ---------------------------------------------------------- Monte Carlo


def _boundary_errors(found: Segmentation, true: Segmentation):
    if found.m != true.m:
        return None
    return [abs(a - b) for a, b in zip(found.boundaries, true.boundaries)]


def _false_points(found: Segmentation, true: Segmentation) -> int:
    return len(set(found.boundaries) - set(true.boundaries))


def _score(pair, truth) -> dict:
    if pair is None:
        return {"found": False}
    errs = [_boundary_errors(s, t) for s, t in zip(pair, truth)]
    return {
        "found": True,
        "exact": tuple(s.boundaries for s in pair) == tuple(t.boundaries for t in truth),
        "errors": None if any(e is None for e in errs) else errs[0] + errs[1],
        "false_points": sum(_false_points(s, t) for s, t in zip(pair, truth)),
        "proposed": sum(len(s.boundaries) for s in pair),
    }


def _trial(cfg: ExperimentConfig, f, grids, clean, truth, t: int) -> dict:
    y1, y2 = corrupt(clean, cfg, t)
    rec = {"trial": t}
    scoring = (f, grids)
    if "xcorr" in cfg.methods:
        rec["xcorr"] = {"offset": xcorr_summary(y1, y2, cfg.tol)["offset"]}
    if "threshold" in cfg.methods:
        th = run_threshold(y1, y2, cfg.l, scoring)
        r = _score(th["segmentation"], truth)
        best = best_by(th["estimates"], "predicted_energy")
        r["energy"] = None if best is None else best.energy_vs_truth
        rec["threshold"] = r
    if "dp" in cfg.methods:
        dp = run_dp(y1, y2, cfg.v, cfg.weight, cfg.max_paths, cfg.l, scoring)
        best = best_by(dp["estimates"], "predicted_energy")
        pair = dp["_pairs"][best.source] if best is not None else None
        r = _score(pair, truth)
        r["energy"] = None if best is None else best.energy_vs_truth
        r["ties"] = dp["count"]
        rec["dp"] = r
    return rec


def aggregate(records) -> dict:
    """Order-independent summary of per-trial records."""
    records = sorted(records, key=lambda r: r["trial"])
    n = len(records)
    out = {"trials": n}
    if n and "xcorr" in records[0]:
        shifts = Counter(r["xcorr"]["offset"] for r in records)
        out["xcorr"] = {"offset_histogram": {str(k): shifts[k] for k in sorted(shifts)}}
    for name in ("threshold", "dp"):
        if not n or name not in records[0]:
            continue
        rs = [r[name] for r in records]
        found = [r for r in rs if r["found"]]
        hist = Counter()
        for r in found:
            if r["errors"] is None:
                hist["m_mismatch"] += 1
            else:
                hist.update(str(e) for e in r["errors"])
        proposed = sum(r["proposed"] for r in found)
        energies = [r["energy"] for r in found if r["energy"] is not None]
        sec = {
            "feasible_rate": len(found) / n,
            "exact_segmentation_rate": sum(r["exact"] for r in found) / n,
            "false_segmentation_rate": (sum(r["false_points"] for r in found) / proposed) if proposed else 0.0,
            "false_points": sum(r["false_points"] for r in found),
            "boundary_error_histogram": dict(sorted(hist.items())),
            "mean_energy_vs_truth_T": (sum(map(float, energies)) / len(energies)) if energies else None,
        }
        if name == "dp":
            sec["tie_rate"] = sum(r["ties"] > 1 for r in rs) / n
        out[name] = sec
    return out


def run_monte_carlo(cfg: ExperimentConfig, trials: int | None = None) -> dict:
    trials = cfg.trials if trials is None else trials
    if not cfg.noise.specs()[0].stochastic:
        raise ValueError("Monte Carlo needs a stochastic noise spec")
    t0 = time.perf_counter()
    f, grids, clean = build_problem(cfg)
    truth = tuple(true_boundaries(f, g) for g in grids)
    for g in grids:
        region_counts(f, g)
    records = [_trial(cfg, f, grids, clean, truth, t) for t in range(trials)]
    return {
        "config": cfg.to_dict(),
        "summary": aggregate(records),
        "records": records,
        "timing": {"wall_clock_s": time.perf_counter() - t0},
    }


def mc_rows(mc: dict) -> list[dict]:
    rows = []
    for r in mc["records"]:
        for name in ("threshold", "dp"):
            if name in r:
                x = r[name]
                rows.append(
                    {
                        "trial": r["trial"],
                        "method": name,
                        "found": x["found"],
                        "exact": x.get("exact"),
                        "false_points": x.get("false_points"),
                        "energy_vs_truth_T": x.get("energy"),
                    }
                )
    return rows


def dot_for(dp_section: dict) -> str:
    return to_dot(dp_section["_graph"], dp_section["_result"].paths)


def path_label(path) -> str:
    return " -> ".join(u if isinstance(u, str) else str(tuple(u)) for u in path)


__all__ = [
    "Estimate",
    "aggregate",
    "best_by",
    "build_problem",
    "corrupt",
    "emit_report",
    "estimate_candidates",
    "jsonable",
    "load_summary",
    "run_config",
    "run_dp",
    "run_monte_carlo",
    "run_threshold",
    "serialise",
    "truth_reconstruction",
    "write_csv",
    "xcorr_summary",
]
