"""Command line interface.

Exit codes: 0 success, 1 failed acceptance check, 2 usage or config error.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import sys
from pathlib import Path

import click

from . import worked_example as wx
from .config import ConfigError, ExperimentConfig, NoiseConfig, load_config
from .difference import difference_sequence, nonzero_signature
from .gaussian import EdgeNoiseContext, expected_w2, monte_carlo_edge_stats, prob_w1_positive
from .pipeline import (
    build_problem,
    corrupt,
    dot_for,
    emit_report,
    jsonable,
    mc_rows,
    path_label,
    run_config,
    run_dp,
    run_monte_carlo,
    run_threshold,
    serialise,
    xcorr_summary,
)


def _fail(msg: str, code: int = 2):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def config_options(f):
    opts = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON experiment config."),
        click.option("--seed", type=int, help="Noise seed."),
        click.option("--noise", "noise_kind", type=click.Choice(["symmetric_binary", "gaussian", "uniform"])),
        click.option("--noise-param", type=float, help="x, sigma or half width, by noise kind."),
        click.option("--x", "example_x", type=float, help="Use the fixed worked-example noise patterns at amplitude x."),
        click.option("--threshold", "v", type=float, help="Edge-weight threshold v."),
        click.option("--weight", type=click.Choice(["w1", "w2", "w3"])),
        click.option("--max-paths", type=int, help="Cap on enumerated longest paths."),
        click.option("-l", "--reference", "ls", type=int, multiple=True, help="Reference index (repeatable)."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def resolve_config(config_path, seed, noise_kind, noise_param, example_x, v, weight, max_paths, ls, **extra):
    try:
        cfg = load_config(config_path) if config_path else ExperimentConfig()
    except ConfigError as exc:
        _fail(str(exc))
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if v is not None:
        if not v > 0:
            _fail("--threshold must be positive")
        changes["v"] = v
    if weight is not None:
        changes["weight"] = weight
    if max_paths is not None:
        if max_paths < 1:
            _fail("--max-paths must be positive")
        changes["max_paths"] = max_paths
    if ls:
        m = len(cfg.function.levels)
        if any(not 0 <= k <= m for k in ls):
            _fail(f"reference indices must lie in 0..{m}")
        changes["l"] = tuple(ls)
    for key, val in extra.items():
        if val is not None:
            changes[key] = val
    if example_x is not None and (noise_kind or noise_param is not None):
        _fail("--x cannot be combined with --noise/--noise-param")
    if example_x is not None:
        if not 0 <= example_x <= 0.5:
            _fail("--x must lie in [0, 0.5]")
        if cfg.grids.N != wx.N:
            _fail(f"--x needs {wx.N} samples per sequence")
        changes["noise"] = NoiseConfig("fixed", 0.0, wx.noise_patterns(example_x))
    elif noise_kind or noise_param is not None:
        kind = noise_kind or cfg.noise.kind
        if kind == "fixed":
            _fail("--noise-param needs --noise when the config uses fixed patterns")
        param = noise_param if noise_param is not None else cfg.noise.param
        changes["noise"] = NoiseConfig(kind, param)
    cfg = dataclasses.replace(cfg, **changes)
    try:
        cfg.noise.specs()
    except ValueError as exc:
        _fail(f"noise: {exc}")
    return cfg


def _observed(cfg):
    f, grids, clean = build_problem(cfg)
    return f, grids, clean, corrupt(clean, cfg)


def _csv_out(rows, fields):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([jsonable(x) for x in r])


def _write_json(obj, out):
    if out:
        emit_report(obj, out)
        click.echo(f"wrote {out}", err=True)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Align, segment and reconstruct a step function from two sample sequences."""


@main.command()
@config_options
@click.option("--out", type=click.Path(dir_okay=False), help="Write the full run report as JSON.")
def simulate(out, **kw):
    """Sample the configured function on both grids and add noise."""
    cfg = resolve_config(**kw)
    out = out or cfg.output.json
    f, grids, clean, (y1, y2) = _observed(cfg)
    rows = [(n, clean[0][n - 1], clean[1][n - 1], y1[n - 1], y2[n - 1]) for n in range(1, len(y1) + 1)]
    _csv_out(rows, ["n", "gamma1", "gamma2", "y1", "y2"])
    if out:
        _write_json({"config": cfg.to_dict(), "clean": [c.values for c in clean], "noisy": [y1.values, y2.values]}, out)


@main.command()
@config_options
def xcorr(**kw):
    """Cross-correlation profile as CSV (shift, value)."""
    cfg = resolve_config(**kw)
    _, _, _, (y1, y2) = _observed(cfg)
    res = xcorr_summary(y1, y2, cfg.tol)
    _csv_out(sorted(res["profile"].items()), ["shift", "value"])
    click.echo(f"best shift {res['offset']} (all maximisers {res['best_shifts']})", err=True)


@main.command()
@config_options
def diff(**kw):
    """Difference sequences as CSV (n, d1, d2)."""
    cfg = resolve_config(**kw)
    _, _, _, (y1, y2) = _observed(cfg)
    d1, d2 = difference_sequence(y1), difference_sequence(y2)
    _csv_out([(n, a, b) for n, (a, b) in enumerate(zip(d1, d2), start=1)], ["n", "d1", "d2"])
    for k, d in enumerate((d1, d2), start=1):
        sig = nonzero_signature(d)
        click.echo(f"non-zero positions {k}: {list(sig.positions)}", err=True)


@main.command()
@config_options
def threshold(**kw):
    """Threshold ladder with verdicts as CSV (v, lower, upper, verdict, reason)."""
    cfg = resolve_config(**kw)
    _, _, _, (y1, y2) = _observed(cfg)
    res = run_threshold(y1, y2)
    rows = [
        (r["v"], r["lower"], r["upper"], "accept" if r["accepted"] else "reject", r["reason"]) for r in res["ladder"]
    ]
    _csv_out(rows, ["v", "lower", "upper", "verdict", "reason"])
    if res["feasible"]:
        s1, s2 = res["segmentation"]
        click.echo(
            f"feasible at v={res['v']:g}: boundaries {list(s1.boundaries)} / {list(s2.boundaries)}, "
            f"levels {[round(float(g), 12) for g in res['levels']]}",
            err=True,
        )
    else:
        click.echo("infeasible for every candidate threshold", err=True)


@main.command()
@config_options
@click.option("--dot", type=click.Path(dir_okay=False), help="Write the graph in DOT format.")
def dp(dot, **kw):
    """Longest paths of the alignment graph."""
    cfg = resolve_config(**kw)
    _, _, _, (y1, y2) = _observed(cfg)
    res = run_dp(y1, y2, cfg.v, cfg.weight, cfg.max_paths)
    dot = dot or cfg.output.dot
    click.echo(f"weight {jsonable(res['weight'])}, {res['count']} maximum path(s)" + (" (truncated)" if res["truncated"] else ""))
    for k, (p, raw) in enumerate(zip(res["paths"], res["_result"].paths)):
        click.echo(f"path {k}: {path_label(raw)}")
        if p["valid"]:
            s1, s2 = p["segmentation"]
            click.echo(f"  m={p['m']} offset={p['offset']} boundaries {list(s1)} / {list(s2)}")
        else:
            click.echo("  no usable segmentation")
    if dot:
        Path(dot).write_text(dot_for(res))
        click.echo(f"wrote {dot}", err=True)


@main.command()
@config_options
@click.option("--method", type=click.Choice(["threshold", "dp"]), default="dp", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Write the report as JSON (plus CSV tables).")
def estimate(method, out, **kw):
    """Reconstructions for every segmentation candidate and reference index."""
    cfg = resolve_config(**kw)
    cfg = dataclasses.replace(cfg, methods=(method,))
    out = out or cfg.output.json
    report = serialise(run_config(cfg))
    sec = report["methods"][method]
    fields = ["candidate", "l", "predicted_error_T", "energy_vs_truth_T", "precondition_ok"]
    rows = [
        (e["source"], e["l"], e["predicted_error_energy_T"], e["energy_vs_truth_T"], e["precondition_ok"])
        for e in sec["estimates"]
    ]
    _csv_out(rows, fields)
    if sec.get("selected"):
        click.echo(f"selected candidate {sec['selected']['source']} with l={sec['selected']['l']}", err=True)
    else:
        click.echo("no reconstruction available", err=True)
    if out:
        table = [dict(zip(fields, r)) for r in rows]
        emit_report(report, out, {"estimates": table}, csv_dir=cfg.output.csv_dir)
        click.echo(f"wrote {out}", err=True)


@main.command("paper-repro")
@click.option("--out", type=click.Path(file_okay=False), help="Directory for the JSON report and CSV tables.")
def paper_repro(out):
    """Run every check on the worked example; exit 1 if any fails."""
    from .repro import run_paper_repro

    report = run_paper_repro()
    checks = report.pop("_checks")
    for c in checks:
        click.echo(c.line())
    if out:
        d = Path(out)
        emit_report(
            report,
            d / "paper_repro.json",
            {
                "checks": report["checks"],
                "energies": report["energies"]["dp_candidates"],
            },
        )
        click.echo(f"wrote {d / 'paper_repro.json'}", err=True)
    click.echo(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    sys.exit(0 if report["passed"] else 1)


@main.command()
@config_options
@click.option("--trials", type=int, help="Number of trials (default from config).")
@click.option("--method", "methods", type=click.Choice(["xcorr", "threshold", "dp"]), multiple=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Write JSON summary and per-trial CSV.")
def mc(trials, methods, out, **kw):
    """Monte Carlo comparison of the methods under random noise."""
    cfg = resolve_config(**kw)
    if methods:
        cfg = dataclasses.replace(cfg, methods=tuple(methods))
    if trials is not None and trials < 1:
        _fail("--trials must be positive")
    if not cfg.noise.specs()[0].stochastic:
        _fail("Monte Carlo needs a stochastic noise spec")
    res = run_monte_carlo(cfg, trials)
    out = out or cfg.output.json
    click.echo(json.dumps(jsonable(res["summary"]), indent=2, sort_keys=True))
    if out:
        emit_report(
            {k: v for k, v in res.items() if k != "records"},
            out,
            {"trials": mc_rows(res)},
            csv_dir=cfg.output.csv_dir,
        )
        click.echo(f"wrote {out}", err=True)


@main.command("edge-stats")
@click.option("--kind", type=click.Choice(["w1", "w2", "w3"]), default="w1", show_default=True)
@click.option("--a", type=float, required=True)
@click.option("--b", type=float, required=True)
@click.option("--threshold", "v", type=float, default=1.0, show_default=True)
@click.option("--sigma", type=float, multiple=True, required=True, help="Repeatable.")
@click.option("--trials", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--noise", type=click.Choice(["gaussian", "uniform"]), default="gaussian", show_default=True)
def edge_stats(kind, a, b, v, sigma, trials, seed, noise):
    """Closed-form edge statistics next to simulation, as CSV."""
    rows = []
    for s in sigma:
        try:
            ctx = EdgeNoiseContext(a, b, v, s)
        except ValueError as exc:
            _fail(str(exc))
        st = monte_carlo_edge_stats(kind, ctx, trials, seed, noise)
        if kind == "w1":
            closed, sim, se = prob_w1_positive(ctx), st.positive_rate, st.rate_stderr
        elif kind == "w2":
            closed, sim, se = expected_w2(ctx), st.mean_weight, st.mean_stderr
        else:
            closed, sim, se = None, st.mean_weight, st.mean_stderr
        if noise != "gaussian":
            closed = None
        rows.append((kind, noise, a, b, v, s, closed, sim, se, trials))
    _csv_out(rows, ["kind", "noise", "a", "b", "v", "sigma", "closed_form", "monte_carlo", "stderr", "trials"])


if __name__ == "__main__":
    main()
