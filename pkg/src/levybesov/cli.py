"""Command-line entry point: ``levybesov --config cfg.json --command verify --out runs/x``.

Exit status: 0 on success, 2 when a verification check fails, 1 on error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import moment_slope_curve, theorem_report
from .besov import (
    CONVERGENT,
    DIVERGENT,
    SLOPE_DEAD_ZONE,
    UNDECIDED,
    BesovParams,
    ScaleContribution,
    classify_convergence,
    per_scale_contributions,
    weighted_partial_norm,
)
from .config import ExperimentConfig
from .errors import InfiniteMomentRequested, LevyBesovError, NoClosedForm
from .field import SimulationWindow, dirac_coefficient_field, sample_coefficient_field
from .levy_model import (
    INF,
    Family,
    check_conditions,
    closed_form_indices,
    farkas_ladder,
    numeric_bg_indices,
)
from .outputs import (
    build_report,
    moments_csv,
    plot_moment_curves,
    plot_scale_terms,
    plot_tau_diagram,
    write_json,
    write_per_scale,
    write_text,
)
from .parallel import map_replicates, resolve_threads

COMMANDS = ("indices", "simulate", "besov", "moments", "verify", "dirac")
EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


def _p_tag(p: float) -> str:
    return format(p, "g").replace(".", "_")


def mean_scale_terms(cfg: ExperimentConfig, p: float, threads: int) -> list[ScaleContribution]:
    """Per-scale terms averaged over replicates (scale-major, replicate order fixed)."""
    window = cfg.window()
    params = BesovParams(p, cfg.tau_ref, cfg.rho, cfg.d)

    def one(r):
        f = sample_coefficient_field(cfg.model, window, cfg.wavelet, cfg.resolved_backend, cfg.master_seed, r)
        return per_scale_contributions(f, params)

    reps = map_replicates(one, cfg.replicates, threads)
    out = []
    for i, s in enumerate(reps[0]):
        vals = [rep[i].T_j for rep in reps]
        out.append(ScaleContribution(s.j, math.fsum(vals) / len(vals), s.count, s.gender_count, s.full_count))
    return out


def cmd_indices(cfg: ExperimentConfig, out: Path, threads: int) -> int:
    m = cfg.model
    try:
        closed = closed_form_indices(m).to_dict()
    except NoClosedForm:
        closed = None
    if m.family in (Family.FARKAS_SINGLE, Family.FARKAS_DOUBLE):
        ladder = farkas_ladder(int(m.params["M"]))
    else:
        ladder = list(range(20, 41))
    numeric = numeric_bg_indices(m, ladder).to_dict()
    doc = {
        "model": m.to_dict(),
        "closed_form": closed,
        "numeric": numeric,
        "conditions": check_conditions(m).to_dict(),
    }
    write_json(out / "indices.json", doc)
    return EXIT_OK


def cmd_simulate(cfg: ExperimentConfig, out: Path, threads: int) -> int:
    field = sample_coefficient_field(cfg.model, cfg.window(), cfg.wavelet, cfg.resolved_backend, cfg.master_seed, 0)
    p = cfg.p_grid[0]
    write_per_scale(out / "per_scale.csv", per_scale_contributions(field, BesovParams(p, cfg.tau_ref, cfg.rho, cfg.d)))
    if cfg.dump_coefficients:
        field.dump(out / "coefficients.bin")
    write_json(out / "simulate.json", {
        "config": cfg.to_dict(), "backend": field.backend, "scales": field.scales, "energy": field.energy(),
        **field.meta,
    })
    return EXIT_OK


def cmd_besov(cfg: ExperimentConfig, out: Path, threads: int) -> int:
    summary = []
    series, fits = {}, {}
    for i, p in enumerate(cfg.p_grid):
        if p == INF:
            field = sample_coefficient_field(cfg.model, cfg.window(), cfg.wavelet, cfg.resolved_backend,
                                             cfg.master_seed, 0)
            norm = weighted_partial_norm(field, BesovParams(p, cfg.tau_ref, cfg.rho, cfg.d))
            summary.append({"p": "inf", "partial_norm_replicate0": norm})
            continue
        contribs = mean_scale_terms(cfg, p, threads)
        name = "per_scale.csv" if i == 0 else f"per_scale_p{_p_tag(p)}.csv"
        write_per_scale(out / name, contribs)
        v = classify_convergence(contribs)
        series[f"p = {p:g}"] = contribs
        fits[f"p = {p:g}"] = v.slope
        summary.append({"p": p, "file": name, "verdict": v.verdict, "tail_slope": v.slope,
                        "mean_partial_sum": math.fsum(s.T_j for s in contribs)})
    write_json(out / "besov.json", {"config": cfg.to_dict(), "results": summary})
    if series:
        plot_scale_terms(out / "plots" / "per_scale.svg", series, fits)
    return EXIT_OK


def moment_curves(cfg: ExperimentConfig, threads: int) -> tuple[dict, list[str]]:
    curves, notes = {}, []
    for p in cfg.p_grid:
        try:
            curves[p] = moment_slope_curve(
                cfg.model, p, cfg.resolved_backend, cfg.wavelet, cfg.j_range, cfg.replicates, cfg.master_seed,
                d=cfg.d, T=cfg.T, J=cfg.finest_scale, threads=threads,
            )
        except InfiniteMomentRequested as exc:
            notes.append(str(exc))
    return curves, notes


def cmd_moments(cfg: ExperimentConfig, out: Path, threads: int) -> int:
    curves, notes = moment_curves(cfg, threads)
    write_text(out / "moments.csv", moments_csv(curves))
    write_json(out / "moments.json", {
        "config": cfg.to_dict(),
        "slopes": [{"p": p, "slope": c.slope, "ci": list(c.ci), "r2": c.r2} for p, c in curves.items()],
        "notes": notes,
    })
    if curves:
        plot_moment_curves(out / "plots" / "moments.svg", curves)
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, out: Path, threads: int) -> int:
    report = theorem_report(cfg.model, cfg.p_grid, cfg.analysis(threads))
    doc = build_report(report.to_dict(), cfg.to_dict(), "verify", __version__)
    write_json(out / "report.json", doc)
    first = next((p for p in cfg.p_grid if p != INF), None)
    if first is not None:
        contribs = mean_scale_terms(cfg, first, threads)
        write_per_scale(out / "per_scale.csv", contribs)
        label = f"p = {first:g}"
        plot_scale_terms(out / "plots" / "per_scale.svg", {label: contribs},
                         {label: classify_convergence(contribs).slope})
    curves, _ = moment_curves(cfg, threads)
    write_text(out / "moments.csv", moments_csv(curves))
    if curves:
        plot_moment_curves(out / "plots" / "moments.svg", curves)
    finite_rows = [r for r in doc["rows"] if r["p"] != "inf"]
    if finite_rows:
        plot_tau_diagram(out / "plots" / "tau_diagram.svg", finite_rows, cfg.d)
    return EXIT_OK if report.passed else EXIT_FAILED


def dirac_expected(tau: float, p: float, d: int) -> str:
    """Verdict implied by the exact tail slope p (tau - (d/p - d)) and the classifier dead zone."""
    slope = p * (tau - (d / p - d))
    if abs(slope) < SLOPE_DEAD_ZONE - 1e-9:
        return UNDECIDED
    return CONVERGENT if slope < 0 else DIVERGENT


def cmd_dirac(cfg: ExperimentConfig, out: Path, threads: int) -> int:
    J = cfg.finest_scale if cfg.J is not None else 14
    window = SimulationWindow(cfg.d, cfg.T, J, cfg.wavelet.filter_length)
    field = dirac_coefficient_field(cfg.wavelet, J, window, cfg.dirac_x0)
    results, ok = [], True
    for p in cfg.p_grid:
        if p == INF:
            continue
        crit = cfg.d / p - cfg.d
        taus = cfg.tau_grid if cfg.tau_grid is not None else [crit - 0.25, crit, crit + 0.25]
        for tau in taus:
            contribs = per_scale_contributions(field, BesovParams(p, tau, cfg.rho, cfg.d))
            v = classify_convergence(contribs)
            name = f"per_scale_p{_p_tag(p)}_tau{_p_tag(tau)}.csv"
            write_per_scale(out / name, contribs)
            expected = dirac_expected(tau, p, cfg.d)
            ok &= v.verdict == expected
            results.append({"p": p, "tau": tau, "critical_tau": crit, "verdict": v.verdict, "expected": expected,
                            "tail_slope": v.slope, "file": name})
    write_json(out / "dirac.json", {"config": cfg.to_dict(), "J": J, "x0": field.meta["x0"], "results": results,
                                    "passed": bool(ok)})
    return EXIT_OK if ok else EXIT_FAILED


HANDLERS = {
    "indices": cmd_indices,
    "simulate": cmd_simulate,
    "besov": cmd_besov,
    "moments": cmd_moments,
    "verify": cmd_verify,
    "dirac": cmd_dirac,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="levybesov", description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True, help="experiment configuration (JSON)")
    ap.add_argument("--command", required=True, choices=COMMANDS)
    ap.add_argument("--out", help="output directory (overrides output_dir in the config)")
    ap.add_argument("--seed", type=int, help="master seed (overrides the config)")
    ap.add_argument("--threads", type=int, help="worker threads (default: $LEVY_BESOV_THREADS or 1)")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def run_experiment(cfg: ExperimentConfig, command: str, out: Path | None = None, threads: int | None = None) -> int:
    out = Path(out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    np.seterr(over="ignore", under="ignore")
    return HANDLERS[command](cfg, out, resolve_threads(threads))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise LevyBesovError("--seed must be an unsigned 64-bit integer")
            cfg.master_seed = args.seed
        return run_experiment(cfg, args.command, args.out, args.threads)
    except (LevyBesovError, OSError) as exc:
        print(f"levybesov: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
