"""CSV tables, the JSON report and SVG plots."""

from __future__ import annotations

import csv
import io
import json
import math
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import jsonschema

from .besov import ScaleContribution, per_scale_csv

MOMENTS_HEADER = ("j", "p", "mean_abs_p", "log2_mean", "stderr")


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")
    return path


def write_per_scale(path: Path, contribs: list[ScaleContribution]) -> Path:
    return write_text(path, per_scale_csv(contribs))


def moments_csv(curves: dict[float, object]) -> str:
    """One row per (p, j) from RegressionResult objects keyed by p."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MOMENTS_HEADER)
    for p, reg in curves.items():
        for j, m, lg, se in zip(reg.j_range, reg.means, reg.log2_means, reg.mean_stderr):
            w.writerow([j, repr(float(p)), repr(m), repr(lg), repr(se)])
    return buf.getvalue()


def report_schema() -> dict:
    return json.loads(resources.files("levybesov").joinpath("schemas/report.schema.json").read_text("utf-8"))


def validate_report(doc: dict) -> None:
    jsonschema.validate(doc, report_schema())


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def build_report(report_dict: dict, config: dict, command: str, version: str) -> dict:
    doc = {
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "command": command,
        "package_version": version,
        "config": config,
        **report_dict,
    }
    doc = _jsonable(doc)
    validate_report(doc)
    return doc


def write_json(path: Path, doc: dict) -> Path:
    return write_text(path, json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")


# plots -----------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.fonttype"] = "path"
    matplotlib.rcParams["svg.hashsalt"] = "levybesov"
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def plot_scale_terms(path: Path, series: dict[str, list[ScaleContribution]], fits: dict[str, float] | None = None):
    """log2 T_j against j, one line per label, with a dashed fitted slope when given."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, contribs in series.items():
        pts = [(s.j, s.log2_T) for s in contribs if s.T_j > 0]
        if not pts:
            continue
        js, ys = zip(*pts)
        line, = ax.plot(js, ys, marker="o", label=label)
        if fits and math.isfinite(fits.get(label, math.nan)) and len(js) >= 2:
            slope = fits[label]
            j1 = js[-1]
            ax.plot([js[0], j1], [ys[-1] - slope * (j1 - js[0]), ys[-1]], ls="--", color=line.get_color(),
                    label=f"slope {slope:.3f}")
    ax.set_xlabel("scale j")
    ax.set_ylabel("log2 T_j")
    ax.legend(fontsize=7)
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out


def plot_moment_curves(path: Path, curves: dict[float, object]):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for p, reg in curves.items():
        line, = ax.plot(reg.j_range, reg.log2_means, marker="o", label=f"p = {p:g}")
        js = reg.j_range
        ax.plot([js[0], js[-1]], [reg.intercept + reg.slope * js[0], reg.intercept + reg.slope * js[-1]],
                ls="--", color=line.get_color(), label=f"slope {reg.slope:.3f}")
    ax.set_xlabel("scale j")
    ax.set_ylabel("log2 E|c_j|^p")
    ax.legend(fontsize=7)
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out


def plot_tau_diagram(path: Path, rows: list[dict], d: int = 1):
    """(1/p, tau) plane: estimated points against the theoretical band."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    inv = [1.0 / float(r["p"]) for r in rows]
    ax.plot(inv, [r["tau_lower"] for r in rows], color="black", lw=1, label="theory lower")
    ax.plot(inv, [r["tau_upper"] for r in rows], color="gray", lw=1, ls="--", label="theory upper")
    est = [(x, r["tau_hat"]) for x, r in zip(inv, rows) if r["tau_hat"] is not None]
    if est:
        xs, ys = zip(*est)
        ax.scatter(xs, ys, color="tab:red", zorder=3, label="estimate")
    ax.set_xlabel("1/p")
    ax.set_ylabel("tau")
    ax.legend(fontsize=7)
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out
