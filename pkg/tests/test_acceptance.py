"""Acceptance criteria 1-11.

Each check prints one line ``[PASS] criterion N: ...`` or ``[FAIL] ...``.
Run under pytest, or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from levybesov import (
    BesovParams,
    CellLawSampler,
    JumpLaw,
    LevyModel,
    SimulationWindow,
    WaveletSpec,
    build_filters,
    classify_convergence,
    dirac_coefficient_field,
    dwt_forward,
    estimate_rho_p,
    estimate_tau_p,
    hill_pmax,
    moment_slope_curve,
    numeric_bg_indices,
    per_scale_contributions,
    sample_coefficient_field,
    validate_sampler_cf,
)
from levybesov.besov import CONVERGENT, DIVERGENT, UNDECIDED
from levybesov.cli import main
from levybesov.field import father_coefficients
from levybesov.levy_model import farkas_ladder
from levybesov.sampler import draw_cell_integrals

HAAR = WaveletSpec.haar()
TIME_LIMIT = 120.0


def _emit(n: int, ok: bool, detail: str, elapsed: float) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail} ({elapsed:.1f} s)"
    print(line, flush=True)
    return line


def criterion_1():
    f = dirac_coefficient_field(HAAR, 14)
    got, want = [], []
    for p in (1.0, 2.0):
        crit = 1 / p - 1
        for dt, expected in ((-0.25, CONVERGENT), (0.0, UNDECIDED), (0.25, DIVERGENT)):
            got.append(classify_convergence(per_scale_contributions(f, BesovParams(p, crit + dt))).verdict)
            want.append(expected)
    return got == want, f"Dirac classifications {got}"


def criterion_2():
    win = SimulationWindow(1, 1, 13, 2)
    f = sample_coefficient_field(LevyModel.gaussian(), win, HAAR, "gaussian-exact", 2024)
    var_ok = all(abs(f.mothers(j).var() - 1) <= 5 / math.sqrt(f.mothers(j).size) for j in range(13))
    slopes = {p: moment_slope_curve(LevyModel.gaussian(), p, "gaussian-exact", HAAR, range(4, 13), 100, 2024).slope
              for p in (1.0, 2.0, 4.0)}
    ok = var_ok and all(abs(s) <= 0.05 for s in slopes.values())
    return ok, f"per-scale variances within 5/sqrt(n): {var_ok}; slopes {fmt(slopes)}"


def criterion_3():
    g = LevyModel.gaussian()
    taus = {p: estimate_tau_p(g, p, "gaussian-exact", HAAR, replicates=100, seed=3).tau_hat for p in (1.0, 2.0)}
    father = father_coefficients(g, 2**16, HAAR, seed=3)
    rhos = {p: estimate_rho_p(g, p, samples=father) for p in (1.0, 2.0)}
    ok = all(abs(t + 0.5) <= 0.1 for t in taus.values())
    ok &= all(r.hill.declared_infinite and r.rho_hat == -1 / p for p, r in rhos.items())
    return ok, f"tau_hat {fmt(taus)}; rho_hat {fmt({p: r.rho_hat for p, r in rhos.items()})}, Hill declared inf"


def criterion_4():
    cp = LevyModel.compound_poisson(1.0, JumpLaw.normal())
    slope = moment_slope_curve(cp, 1.0, "poisson-exact", HAAR, range(4, 13), 200, 4).slope
    tau = estimate_tau_p(cp, 1.0, "poisson-exact", HAAR, replicates=200, seed=4).tau_hat
    ok = abs(slope + 0.5) <= 0.1 and abs(tau) <= 0.15
    return ok, f"slope {slope:.4f} (target -0.5 +- 0.1); tau_hat {tau:.4f} (target 0 +- 0.15)"


def criterion_5():
    m = LevyModel.sas(1.2)
    target = 0.6 * (0.5 - 1 / 1.2)
    slope = moment_slope_curve(m, 0.6, "grid-dwt", HAAR, range(4, 13), 100, 5).slope
    tau = estimate_tau_p(m, 0.6, "grid-dwt", HAAR, replicates=100, seed=5).tau_hat
    ok = abs(slope - target) <= 0.1 and abs(tau - (1 / 1.2 - 1)) <= 0.15
    return ok, f"slope {slope:.4f} (target {target:.4f} +- 0.1); tau_hat {tau:.4f} (target {1 / 1.2 - 1:.4f} +- 0.15)"


def criterion_6():
    m = LevyModel.sas(1.5)
    father = father_coefficients(m, 2**16, HAAR, seed=6)
    h = hill_pmax(father, 600)
    rho = estimate_rho_p(m, 2.0, samples=father).rho_hat
    ok = 1.3 <= h.p_hat <= 1.7 and abs(rho + 1 / 1.5) <= 0.08
    return ok, f"Hill p_max {h.p_hat:.4f} (target [1.3, 1.7]); rho_hat_2 {rho:.4f} (target {-1 / 1.5:.4f} +- 0.08)"


def criterion_7():
    sas = numeric_bg_indices(LevyModel.sas(1.2), range(10, 41))
    gam = numeric_bg_indices(LevyModel.symmetric_gamma(1.0, 1.0), range(10, 41))
    far = numeric_bg_indices(LevyModel.farkas_single(1.5, 8), farkas_ladder(8))
    ok = abs(sas.beta_inf - 1.2) < 1e-9 and abs(sas.beta_inf_lower - 1.2) < 1e-9
    ok &= gam.beta_inf <= 0.15 and far.beta_inf >= 1.4 and far.beta_inf_lower <= 0.1
    return ok, (f"SaS ({sas.beta_inf:.12f}, {sas.beta_inf_lower:.12f}); gamma {gam.beta_inf:.4f}; "
                f"Farkas ({far.beta_inf:.4f}, {far.beta_inf_lower:.4f})")


FAMILIES = [
    LevyModel.gaussian(),
    LevyModel.cauchy(),
    LevyModel.sas(1.2),
    LevyModel.sum_of_stables(0.8, 1.7),
    LevyModel.laplace(),
    LevyModel.symmetric_gamma(1.0, 1.0),
    LevyModel.compound_poisson(1.0, JumpLaw.normal()),
    LevyModel.layered_stable(1.5, 0.5),
    LevyModel.inverse_gaussian(),
    LevyModel.farkas_single(1.5),
    LevyModel.farkas_double(0.5, 1.5),
]


def criterion_8():
    xi = np.geomspace(1 / 16, 16, 16)
    rng = np.random.default_rng(8)
    worst, failures = 0.0, []
    for m in FAMILIES:
        rep = validate_sampler_cf(CellLawSampler(m, 1.0, rng), 100_000, xi)
        worst = max(worst, rep.sup_deviation / rep.threshold)
        if not rep.passed:
            failures.append(str(m))
        whole = draw_cell_integrals(m, 1.0, 20_000, rng)
        halves = draw_cell_integrals(m, 0.5, 20_000, rng) + draw_cell_integrals(m, 0.5, 20_000, rng)
        if stats.ks_2samp(whole, halves).pvalue <= 0.001:
            failures.append(f"{m} (divisibility)")
    return not failures, f"{len(FAMILIES)} families, worst deviation {worst:.2f} x threshold; failures {failures}"


def criterion_9():
    orth = max(build_filters(WaveletSpec.daubechies(N)).orthonormality_residual() for N in range(1, 11))
    rng = np.random.default_rng(9)
    x1, x2 = rng.standard_normal(2**16), rng.standard_normal((64, 64))
    res = []
    for N in (1, 2, 4):
        spec = WaveletSpec.daubechies(N)
        res.append(abs(dwt_forward(x1, spec, 10).energy() - np.sum(x1**2)) / np.sum(x1**2))
        res.append(abs(dwt_forward(x2, spec, 4).energy() - np.sum(x2**2)) / np.sum(x2**2))
    win = SimulationWindow(1, 1, 13, 2)
    grid = sample_coefficient_field(LevyModel.gaussian(), win, HAAR, "grid-dwt", 9)
    pmin = min(stats.kstest(grid.mothers(j), "norm").pvalue for j in range(4, 13))
    ok = orth < 1e-12 and max(res) < 1e-10 and pmin > 0.001
    return ok, f"orthonormality {orth:.1e}; Parseval {max(res):.1e}; min KS p {pmin:.3g}"


def criterion_10():
    reg = moment_slope_curve(LevyModel.symmetric_gamma(1.0, 1.0), 4.0, "grid-dwt", HAAR, range(4, 13), 100, 10)
    return reg.slope <= 1.15, f"E c^4 slope {reg.slope:.4f} (bound 1.15)"


def criterion_11():
    cfg = {"model": {"family": "Gaussian"}, "p_grid": [1, 2], "replicates": 100, "master_seed": 11}
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "cfg.json"
        path.write_text(json.dumps(cfg))
        bodies = {}
        for label, threads in (("t1a", "1"), ("t1b", "1"), ("t8a", "8"), ("t8b", "8")):
            out = Path(tmp) / label
            main(["--config", str(path), "--command", "verify", "--out", str(out), "--threads", threads])
            bodies[label] = [(out / n).read_bytes() for n in ("per_scale.csv", "moments.csv")]
    same = all(b == bodies["t1a"] for b in bodies.values())
    return same, "per_scale.csv and moments.csv byte-identical over 2 runs each at 1 and 8 threads"


def fmt(d: dict) -> str:
    return "{" + ", ".join(f"{k:g}: {v:.4f}" for k, v in d.items()) + "}"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 12)}


@pytest.mark.parametrize("n", list(CRITERIA))
def test_criterion(n, capsys):
    t0 = time.perf_counter()
    ok, detail = CRITERIA[n]()
    elapsed = time.perf_counter() - t0
    with capsys.disabled():
        print()
        _emit(n, ok, detail, elapsed)
    assert ok, detail
    assert elapsed < TIME_LIMIT


if __name__ == "__main__":
    failed = 0
    for n, fn in CRITERIA.items():
        t0 = time.perf_counter()
        ok, detail = fn()
        _emit(n, ok, detail, time.perf_counter() - t0)
        failed += not ok
    sys.exit(1 if failed else 0)
