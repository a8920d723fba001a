import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levybesov import (
    AnalysisConfig,
    JumpLaw,
    LevyModel,
    estimate_rho_p,
    estimate_tau_p,
    hill_pmax,
    moment_slope_curve,
    theorem_report,
)
from levybesov.analysis import (
    regress_replicates,
    tau_proven,
    theory_rho,
    theory_tau_bounds,
    wavelet_admissible,
)
from levybesov.errors import InfiniteMomentRequested, InvalidParameter, TooFewSamples
from levybesov.field import father_coefficients
from levybesov.wavelet import WaveletSpec

INF = math.inf
CP = LevyModel.compound_poisson(1.0, JumpLaw.normal())


def test_gaussian_slope_zero():
    reg = moment_slope_curve(LevyModel.gaussian(), 1.0, replicates=50, seed=1)
    assert abs(reg.slope) < 0.05
    assert reg.j_range == tuple(range(4, 13))
    assert reg.ci[0] <= reg.slope <= reg.ci[1]


def test_stable_slope():
    reg = moment_slope_curve(LevyModel.sas(1.5), 0.75, replicates=100, seed=2)
    assert reg.slope == pytest.approx(0.75 * (0.5 - 1 / 1.5), abs=0.05)
    assert reg.ci[1] - reg.ci[0] < 0.1


def test_compound_poisson_slope():
    reg = moment_slope_curve(CP, 1.0, replicates=200, seed=3)
    assert reg.slope == pytest.approx(-0.5, abs=0.1)


def test_refuses_infinite_moment():
    with pytest.raises(InfiniteMomentRequested):
        moment_slope_curve(LevyModel.sas(1.2), 1.5)


def test_refuses_transient_scales():
    with pytest.raises(InvalidParameter):
        moment_slope_curve(LevyModel.gaussian(), 1.0, j_range=range(2, 8))


def test_regression_needs_positive_means():
    with pytest.raises(TooFewSamples):
        regress_replicates(np.zeros((5, 4)), [4, 5, 6, 7], 0)


def test_regression_recovers_exact_line():
    js = np.arange(4, 10)
    per_rep = np.tile(2.0 ** (0.3 * js), (10, 1))
    reg = regress_replicates(per_rep, js, 0)
    assert reg.slope == pytest.approx(0.3)
    assert reg.r2 == pytest.approx(1.0)


# tau ----------------------------------------------------------------------


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_gaussian_tau(p):
    est = estimate_tau_p(LevyModel.gaussian(), p, replicates=50, seed=4)
    assert est.tau_hat == pytest.approx(-0.5, abs=0.1)


def test_compound_poisson_tau():
    est = estimate_tau_p(CP, 1.0, replicates=100, seed=5)
    assert est.tau_hat == pytest.approx(0.0, abs=0.15)


def test_tau_reference_invariance():
    a = estimate_tau_p(LevyModel.sas(1.2), 0.6, replicates=40, seed=6, tau_ref=0.0)
    b = estimate_tau_p(LevyModel.sas(1.2), 0.6, replicates=40, seed=6, tau_ref=1.0)
    assert a.tau_hat == pytest.approx(b.tau_hat, abs=1e-9)
    assert b.ci[0] <= a.tau_hat <= b.ci[1]


def test_tau_weight_invariance():
    a = estimate_tau_p(LevyModel.gaussian(), 2.0, replicates=40, seed=7, rho=0.0)
    b = estimate_tau_p(LevyModel.gaussian(), 2.0, replicates=40, seed=7, rho=-3.0)
    assert b.ci[0] - 0.05 <= a.tau_hat <= b.ci[1] + 0.05


def test_gaussian_tau_independent_of_p():
    taus = [estimate_tau_p(LevyModel.gaussian(), p, replicates=30, seed=8).tau_hat for p in (0.5, 1.0, 3.0)]
    assert max(taus) - min(taus) < 0.15


def test_daubechies_tau():
    est = estimate_tau_p(LevyModel.gaussian(), 2.0, wavelet=WaveletSpec.daubechies(2), replicates=30, seed=9)
    assert est.tau_hat == pytest.approx(-0.5, abs=0.1)


# Hill and rho -------------------------------------------------------------


def test_hill_pareto():
    x = np.random.default_rng(10).pareto(1.5, 100_000) + 1.0
    h = hill_pmax(x, 1000)
    assert 1.35 <= h.p_hat <= 1.65
    assert h.ci[0] < h.p_hat < h.ci[1]


def test_hill_stable():
    x = father_coefficients(LevyModel.sas(1.2), 2**16, WaveletSpec.haar(), seed=11)
    assert 1.05 <= hill_pmax(x, 600).p_hat <= 1.35


def test_hill_gaussian_infinite():
    x = father_coefficients(LevyModel.gaussian(), 2**16, WaveletSpec.haar(), seed=12)
    assert hill_pmax(x, 600).declared_infinite


def test_hill_sample_size_guard():
    with pytest.raises(TooFewSamples):
        hill_pmax(np.ones(100), 50)
    with pytest.raises(TooFewSamples):
        hill_pmax(np.ones(10_000), 20)


def test_hill_consistency_across_sizes():
    rng = np.random.default_rng(13)
    small = hill_pmax(rng.pareto(1.3, 20_000) + 1, 500)
    large = hill_pmax(rng.pareto(1.3, 80_000) + 1, 2000)
    assert max(small.ci[0], large.ci[0]) <= min(small.ci[1], large.ci[1])


@settings(max_examples=20, deadline=None)
@given(alpha=st.floats(0.5, 3.0), seed=st.integers(0, 10**6))
def test_hill_pareto_property(alpha, seed):
    x = np.random.default_rng(seed).pareto(alpha, 50_000) + 1
    h = hill_pmax(x, 500)
    assert not h.declared_infinite
    assert abs(h.p_hat - alpha) / alpha < 0.2


def test_rho_gaussian():
    r = estimate_rho_p(LevyModel.gaussian(), 2.0, seed=14)
    assert r.rho_hat == -0.5 and r.ci == (-0.5, -0.5)


def test_rho_stable():
    r = estimate_rho_p(LevyModel.sas(1.2), 2.0, seed=15)
    assert r.rho_hat == pytest.approx(-1 / 1.2, abs=0.08)


def test_rho_bounded_compound_poisson():
    m = LevyModel.compound_poisson(1.0, JumpLaw.uniform(-1.0, 1.0))
    for p in (0.5, 3.0):
        assert estimate_rho_p(m, p, seed=16).rho_hat == pytest.approx(-1 / p)


# theory -------------------------------------------------------------------


def test_theory_values():
    assert theory_tau_bounds(LevyModel.gaussian(), 3.0) == (-0.5, -0.5)
    assert theory_tau_bounds(CP, 0.5) == (1.0, 1.0)
    lo, hi = theory_tau_bounds(LevyModel.sas(1.2), 0.6)
    assert lo == hi == pytest.approx(1 / 1.2 - 1)
    assert theory_tau_bounds(LevyModel.farkas_double(0.5, 1.5), 0.4) == pytest.approx((1 / 1.5 - 1, 1 / 0.5 - 1))
    assert theory_rho(LevyModel.sas(1.2), 2.0) == pytest.approx(-1 / 1.2)
    assert theory_rho(LevyModel.gaussian(), 4.0, d=2) == -0.5


def test_proven_ranges():
    m = LevyModel.sas(1.2)
    assert tau_proven(m, 1.5) and tau_proven(m, 4.0) and tau_proven(m, INF)
    assert not tau_proven(m, 3.0)
    assert tau_proven(LevyModel.gaussian(), 3.0)


def test_wavelet_admissibility():
    assert wavelet_admissible(WaveletSpec.haar(), -0.5, 1.0)
    assert not wavelet_admissible(WaveletSpec.haar(), 1.2, 1.0)
    assert wavelet_admissible(WaveletSpec.daubechies(8), 1.2, 1.0)


@settings(max_examples=50, deadline=None)
@given(a1=st.floats(0.1, 1.9), a2=st.floats(0.1, 1.9), p=st.floats(0.1, 8.0), d=st.sampled_from([1, 2]))
def test_theory_ordering_property(a1, a2, p, d):
    for m in (LevyModel.sum_of_stables(a1, a2), LevyModel.layered_stable(a1, a2)):
        lo, hi = theory_tau_bounds(m, p, d)
        assert lo <= hi
        assert theory_rho(m, p, d) <= 0


def test_report_gaussian():
    rep = theorem_report(LevyModel.gaussian(), [1.0, 2.0], AnalysisConfig(replicates=40))
    assert rep.passed
    assert [r.tau_lower for r in rep.rows] == [-0.5, -0.5]
    assert [r.rho_theory for r in rep.rows] == [-1.0, -0.5]
    assert rep.rows[0].process_tau_hat == pytest.approx(rep.rows[0].tau_hat + 1)


def test_report_stable_pinned():
    rep = theorem_report(LevyModel.sas(1.2), [0.6], AnalysisConfig(replicates=40))
    row = rep.rows[0]
    assert row.tau_lower == row.tau_upper == pytest.approx(1 / 1.2 - 1)
    assert not row.bounded_not_pinned


def test_report_farkas_band():
    rep = theorem_report(LevyModel.farkas_double(0.5, 1.5), [0.4], AnalysisConfig(replicates=10, j_range=range(4, 9)))
    row = rep.rows[0]
    assert row.tau_lower < row.tau_upper
    assert row.bounded_not_pinned
    assert any("bounded, not pinned" in n for n in rep.notes)


def test_report_refuses_beyond_pmax():
    rep = theorem_report(LevyModel.sas(1.2), [1.5], AnalysisConfig(replicates=10, j_range=range(4, 9)))
    row = rep.rows[0]
    assert row.tau_hat is None and row.tau_status.startswith("refused")
    assert row.rho_theory == pytest.approx(-1 / 1.2)


def test_report_flags_unproven():
    rep = theorem_report(LevyModel.sas(1.9), [1.0], AnalysisConfig(replicates=10, j_range=range(4, 9)))
    assert rep.rows[0].tau_proven
    rep = theorem_report(LevyModel.layered_stable(1.5, 1.95), [3.0], AnalysisConfig(replicates=10,
                                                                                  j_range=range(4, 9)))
    assert rep.rows[0].tau_status.startswith("refused")
    assert not rep.rows[0].tau_proven
    assert any("proven range" in n for n in rep.notes)
