import math

import numpy as np
import pytest
from scipy import stats

from levybesov import (
    JumpLaw,
    LevyModel,
    SimulationWindow,
    WaveletSpec,
    cascade_evaluate,
    dirac_coefficient_field,
    father_coefficients,
    sample_coefficient_field,
)
from levybesov.errors import BackendFamilyMismatch, InvalidParameter, WindowTooSmall
from levybesov.field import impulse_coefficients
from levybesov.sampler import ImpulseField, empirical_cf

HAAR = WaveletSpec.haar()


def test_gaussian_exact_unit_variance():
    f = sample_coefficient_field(LevyModel.gaussian(), SimulationWindow(1, 1, 13, 2), HAAR, "gaussian-exact", 1)
    for j in range(4, 13):
        c = f.mothers(j)
        assert abs(c.var() - 1) <= 5 / math.sqrt(c.size)


def test_haar_grid_matches_exact_law():
    model = LevyModel.gaussian()
    win = SimulationWindow(1, 1, 13, 2)
    exact = sample_coefficient_field(model, win, HAAR, "gaussian-exact", 2)
    grid = sample_coefficient_field(model, win, HAAR, "grid-dwt", 2)
    assert stats.kstest(grid.mothers(12), "norm").pvalue > 0.001
    assert stats.ks_2samp(exact.mothers(12), grid.mothers(12)).pvalue > 0.001


def test_daubechies_gaussian_grid_is_white():
    f = sample_coefficient_field(LevyModel.gaussian(), SimulationWindow(1, 1, 12, 4), WaveletSpec.daubechies(2),
                                 "grid-dwt", 3)
    c = f.mothers(11)
    assert abs(c.var() - 1) <= 5 / math.sqrt(c.size)


def test_two_dimensional_field_shapes():
    f = sample_coefficient_field(LevyModel.gaussian(), SimulationWindow(2, 1, 5, 2), HAAR, "grid-dwt", 0)
    assert f.blocks[(4, "MM")].shape == (16, 16)
    assert (0, "FF") in f.blocks and (1, "FF") not in f.blocks


def test_empty_impulse_field_gives_zeros():
    imp = ImpulseField(np.zeros((0, 1)), np.zeros(0), 1.0, ((0.0, 1.0),))
    for N in (1, 2):
        assert not np.any(impulse_coefficients(imp, WaveletSpec.daubechies(N), 5, "M", 1))


def test_single_impulse_haar_coefficients():
    imp = ImpulseField(np.array([[0.3]]), np.array([2.0]), 1.0, ((0.0, 1.0),))
    c = impulse_coefficients(imp, HAAR, 2, "M", 1)
    # 2 * 2^{1} psi_M(1.2 - 1): first half of cell k = 1
    expected = np.zeros(4)
    expected[1] = 2.0 * 2.0
    assert c == pytest.approx(expected)


def test_poisson_exact_father_counts_impulses():
    model = LevyModel.compound_poisson(30.0, JumpLaw.point(1.0))
    f = sample_coefficient_field(model, SimulationWindow(1, 1, 8, 2), HAAR, "poisson-exact", 4)
    assert f.father()[0] == pytest.approx(f.meta["impulse_count"])
    # unit jumps: every Haar mother coefficient is 2^{j/2} times an integer
    for j in range(8):
        v = f.mothers(j) / 2.0 ** (j / 2)
        assert np.allclose(v, np.round(v))


def test_backend_family_mismatch():
    with pytest.raises(BackendFamilyMismatch):
        sample_coefficient_field(LevyModel.sas(1.0), SimulationWindow(), HAAR, "gaussian-exact")
    with pytest.raises(BackendFamilyMismatch):
        sample_coefficient_field(LevyModel.gaussian(), SimulationWindow(), HAAR, "poisson-exact")


def test_window_too_small():
    with pytest.raises(WindowTooSmall):
        sample_coefficient_field(LevyModel.gaussian(), SimulationWindow(1, 1, 8, 2), WaveletSpec.daubechies(3))


def test_same_seed_same_field():
    model, win = LevyModel.sas(1.2), SimulationWindow(1, 1, 8, 2)
    a = sample_coefficient_field(model, win, HAAR, seed=9, replicate=3)
    b = sample_coefficient_field(model, win, HAAR, seed=9, replicate=3)
    c = sample_coefficient_field(model, win, HAAR, seed=9, replicate=4)
    assert np.array_equal(a.mothers(7), b.mothers(7))
    assert not np.array_equal(a.mothers(7), c.mothers(7))


# father coefficients ------------------------------------------------------


def test_gaussian_father_moments():
    x = father_coefficients(LevyModel.gaussian(), 2**16, HAAR, seed=5)
    n = x.size
    assert abs(x.mean()) <= 3 / math.sqrt(n)
    assert abs(x.var() - 1) <= 3 * math.sqrt(2 / n)
    assert abs(np.mean(x**4) - 3) <= 3 * math.sqrt(96 / n)


def test_stable_father_cf():
    x = father_coefficients(LevyModel.sas(1.5), 2**16, HAAR, seed=6)
    xi = np.array([0.25, 0.5, 1.0, 2.0])
    assert np.max(np.abs(empirical_cf(x, xi) - np.exp(-(xi**1.5)))) <= 5 / math.sqrt(x.size)


def test_daubechies_stable_father_cf():
    # <w, phi> is SaS with scale ||phi||_alpha
    spec = WaveletSpec.daubechies(2, 10)
    grid = cascade_evaluate(spec)
    norm = np.sum(np.abs(grid.father) ** 1.5) * grid.step
    x = father_coefficients(LevyModel.sas(1.5), 2**14, spec, seed=6)
    xi = np.array([0.25, 0.5, 1.0, 2.0])
    assert np.max(np.abs(empirical_cf(x, xi) - np.exp(-norm * xi**1.5))) <= 5 / math.sqrt(x.size)


def test_counting_father():
    x = father_coefficients(LevyModel.compound_poisson(1.0, JumpLaw.point(1.0)), 2**14, HAAR, seed=7)
    assert np.allclose(x, np.round(x))
    top = 5
    obs = np.array([np.sum(x == k) for k in range(top)] + [np.sum(x >= top)])
    pmf = stats.poisson(1.0).pmf(np.arange(top))
    exp = np.append(pmf, 1 - pmf.sum()) * x.size
    assert stats.chisquare(obs, exp).pvalue > 0.01


# Dirac ------------------------------------------------------------------


def test_dirac_haar_values():
    f = dirac_coefficient_field(HAAR, 6, x0=[0.25])
    assert f.mothers(0)[0] == pytest.approx(1.0)
    assert f.mothers(1)[0] == pytest.approx(-math.sqrt(2.0))
    assert f.father()[0] == pytest.approx(1.0)
    for j in range(2, 6):
        c = f.mothers(j)
        assert np.count_nonzero(c) == 1
        assert c[2**j // 4] == pytest.approx(2.0 ** (j / 2))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_dirac_support_bounded(N):
    spec = WaveletSpec.daubechies(N, 8)
    f = dirac_coefficient_field(spec, 10, SimulationWindow(1, 1, 10, 2 * N), x0=[0.3])
    counts = [np.count_nonzero(f.mothers(j)) for j in range(10)]
    assert max(counts) <= 2 * N


def test_dirac_must_be_inside():
    with pytest.raises(InvalidParameter):
        dirac_coefficient_field(HAAR, 4, x0=[1.5])
