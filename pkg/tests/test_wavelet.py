import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from levybesov import WaveletSpec, build_filters, cascade_evaluate, dwt_forward
from levybesov.errors import ShapeMismatch, UnsupportedOrder


def test_haar_filter():
    pair = build_filters(WaveletSpec.haar())
    assert pair.lowpass == pytest.approx([1 / math.sqrt(2)] * 2, abs=1e-16)


def test_db2_closed_form():
    # (1 + sqrt3, 3 + sqrt3, 3 - sqrt3, 1 - sqrt3) / (4 sqrt2)
    s3 = math.sqrt(3.0)
    ref = np.array([1 + s3, 3 + s3, 3 - s3, 1 - s3]) / (4 * math.sqrt(2.0))
    assert build_filters(WaveletSpec.daubechies(2)).lowpass == pytest.approx(ref, abs=1e-14)


def test_db3_table():
    ref = [0.3326705529500826, 0.8068915093110925, 0.4598775021184915,
           -0.1350110200102546, -0.0854412738820267, 0.0352262918857095]
    assert build_filters(WaveletSpec.daubechies(3)).lowpass == pytest.approx(ref, abs=1e-13)


@pytest.mark.parametrize("N", range(1, 11))
def test_orthonormality(N):
    pair = build_filters(WaveletSpec.daubechies(N))
    assert pair.orthonormality_residual() < 1e-12
    assert pair.lowpass.sum() == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert len(pair.lowpass) == 2 * N


@pytest.mark.parametrize("N", [2, 3, 4, 6])
def test_vanishing_moments(N):
    pair = build_filters(WaveletSpec.daubechies(N))
    ks = np.arange(pair.high_start, pair.high_start + len(pair.highpass))
    for m in range(N):
        assert abs(np.sum(pair.highpass * ks.astype(float) ** m)) < 1e-8 * (len(ks) ** m)


def test_highpass_orthogonal_to_lowpass():
    pair = build_filters(WaveletSpec.daubechies(4))
    h = dict(zip(range(pair.low_start, pair.low_start + 8), pair.lowpass))
    g = dict(zip(range(pair.high_start, pair.high_start + 8), pair.highpass))
    for shift in range(-4, 5):
        s = sum(h[n] * g.get(n + 2 * shift, 0.0) for n in h)
        assert abs(s) < 1e-13


def test_wavelet_name_parsing():
    assert WaveletSpec.parse("haar").is_haar
    assert WaveletSpec.parse("db4").order == 4
    assert WaveletSpec.parse("Daubechies2").filter_length == 4
    with pytest.raises(UnsupportedOrder):
        WaveletSpec.parse("sym4")
    with pytest.raises(UnsupportedOrder):
        WaveletSpec.daubechies(0)


# cascade ------------------------------------------------------------------


def test_haar_cascade_closed_form():
    grid = cascade_evaluate(WaveletSpec.haar())
    x = np.array([-0.1, 0.0, 0.3, 0.5, 0.99, 1.0])
    assert grid.eval_father(x) == pytest.approx([0, 1, 1, 1, 1, 0])
    assert grid.eval_mother(x) == pytest.approx([0, 1, 1, -1, -1, 0])


def test_db2_partition_of_unity():
    grid = cascade_evaluate(WaveletSpec.daubechies(2, 10))
    assert grid.father.sum() * grid.step == pytest.approx(1.0, abs=1e-6)
    # shifts of the father sum to one at every point
    x = np.linspace(0, 1, 50, endpoint=False)
    total = sum(grid.eval_father(x - k) for k in range(-3, 4))
    assert np.max(np.abs(total - 1)) < 1e-6


def test_db2_mother_father_orthogonal():
    grid = cascade_evaluate(WaveletSpec.daubechies(2, 10))
    x = np.arange(-4, 6, grid.step)
    for k in (-1, 0, 1):
        ip = np.sum(grid.eval_mother(x) * grid.eval_father(x - k)) * grid.step
        assert abs(ip) < 1e-5


def test_db2_unit_norm():
    grid = cascade_evaluate(WaveletSpec.daubechies(2, 10))
    assert np.sum(grid.mother**2) * grid.step == pytest.approx(1.0, abs=2e-4)


def test_db4_supports():
    grid = cascade_evaluate(WaveletSpec.daubechies(4, 8))
    assert grid.support("F") == (0, 7)
    assert grid.support("M") == (-3, 4)


# transform ----------------------------------------------------------------


def test_haar_constant_has_no_details():
    f = dwt_forward(np.full(16, 3.0), WaveletSpec.haar(), 4)
    for j in range(4):
        assert np.all(np.abs(f.mothers(j)) < 1e-14)
    assert f.father()[0] == pytest.approx(12.0)


def test_haar_delta_energy():
    x = np.zeros(8)
    x[0] = 1.0
    f = dwt_forward(x, WaveletSpec.haar(), 3)
    assert f.energy() == pytest.approx(1.0, abs=1e-15)


def test_haar_two_point_values():
    f = dwt_forward(np.array([1.0, 3.0]), WaveletSpec.haar(), 1)
    assert f.father()[0] == pytest.approx(4 / math.sqrt(2))
    assert f.mothers(0)[0] == pytest.approx(-2 / math.sqrt(2))


def test_parseval_1d():
    x = np.random.default_rng(0).standard_normal(2**16)
    for N in (1, 2, 4):
        f = dwt_forward(x, WaveletSpec.daubechies(N), 10)
        assert abs(f.energy() - np.sum(x**2)) / np.sum(x**2) < 1e-10


def test_parseval_2d():
    x = np.random.default_rng(1).standard_normal((64, 64))
    f = dwt_forward(x, WaveletSpec.daubechies(2), 4)
    assert abs(f.energy() - np.sum(x**2)) / np.sum(x**2) < 1e-10
    assert set(f.genders_at(5)) == {"FM", "MF", "MM"}
    assert set(f.genders_at(2)) == {"FF", "FM", "MF", "MM"}


def test_polynomial_annihilated():
    # db3 kills quadratics away from the periodic seam
    n = 256
    x = (np.arange(n) / n) ** 2
    f = dwt_forward(x, WaveletSpec.daubechies(3), 1)
    interior = f.mothers(7)[5:-5]
    assert np.max(np.abs(interior)) < 1e-12


def test_shape_errors():
    with pytest.raises(ShapeMismatch):
        dwt_forward(np.zeros(12), WaveletSpec.haar(), 3)
    with pytest.raises(ShapeMismatch):
        dwt_forward(np.zeros((8, 4)), WaveletSpec.haar(), 1)


@settings(max_examples=40, deadline=None)
@given(
    x=hnp.arrays(np.float64, 64, elements=st.floats(-1e3, 1e3)),
    N=st.integers(1, 5),
    levels=st.integers(1, 6),
)
def test_parseval_property(x, N, levels):
    f = dwt_forward(x, WaveletSpec.daubechies(N), levels)
    assert f.energy() == pytest.approx(float(np.sum(x**2)), rel=1e-10, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(x=hnp.arrays(np.float64, 32, elements=st.floats(-10, 10)), c=st.floats(-5, 5))
def test_linearity_property(x, c):
    spec = WaveletSpec.daubechies(2)
    a = dwt_forward(c * x, spec, 3)
    b = dwt_forward(x, spec, 3)
    for key in a.blocks:
        assert np.allclose(a.blocks[key], c * b.blocks[key], atol=1e-9)
