"""Wavelet-domain realisations of a Levy white noise on a periodic window [0, T)^d.

Three backends:

``gaussian-exact``
    orthonormal expansion of Gaussian noise, i.e. i.i.d. N(0, sigma2) coefficients.
``poisson-exact``
    compound Poisson noise as a sum of impulses, each coefficient being
    sum_n a_n psi_{j,G,k}(x_n) with the wavelet read off the cascade grid.
``grid-dwt``
    scale-J father coefficients 2^{Jd/2} <w, 1_cell> from exact cell draws,
    pushed down by the periodic DWT. Exact for Haar.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientField, genders
from .errors import BackendFamilyMismatch, InvalidParameter, WindowTooSmall
from .levy_model import Family, LevyModel
from .rng import stream
from .sampler import draw_cell_integrals, sample_impulse_field
from .wavelet import WaveletSpec, cascade_evaluate, dwt_forward

BACKENDS = ("gaussian-exact", "poisson-exact", "grid-dwt")


@dataclass(frozen=True)
class SimulationWindow:
    d: int = 1
    T: int = 1
    J: int = 12
    guard_band: int = 2

    def __post_init__(self):
        if self.d not in (1, 2):
            raise InvalidParameter(f"dimension must be 1 or 2, got {self.d}")
        if int(self.T) != self.T or self.T < 1:
            raise InvalidParameter(f"window extent T must be a positive integer, got {self.T}")
        if int(self.J) != self.J or self.J < 1:
            raise InvalidParameter(f"finest scale J must be a positive integer, got {self.J}")
        if self.guard_band < 0:
            raise InvalidParameter("guard band must be nonnegative")

    @classmethod
    def for_wavelet(cls, spec: WaveletSpec, d: int = 1, T: int = 1, J: int = 12) -> SimulationWindow:
        return cls(d, T, J, spec.filter_length)

    def check(self, spec: WaveletSpec) -> None:
        if self.guard_band < spec.filter_length:
            raise WindowTooSmall(
                f"guard band {self.guard_band} is narrower than the {spec.name} filter ({spec.filter_length} taps)"
            )

    @property
    def side(self) -> int:
        return self.T * 2**self.J

    def to_dict(self) -> dict:
        return {"d": self.d, "T": self.T, "J": self.J, "guard_band": self.guard_band}


def default_backend(model: LevyModel) -> str:
    if model.family is Family.GAUSSIAN:
        return "gaussian-exact"
    if model.family is Family.COMPOUND_POISSON:
        return "poisson-exact"
    return "grid-dwt"


def _check_backend(model: LevyModel, backend: str) -> None:
    if backend not in BACKENDS:
        raise BackendFamilyMismatch(f"unknown backend {backend!r}")
    if backend == "gaussian-exact" and model.family is not Family.GAUSSIAN:
        raise BackendFamilyMismatch("gaussian-exact applies to Gaussian noise only")
    if backend == "poisson-exact" and model.family is not Family.COMPOUND_POISSON:
        raise BackendFamilyMismatch("poisson-exact applies to compound Poisson noise only")


def _gaussian_field(model, window, spec, rng, seed):
    s = math.sqrt(model.params["sigma2"])
    blocks = {}
    for j in range(window.J):
        shape = (window.T * 2**j,) * window.d
        for g in genders(window.d, j, 0):
            blocks[(j, g)] = s * rng.standard_normal(shape)
    return CoefficientField(window.d, window.T, window.J, blocks, "gaussian-exact", seed, spec.name,
                            guard_band=window.guard_band)


def impulse_coefficients(impulses, spec: WaveletSpec, j: int, gender: str, T: int) -> np.ndarray:
    """sum_n a_n 2^{jd/2} psi_G(2^j x_n - k) for k in [0, T 2^j)^d, periodic in the window."""
    grid = cascade_evaluate(spec)
    d = len(gender)
    n_side = T * 2**j
    out = np.zeros((n_side,) * d)
    if impulses.count == 0:
        return out
    u = impulses.positions * 2**j  # (n, d)
    base = np.floor(u).astype(np.int64)
    frac = u - base
    offsets = []
    for g in gender:
        lo, hi = grid.support(g)
        offsets.append(range(lo - 1, hi + 1))
    for combo in itertools.product(*offsets):
        val = impulses.amplitudes * 2.0 ** (j * d / 2.0)
        idx = []
        for axis, (g, o) in enumerate(zip(gender, combo)):
            val = val * grid.eval(g, frac[:, axis] + o)
            idx.append((base[:, axis] - o) % n_side)
        nz = val != 0.0
        if np.any(nz):
            np.add.at(out, tuple(i[nz] for i in idx), val[nz])
    return out


def _poisson_field(model, window, spec, rng, seed):
    imp = sample_impulse_field(model, [(0.0, float(window.T))] * window.d, rng)
    blocks = {}
    for j in range(window.J):
        for g in genders(window.d, j, 0):
            blocks[(j, g)] = impulse_coefficients(imp, spec, j, g, window.T)
    field = CoefficientField(window.d, window.T, window.J, blocks, "poisson-exact", seed, spec.name,
                             guard_band=window.guard_band)
    field.meta["impulse_count"] = imp.count
    return field


def fine_scale_grid(model: LevyModel, window: SimulationWindow, rng) -> np.ndarray:
    """2^{Jd/2} <w, 1_cell> over the cells of side 2^-J."""
    d, J = window.d, window.J
    cells = draw_cell_integrals(model, 2.0 ** (-J * d), window.side**d, rng)
    return 2.0 ** (J * d / 2.0) * cells.reshape((window.side,) * d)


def _grid_field(model, window, spec, rng, seed):
    grid = fine_scale_grid(model, window, rng)
    field = dwt_forward(grid, spec, window.J, J=window.J, T=window.T, backend="grid-dwt", seed=seed)
    field.guard_band = window.guard_band
    return field


def sample_coefficient_field(
    model: LevyModel, window: SimulationWindow, spec: WaveletSpec, backend: str | None = None,
    seed: int = 0, replicate: int = 0,
) -> CoefficientField:
    """One realisation, drawn from the stream (seed, replicate, "field")."""
    backend = backend or default_backend(model)
    _check_backend(model, backend)
    window.check(spec)
    rng = stream(seed, replicate, "field")
    if backend == "gaussian-exact":
        field = _gaussian_field(model, window, spec, rng, seed)
    elif backend == "poisson-exact":
        field = _poisson_field(model, window, spec, rng, seed)
    else:
        field = _grid_field(model, window, spec, rng, seed)
    field.meta["replicate"] = replicate
    return field


def father_coefficients(
    model: LevyModel, T: int, spec: WaveletSpec, backend: str | None = None, seed: int = 0, d: int = 1,
    replicate: int = 0, extra_levels: int = 4,
) -> np.ndarray:
    """Scale-0 father coefficients <w, psi_{0,F,k}> for k in [0, T)^d.

    Haar on the grid backend needs only unit-cell draws. Daubechies
    coefficients come from a grid ``extra_levels`` scales finer.
    """
    backend = backend or default_backend(model)
    _check_backend(model, backend)
    rng = stream(seed, replicate, "father")
    shape = (T,) * d
    if backend == "gaussian-exact":
        return math.sqrt(model.params["sigma2"]) * rng.standard_normal(shape)
    if backend == "poisson-exact":
        imp = sample_impulse_field(model, [(0.0, float(T))] * d, rng)
        return impulse_coefficients(imp, spec, 0, "F" * d, T)
    if spec.is_haar:
        return draw_cell_integrals(model, 1.0, T**d, rng).reshape(shape)
    window = SimulationWindow(d, T, extra_levels, spec.filter_length)
    grid = fine_scale_grid(model, window, rng)
    return dwt_forward(grid, spec, extra_levels, J=extra_levels, T=T).father()


def dirac_coefficient_field(spec: WaveletSpec, J: int, window: SimulationWindow | None = None,
                            x0=None) -> CoefficientField:
    """Coefficients of the Dirac mass at x0: psi_{j,G,k}(x0) = 2^{jd/2} psi_G(2^j x0 - k).

    Scales 0..J-1, shifts restricted to the window (no wrapping).
    """
    window = window or SimulationWindow(1, 1, J, spec.filter_length)
    d, T = window.d, window.T
    if x0 is None:
        x0 = (0.25 * T,) * d
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (d,) or np.any(x0 <= 0) or np.any(x0 >= T):
        raise InvalidParameter("the Dirac must sit strictly inside the window")
    grid = cascade_evaluate(spec)
    blocks = {}
    for j in range(J):
        k = np.arange(T * 2**j)
        for g in genders(d, j, 0):
            factors = [grid.eval(gi, 2.0**j * x0[i] - k) for i, gi in enumerate(g)]
            block = factors[0]
            for f in factors[1:]:
                block = np.multiply.outer(block, f)
            blocks[(j, g)] = 2.0 ** (j * d / 2.0) * block
    return CoefficientField(d, T, J, blocks, "dirac", None, spec.name, boundary="none", guard_band=0,
                            meta={"x0": x0.tolist()})
