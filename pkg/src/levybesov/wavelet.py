"""Haar and Daubechies filters, cascade evaluation and periodic forward DWT.

Convention: the father wavelet psi_F solves psi_F(x) = sqrt2 sum_k h_k psi_F(2x - k)
with h supported on 0..2N-1, and the mother is psi_M(x) = sqrt2 sum_k g_k psi_F(2x - k)
with g_k = (-1)^k h_{1-k}. Hence psi_F lives on [0, 2N-1] and psi_M on [1-N, N].
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .coefficients import CoefficientField, genders
from .errors import InvalidParameter, NonConvergence, ShapeMismatch, UnsupportedOrder

MAX_ORDER = 10
DEFAULT_DEPTH = 12


@dataclass(frozen=True)
class WaveletSpec:
    """Daubechies wavelet of order ``N`` (``N = 1`` is Haar), evaluated on the grid 2^-L Z."""

    order: int = 1
    cascade_depth: int = DEFAULT_DEPTH

    def __post_init__(self):
        if not isinstance(self.order, (int, np.integer)) or not 1 <= self.order <= MAX_ORDER:
            raise UnsupportedOrder(f"Daubechies order must be an integer in 1..{MAX_ORDER}, got {self.order}")
        if not 4 <= self.cascade_depth <= 16:
            raise InvalidParameter(f"cascade depth must lie in [4, 16], got {self.cascade_depth}")

    @classmethod
    def haar(cls, cascade_depth: int = DEFAULT_DEPTH) -> WaveletSpec:
        return cls(1, cascade_depth)

    @classmethod
    def daubechies(cls, N: int, cascade_depth: int = DEFAULT_DEPTH) -> WaveletSpec:
        return cls(N, cascade_depth)

    @classmethod
    def parse(cls, text: str, cascade_depth: int = DEFAULT_DEPTH) -> WaveletSpec:
        """Accept ``haar``, ``db4``, ``daubechies4``, ``daubechies-4``."""
        t = str(text).strip().lower()
        if t == "haar":
            return cls.haar(cascade_depth)
        for prefix in ("daubechies", "db"):
            if t.startswith(prefix):
                try:
                    return cls(int(t[len(prefix):].lstrip("-_")), cascade_depth)
                except ValueError:
                    break
        raise UnsupportedOrder(f"unknown wavelet {text!r}")

    @property
    def is_haar(self) -> bool:
        return self.order == 1

    @property
    def name(self) -> str:
        return "haar" if self.is_haar else f"db{self.order}"

    @property
    def filter_length(self) -> int:
        return 2 * self.order

    @property
    def regularity(self) -> float:
        """Hoelder regularity used for the admissibility flag.

        Haar functions are in B^s_{p,p} only for s < 1/p; for Daubechies of
        order N we use the classical lower bound 0.2 N (N >= 2).
        """
        return 0.0 if self.is_haar else 0.2 * self.order

    def to_dict(self) -> dict:
        return {"kind": "haar" if self.is_haar else "daubechies", "order": self.order, "cascade_depth": self.cascade_depth}


@dataclass(frozen=True)
class FilterPair:
    lowpass: np.ndarray  # h_0 .. h_{2N-1}
    highpass: np.ndarray  # g_{2-2N} .. g_1
    low_start: int
    high_start: int

    @property
    def support(self) -> tuple[int, int]:
        return self.low_start, self.low_start + len(self.lowpass) - 1

    def orthonormality_residual(self) -> float:
        h = self.lowpass
        worst = 0.0
        for m in range(len(h) // 2):
            s = float(np.dot(h[: len(h) - 2 * m], h[2 * m :]))
            worst = max(worst, abs(s - (1.0 if m == 0 else 0.0)))
        return worst


def _daubechies_lowpass(N: int) -> np.ndarray:
    """Extremal-phase Daubechies filter by spectral factorisation.

    |H(w)|^2 = 2 cos^{2N}(w/2) P(sin^2(w/2)) with P(y) = sum_k C(N-1+k, k) y^k.
    Each root y of P gives z + 1/z = 2 - 4y; keeping the roots inside the unit
    circle yields the minimum-phase factor.
    """
    with mpmath.workdps(60):
        coeffs = [mpmath.binomial(N - 1 + k, k) for k in range(N)]
        ys = mpmath.polyroots(coeffs[::-1], maxsteps=400, extraprec=200) if N > 1 else []
        poly = [mpmath.mpc(1)]
        for y in ys:
            b = 2 - 4 * y
            disc = mpmath.sqrt(b * b - 4)
            r1, r2 = (b + disc) / 2, (b - disc) / 2
            r = r1 if abs(r1) < 1 else r2
            poly = _polymul(poly, [mpmath.mpc(1), -r])
        for _ in range(N):
            poly = _polymul(poly, [mpmath.mpc(1), mpmath.mpc(1)])
        scale = mpmath.sqrt(2) / mpmath.fsum(poly)
        h = [mpmath.re(c * scale) for c in poly]
        return np.array([float(c) for c in h])


def _polymul(a, b):
    out = [mpmath.mpc(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for k, y in enumerate(b):
            out[i + k] += x * y
    return out


@functools.cache
def _filters_cached(N: int) -> FilterPair:
    if N == 1:
        h = np.array([1.0, 1.0]) / math.sqrt(2.0)
    else:
        h = _daubechies_lowpass(N)
        # extremal phase with the energy at the front, as in the classical tables
        if abs(h[0]) < abs(h[-1]):
            h = h[::-1].copy()
    L = len(h)
    ks = np.arange(2 - L, 2)
    g = np.array([(-1.0) ** (k % 2) * h[1 - k] for k in ks])
    pair = FilterPair(h, g, 0, 2 - L)
    if pair.orthonormality_residual() > 1e-12 or abs(h.sum() - math.sqrt(2.0)) > 1e-12:
        raise NonConvergence(f"filter construction for order {N} is not orthonormal")
    return pair


def build_filters(spec: WaveletSpec) -> FilterPair:
    return _filters_cached(int(spec.order))


@dataclass(frozen=True)
class DyadicGridFunction:
    """Samples of psi_F on [0, 2N-1] and psi_M on [1-N, N] at spacing 2^-L."""

    depth: int
    father_start: int
    father: np.ndarray
    mother_start: int
    mother: np.ndarray
    exact: bool = False

    @property
    def step(self) -> float:
        return 2.0 ** -self.depth

    def _eval(self, start, values, x, haar_kind):
        x = np.asarray(x, dtype=float)
        if self.exact:
            if haar_kind == "F":
                return ((x >= 0) & (x < 1)).astype(float)
            return np.where((x >= 0) & (x < 0.5), 1.0, np.where((x >= 0.5) & (x < 1), -1.0, 0.0))
        idx = np.rint((x - start) * 2**self.depth).astype(np.int64)
        ok = (idx >= 0) & (idx < len(values))
        return np.where(ok, values[np.clip(idx, 0, len(values) - 1)], 0.0)

    def eval_father(self, x):
        """psi_F at x, snapped to the nearest grid point (exact for Haar)."""
        return self._eval(self.father_start, self.father, x, "F")

    def eval_mother(self, x):
        return self._eval(self.mother_start, self.mother, x, "M")

    def eval(self, gender: str, x):
        return self.eval_father(x) if gender == "F" else self.eval_mother(x)

    def support(self, gender: str) -> tuple[int, int]:
        if gender == "F":
            return self.father_start, self.father_start + (len(self.father) - 1) // 2**self.depth
        return self.mother_start, self.mother_start + (len(self.mother) - 1) // 2**self.depth


def _integer_values(h: np.ndarray, max_iter: int = 60, tol: float = 1e-10) -> np.ndarray:
    """psi_F at 0..L-1 by power iteration of the two-scale operator."""
    L = len(h)
    A = np.zeros((L, L))
    for n in range(L):
        for m in range(L):
            k = 2 * n - m
            if 0 <= k < L:
                A[n, m] = math.sqrt(2.0) * h[k]
    v = np.zeros(L)
    v[1 : L - 1] = 1.0 / (L - 2)
    for _ in range(max_iter):
        w = A @ v
        w /= w.sum()
        if np.max(np.abs(w - v)) <= tol:
            return w
        v = w
    raise NonConvergence(f"cascade did not converge in {max_iter} iterations")


@functools.cache
def _cascade_cached(N: int, depth: int) -> DyadicGridFunction:
    h = build_filters(WaveletSpec(N, depth)).lowpass
    L = len(h)
    if N == 1:
        n = 2**depth
        father = np.ones(n + 1)
        father[-1] = 0.0
        mother = np.concatenate([np.ones(n // 2), -np.ones(n // 2), [0.0]])
        return DyadicGridFunction(depth, 0, father, 0, mother, exact=True)
    phi = _integer_values(h)
    phi[0] = phi[-1] = 0.0
    s2 = math.sqrt(2.0)
    for lev in range(1, depth + 1):
        # values on 2^-lev Z over [0, L-1]; even points are inherited
        size = (L - 1) * 2**lev + 1
        new = np.zeros(size)
        half = 2 ** (lev - 1)
        coarse_len = len(phi)
        n = np.arange(size)
        for k in range(L):
            # phi(2x - k) with x = n 2^-lev sits at index n - k 2^(lev-1) of the coarser grid
            src = n - k * half
            ok = (src >= 0) & (src < coarse_len)
            new[ok] += s2 * h[k] * phi[src[ok]]
        phi = new
    # mother on [1-N, N]: psi_M(x) = sqrt2 sum_k g_k phi(2x - k)
    pair = build_filters(WaveletSpec(N, depth))
    size = (2 * N - 1) * 2**depth + 1
    mother = np.zeros(size)
    n = np.arange(size)
    for g, k in zip(pair.highpass, range(pair.high_start, 2)):
        src = 2 * n + (2 * (1 - N) - k) * 2**depth
        ok = (src >= 0) & (src < len(phi))
        mother[ok] += s2 * g * phi[src[ok]]
    return DyadicGridFunction(depth, 0, phi, 1 - N, mother)


def cascade_evaluate(spec: WaveletSpec) -> DyadicGridFunction:
    return _cascade_cached(int(spec.order), int(spec.cascade_depth))


def _analysis_step(x: np.ndarray, pair: FilterPair, axis: int) -> tuple[np.ndarray, np.ndarray]:
    """One periodic Mallat step along ``axis``: a_k = sum h_n x_{2k+n}, d_k = sum g_n x_{2k+n}."""
    n = x.shape[axis]
    if n % 2:
        raise ShapeMismatch(f"axis length {n} is odd")
    lo = np.zeros_like(np.take(x, np.arange(0, n, 2), axis=axis))
    hi = np.zeros_like(lo)
    for tap, c in enumerate(pair.lowpass):
        lo += c * np.take(x, (np.arange(0, n, 2) + tap + pair.low_start) % n, axis=axis)
    for tap, c in enumerate(pair.highpass):
        hi += c * np.take(x, (np.arange(0, n, 2) + tap + pair.high_start) % n, axis=axis)
    return lo, hi


def dwt_forward(
    grid: np.ndarray, spec: WaveletSpec, levels: int, *, J: int | None = None, T: int | None = None,
    backend: str = "grid-dwt", seed: int | None = None,
) -> CoefficientField:
    """Periodic separable forward transform of scale-J father coefficients.

    Returns mother blocks for j = J-levels .. J-1 and the father block at
    j0 = J-levels. ``J`` defaults to log2 of the side length (``T = 1``).
    """
    grid = np.asarray(grid, dtype=float)
    d = grid.ndim
    if d not in (1, 2):
        raise ShapeMismatch(f"only d = 1, 2 supported, got {d}")
    side = grid.shape[0]
    if any(s != side for s in grid.shape):
        raise ShapeMismatch("grid must be square")
    if levels < 1 or side % 2**levels:
        raise ShapeMismatch(f"side {side} is not divisible by 2^{levels}")
    if J is None:
        T = T or 1
        J = round(math.log2(side / T))
    if T is None:
        T = side // 2**J
    if T * 2**J != side:
        raise ShapeMismatch(f"side {side} != T 2^J = {T} * 2^{J}")
    if J - levels < 0:
        raise ShapeMismatch("more levels than scales")
    pair = build_filters(spec)
    blocks: dict[tuple[int, str], np.ndarray] = {}
    cur = grid
    for j in range(J - 1, J - levels - 1, -1):
        parts = {"": cur}
        for axis in range(d):
            nxt = {}
            for tag, arr in parts.items():
                lo, hi = _analysis_step(arr, pair, axis)
                nxt[tag + "F"], nxt[tag + "M"] = lo, hi
            parts = nxt
        for g in genders(d, j + 1, 0):
            blocks[(j, g)] = parts[g]
        cur = parts["F" * d]
    blocks[(J - levels, "F" * d)] = cur
    return CoefficientField(d, T, J, blocks, backend, seed, spec.name, j0=J - levels, boundary="periodic")
