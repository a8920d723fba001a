"""Truncated weighted Besov quasi-norms from wavelet coefficients.

For p < inf the p-th power of the norm is sum_j T_j with

    T_j = 2^{j(tau p - d + d p / 2)} sum_{G in G^j} sum_k <2^-j k>^{rho p} |c_{j,G,k}|^p,

<x> = (1 + |x|^2)^{1/2}. Sums run scale-major, then gender, then row-major
k, accumulated with ``math.fsum`` so results do not depend on how the work
was scheduled.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientField
from .errors import InvalidParameter
from .levy_model import INF

CONVERGENT, DIVERGENT, UNDECIDED = "convergent", "divergent", "undecided"
SLOPE_DEAD_ZONE = 0.2
TAIL_SCALES = 5
CSV_HEADER = ("j", "gender_count", "term_count", "T_j", "log2_T_j")


@dataclass(frozen=True)
class BesovParams:
    p: float
    tau: float = 0.0
    rho: float = 0.0
    d: int = 1

    def __post_init__(self):
        if not (self.p > 0):
            raise InvalidParameter(f"p must be positive or inf, got {self.p}")
        if self.d not in (1, 2):
            raise InvalidParameter(f"dimension must be 1 or 2, got {self.d}")

    @property
    def scale_exponent(self) -> float:
        """Exponent e in the factor 2^{j e} of T_j."""
        return self.tau * self.p - self.d + self.d * self.p / 2.0


@dataclass(frozen=True)
class ScaleContribution:
    j: int
    T_j: float
    count: int
    gender_count: int
    full_count: int

    @property
    def log2_T(self) -> float:
        return math.log2(self.T_j) if self.T_j > 0 else -INF

    def csv_row(self) -> list:
        return [self.j, self.gender_count, self.count, repr(self.T_j), repr(self.log2_T)]


def interior_mask(field: CoefficientField, j: int) -> np.ndarray | None:
    """Boolean mask of shifts kept at scale j, or None when nothing is excluded.

    Periodic wrap only contaminates coefficients of wavelets wider than one
    cell, so Haar fields and fields with too few shifts keep everything.
    """
    g = field.guard_band
    n = field.T * 2**j
    if g == 0 or field.wavelet == "haar" or field.boundary != "periodic" or n <= 4 * g:
        return None
    keep1 = np.zeros(n, dtype=bool)
    keep1[g : n - g] = True
    mask = keep1
    for _ in range(field.d - 1):
        mask = np.multiply.outer(mask, keep1)
    return mask


def _weights(shape: tuple[int, ...], j: int, rho_p: float) -> np.ndarray | float:
    if rho_p == 0.0:
        return 1.0
    grids = np.meshgrid(*[np.arange(n) * 2.0**-j for n in shape], indexing="ij")
    return (1.0 + sum(x * x for x in grids)) ** (rho_p / 2.0)


def per_scale_contributions(field: CoefficientField, params: BesovParams) -> list[ScaleContribution]:
    if params.p == INF:
        raise InvalidParameter("per-scale terms are defined for p < inf; use weighted_partial_norm")
    if params.d != field.d:
        raise InvalidParameter(f"parameter dimension {params.d} does not match field dimension {field.d}")
    p, e = params.p, params.scale_exponent
    out = []
    for j in field.scales:
        gs = field.genders_at(j)
        parts = []
        count = full = 0
        for g in gs:
            c = field.blocks[(j, g)]
            terms = _weights(c.shape, j, params.rho * p) * np.abs(c) ** p
            mask = interior_mask(field, j)
            full += c.size
            if mask is not None:
                terms = terms[mask]
            count += terms.size
            parts.append(math.fsum(np.ravel(terms)))
        total = math.fsum(parts)
        out.append(ScaleContribution(j, 2.0 ** (j * e) * total, count, len(gs), full))
    return out


def weighted_partial_norm(field: CoefficientField, params: BesovParams, J_cut: int | None = None) -> float:
    """(sum_{j <= J_cut} T_j)^{1/p}, or the weighted sup when p = inf."""
    if J_cut is None:
        J_cut = max(field.scales, default=-1)
    if field.scales and J_cut > max(field.scales):
        raise InvalidParameter(f"J_cut {J_cut} exceeds the finest scale {max(field.scales)}")
    if params.p == INF:
        best = 0.0
        for j, g, c in field.ordered_blocks():
            if j > J_cut:
                break
            w = _weights(c.shape, j, params.rho)
            best = max(best, 2.0 ** (j * (params.tau + params.d / 2.0)) * float(np.max(w * np.abs(c), initial=0.0)))
        return best
    terms = [s.T_j for s in per_scale_contributions(field, params) if s.j <= J_cut]
    return math.fsum(terms) ** (1.0 / params.p)


@dataclass(frozen=True)
class ConvergenceVerdict:
    verdict: str
    slope: float
    scales: tuple[int, ...]


def tail_slope(contribs: list[ScaleContribution], n_last: int = TAIL_SCALES) -> tuple[float, tuple[int, ...]]:
    pts = [(s.j, s.log2_T) for s in contribs if s.T_j > 0][-n_last:]
    if len(pts) < 3:
        return math.nan, tuple(j for j, _ in pts)
    js, ys = zip(*pts)
    slope = float(np.polyfit(js, ys, 1)[0])
    return slope, tuple(js)


def classify_convergence(contribs: list[ScaleContribution], dead_zone: float = SLOPE_DEAD_ZONE) -> ConvergenceVerdict:
    """Convergent if the tail slope of log2 T_j is <= -dead_zone, divergent if >= +dead_zone."""
    slope, js = tail_slope(contribs)
    if not math.isfinite(slope):
        verdict = UNDECIDED
    elif slope <= -dead_zone:
        verdict = CONVERGENT
    elif slope >= dead_zone:
        verdict = DIVERGENT
    else:
        verdict = UNDECIDED
    return ConvergenceVerdict(verdict, slope, js)


def per_scale_csv(contribs: list[ScaleContribution]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for s in contribs:
        w.writerow(s.csv_row())
    return buf.getvalue()
