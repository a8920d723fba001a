"""Levy exponents, triplets and the indices that govern Besov regularity.

A :class:`LevyModel` bundles a named noise family with its parameters and
knows how to evaluate the Levy exponent ``Psi`` (the log-characteristic
function of the unit-cell integral). The indices ``beta_inf``,
``beta_inf_lower`` and ``p_max`` are available in closed form for every
named family and can be estimated numerically from ``Psi`` for any model.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import mpmath
import numpy as np
from scipy import integrate, special

from . import _quad
from .errors import (
    DegenerateExponent,
    InvalidParameter,
    MomentInfinite,
    NoClosedForm,
    NonFiniteTailMass,
)

INF = math.inf


def format_index(x: float) -> str | float:
    """JSON-friendly index value; the infinite moment index prints as ``"inf"``."""
    return "inf" if x == INF else float(x)


def parse_index(x) -> float:
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "infinity", "+inf"):
            return INF
        return float(x)
    return float(x)


class Family(str, enum.Enum):
    GAUSSIAN = "Gaussian"
    CAUCHY = "Cauchy"
    SAS = "SaS"
    SUM_OF_STABLES = "SumOfStables"
    LAPLACE = "Laplace"
    SYMMETRIC_GAMMA = "SymmetricGamma"
    COMPOUND_POISSON = "CompoundPoisson"
    LAYERED_STABLE = "LayeredStable"
    INVERSE_GAUSSIAN = "InverseGaussian"
    FARKAS_SINGLE = "FarkasSingle"
    FARKAS_DOUBLE = "FarkasDouble"
    CUSTOM = "CustomExponent"

    @classmethod
    def parse(cls, name: str) -> Family:
        key = name.replace("α", "a").replace("_", "").replace("-", "").lower()
        for fam in cls:
            if fam.value.lower() == key or fam.name.replace("_", "").lower() == key:
                return fam
        if key in ("sas", "salphas", "stable", "symmetricstable"):
            return cls.SAS
        raise InvalidParameter(f"unknown noise family {name!r}")


SYMMETRIC_FAMILIES = frozenset(Family) - {Family.INVERSE_GAUSSIAN, Family.COMPOUND_POISSON, Family.CUSTOM}


# ---------------------------------------------------------------------------
# jump laws and Levy measures
# ---------------------------------------------------------------------------

_REGIONS = ("all", "small", "large")


def _check_region(region: str) -> None:
    if region not in _REGIONS:
        raise InvalidParameter(f"region must be one of {_REGIONS}, got {region!r}")


@dataclass(frozen=True)
class JumpLaw:
    """Jump-size distribution of a compound Poisson noise.

    kinds: ``normal`` (scale), ``uniform`` (low, high), ``point`` (value),
    ``symmetric_pareto`` (alpha; density alpha |t|^(-alpha-1) / 2 on |t| >= 1).
    """

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        k, p = self.kind, self.params
        if k == "normal":
            if len(p) != 1 or not p[0] > 0:
                raise InvalidParameter("normal jumps need one positive scale")
        elif k == "uniform":
            if len(p) != 2 or not p[0] < p[1]:
                raise InvalidParameter("uniform jumps need low < high")
        elif k == "point":
            if len(p) != 1 or p[0] == 0.0:
                raise InvalidParameter("point-mass jumps must sit away from 0")
        elif k == "symmetric_pareto":
            if len(p) != 1 or not p[0] > 0:
                raise InvalidParameter("pareto jumps need alpha > 0")
        else:
            raise InvalidParameter(f"unknown jump law {k!r}")

    @classmethod
    def normal(cls, scale: float = 1.0) -> JumpLaw:
        return cls("normal", (float(scale),))

    @classmethod
    def uniform(cls, low: float, high: float) -> JumpLaw:
        return cls("uniform", (float(low), float(high)))

    @classmethod
    def point(cls, value: float = 1.0) -> JumpLaw:
        return cls("point", (float(value),))

    @classmethod
    def symmetric_pareto(cls, alpha: float) -> JumpLaw:
        return cls("symmetric_pareto", (float(alpha),))

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> JumpLaw:
        kind = d["kind"]
        if kind == "normal":
            return cls.normal(d.get("scale", 1.0))
        if kind == "uniform":
            return cls.uniform(d["low"], d["high"])
        if kind == "point":
            return cls.point(d.get("value", 1.0))
        if kind == "symmetric_pareto":
            return cls.symmetric_pareto(d["alpha"])
        raise InvalidParameter(f"unknown jump law {kind!r}")

    def to_dict(self) -> dict:
        names = {
            "normal": ("scale",),
            "uniform": ("low", "high"),
            "point": ("value",),
            "symmetric_pareto": ("alpha",),
        }[self.kind]
        return {"kind": self.kind, **dict(zip(names, self.params))}

    @property
    def is_symmetric(self) -> bool:
        if self.kind == "uniform":
            return self.params[0] == -self.params[1]
        return self.kind != "point"

    @property
    def moment_index(self) -> float:
        return self.params[0] if self.kind == "symmetric_pareto" else INF

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        k, p = self.kind, self.params
        if k == "normal":
            return rng.normal(0.0, p[0], size)
        if k == "uniform":
            return rng.uniform(p[0], p[1], size)
        if k == "point":
            return np.full(size, p[0])
        mag = (1.0 - rng.random(size)) ** (-1.0 / p[0])
        return np.where(rng.random(size) < 0.5, -mag, mag)

    # pieces restricted to |t| <= 1 ("small") or |t| > 1 ("large")

    def _intervals(self, region: str) -> list[tuple[float, float]]:
        lo, hi = self.params
        if region == "all":
            cand = [(lo, hi)]
        elif region == "small":
            cand = [(max(lo, -1.0), min(hi, 1.0))]
        else:
            cand = [(lo, min(hi, -1.0)), (max(lo, 1.0), hi)]
        return [(a, b) for a, b in cand if b > a]

    def mass(self, region: str = "all") -> float:
        _check_region(region)
        k, p = self.kind, self.params
        if region == "all":
            return 1.0
        if k == "point":
            inside = abs(p[0]) <= 1.0
            return float(inside if region == "small" else not inside)
        if k == "symmetric_pareto":
            return 0.0 if region == "small" else 1.0
        if k == "normal":
            small = math.erf(1.0 / (p[0] * math.sqrt(2.0)))
            return small if region == "small" else 1.0 - small
        return sum(b - a for a, b in self._intervals(region)) / (p[1] - p[0])

    def mean(self, region: str = "all") -> float:
        _check_region(region)
        k, p = self.kind, self.params
        if k == "point":
            return p[0] * self.mass(region)
        if k == "uniform":
            return sum(b * b - a * a for a, b in self._intervals(region)) / (2.0 * (p[1] - p[0]))
        if k == "symmetric_pareto" and p[0] <= 1.0 and region != "small":
            raise MomentInfinite("pareto jumps with alpha <= 1 have no mean")
        return 0.0

    def cf(self, xi: float, region: str = "all") -> complex:
        """int_region exp(i xi t) P(dt)."""
        _check_region(region)
        k, p = self.kind, self.params
        if k == "point":
            return complex(np.exp(1j * xi * p[0])) * self.mass(region)
        if k == "uniform":
            out = 0j
            for a, b in self._intervals(region):
                half = (b - a) / 2.0
                out += np.exp(1j * xi * (a + half)) * (b - a) * np.sinc(xi * half / np.pi)
            return complex(out) / (p[1] - p[0])
        if k == "symmetric_pareto":
            if region == "small":
                return 0j
            a = p[0]
            return complex(1.0) if xi == 0 else complex(a * _quad.fourier_tail(a + 1.0, abs(xi)))
        s = p[0]
        full = math.exp(-0.5 * (s * xi) ** 2)
        if region == "all":
            return complex(full)
        small = _quad._checked_quad(
            lambda t: math.cos(xi * t) * math.exp(-0.5 * (t / s) ** 2) / (s * math.sqrt(2 * math.pi)),
            -1.0,
            1.0,
        )
        return complex(small if region == "small" else full - small)


class LevyMeasure:
    """Base for the symbolic Levy-measure descriptors of a triplet."""

    region = "all"

    def psi(self, xi: float) -> complex:  # pragma: no cover - abstract
        raise NotImplementedError

    def restrict(self, region: str) -> LevyMeasure:  # pragma: no cover - abstract
        raise NotImplementedError

    def tail_mass(self) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True)
class ZeroMeasure(LevyMeasure):
    def psi(self, xi):
        return 0j

    def restrict(self, region):
        return self

    def tail_mass(self):
        return 0.0

    @property
    def is_zero(self):
        return True

    def to_dict(self):
        return {"kind": "zero"}


@dataclass(frozen=True)
class FiniteMeasure(LevyMeasure):
    """The finite measure ``rate * P`` (optionally restricted to a region)."""

    rate: float
    law: JumpLaw
    region: str = "all"

    def __post_init__(self):
        if not self.rate > 0:
            raise InvalidParameter("jump rate must be positive")
        _check_region(self.region)

    def psi(self, xi):
        # Levy-Khintchine with the compensator on |t| <= 1
        out = 0j
        for reg in (("small", "large") if self.region == "all" else (self.region,)):
            m = self.law.mass(reg)
            if m == 0.0:
                continue
            part = self.law.cf(xi, reg) - m
            if reg == "small":
                part -= 1j * xi * self.law.mean("small")
            out += part
        return self.rate * out

    def restrict(self, region):
        _check_region(region)
        if region == "all" or region == self.region:
            return self
        if self.region != "all":
            return ZeroMeasure()
        other = "large" if region == "small" else "small"
        if self.law.mass(region) == 0.0:
            return ZeroMeasure()
        if self.law.mass(other) == 0.0:
            return self
        return FiniteMeasure(self.rate, self.law, region)

    def tail_mass(self):
        if self.region == "small":
            return 0.0
        return self.rate * self.law.mass("large")

    def to_dict(self):
        return {"kind": "finite", "rate": self.rate, "jumps": self.law.to_dict(), "region": self.region}


@dataclass(frozen=True)
class PowerLawMeasure(LevyMeasure):
    """Symmetric density c_s |t|^(-a_s-1) on |t| <= 1 and c_l |t|^(-a_l-1) on |t| > 1."""

    c_small: float
    a_small: float
    c_large: float
    a_large: float
    region: str = "all"

    def __post_init__(self):
        _check_region(self.region)
        if self.c_small < 0 or self.c_large < 0:
            raise InvalidParameter("density coefficients must be nonnegative")
        if self.c_small > 0 and not 0.0 < self.a_small < 2.0:
            raise InvalidParameter("small-jump exponent must lie in (0, 2)")

    def _has(self, reg):
        coeff = self.c_small if reg == "small" else self.c_large
        return coeff > 0 and self.region in ("all", reg)

    def psi(self, xi):
        out = 0.0
        if self._has("small"):
            out += 2.0 * self.c_small * _quad.small_jump_integral(self.a_small, xi)
        if self._has("large"):
            if self.a_large <= 0:
                raise NonFiniteTailMass("density tail is not integrable")
            out += 2.0 * self.c_large * _quad.large_jump_integral(self.a_large, xi)
        return complex(out)

    def restrict(self, region):
        _check_region(region)
        if region == "all" or region == self.region:
            return self
        if not self._has(region):
            return ZeroMeasure()
        return PowerLawMeasure(self.c_small, self.a_small, self.c_large, self.a_large, region)

    def density(self, t: float) -> float:
        at = abs(t)
        if at == 0.0:
            return INF
        if at <= 1.0:
            return self.c_small * at ** (-self.a_small - 1.0) if self._has("small") else 0.0
        return self.c_large * at ** (-self.a_large - 1.0) if self._has("large") else 0.0

    def tail_mass(self):
        if not self._has("large"):
            return 0.0
        return 2.0 * tail_integral(lambda t: self.c_large * t ** (-self.a_large - 1.0))

    def to_dict(self):
        return {
            "kind": "power_law",
            "c_small": self.c_small,
            "a_small": self.a_small,
            "c_large": self.c_large,
            "a_large": self.a_large,
            "region": self.region,
        }


def measure_from_dict(d: Mapping[str, Any] | None) -> LevyMeasure:
    if not d or d.get("kind", "zero") == "zero":
        return ZeroMeasure()
    kind = d["kind"]
    region = d.get("region", "all")
    if kind == "finite":
        return FiniteMeasure(float(d["rate"]), JumpLaw.from_dict(d["jumps"]), region)
    if kind == "power_law":
        return PowerLawMeasure(
            float(d.get("c_small", 1.0)),
            float(d["a_small"]),
            float(d.get("c_large", 1.0)),
            float(d["a_large"]),
            region,
        )
    raise InvalidParameter(f"unknown Levy measure kind {kind!r}")


def tail_integral(f: Callable[[float], float], cutoffs=(1e3, 1e6, 1e9, 1e12)) -> float:
    """int_1^inf f(t) dt with a divergence check over growing cutoffs.

    The integral is accumulated in the log variable over [1, R_1], [R_1, R_2], ...
    A finite integral must show geometrically shrinking increments (ratio at
    most 1/2 between the last two blocks); the remainder beyond the last
    cutoff is extrapolated geometrically. Anything else raises
    :class:`NonFiniteTailMass`.
    """
    g = lambda u: f(math.exp(u)) * math.exp(u)
    edges = [0.0] + [math.log(r) for r in cutoffs]
    incs = [integrate.quad(g, a, b, limit=200)[0] for a, b in itertools.pairwise(edges)]
    last, prev = abs(incs[-1]), abs(incs[-2])
    if not last <= 0.5 * prev + 1e-300:
        raise NonFiniteTailMass(f"tail increments {incs} do not decay")
    r = last / prev if prev > 0 else 0.0
    return math.fsum(incs) + incs[-1] * r / (1.0 - r)


@dataclass(frozen=True)
class LevyTriplet:
    """Levy-Khintchine triplet (drift, Gaussian variance, jump measure)."""

    mu: float = 0.0
    sigma2: float = 0.0
    measure: LevyMeasure = field(default_factory=ZeroMeasure)

    def __post_init__(self):
        if self.sigma2 < 0:
            raise InvalidParameter("Gaussian variance must be nonnegative")

    def psi(self, xi: float) -> complex:
        return 1j * self.mu * xi - 0.5 * self.sigma2 * xi * xi + self.measure.psi(xi)

    @property
    def is_zero(self) -> bool:
        return self.mu == 0 and self.sigma2 == 0 and self.measure.is_zero

    @property
    def rate(self) -> float:
        """Mass of the jump measure outside [-1, 1]."""
        return self.measure.tail_mass()

    def to_dict(self) -> dict:
        return {"mu": self.mu, "sigma2": self.sigma2, "levy_measure": self.measure.to_dict()}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> LevyTriplet:
        return cls(float(d.get("mu", 0.0)), float(d.get("sigma2", 0.0)), measure_from_dict(d.get("levy_measure")))


# ---------------------------------------------------------------------------
# indices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseIndices:
    beta_inf: float
    beta_inf_lower: float
    p_max: float
    heuristic: bool = False
    detail: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (0.0 <= self.beta_inf_lower <= self.beta_inf <= 2.0):
            raise InvalidParameter(
                f"indices must satisfy 0 <= lower ({self.beta_inf_lower}) <= beta_inf ({self.beta_inf}) <= 2"
            )
        if not self.p_max > 0:
            raise InvalidParameter("moment index must be positive")

    @property
    def pruitt_beta0(self) -> float:
        return min(self.p_max, 2.0)

    def to_dict(self) -> dict:
        out = {
            "beta_inf": self.beta_inf,
            "beta_inf_lower": self.beta_inf_lower,
            "p_max": format_index(self.p_max),
            "pruitt_beta0": self.pruitt_beta0,
            "heuristic": self.heuristic,
        }
        if self.detail:
            out["detail"] = dict(self.detail)
        return out


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

_PARAM_NAMES: dict[Family, tuple[str, ...]] = {
    Family.GAUSSIAN: ("sigma2",),
    Family.CAUCHY: ("gamma",),
    Family.SAS: ("alpha",),
    Family.SUM_OF_STABLES: ("alpha1", "alpha2"),
    Family.LAPLACE: ("sigma2",),
    Family.SYMMETRIC_GAMMA: ("sigma2", "lam"),
    Family.COMPOUND_POISSON: ("lam", "jumps"),
    Family.LAYERED_STABLE: ("alpha1", "alpha2"),
    Family.INVERSE_GAUSSIAN: (),
    Family.FARKAS_SINGLE: ("beta2", "M"),
    Family.FARKAS_DOUBLE: ("beta1", "beta2", "M"),
    Family.CUSTOM: (),
}

_DEFAULTS: dict[str, Any] = {"sigma2": 1.0, "gamma": 1.0, "lam": 1.0, "M": 8}


@dataclass
class LevyModel:
    """A Levy white noise: named family plus parameters, or a custom exponent.

    Custom models carry either an ``exponent`` callable or a ``triplet``
    (or both, the callable taking precedence for evaluation).
    """

    family: Family
    params: dict[str, Any] = field(default_factory=dict)
    exponent: Callable[[float], complex] | None = None
    triplet: LevyTriplet | None = None
    declared_indices: NoiseIndices | None = None

    def __post_init__(self):
        self.family = Family.parse(self.family) if isinstance(self.family, str) else Family(self.family)
        names = _PARAM_NAMES[self.family]
        params = {k: self.params.get(k, _DEFAULTS.get(k)) for k in names}
        missing = [k for k, v in params.items() if v is None]
        if missing:
            raise InvalidParameter(f"{self.family.value} needs parameters {missing}")
        extra = set(self.params) - set(names)
        if extra:
            raise InvalidParameter(f"unexpected parameters {sorted(extra)} for {self.family.value}")
        for k, v in params.items():
            if k == "jumps":
                params[k] = v if isinstance(v, JumpLaw) else JumpLaw.from_dict(v)
            else:
                params[k] = float(v)
        self.params = params
        self._validate()

    def _validate(self):
        f, p = self.family, self.params

        def need(cond, msg):
            if not cond:
                raise InvalidParameter(f"{f.value}: {msg}")

        if f in (Family.GAUSSIAN, Family.LAPLACE):
            need(p["sigma2"] > 0, "sigma2 must be positive")
        elif f is Family.CAUCHY:
            need(p["gamma"] > 0, "gamma must be positive")
        elif f is Family.SAS:
            need(0 < p["alpha"] <= 2, "alpha must lie in (0, 2]")
        elif f is Family.SUM_OF_STABLES:
            need(0 < p["alpha1"] <= 2 and 0 < p["alpha2"] <= 2, "alphas must lie in (0, 2]")
        elif f is Family.SYMMETRIC_GAMMA:
            need(p["sigma2"] > 0 and p["lam"] > 0, "sigma2 and lam must be positive")
        elif f is Family.COMPOUND_POISSON:
            need(p["lam"] > 0, "lam must be positive")
        elif f is Family.LAYERED_STABLE:
            need(0 < p["alpha1"] < 2 and 0 < p["alpha2"] < 2, "alphas must lie in (0, 2)")
        elif f in (Family.FARKAS_SINGLE, Family.FARKAS_DOUBLE):
            need(0 < p["beta2"] < 2, "beta2 must lie in (0, 2)")
            need(p["M"] == int(p["M"]) and p["M"] > 2.0 / (2.0 - p["beta2"]), "M must be an integer > 2/(2-beta2)")
            if f is Family.FARKAS_DOUBLE:
                need(0 < p["beta1"] <= p["beta2"], "need 0 < beta1 <= beta2")
        elif f is Family.CUSTOM:
            need(self.exponent is not None or self.triplet is not None, "needs an exponent or a triplet")

    # constructors -------------------------------------------------------

    @classmethod
    def gaussian(cls, sigma2: float = 1.0) -> LevyModel:
        return cls(Family.GAUSSIAN, {"sigma2": sigma2})

    @classmethod
    def cauchy(cls, gamma: float = 1.0) -> LevyModel:
        return cls(Family.CAUCHY, {"gamma": gamma})

    @classmethod
    def sas(cls, alpha: float) -> LevyModel:
        return cls(Family.SAS, {"alpha": alpha})

    @classmethod
    def sum_of_stables(cls, alpha1: float, alpha2: float) -> LevyModel:
        return cls(Family.SUM_OF_STABLES, {"alpha1": alpha1, "alpha2": alpha2})

    @classmethod
    def laplace(cls, sigma2: float = 1.0) -> LevyModel:
        return cls(Family.LAPLACE, {"sigma2": sigma2})

    @classmethod
    def symmetric_gamma(cls, sigma2: float = 1.0, lam: float = 1.0) -> LevyModel:
        return cls(Family.SYMMETRIC_GAMMA, {"sigma2": sigma2, "lam": lam})

    @classmethod
    def compound_poisson(cls, lam: float = 1.0, jumps: JumpLaw | None = None) -> LevyModel:
        return cls(Family.COMPOUND_POISSON, {"lam": lam, "jumps": jumps or JumpLaw.normal(1.0)})

    @classmethod
    def layered_stable(cls, alpha1: float, alpha2: float) -> LevyModel:
        return cls(Family.LAYERED_STABLE, {"alpha1": alpha1, "alpha2": alpha2})

    @classmethod
    def inverse_gaussian(cls) -> LevyModel:
        return cls(Family.INVERSE_GAUSSIAN, {})

    @classmethod
    def farkas_single(cls, beta2: float, M: int = 8) -> LevyModel:
        return cls(Family.FARKAS_SINGLE, {"beta2": beta2, "M": M})

    @classmethod
    def farkas_double(cls, beta1: float, beta2: float, M: int = 8) -> LevyModel:
        return cls(Family.FARKAS_DOUBLE, {"beta1": beta1, "beta2": beta2, "M": M})

    @classmethod
    def custom(cls, exponent=None, triplet: LevyTriplet | None = None, indices: NoiseIndices | None = None):
        return cls(Family.CUSTOM, {}, exponent=exponent, triplet=triplet, declared_indices=indices)

    @classmethod
    def from_triplet(cls, triplet: LevyTriplet) -> LevyModel:
        return cls.custom(triplet=triplet)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> LevyModel:
        fam = Family.parse(d["family"])
        if fam is Family.CUSTOM:
            if "triplet" not in d:
                raise InvalidParameter("a custom model read from a descriptor must give a triplet")
            idx = d.get("indices")
            indices = None
            if idx:
                indices = NoiseIndices(float(idx["beta_inf"]), float(idx["beta_inf_lower"]), parse_index(idx["p_max"]))
            return cls.custom(triplet=LevyTriplet.from_dict(d["triplet"]), indices=indices)
        return cls(fam, dict(d.get("params", {})))

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"family": self.family.value}
        if self.family is Family.CUSTOM:
            if self.triplet is not None:
                out["triplet"] = self.triplet.to_dict()
            if self.declared_indices is not None:
                out["indices"] = self.declared_indices.to_dict()
            return out
        out["params"] = {k: (v.to_dict() if isinstance(v, JumpLaw) else v) for k, v in self.params.items()}
        return out

    def __str__(self):
        if self.family is Family.CUSTOM:
            return "CustomExponent"
        inner = ", ".join(
            f"{k}={v.kind if isinstance(v, JumpLaw) else format(v, 'g')}" for k, v in self.params.items()
        )
        return f"{self.family.value}({inner})"

    @property
    def is_symmetric(self) -> bool:
        if self.family is Family.COMPOUND_POISSON:
            return self.params["jumps"].is_symmetric
        if self.family is Family.CUSTOM:
            t = self.triplet
            if t is None or t.mu != 0:
                return False
            m = t.measure
            return not isinstance(m, FiniteMeasure) or m.law.is_symmetric
        return self.family in SYMMETRIC_FAMILIES

    def to_triplet(self) -> LevyTriplet:
        """Levy triplet for the families whose jump measure is a supported descriptor."""
        f, p = self.family, self.params
        if f is Family.CUSTOM and self.triplet is not None:
            return self.triplet
        if f is Family.GAUSSIAN:
            return LevyTriplet(0.0, p["sigma2"])
        if f is Family.COMPOUND_POISSON:
            law = p["jumps"]
            return LevyTriplet(p["lam"] * law.mean("small"), 0.0, FiniteMeasure(p["lam"], law))
        if f is Family.LAYERED_STABLE:
            return LevyTriplet(0.0, 0.0, PowerLawMeasure(1.0, p["alpha1"], 1.0, p["alpha2"]))
        if f in (Family.SAS, Family.CAUCHY):
            alpha = p.get("alpha", 1.0)
            if alpha == 2.0:
                return LevyTriplet(0.0, 2.0)
            c = p.get("gamma", 1.0) / (2.0 * _quad.one_minus_cos_moment(alpha))
            return LevyTriplet(0.0, 0.0, PowerLawMeasure(c, alpha, c, alpha))
        raise NoClosedForm(f"no triplet descriptor for {f.value}")

    def psi(self, xi):
        """Vectorised Levy exponent."""
        if np.ndim(xi) == 0:
            return evaluate_psi(self, xi)
        arr = np.asarray(xi, dtype=float)
        closed = _closed_form_psi(self, arr)
        if closed is not None:
            return closed
        return np.array([evaluate_psi(self, float(x)) for x in arr.ravel()], dtype=complex).reshape(arr.shape)


# ---------------------------------------------------------------------------
# exponent evaluation
# ---------------------------------------------------------------------------


def _closed_form_psi(model: LevyModel, xi: np.ndarray):
    f, p = model.family, model.params
    a = np.abs(xi)
    if f is Family.GAUSSIAN:
        return (-0.5 * p["sigma2"] * xi * xi).astype(complex)
    if f is Family.CAUCHY:
        return (-p["gamma"] * a).astype(complex)
    if f is Family.SAS:
        return (-(a ** p["alpha"])).astype(complex)
    if f is Family.SUM_OF_STABLES:
        return (-(a ** p["alpha1"]) - a ** p["alpha2"]).astype(complex)
    if f is Family.LAPLACE:
        return (-np.log1p(0.5 * p["sigma2"] * xi * xi)).astype(complex)
    if f is Family.SYMMETRIC_GAMMA:
        return (-p["lam"] * np.log1p(0.5 * p["sigma2"] * xi * xi)).astype(complex)
    if f is Family.INVERSE_GAUSSIAN:
        z = np.sqrt(1.0 - 2j * np.asarray(xi, dtype=complex))
        # 1 - sqrt(1 - 2i xi), rearranged to avoid cancellation near 0
        return 2j * xi / (1.0 + z)
    if f is Family.COMPOUND_POISSON and p["jumps"].kind in ("normal", "point", "uniform"):
        law = p["jumps"]
        if law.kind == "normal":
            cf = np.exp(-0.5 * (law.params[0] * xi) ** 2)
        elif law.kind == "point":
            cf = np.exp(1j * xi * law.params[0])
        else:
            lo, hi = law.params
            cf = np.exp(0.5j * xi * (lo + hi)) * np.sinc(xi * (hi - lo) / (2 * np.pi))
        return p["lam"] * (cf - 1.0)
    return None


def _farkas_sum(beta2: float, M: int, xi: float) -> float:
    """sum_k 2^(beta2 M^k - k) (cos(2^-M^k xi) - 1), summed in the log domain.

    Terms stop once past the peak (M^k > log2 xi) and below 1e-12 of the
    largest term, or at k = 12.
    """
    xi = abs(xi)
    if xi == 0.0:
        return 0.0
    log2_xi = math.log2(xi)
    logs = []
    for k in range(1, 13):
        e = M**k
        half = math.ldexp(xi, -e - 1)
        if half > 1e-150:
            s2 = math.sin(half) ** 2
            lg = beta2 * e - k + 1.0 + math.log2(s2) if s2 > 0 else -INF
        else:
            lg = beta2 * e - k + 1.0 + 2.0 * (log2_xi - e - 1)
        logs.append(lg)
        if e > log2_xi + 2 and lg < max(logs) + math.log2(1e-12):
            break
    top = max(logs)
    if top == -INF:
        return 0.0
    if top > 1020:
        raise InvalidParameter("Farkas exponent overflows double precision at this frequency")
    return -(2.0**top) * math.fsum(2.0 ** (lg - top) for lg in logs)


def farkas_log2_abs(beta2: float, M: int, xi) -> float:
    """log2 |Psi_{beta2,M}(xi)| with the phase reduced in multiprecision.

    Needed on ladders such as xi = 2 pi 2^m where all early terms vanish
    exactly; double precision cannot represent that cancellation.
    """
    if xi == 0:
        return -INF
    log2_xi = float(mpmath.mag(xi))
    with mpmath.workprec(max(53, int(log2_xi)) + 160):
        xi = abs(xi)
        total = mpmath.mpf(0)
        for k in range(1, 13):
            e = M**k
            term = mpmath.sin(mpmath.ldexp(xi, -e - 1)) ** 2 * mpmath.power(2, mpmath.mpf(beta2) * e - k + 1)
            total += term
            if e > log2_xi + 2 and term < total * mpmath.mpf("1e-12"):
                break
        if total == 0:
            return -INF
        return float(mpmath.log(total, 2))


def evaluate_psi(model: LevyModel, xi: float) -> complex:
    """Levy exponent ``Psi(xi)`` of the model at a single real frequency."""
    if isinstance(xi, mpmath.mpf):
        xi = float(xi)
    xi = float(xi)
    if not math.isfinite(xi):
        raise InvalidParameter("frequency must be finite")
    if xi == 0.0:
        return 0j
    f, p = model.family, model.params
    if f is Family.CUSTOM:
        if model.exponent is not None:
            return complex(model.exponent(xi))
        return model.triplet.psi(xi)
    closed = _closed_form_psi(model, np.array([xi]))
    if closed is not None:
        return complex(closed[0])
    if f is Family.COMPOUND_POISSON:
        law = p["jumps"]
        return p["lam"] * (law.cf(xi) - 1.0)
    if f is Family.LAYERED_STABLE:
        return complex(
            2.0 * _quad.small_jump_integral(p["alpha1"], xi) + 2.0 * _quad.large_jump_integral(p["alpha2"], xi)
        )
    if f is Family.FARKAS_SINGLE:
        return complex(_farkas_sum(p["beta2"], int(p["M"]), xi))
    if f is Family.FARKAS_DOUBLE:
        return complex(2.0 * _quad.small_jump_integral(p["beta1"], xi) + _farkas_sum(p["beta2"], int(p["M"]), xi))
    raise NoClosedForm(f"cannot evaluate {f.value}")  # pragma: no cover


def _log2_abs_psi(model: LevyModel, xi) -> float:
    f = model.family
    if isinstance(xi, mpmath.mpf) and f in (Family.FARKAS_SINGLE, Family.FARKAS_DOUBLE):
        lg = farkas_log2_abs(model.params["beta2"], int(model.params["M"]), xi)
        if f is Family.FARKAS_DOUBLE:
            small = abs(2.0 * _quad.small_jump_integral(model.params["beta1"], float(xi)))
            big = 2.0**lg if lg > -1000 else 0.0
            if small + big > 0:
                return math.log2(small + big) if lg < 1000 else lg
            return lg
        return lg
    val = abs(evaluate_psi(model, float(xi)))
    return math.log2(val) if val > 0 else -INF


# ---------------------------------------------------------------------------
# indices
# ---------------------------------------------------------------------------


def closed_form_indices(model: LevyModel) -> NoiseIndices:
    """Tabulated (beta_inf, beta_inf_lower, p_max) for the named families."""
    f, p = model.family, model.params
    if f is Family.CUSTOM:
        raise NoClosedForm("custom exponents have no tabulated indices")
    if f is Family.GAUSSIAN:
        return NoiseIndices(2.0, 2.0, INF)
    if f is Family.CAUCHY:
        return NoiseIndices(1.0, 1.0, 1.0)
    if f is Family.SAS:
        a = p["alpha"]
        return NoiseIndices(a, a, INF if a == 2.0 else a)
    if f is Family.SUM_OF_STABLES:
        hi, lo = max(p["alpha1"], p["alpha2"]), min(p["alpha1"], p["alpha2"])
        return NoiseIndices(hi, hi, INF if lo == 2.0 else lo)
    if f in (Family.LAPLACE, Family.SYMMETRIC_GAMMA):
        return NoiseIndices(0.0, 0.0, INF)
    if f is Family.COMPOUND_POISSON:
        return NoiseIndices(0.0, 0.0, p["jumps"].moment_index)
    if f is Family.LAYERED_STABLE:
        return NoiseIndices(p["alpha1"], p["alpha1"], p["alpha2"])
    if f is Family.INVERSE_GAUSSIAN:
        return NoiseIndices(0.5, 0.5, INF)
    if f is Family.FARKAS_SINGLE:
        return NoiseIndices(p["beta2"], 0.0, INF)
    if f is Family.FARKAS_DOUBLE:
        return NoiseIndices(p["beta2"], p["beta1"], INF)
    raise NoClosedForm(f.value)  # pragma: no cover


def model_indices(model: LevyModel) -> NoiseIndices:
    """Closed form where tabulated, else declared, else the numeric heuristic."""
    if model.family is not Family.CUSTOM:
        return closed_form_indices(model)
    if model.declared_indices is not None:
        return model.declared_indices
    return numeric_bg_indices(model, range(10, 41))


@dataclass(frozen=True)
class LadderPoint:
    """Frequency ``xi = (2 pi if turn else 1) * 2**m``.

    ``turn`` points are evaluated with multiprecision phase reduction, which
    matters for lacunary exponents whose terms vanish at multiples of 2 pi.
    """

    m: float
    turn: bool = False

    @property
    def xi(self):
        if self.turn:
            with mpmath.workprec(int(abs(self.m)) + 160):
                return 2 * mpmath.pi * mpmath.ldexp(mpmath.mpf(1), int(self.m)) * mpmath.power(2, self.m - int(self.m))
        return mpmath.ldexp(mpmath.mpf(1), int(self.m)) * mpmath.power(2, self.m - int(self.m))

    @property
    def log2_xi(self) -> float:
        return self.m + (math.log2(2 * math.pi) if self.turn else 0.0)


def farkas_ladder(M: int, ks: Iterable[int] = (1, 2, 3)) -> list[LadderPoint]:
    """Ladder aligned to the lacunary frequencies 2^(M^k).

    Each aligned point ``xi = 2^(M^k)`` (where the k-th term peaks) is
    followed by ``xi = 2 pi 2^(M^k + 1)``, where every term up to k vanishes
    and the exponent is tiny.
    """
    pts = []
    for k in ks:
        pts.append(LadderPoint(float(M**k)))
        pts.append(LadderPoint(float(M**k + 1), turn=True))
    return pts


MAX_LADDER_EXPONENT = 1000.0


def numeric_bg_indices(
    model: LevyModel,
    ladder: Sequence[float | LadderPoint],
    small_ladder: Sequence[float] | None = None,
) -> NoiseIndices:
    """Heuristic Blumenthal-Getoor indices from growth ratios of |Psi|.

    Each ladder point after the first gets the growth ratio

        r = (log2|Psi(xi)| - log2|Psi(xi_0)|) / (log2 xi - log2 xi_0)

    anchored at the first point ``xi_0``, which cancels any constant factor
    in ``|Psi|`` (the limit is unchanged). ``beta_inf`` is the max and
    ``beta_inf_lower`` the min of ``r`` over the tail half of the ladder,
    both clamped to [0, 2]. The same anchored ratio of ``|Re Psi|`` on a
    ladder towards the origin estimates the Pruitt exponent; a value below
    2 is reported as ``p_max``, otherwise ``p_max`` is infinite.
    """
    pts = [pt if isinstance(pt, LadderPoint) else LadderPoint(float(pt)) for pt in ladder]
    if len(pts) < 3:
        raise InvalidParameter("ladder needs at least three points")
    logs = [pt.log2_xi for pt in pts]
    if any(b <= a for a, b in itertools.pairwise(logs)):
        raise InvalidParameter("ladder must be increasing")
    if logs[0] <= 0 or max(pt.m for pt in pts) > MAX_LADDER_EXPONENT:
        raise InvalidParameter(f"ladder exponents must lie in (0, {MAX_LADDER_EXPONENT}]")

    log_psi = []
    for pt in pts:
        lg = _log2_abs_psi(model, pt.xi if pt.turn else float(pt.xi))
        if lg == -INF:
            raise DegenerateExponent(f"Psi vanishes at xi = 2^{pt.m}")
        log_psi.append(lg)
    ratios = [(lg - log_psi[0]) / (lx - logs[0]) for lg, lx in zip(log_psi[1:], logs[1:])]
    tail = ratios[len(ratios) // 2 :]
    clamp = lambda x: min(2.0, max(0.0, x))
    beta = clamp(max(tail))
    lower = clamp(min(tail))

    small = list(small_ladder) if small_ladder is not None else list(range(10, 31))
    near = []
    for m in small:
        xi = 2.0 ** (-m)
        re = abs(evaluate_psi(model, xi).real)
        if re > 0:
            near.append((math.log2(xi), math.log2(re)))
    beta0, p_max = 2.0, INF
    if len(near) >= 3:
        (x0, y0), rest = near[0], near[1:]
        zr = [(y - y0) / (x - x0) for x, y in rest]
        beta0 = clamp(min(zr[len(zr) // 2 :]))
        if beta0 < 1.95:
            p_max = beta0
    return NoiseIndices(
        beta,
        lower,
        p_max,
        heuristic=True,
        detail={
            "log2_xi": logs,
            "log2_abs_psi": log_psi,
            "ratios": ratios,
            "origin_exponent": beta0,
        },
    )


# ---------------------------------------------------------------------------
# structural conditions
# ---------------------------------------------------------------------------

EPSILON_GRID = (0.1, 0.5, 1.0)


def _levy_density(model: LevyModel):
    """Return (density on t>0 as callable, symmetric flag) or None."""
    f, p = model.family, model.params
    if f is Family.SYMMETRIC_GAMMA or f is Family.LAPLACE:
        lam = p.get("lam", 1.0)
        s = math.sqrt(p["sigma2"] / 2.0)
        return (lambda t: lam * math.exp(-t / s) / t), True
    if f is Family.INVERSE_GAUSSIAN:
        return (lambda t: t**-1.5 * math.exp(-t / 2.0) / math.sqrt(2 * math.pi)), False
    try:
        trip = model.to_triplet()
    except NoClosedForm:
        return None
    m = trip.measure
    if isinstance(m, PowerLawMeasure):
        return (lambda t: m.density(t)), True
    return None


def _epsilon_integral(density, symmetric: bool, eps: float) -> float:
    mult = 2.0 if symmetric else 1.0
    # min(|t|^eps, t^2) = t^2 on |t| <= 1 for eps <= 2
    near = integrate.quad(lambda t: t * t * density(t), 0.0, 1.0, limit=200)[0]
    far = tail_integral(lambda t: t**eps * density(t))
    return mult * (near + far)


@dataclass
class ConditionReport:
    sector_ratio: float
    xi_grid: list[float]
    epsilon_results: dict[float, bool | None]
    smallest_passing_epsilon: float | None
    epsilon_vacuous: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "sector_ratio": format_index(self.sector_ratio),
            "xi_grid": self.xi_grid,
            "epsilon_condition": {str(k): v for k, v in self.epsilon_results.items()},
            "smallest_passing_epsilon": self.smallest_passing_epsilon,
            "epsilon_vacuous": self.epsilon_vacuous,
            "note": self.note,
        }


def check_conditions(model: LevyModel, xi_grid: Sequence[float] | None = None) -> ConditionReport:
    """Sector ratio sup |Im Psi| / |Re Psi| on a grid, and the epsilon-condition on a grid of epsilon."""
    grid = list(xi_grid) if xi_grid is not None else [float(x) for x in np.logspace(-3, 3, 61)]
    ratio = 0.0
    for xi in grid:
        v = evaluate_psi(model, xi)
        if v.imag == 0.0:
            continue
        ratio = max(ratio, INF if v.real == 0.0 else abs(v.imag) / abs(v.real))

    results: dict[float, bool | None] = {}
    vacuous = False
    note = ""
    f = model.family
    if f is Family.GAUSSIAN or (f is Family.SAS and model.params["alpha"] == 2.0):
        vacuous = True
        results = {e: True for e in EPSILON_GRID}
        note = "no jump measure"
    elif f is Family.COMPOUND_POISSON:
        mi = model.params["jumps"].moment_index
        results = {e: e < mi for e in EPSILON_GRID}
        note = "finite jump measure: condition holds iff the jump law has an eps-th moment"
    elif f in (Family.FARKAS_SINGLE, Family.FARKAS_DOUBLE):
        results = {e: True for e in EPSILON_GRID}
        note = "jump measure supported in [-1, 1]"
    elif f is Family.CUSTOM and model.triplet is not None and isinstance(model.triplet.measure, (ZeroMeasure, FiniteMeasure)):
        m = model.triplet.measure
        if m.is_zero:
            vacuous = True
            results = {e: True for e in EPSILON_GRID}
        else:
            mi = m.law.moment_index
            results = {e: e < mi for e in EPSILON_GRID}
    else:
        dens = _levy_density(model)
        if dens is None:
            results = {e: None for e in EPSILON_GRID}
            note = "no density descriptor available"
        else:
            fn, sym = dens
            for e in EPSILON_GRID:
                try:
                    _epsilon_integral(fn, sym, e)
                    results[e] = True
                except NonFiniteTailMass:
                    results[e] = False
    passing = [e for e, ok in results.items() if ok]
    return ConditionReport(
        sector_ratio=ratio,
        xi_grid=grid,
        epsilon_results=results,
        smallest_passing_epsilon=min(passing) if passing else None,
        epsilon_vacuous=vacuous,
        note=note,
    )


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------


def split_triplet(triplet: LevyTriplet) -> tuple[LevyTriplet, LevyTriplet, LevyTriplet]:
    """Gaussian part, compound Poisson part (|t| > 1), finite-moment part (|t| <= 1).

    The compound Poisson part's rate ``nu({|t| > 1})`` is computed by
    quadrature and checked for finiteness.
    """
    m = triplet.measure
    gauss = LevyTriplet(triplet.mu, triplet.sigma2, ZeroMeasure())
    large = m.restrict("large")
    small = m.restrict("small")
    rate = large.tail_mass()
    if not math.isfinite(rate):
        raise NonFiniteTailMass("nu({|t| > 1}) is infinite")
    return gauss, LevyTriplet(0.0, 0.0, large), LevyTriplet(0.0, 0.0, small)


# ---------------------------------------------------------------------------
# moments through the characteristic function
# ---------------------------------------------------------------------------


def gaussian_abs_moment(p: float) -> float:
    """E|Z|^p for a standard normal Z."""
    return 2.0 ** (p / 2.0) * special.gamma((p + 1.0) / 2.0) / math.sqrt(math.pi)


def _one_minus_re_cf(model: LevyModel, t: float, xi: float) -> float:
    v = t * evaluate_psi(model, xi)
    # 1 - exp(a) cos(b), rearranged against cancellation for small |v|
    return -math.expm1(v.real) * math.cos(v.imag) + 2.0 * math.sin(v.imag / 2.0) ** 2


def _cf_moment_integral(g: Callable[[float], float], p: float) -> float:
    """2 int_0^inf g(xi) xi^(-p-1) d xi."""
    f = lambda x: g(x) * x ** (-p - 1.0)
    total = 0.0
    for a, b in ((0.0, 1.0), (1.0, 10.0), (10.0, math.inf)):
        total += _quad._checked_quad(f, a, b, rel=1e-9)
    return 2.0 * total


_CP_CACHE: dict[float, float] = {}


def cf_moment_constant(p: float) -> float:
    """Normalising constant of the CF moment identity, fixed by the Gaussian case."""
    if p not in _CP_CACHE:
        ref = _cf_moment_integral(lambda x: -math.expm1(-0.5 * x * x), p)
        _CP_CACHE[p] = gaussian_abs_moment(p) / ref
    return _CP_CACHE[p]


def pth_moment_via_cf(model: LevyModel, t: float, p: float) -> float:
    """E|X|^p for X with characteristic function exp(t Psi), 0 < p <= 2.

    Uses E|X|^p = c_p int (1 - Re phi(xi)) / |xi|^(p+1) d xi. At p = 2 the
    integral diverges and the second moment is read off the curvature of
    Re phi at the origin instead (Richardson-extrapolated).
    """
    if not t > 0:
        raise InvalidParameter("volume must be positive")
    if not 0 < p <= 2:
        raise InvalidParameter("moment order must lie in (0, 2]")
    pmax = model_indices(model).p_max
    if p >= pmax:
        raise MomentInfinite(f"E|X|^{p} is infinite (p_max = {pmax})")
    if p == 2.0:
        h = 1.0
        for _ in range(80):
            if abs(t * evaluate_psi(model, h)) < 1e-4:
                break
            h /= 2.0
        curv = lambda s: 2.0 * _one_minus_re_cf(model, t, s) / (s * s)
        return (4.0 * curv(h / 2.0) - curv(h)) / 3.0
    raw = _cf_moment_integral(lambda x: _one_minus_re_cf(model, t, x), p)
    return cf_moment_constant(p) * raw
