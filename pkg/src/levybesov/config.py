"""Experiment configuration read from a UTF-8 JSON file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .analysis import DEFAULT_TOLERANCES, AnalysisConfig
from .errors import ConfigError, LevyBesovError
from .field import BACKENDS, SimulationWindow, default_backend
from .levy_model import LevyModel, parse_index
from .wavelet import WaveletSpec

_KEYS = {
    "model", "d", "wavelet", "backend", "window", "p_grid", "tau_ref", "rho", "replicates", "master_seed",
    "j_range", "output_dir", "tolerances", "rho_window_T", "hill_k", "tau_grid", "dirac_x0", "dump_coefficients",
}


def _wavelet_from(obj) -> WaveletSpec:
    if obj is None:
        return WaveletSpec.haar()
    if isinstance(obj, str):
        return WaveletSpec.parse(obj)
    kind = str(obj.get("kind", "haar")).lower()
    depth = int(obj.get("cascade_depth", 12))
    if kind == "haar":
        return WaveletSpec.haar(depth)
    return WaveletSpec(int(obj.get("order", 2)), depth)


@dataclass
class ExperimentConfig:
    model: LevyModel
    d: int = 1
    wavelet: WaveletSpec = field(default_factory=WaveletSpec.haar)
    backend: str = "auto"
    T: int = 1
    J: int | None = None
    guard_band: int | None = None
    p_grid: list[float] = field(default_factory=lambda: [1.0, 2.0])
    tau_ref: float = 0.0
    rho: float = 0.0
    replicates: int = 100
    master_seed: int = 0
    j_range: list[int] = field(default_factory=lambda: list(range(4, 13)))
    output_dir: str = "out"
    tolerances: dict = field(default_factory=dict)
    rho_window_T: int = 2**16
    hill_k: int = 600
    tau_grid: list[float] | None = None
    dirac_x0: list[float] | None = None
    dump_coefficients: bool = False

    def __post_init__(self):
        if self.backend != "auto" and self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.replicates < 2:
            raise ConfigError("need at least 2 replicates")
        if not self.p_grid:
            raise ConfigError("p_grid is empty")
        bad = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if bad:
            raise ConfigError(f"unknown tolerance keys {sorted(bad)}")

    @property
    def resolved_backend(self) -> str:
        return default_backend(self.model) if self.backend == "auto" else self.backend

    @property
    def finest_scale(self) -> int:
        if self.J is not None:
            return self.J
        return max(self.j_range) + (1 if self.wavelet.is_haar else 4)

    def window(self) -> SimulationWindow:
        g = self.wavelet.filter_length if self.guard_band is None else self.guard_band
        return SimulationWindow(self.d, self.T, self.finest_scale, g)

    def analysis(self, threads: int | None = None) -> AnalysisConfig:
        return AnalysisConfig(
            d=self.d, wavelet=self.wavelet, backend=self.resolved_backend, J=self.finest_scale,
            j_range=tuple(self.j_range), replicates=self.replicates, seed=self.master_seed,
            tau_ref=self.tau_ref, rho=self.rho, rho_T=self.rho_window_T, hill_k=self.hill_k,
            tolerances={**DEFAULT_TOLERANCES, **self.tolerances}, threads=threads,
        )

    # serialisation -------------------------------------------------------

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> ExperimentConfig:
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - _KEYS
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        if "model" not in raw:
            raise ConfigError("config needs a model descriptor")
        try:
            win = raw.get("window", {}) or {}
            return cls(
                model=LevyModel.from_dict(raw["model"]),
                d=int(raw.get("d", 1)),
                wavelet=_wavelet_from(raw.get("wavelet")),
                backend=str(raw.get("backend", "auto")),
                T=int(win.get("T", 1)),
                J=None if win.get("J") is None else int(win["J"]),
                guard_band=None if win.get("guard_band") is None else int(win["guard_band"]),
                p_grid=[parse_index(p) for p in raw.get("p_grid", [1.0, 2.0])],
                tau_ref=float(raw.get("tau_ref", 0.0)),
                rho=float(raw.get("rho", 0.0)),
                replicates=int(raw.get("replicates", 100)),
                master_seed=int(raw.get("master_seed", 0)),
                j_range=[int(j) for j in raw.get("j_range", list(range(4, 13)))],
                output_dir=str(raw.get("output_dir", "out")),
                tolerances=dict(raw.get("tolerances", {})),
                rho_window_T=int(raw.get("rho_window_T", 2**16)),
                hill_k=int(raw.get("hill_k", 600)),
                tau_grid=None if raw.get("tau_grid") is None else [float(t) for t in raw["tau_grid"]],
                dirac_x0=None if raw.get("dirac_x0") is None else [float(x) for x in raw["dirac_x0"]],
                dump_coefficients=bool(raw.get("dump_coefficients", False)),
            )
        except ConfigError:
            raise
        except (LevyBesovError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc

    @classmethod
    def load(cls, path) -> ExperimentConfig:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out = {
            "model": self.model.to_dict(),
            "d": self.d,
            "wavelet": self.wavelet.to_dict(),
            "backend": self.backend,
            "window": {"T": self.T, "J": self.J, "guard_band": self.guard_band},
            "p_grid": [p if p != float("inf") else "inf" for p in self.p_grid],
            "tau_ref": self.tau_ref,
            "rho": self.rho,
            "replicates": self.replicates,
            "master_seed": self.master_seed,
            "j_range": list(self.j_range),
            "output_dir": self.output_dir,
            "tolerances": dict(self.tolerances),
            "rho_window_T": self.rho_window_T,
            "hill_k": self.hill_k,
            "dump_coefficients": self.dump_coefficients,
        }
        if self.tau_grid is not None:
            out["tau_grid"] = list(self.tau_grid)
        if self.dirac_x0 is not None:
            out["dirac_x0"] = list(self.dirac_x0)
        return out
