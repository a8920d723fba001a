"""Container for wavelet coefficients of one noise realisation, plus its binary dump format."""

from __future__ import annotations

import io
import itertools
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ShapeMismatch

MAGIC = b"LBCF"
VERSION = 1


def genders(d: int, j: int | None = None, j0: int = 0) -> list[str]:
    """Genders admitted at scale ``j``; the all-father gender only at the coarsest scale.

    Order is fixed (product order with F before M) and is the summation
    order used everywhere downstream.
    """
    out = ["".join(g) for g in itertools.product("FM", repeat=d)]
    if j is not None and j > j0:
        out.remove("F" * d)
    return out


@dataclass
class CoefficientField:
    """Coefficients <w, psi_{j,G,k}> for scales j0..J-1 on a window [0, T)^d.

    ``blocks[(j, G)]`` is a d-dimensional array of extent T 2^j per axis,
    indexed by the shift k in row-major order. The father block lives at
    the coarsest scale ``j0`` only.
    """

    d: int
    T: int
    J: int
    blocks: dict[tuple[int, str], np.ndarray]
    backend: str
    seed: int | None = None
    wavelet: str = "haar"
    j0: int = 0
    boundary: str = "periodic"
    guard_band: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for (j, g), arr in self.blocks.items():
            want = (self.T * 2**j,) * self.d
            if arr.shape != want or len(g) != self.d:
                raise ShapeMismatch(f"block {(j, g)} has shape {arr.shape}, expected {want}")

    @property
    def scales(self) -> list[int]:
        return sorted({j for j, _ in self.blocks})

    def genders_at(self, j: int) -> list[str]:
        return [g for g in genders(self.d, j, self.j0) if (j, g) in self.blocks]

    def ordered_blocks(self):
        """Yield (j, G, array) in scale-major, gender order."""
        for j in self.scales:
            for g in self.genders_at(j):
                yield j, g, self.blocks[(j, g)]

    def mothers(self, j: int) -> np.ndarray:
        """All-mother block ``M^d`` at scale j."""
        return self.blocks[(j, "M" * self.d)]

    def father(self) -> np.ndarray:
        return self.blocks[(self.j0, "F" * self.d)]

    def scaled(self, s: float) -> CoefficientField:
        return CoefficientField(
            self.d, self.T, self.J, {k: s * v for k, v in self.blocks.items()}, self.backend,
            self.seed, self.wavelet, self.j0, self.boundary, self.guard_band, dict(self.meta),
        )

    def energy(self) -> float:
        return float(sum(np.sum(v * v) for v in self.blocks.values()))

    # binary dump ---------------------------------------------------------

    def header(self) -> dict:
        return {
            "d": self.d,
            "T": self.T,
            "J": self.J,
            "j0": self.j0,
            "backend": self.backend,
            "seed": self.seed,
            "wavelet": self.wavelet,
            "boundary": self.boundary,
            "guard_band": self.guard_band,
            "blocks": [[j, g, list(a.shape)] for j, g, a in self.ordered_blocks()],
        }

    def to_bytes(self) -> bytes:
        """Serialise as: magic, u32 version, u32 header length, UTF-8 JSON header,
        then every block as little-endian float64 in row-major k order."""
        head = json.dumps(self.header(), sort_keys=True).encode("utf-8")
        buf = io.BytesIO()
        buf.write(MAGIC)
        buf.write(struct.pack("<II", VERSION, len(head)))
        buf.write(head)
        for _, _, arr in self.ordered_blocks():
            buf.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        return buf.getvalue()

    def dump(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def from_bytes(cls, raw: bytes) -> CoefficientField:
        if raw[:4] != MAGIC:
            raise ShapeMismatch("not a coefficient dump")
        version, hlen = struct.unpack("<II", raw[4:12])
        if version != VERSION:
            raise ShapeMismatch(f"unsupported dump version {version}")
        head = json.loads(raw[12 : 12 + hlen].decode("utf-8"))
        pos = 12 + hlen
        blocks = {}
        for j, g, shape in head["blocks"]:
            n = int(np.prod(shape))
            blocks[(j, g)] = np.frombuffer(raw, dtype="<f8", count=n, offset=pos).reshape(shape).astype(float)
            pos += 8 * n
        return cls(
            head["d"], head["T"], head["J"], blocks, head["backend"], head["seed"], head["wavelet"],
            head["j0"], head["boundary"], head["guard_band"],
        )

    @classmethod
    def load(cls, path) -> CoefficientField:
        return cls.from_bytes(Path(path).read_bytes())
