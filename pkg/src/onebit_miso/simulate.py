"""Rayleigh-fading ergodic capacity sweeps.

Every channel draw has its own Philox stream keyed by (seed, draw index),
so results do not depend on evaluation order and all variants see the
same channels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .capacity import capacity_full_power_batch
from .channel import ComplexChannel, hb_of_q, realify_batch
from .constellation import enumerate_constellation

VARIANTS = ("onebit_both_csit", "onebit_adc_inf_dac", "siso_csir_only")
CHANNEL_STREAM = 0
_BATCH = 256


def stream_rng(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for the substream ``key`` under ``seed``."""
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def sample_channel(M: int, rng: np.random.Generator) -> ComplexChannel:
    """i.i.d. CN(0, 1) gains: real and imaginary parts each N(0, 1/2)."""
    parts = rng.normal(0.0, np.sqrt(0.5), size=(2, M))
    return ComplexChannel(parts[0] + 1j * parts[1])


def draw_channels(M: int, num_channels: int, seed: int) -> np.ndarray:
    """(num_channels, M) complex array; draw d comes from stream (0, d)."""
    return np.stack(
        [sample_channel(M, stream_rng(seed, CHANNEL_STREAM, d)).entries for d in range(num_channels)]
    )


def snr_to_sigma2(snr_db, M: int):
    """Noise variance for SNR = 2M / sigma^2 (full budget Pt = 2M)."""
    return 2 * M / 10 ** (np.asarray(snr_db, dtype=float) / 10)


def parse_snr_grid(text: str) -> list[float]:
    """Parse "start:step:stop" (dB, stop inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = [float(s) for s in text.split(":")]
        if len(parts) != 3 or parts[1] <= 0 or parts[2] < parts[0]:
            raise ValueError(f"bad SNR grid {text!r}; expected start:step:stop")
        start, step, stop = parts
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(n)]
    return [float(s) for s in text.split(",") if s.strip()]


@dataclass(frozen=True)
class SweepConfig:
    M: int
    snr_grid_db: tuple[float, ...]
    num_channels: int = 1000
    seed: int = 0
    variants: tuple[str, ...] = ("onebit_both_csit",)

    def __post_init__(self):
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        object.__setattr__(self, "variants", tuple(self.variants))
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.num_channels < 1:
            raise ValueError("num_channels must be >= 1")
        if not self.snr_grid_db or list(self.snr_grid_db) != sorted(self.snr_grid_db):
            raise ValueError("SNR grid must be non-empty and sorted")
        for v in self.variants:
            if v not in VARIANTS:
                raise ValueError(f"unknown variant {v!r}")
        if "siso_csir_only" in self.variants and self.M != 1:
            raise ValueError("siso_csir_only is only defined for M = 1")


@dataclass
class SweepResult:
    config: SweepConfig
    mean: dict[str, np.ndarray] = field(default_factory=dict)
    stderr: dict[str, np.ndarray] = field(default_factory=dict)
    per_draw: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def snr_db(self) -> np.ndarray:
        return np.asarray(self.config.snr_grid_db)

    def rows(self):
        cfg = self.config
        for v in cfg.variants:
            for i, snr in enumerate(cfg.snr_grid_db):
                yield {
                    "variant": v,
                    "snr_db": snr,
                    "mean_bits": self.mean[v][i],
                    "stderr_bits": self.stderr[v][i],
                    "num_channels": cfg.num_channels,
                    "seed": cfg.seed,
                }


def _stderr(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    if n < 2:
        return np.zeros(x.shape[:-1])
    return x.std(axis=-1, ddof=1) / np.sqrt(n)


def variant_rates(variant: str, h: np.ndarray, sigma2: float) -> np.ndarray:
    """Per-draw rate of one variant for a (D, M) stack of channels."""
    M = h.shape[1]
    if variant == "onebit_both_csit":
        cons = enumerate_constellation(M)
        Hs = realify_batch(h)
        return np.concatenate(
            [capacity_full_power_batch(Hs[i : i + _BATCH], sigma2, cons) for i in range(0, len(Hs), _BATCH)]
        )
    if variant == "onebit_adc_inf_dac":
        norm2 = np.sum(np.abs(h) ** 2, axis=1)
        return 2.0 * (1.0 - hb_of_q(np.sqrt(2 * M * norm2 / sigma2)))
    if variant == "siso_csir_only":
        Hs = realify_batch(h)
        t = np.sqrt(2.0 / sigma2) * (Hs @ np.array([1.0, 1.0]))
        return 2.0 - hb_of_q(t).sum(axis=-1)
    raise ValueError(f"unknown variant {variant!r}")


def ergodic_sweep(cfg: SweepConfig) -> SweepResult:
    h = draw_channels(cfg.M, cfg.num_channels, cfg.seed)
    sigma2 = snr_to_sigma2(cfg.snr_grid_db, cfg.M)
    result = SweepResult(cfg)
    for v in cfg.variants:
        rates = np.stack([variant_rates(v, h, s2) for s2 in sigma2])
        result.per_draw[v] = rates
        result.mean[v] = rates.mean(axis=1)
        result.stderr[v] = _stderr(rates)
    return result


def snr_at_level(snr_db, curve, level: float = 1.0) -> float:
    """SNR (dB) where a capacity curve first reaches ``level``, by linear interpolation."""
    snr_db = np.asarray(snr_db, dtype=float)
    curve = np.asarray(curve, dtype=float)
    for i in range(len(curve) - 1):
        a, b = curve[i], curve[i + 1]
        if a <= level <= b and b > a:
            return float(snr_db[i] + (level - a) / (b - a) * (snr_db[i + 1] - snr_db[i]))
    raise ValueError(f"curve never crosses {level} on the grid")


def horizontal_gap_db(snr_db, reference, other, level: float = 1.0) -> float:
    """How many dB further right ``other`` reaches ``level`` than ``reference``."""
    return snr_at_level(snr_db, other, level) - snr_at_level(snr_db, reference, level)
