"""Channel training by repeated orbit representatives, and limited feedback.

The receiver never estimates the channel. It counts how often each output
bit comes out +1 for every training vector, turns the frequencies into
empirical entropies, and feeds back the index of the lowest-entropy orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .capacity import feedback_bits, subset_entropies
from .channel import as_real, binary_entropy, realify, subset_entropy
from .constellation import Constellation, RotationalSubset, enumerate_constellation
from .simulate import _stderr, draw_channels, snr_to_sigma2, stream_rng

MODES = ("full", "dominant")
TRAIN_STREAM = 1


def simulate_output(H, x, sigma2: float, rng: np.random.Generator, size=None) -> np.ndarray:
    """One-bit receiver output sign(Hx + z) with z ~ N(0, sigma2/2 I).

    sign(0) is +1. With ``size`` the result has shape ``size + (2,)``.
    """
    H = as_real(H).matrix
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != H.shape[1]:
        raise ValueError("signal length does not match the channel")
    shape = (2,) if size is None else tuple(np.atleast_1d(size)) + (2,)
    z = rng.normal(0.0, math.sqrt(sigma2 / 2.0), size=shape)
    return np.where(H @ x + z >= 0, 1, -1).astype(np.int8)


def empirical_entropy(plus_counts, L: int):
    """Sum over output bits of H_b(fraction of +1).

    Frequencies of exactly 0 or 1 are pulled in to 1/(2L) or 1 - 1/(2L).
    """
    p = np.asarray(plus_counts, dtype=float) / L
    p = np.where(p == 0.0, 0.5 / L, np.where(p == 1.0, 1.0 - 0.5 / L, p))
    return binary_entropy(p).sum(axis=-1)


def training_length(M: int, L: int, mode: str) -> int:
    if mode == "full":
        return (9**M - 1) // 4 * L
    if mode == "dominant":
        return 4 ** (M - 1) * L
    raise ValueError(f"unknown training mode {mode!r}")


@dataclass
class TrainingOutcome:
    mode: str
    selected: tuple[int, int]
    feedback_index: int
    training_length: int
    feedback_bits: float
    empirical_entropies: dict[tuple[int, int], float] = field(repr=False)


def _train(H, sigma2, cons: Constellation, rows: slice, L: int, rng, mode: str) -> TrainingOutcome:
    if L < 1:
        raise ValueError("L must be >= 1")
    H = as_real(H)
    reps = cons.reps[rows].astype(float)
    # representatives are sent back to back, L times each
    z = rng.normal(0.0, math.sqrt(sigma2 / 2.0), size=(reps.shape[0], L, 2))
    y_plus = (reps @ H.matrix.T)[:, None, :] + z >= 0
    est = empirical_entropy(y_plus.sum(axis=1), L)
    j = int(np.argmin(est))
    i = rows.start + j
    us, ks = cons.u[rows], cons.k[rows]
    return TrainingOutcome(
        mode=mode,
        selected=(int(cons.u[i]), int(cons.k[i])),
        feedback_index=i if mode == "full" else j,
        training_length=training_length(cons.M, L, mode),
        feedback_bits=feedback_bits(cons.M, mode),
        empirical_entropies={(int(u), int(k)): float(e) for u, k, e in zip(us, ks, est)},
    )


def full_training(H, sigma2: float, cons: Constellation | None, L: int, rng) -> TrainingOutcome:
    """Train every orbit representative L times and pick the empirical argmin."""
    H = as_real(H)
    cons = cons or enumerate_constellation(H.M)
    return _train(H, sigma2, cons, slice(0, len(cons)), L, rng, "full")


def dominant_training(H, sigma2: float, cons: Constellation | None, L: int, rng) -> TrainingOutcome:
    """Train only the full-power orbits X_{2M,k}."""
    H = as_real(H)
    cons = cons or enumerate_constellation(H.M)
    return _train(H, sigma2, cons, cons.level_slice(2 * cons.M), L, rng, "dominant")


def achieved_rate(H, sigma2: float, subset, cons: Constellation | None = None) -> float:
    """True rate 2 - H_b^{X_{u,k}} of the committed orbit.

    ``subset`` is a RotationalSubset or a (u, k) pair.
    """
    H = as_real(H)
    if isinstance(subset, RotationalSubset):
        x = subset.representative
    else:
        cons = cons or enumerate_constellation(H.M)
        x = cons.subset(*subset).representative
    return 2.0 - subset_entropy(H, x, sigma2)


def encode_feedback(index: int, M: int, mode: str) -> str:
    """Fixed-width binary word for a feedback index."""
    width = math.ceil(feedback_bits(M, mode))
    limit = (9**M - 1) // 4 if mode == "full" else 4 ** (M - 1)
    if not 0 <= index < limit:
        raise ValueError(f"feedback index {index} out of range")
    return format(index, f"0{width}b") if width else ""


def decode_feedback(word: str, M: int, mode: str, cons: Constellation | None = None) -> RotationalSubset:
    """Map a feedback word back to the orbit the transmitter should use."""
    cons = cons or enumerate_constellation(M)
    index = int(word, 2) if word else 0
    if mode == "full":
        return cons[index]
    if mode == "dominant":
        return cons[cons.level_slice(2 * M).start + index]
    raise ValueError(f"unknown training mode {mode!r}")


# ---------------------------------------------------------------------------
# ergodic sweep over training modes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrainingSweepConfig:
    M: int
    snr_grid_db: tuple[float, ...]
    num_channels: int = 1000
    seed: int = 0
    modes: tuple[str, ...] = ("dominant",)
    Ls: tuple[int, ...] = (20,)

    def __post_init__(self):
        for name in ("snr_grid_db", "modes", "Ls"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.M < 1 or self.num_channels < 1:
            raise ValueError("M and num_channels must be >= 1")
        if not self.snr_grid_db or list(self.snr_grid_db) != sorted(self.snr_grid_db):
            raise ValueError("SNR grid must be non-empty and sorted")
        if any(m not in MODES for m in self.modes):
            raise ValueError(f"modes must be among {MODES}")
        if any(L < 1 for L in self.Ls):
            raise ValueError("L must be >= 1")


@dataclass
class TrainingSweepResult:
    config: TrainingSweepConfig
    capacity: np.ndarray  # (n_snr, D)
    rates: dict[tuple[str, int], np.ndarray]  # (n_snr, D)

    def mean(self, mode: str, L: int) -> np.ndarray:
        return self.rates[(mode, L)].mean(axis=1)

    def stderr(self, mode: str, L: int) -> np.ndarray:
        return _stderr(self.rates[(mode, L)])

    @property
    def capacity_mean(self) -> np.ndarray:
        return self.capacity.mean(axis=1)

    def rows(self):
        cfg = self.config
        cap = self.capacity_mean
        for mode in cfg.modes:
            for L in cfg.Ls:
                mean = self.mean(mode, L)
                for i, snr in enumerate(cfg.snr_grid_db):
                    yield {
                        "mode": mode,
                        "L": L,
                        "snr_db": snr,
                        "mean_rate_bits": mean[i],
                        "capacity_bits": cap[i],
                        "gap_bits": cap[i] - mean[i],
                        "training_length": training_length(cfg.M, L, mode),
                        "feedback_bits": feedback_bits(cfg.M, mode),
                        "seed": cfg.seed,
                    }


def ergodic_training_sweep(cfg: TrainingSweepConfig) -> TrainingSweepResult:
    """Mean achieved rate per (mode, L, SNR) over common channel draws.

    Training noise for (draw, SNR, mode, L) comes from its own substream.
    """
    cons = enumerate_constellation(cfg.M)
    h = draw_channels(cfg.M, cfg.num_channels, cfg.seed)
    sigma2 = snr_to_sigma2(cfg.snr_grid_db, cfg.M)
    n_snr, D = len(sigma2), cfg.num_channels
    cap = np.empty((n_snr, D))
    rates = {(m, L): np.empty((n_snr, D)) for m in cfg.modes for L in cfg.Ls}
    trainers = {"full": full_training, "dominant": dominant_training}
    for d in range(D):
        H = realify(h[d])
        for s, s2 in enumerate(sigma2):
            ent = subset_entropies(H, s2, cons)
            cap[s, d] = 2.0 - ent.min()
            for mode in cfg.modes:
                for L in cfg.Ls:
                    rng = stream_rng(cfg.seed, TRAIN_STREAM, d, s, MODES.index(mode), L)
                    out = trainers[mode](H, s2, cons, L, rng)
                    rates[(mode, L)][s, d] = 2.0 - ent[cons.index_of(*out.selected)]
    return TrainingSweepResult(cfg, cap, rates)

