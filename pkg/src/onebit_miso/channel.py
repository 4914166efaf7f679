"""Scalar kernels and the real-valued lifting of a complex MISO channel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

_SQRT2 = np.sqrt(2.0)
_EDGE_TOL = 1e-12


def q_function(t):
    """Gaussian tail probability Q(t) = P[N(0, 1) > t].

    Accepts scalars or arrays. Non-finite input raises ``ValueError``.
    """
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("q_function needs finite arguments")
    out = 0.5 * erfc(t / _SQRT2)
    return out.item() if out.ndim == 0 else out


def binary_entropy(p):
    """Binary entropy in bits, with 0 log 0 = 0.

    Inputs within 1e-12 of 0 or 1 are snapped to the endpoint; anything
    further outside [0, 1] is rejected.
    """
    p = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(p)) or np.any(p < -_EDGE_TOL) or np.any(p > 1 + _EDGE_TOL):
        raise ValueError("binary_entropy needs probabilities in [0, 1]")
    p = np.where(p <= _EDGE_TOL, 0.0, np.where(p >= 1 - _EDGE_TOL, 1.0, p))
    inner = (p > 0) & (p < 1)
    safe = np.where(inner, p, 0.5)
    h = -safe * np.log2(safe) - (1 - safe) * np.log1p(-safe) / np.log(2.0)
    out = np.where(inner, h, 0.0)
    return out.item() if out.ndim == 0 else out


def hb_of_q(t):
    """H_b(Q(t)), evaluated on the small tail so large |t| keeps precision.

    Uses H_b(Q(t)) = H_b(Q(|t|)) and log(1 - q) = log1p(-q).
    """
    t = np.abs(np.asarray(t, dtype=float))
    q = 0.5 * erfc(t / _SQRT2)
    q = np.where(q <= _EDGE_TOL, 0.0, q)
    pos = q > 0
    safe = np.where(pos, q, 0.5)
    h = -(safe * np.log(safe) + (1 - safe) * np.log1p(-safe)) / np.log(2.0)
    out = np.where(pos, h, 0.0)
    return out.item() if out.ndim == 0 else out


@dataclass(frozen=True)
class ComplexChannel:
    """Complex channel gains h̄ from the M transmit antennas."""

    entries: np.ndarray

    def __post_init__(self):
        h = np.atleast_1d(np.asarray(self.entries, dtype=complex))
        if h.ndim != 1 or h.size < 1:
            raise ValueError("channel must be a non-empty 1-D vector")
        if not np.all(np.isfinite(h)):
            raise ValueError("channel entries must be finite")
        h.setflags(write=False)
        object.__setattr__(self, "entries", h)

    @property
    def M(self) -> int:
        return self.entries.size

    @property
    def norm2(self) -> float:
        return float(np.sum(self.entries.real**2 + self.entries.imag**2))


@dataclass(frozen=True)
class RealChannel:
    """2 x 2M real lifting ``[[Re, -Im], [Im, Re]]`` of a complex channel."""

    matrix: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.matrix, dtype=float)
        if H.ndim != 2 or H.shape[0] != 2 or H.shape[1] % 2 or H.shape[1] == 0:
            raise ValueError(f"expected a 2 x 2M matrix, got shape {H.shape}")
        H = H.copy()
        H.setflags(write=False)
        object.__setattr__(self, "matrix", H)

    @property
    def M(self) -> int:
        return self.matrix.shape[1] // 2

    @property
    def h1(self) -> np.ndarray:
        return self.matrix[0]

    @property
    def h2(self) -> np.ndarray:
        return self.matrix[1]

    def to_complex(self) -> ComplexChannel:
        M = self.M
        return ComplexChannel(self.matrix[0, :M] + 1j * self.matrix[1, :M])


def realify(h) -> RealChannel:
    """Lift a complex channel (ComplexChannel or array-like) to its 2 x 2M form."""
    if not isinstance(h, ComplexChannel):
        h = ComplexChannel(h)
    re, im = h.entries.real, h.entries.imag
    return RealChannel(np.vstack([np.concatenate([re, -im]), np.concatenate([im, re])]))


def as_real(channel) -> RealChannel:
    if isinstance(channel, RealChannel):
        return channel
    return realify(channel)


def realify_batch(h: np.ndarray) -> np.ndarray:
    """Lift a (D, M) stack of complex channels to a (D, 2, 2M) stack."""
    h = np.asarray(h, dtype=complex)
    re, im = h.real, h.imag
    row1 = np.concatenate([re, -im], axis=-1)
    row2 = np.concatenate([im, re], axis=-1)
    return np.stack([row1, row2], axis=-2)


def subset_entropy(H, x, sigma2: float):
    """Sum over the two output dimensions of H_b(Q(sqrt(2/sigma2) h_n^T x)).

    ``x`` may be one signal vector (2M,) or a stack (S, 2M); the result is a
    float or an (S,) array. The value is shared by all four rotations of x.
    """
    H = as_real(H).matrix
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != H.shape[1]:
        raise ValueError(f"signal length {x.shape[-1]} does not match channel width {H.shape[1]}")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    gains = x @ H.T
    out = hb_of_q(np.sqrt(2.0 / sigma2) * gains).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out
