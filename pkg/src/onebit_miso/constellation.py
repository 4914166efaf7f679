"""Spatial lattice modulation inputs {-1, 0, +1}^{2M} \\ {0} and their rotation orbits.

Vectors are handled internally as base-3 integer codes (digit = entry + 1,
most significant first), so integer order equals lexicographic order with
-1 < 0 < +1. With x = [a; b] split into real and imaginary halves, the
90-degree rotation R x = [-b; a] becomes pure integer arithmetic on codes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

MAX_M = 8
_CHUNK = 1 << 22


def rotation_matrix(M: int) -> np.ndarray:
    """R = [[0, -I], [I, 0]] of size 2M x 2M."""
    if M < 1:
        raise ValueError("M must be >= 1")
    I = np.eye(M, dtype=int)
    Z = np.zeros((M, M), dtype=int)
    return np.block([[Z, -I], [I, Z]])


def rotate(x, times: int = 1) -> np.ndarray:
    """Apply R ``times`` times to a signal vector (or stack of them)."""
    x = np.asarray(x)
    M = x.shape[-1] // 2
    for _ in range(times % 4):
        x = np.concatenate([-x[..., M:], x[..., :M]], axis=-1)
    return x


def power_level(x) -> int:
    """Instantaneous power ||x||^2, i.e. the number of nonzero entries."""
    return int(np.count_nonzero(np.asarray(x)))


def complexify(x) -> np.ndarray:
    """Map [x_re; x_im] to the complex vector x_re + j x_im."""
    x = np.asarray(x)
    M = x.shape[-1] // 2
    return x[..., :M] + 1j * x[..., M:]


def _check_signal(x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.size % 2 or x.size == 0:
        raise ValueError("signal vector must have even length 2M")
    if not np.all(np.isin(x, (-1, 0, 1))):
        raise ValueError("signal entries must be in {-1, 0, +1}")
    if not np.any(x):
        raise ValueError("the all-zero vector is not a channel input")
    return x.astype(np.int8)


def _encode(x: np.ndarray) -> np.ndarray:
    digits = np.asarray(x, dtype=np.int64) + 1
    n = digits.shape[-1]
    weights = 3 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return digits @ weights


def _decode(codes: np.ndarray, n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty(codes.shape + (n,), dtype=np.int8)
    c = codes.copy()
    for j in range(n - 1, -1, -1):
        out[..., j] = (c % 3) - 1
        c //= 3
    return out


def _rotations_of_codes(codes: np.ndarray, M: int) -> list[np.ndarray]:
    half = 3**M
    top = half - 1
    a, b = np.divmod(codes, half)
    return [
        codes,
        (top - b) * half + a,
        (half * half - 1) - codes,
        b * half + (top - a),
    ]


def _canonical_code(codes: np.ndarray, M: int) -> np.ndarray:
    rots = _rotations_of_codes(codes, M)
    return np.minimum(np.minimum(rots[0], rots[1]), np.minimum(rots[2], rots[3]))


@dataclass(frozen=True)
class RotationalSubset:
    """One 90-degree rotation orbit X_{u,k}; ``k`` is 1-based."""

    u: int
    k: int
    representative: np.ndarray

    @property
    def members(self) -> np.ndarray:
        """The four members R^i x, i = 0..3, as a (4, 2M) array."""
        return np.stack([rotate(self.representative, i) for i in range(4)])

    def __eq__(self, other):
        if not isinstance(other, RotationalSubset):
            return NotImplemented
        return (
            self.u == other.u
            and self.k == other.k
            and np.array_equal(self.representative, other.representative)
        )

    def __hash__(self):
        return hash((self.u, self.k, self.representative.tobytes()))


class Constellation:
    """All rotation orbits of the SLM input set for M antennas.

    Subsets are ordered by power level u, then by the lexicographic order of
    their canonical representative (smallest member, -1 < 0 < +1); the index
    ``k`` counts from 1 within each power level. The orbit data live in flat
    arrays (``reps``, ``u``, ``k``); ``RotationalSubset`` objects are built
    on access.
    """

    def __init__(self, M: int):
        if not 1 <= M <= MAX_M:
            raise ValueError(f"M must be in [1, {MAX_M}], got {M}")
        self.M = M
        n = 2 * M
        zero_code = (3**n - 1) // 2
        rep_codes = []
        for start in range(0, 3**n, _CHUNK):
            codes = np.arange(start, min(start + _CHUNK, 3**n), dtype=np.int64)
            keep = (_canonical_code(codes, M) == codes) & (codes != zero_code)
            rep_codes.append(codes[keep])
        rep_codes = np.concatenate(rep_codes)
        reps = _decode(rep_codes, n)
        levels = np.count_nonzero(reps, axis=1)
        order = np.lexsort((rep_codes, levels))
        self.reps = reps[order]
        self.codes = rep_codes[order]
        self.u = levels[order].astype(np.int64)
        starts = np.searchsorted(self.u, np.arange(1, n + 2))
        self.k = np.arange(self.u.size) - starts[self.u - 1] + 1
        self._level_starts = starts
        for arr in (self.reps, self.codes, self.u, self.k):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self.u.size

    def __getitem__(self, i: int) -> RotationalSubset:
        return RotationalSubset(int(self.u[i]), int(self.k[i]), self.reps[i])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __repr__(self):
        return f"Constellation(M={self.M}, subsets={len(self)})"

    @property
    def subsets(self) -> list[RotationalSubset]:
        return list(self)

    def count(self, u: int) -> int:
        """K_u, the number of orbits at power level u."""
        return int(self._level_starts[u] - self._level_starts[u - 1])

    def level_slice(self, u: int) -> slice:
        return slice(int(self._level_starts[u - 1]), int(self._level_starts[u]))

    def index_of(self, u: int, k: int) -> int:
        """Flat (0-based) position of X_{u,k}; this is the feedback index."""
        if not 1 <= u <= 2 * self.M or not 1 <= k <= self.count(u):
            raise IndexError(f"no subset ({u}, {k}) for M={self.M}")
        return int(self._level_starts[u - 1]) + k - 1

    def subset(self, u: int, k: int) -> RotationalSubset:
        return self[self.index_of(u, k)]

    def orbit_of(self, x) -> RotationalSubset:
        x = _check_signal(x)
        if x.size != 2 * self.M:
            raise ValueError(f"signal length {x.size} does not match M={self.M}")
        code = _canonical_code(np.array([_encode(x)]), self.M)[0]
        u = power_level(x)
        sl = self.level_slice(u)
        pos = sl.start + int(np.searchsorted(self.codes[sl], code))
        return self[pos]

    def all_vectors(self) -> np.ndarray:
        """Every channel input, ordered subset by subset (4 rows per orbit)."""
        return np.stack([rotate(self.reps, i) for i in range(4)], axis=1).reshape(-1, 2 * self.M)


@lru_cache(maxsize=None)
def enumerate_constellation(M: int) -> Constellation:
    """Cached ``Constellation(M)``; instances are read-only."""
    return Constellation(M)


def orbit_of(x) -> RotationalSubset:
    """The rotation orbit containing ``x``."""
    x = _check_signal(x)
    return enumerate_constellation(x.size // 2).orbit_of(x)


def level_size(M: int, u: int) -> int:
    """|X_u| = C(2M, u) 2^u."""
    return comb(2 * M, u) * 2**u


def orbit_count(M: int, u: int | None = None) -> int:
    """K_u = C(2M, u) 2^(u-2), or the total (9^M - 1)/4 when u is None."""
    if u is None:
        return (9**M - 1) // 4
    return comb(2 * M, u) * 2**u // 4
