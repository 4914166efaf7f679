"""Capacity of MISO channels with one-bit DACs and ADCs under full CSI.

Restricting to inputs that are uniform within each rotation orbit X_{u,k}
makes the output uniform on its four values, so the mutual information is
``2 - sum_{u,k} p_{u,k} H_b^{X_{u,k}}`` and capacity is a two-constraint
linear program in the orbit masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize

from .channel import RealChannel, as_real, hb_of_q, q_function, subset_entropy
from .constellation import Constellation, enumerate_constellation

_TIE_TOL = 1e-13
_BUDGET_TOL = 1e-12
# output order for mutual-information work: (y1, y2) in this order
OUTPUTS = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]])


@dataclass(frozen=True)
class InputDistribution:
    """Orbit masses p_{u,k}; each orbit's four members share its mass equally."""

    masses: dict[tuple[int, int], float]

    def __post_init__(self):
        if any(p < -1e-12 for p in self.masses.values()):
            raise ValueError("negative probability mass")
        total = sum(self.masses.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"masses sum to {total}, not 1")

    @property
    def average_power(self) -> float:
        return sum(u * p for (u, _), p in self.masses.items())

    def support(self) -> list[tuple[int, int]]:
        return sorted(key for key, p in self.masses.items() if p > 0)

    def expand(self, cons: Constellation) -> np.ndarray:
        """Per-vector probabilities aligned with ``cons.all_vectors()``."""
        probs = np.zeros(4 * len(cons))
        for (u, k), p in self.masses.items():
            i = cons.index_of(u, k)
            probs[4 * i : 4 * i + 4] = p / 4
        return probs


@dataclass(frozen=True)
class CapacityResult:
    capacity_bits: float
    distribution: InputDistribution
    case_tag: str
    entropies: dict[tuple[int, int], float] = field(repr=False, default_factory=dict)

    @property
    def support(self) -> list[tuple[int, int]]:
        return self.distribution.support()


def check_budget(Pt: float, M: int) -> float:
    Pt = float(Pt)
    if not math.isfinite(Pt) or Pt < 1 - _BUDGET_TOL or Pt > 2 * M + _BUDGET_TOL:
        raise ValueError(f"power budget must lie in [1, {2 * M}], got {Pt}")
    return min(max(Pt, 1.0), float(2 * M))


def subset_entropies(H, sigma2: float, cons: Constellation | None = None) -> np.ndarray:
    """H_b^{X_{u,k}} for every orbit, in constellation order."""
    H = as_real(H)
    cons = cons or enumerate_constellation(H.M)
    if cons.M != H.M:
        raise ValueError("constellation and channel disagree on M")
    return subset_entropy(H, cons.reps, sigma2)


# ---------------------------------------------------------------------------
# brute-force mutual information
# ---------------------------------------------------------------------------


def transition_matrix(H, inputs, sigma2: float) -> np.ndarray:
    """P[y | x] for each input row, columns ordered as ``OUTPUTS``."""
    H = as_real(H).matrix
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    t = np.sqrt(2.0 / sigma2) * (np.asarray(inputs, dtype=float) @ H.T)
    p_plus = q_function(-t)
    p_minus = q_function(t)
    cols = []
    for y1, y2 in OUTPUTS:
        a = p_plus[:, 0] if y1 > 0 else p_minus[:, 0]
        b = p_plus[:, 1] if y2 > 0 else p_minus[:, 1]
        cols.append(a * b)
    return np.stack(cols, axis=1)


def output_distribution(H, probs, sigma2: float, inputs=None) -> np.ndarray:
    """P[y] induced by an input law; ``inputs`` defaults to all SLM vectors."""
    H = as_real(H)
    if inputs is None:
        inputs = enumerate_constellation(H.M).all_vectors()
    return np.asarray(probs, dtype=float) @ transition_matrix(H, inputs, sigma2)


def mi_bruteforce(H, probs, sigma2: float, inputs=None) -> float:
    """Exact I(x; y) in bits by summing over every input and output.

    ``probs`` is aligned with ``inputs``, which defaults to
    ``enumerate_constellation(M).all_vectors()``. Limited to M <= 3.
    """
    H = as_real(H)
    if H.M > 3:
        raise ValueError("brute-force mutual information is limited to M <= 3")
    if inputs is None:
        inputs = enumerate_constellation(H.M).all_vectors()
    p = np.asarray(probs, dtype=float)
    if p.shape[0] != len(inputs):
        raise ValueError("probability vector does not match the input list")
    if np.any(p < -1e-15) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("input distribution must be non-negative and sum to 1")
    W = transition_matrix(H, inputs, sigma2)
    py = p @ W
    joint = p[:, None] * W
    mask = joint > 0
    ratio = np.where(mask, W, 1.0) / np.where(mask, py[None, :], 1.0)
    return float(np.sum(np.where(mask, joint * np.log2(ratio), 0.0)))


# ---------------------------------------------------------------------------
# the capacity LP
# ---------------------------------------------------------------------------


def _solve_lp(entropies: np.ndarray, levels: np.ndarray, Pt: float):
    """Basic-solution enumeration restricted to per-level minimizers.

    Returns the flat indices and weights of the optimal support.
    """
    best_of_level = {}
    for u in np.unique(levels):
        idx = np.flatnonzero(levels == u)
        best_of_level[int(u)] = int(idx[np.argmin(entropies[idx])])
    us = sorted(best_of_level)

    cands = []
    for u in us:
        if u <= Pt + _BUDGET_TOL:
            i = best_of_level[u]
            cands.append((float(entropies[i]), (i,), (1.0,)))
    for u1 in us:
        if not u1 < Pt - _BUDGET_TOL:
            continue
        for u2 in us:
            if not u2 > Pt + _BUDGET_TOL:
                continue
            w = (Pt - u1) / (u2 - u1)
            i1, i2 = best_of_level[u1], best_of_level[u2]
            obj = (1 - w) * entropies[i1] + w * entropies[i2]
            cands.append((float(obj), (i1, i2), (1 - w, w)))
    best = min(c[0] for c in cands)
    for obj, idx, weights in cands:
        if obj <= best + _TIE_TOL:
            return obj, idx, weights


def miso_capacity(H, sigma2: float, Pt: float, cons: Constellation | None = None) -> CapacityResult:
    """Capacity for any M via the orbit-mass linear program.

    The optimum sits on a vertex with at most two orbits in its support.
    Only the lowest-entropy orbit of each power level can be optimal, so
    the search runs over O((2M)^2) candidates.
    """
    H = as_real(H)
    cons = cons or enumerate_constellation(H.M)
    Pt = check_budget(Pt, H.M)
    ent = subset_entropies(H, sigma2, cons)
    obj, idx, weights = _solve_lp(ent, cons.u, Pt)
    masses = {(int(cons.u[i]), int(cons.k[i])): float(w) for i, w in zip(idx, weights)}
    tag = "single-subset" if len(idx) == 1 else "time-sharing"
    entropies = {(int(cons.u[i]), int(cons.k[i])): float(ent[i]) for i in idx}
    return CapacityResult(2.0 - obj, InputDistribution(masses), tag, entropies)


def siso_capacity(h, sigma2: float, Pt: float) -> CapacityResult:
    """Closed-form single-antenna capacity.

    X_1 alone when it has the lower entropy (or when Pt = 1); otherwise X_2
    for a fraction Pt - 1 of the time and X_1 for the rest.
    """
    H = as_real(h)
    if H.M != 1:
        raise ValueError("siso_capacity needs a single-antenna channel")
    Pt = check_budget(Pt, 1)
    h1 = subset_entropy(H, [1, 0], sigma2)
    h2 = subset_entropy(H, [1, 1], sigma2)
    if h1 <= h2 or Pt == 1.0:
        p1, p2 = 1.0, 0.0
    elif Pt < 2.0:
        p1, p2 = 2.0 - Pt, Pt - 1.0
    else:
        p1, p2 = 0.0, 1.0
    masses = {key: p for key, p in (((1, 1), p1), ((2, 1), p2)) if p > 0}
    tag = "time-sharing" if len(masses) == 2 else "single-subset"
    cap = 2.0 - p1 * h1 - p2 * h2
    return CapacityResult(cap, InputDistribution(masses), tag, {(1, 1): h1, (2, 1): h2})


def capacity(h, sigma2: float, Pt: float) -> CapacityResult:
    """Dispatch to the closed form for M = 1 and the LP otherwise."""
    H = as_real(h)
    if H.M == 1:
        return siso_capacity(H, sigma2, Pt)
    return miso_capacity(H, sigma2, Pt)


def capacity_full_power(H, sigma2: float, cons: Constellation | None = None):
    """Capacity at Pt = 2M: 2 - min H_b^{X_{u,k}}, with the minimizing (u, k).

    Ties go to the smallest u, then the smallest k.
    """
    H = as_real(H)
    cons = cons or enumerate_constellation(H.M)
    ent = subset_entropies(H, sigma2, cons)
    i = int(np.argmin(ent))
    return 2.0 - float(ent[i]), (int(cons.u[i]), int(cons.k[i]))


def capacity_full_power_batch(Hs: np.ndarray, sigma2: float, cons: Constellation) -> np.ndarray:
    """Vectorised ``capacity_full_power`` over a (D, 2, 2M) stack; returns rates."""
    t = np.sqrt(2.0 / sigma2) * np.einsum("sj,dnj->dsn", cons.reps.astype(float), Hs)
    ent = hb_of_q(t).sum(axis=-1)
    return 2.0 - ent.min(axis=1)


def feedback_bits(M: int, mode: str = "full") -> float:
    """Bits needed to name the chosen orbit: all orbits, or only u = 2M."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if mode == "full":
        return math.log2((9**M - 1) // 4)
    if mode == "dominant":
        return float(2 * M - 2)
    raise ValueError(f"unknown feedback mode {mode!r}")


# ---------------------------------------------------------------------------
# baselines and losses
# ---------------------------------------------------------------------------


def capacity_infinite_dacs(h, sigma2: float, power: float = 2.0) -> float:
    """One-bit ADCs with unquantized DACs: QPSK with MRT precoding.

    The receiver sees two decoupled binary sub-channels with amplitude
    sqrt(power/2) * ||h||. ``power = 2`` is the unit-energy-per-dimension
    QPSK case; pass ``power = Pt`` to compare at a common budget.
    """
    H = as_real(h)
    norm2 = float(np.sum(H.h1**2))
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    return 2.0 * (1.0 - hb_of_q(math.sqrt(power * norm2 / sigma2)))


def csir_only_siso_capacity(h, sigma2: float, Pt: float) -> float:
    """Single-antenna capacity without CSIT: spend the budget on X_2 first."""
    H = as_real(h)
    if H.M != 1:
        raise ValueError("CSIR-only capacity is defined for M = 1 only")
    Pt = check_budget(Pt, 1)
    h1 = subset_entropy(H, [1, 0], sigma2)
    h2 = subset_entropy(H, [1, 1], sigma2)
    return 2.0 - (2.0 - Pt) * h1 - (Pt - 1.0) * h2


def csit_loss_siso(h, sigma2: float, Pt: float) -> float:
    return siso_capacity(h, sigma2, Pt).capacity_bits - csir_only_siso_capacity(h, sigma2, Pt)


def dac_loss_siso(h, sigma2: float) -> float:
    """Loss from one-bit DACs at Pt = 2 relative to unquantized DACs."""
    H = as_real(h)
    if H.M != 1:
        raise ValueError("dac_loss_siso needs a single-antenna channel")
    h1 = subset_entropy(H, [1, 0], sigma2)
    h2 = subset_entropy(H, [1, 1], sigma2)
    return min(h1, h2) - 2.0 * hb_of_q(math.sqrt(2.0 * float(np.sum(H.h1**2)) / sigma2))


def dac_loss_miso(H, sigma2: float, power: float = 2.0, cons: Constellation | None = None) -> float:
    """min H_b^{X_{u,k}} - 2 H_b(Q(sqrt(power ||h||^2 / sigma2)))."""
    H = as_real(H)
    cap, _ = capacity_full_power(H, sigma2, cons)
    return capacity_infinite_dacs(H, sigma2, power) - cap


# ---------------------------------------------------------------------------
# phase-threshold strategy for M = 1
# ---------------------------------------------------------------------------

THRESHOLD_ANGLE = math.atan(0.5)


def fold_phase(theta: float) -> float:
    """Reduce a channel phase to [0, pi/4] using the 8-fold input symmetry."""
    theta = math.fmod(theta, math.pi / 2)
    if theta < 0:
        theta += math.pi / 2
    if theta > math.pi / 4:
        theta = math.pi / 2 - theta
    return theta


def retained_power(theta: float, u: int) -> float:
    """Weaker sub-channel power, as a fraction of |h|^2, when using X_u."""
    theta = fold_phase(theta)
    if u == 1:
        return math.sin(theta) ** 2
    if u == 2:
        return 1.0 - math.sin(2 * theta)
    raise ValueError("u must be 1 or 2")


def phase_threshold_rate(h, sigma2: float) -> tuple[float, int]:
    """Pick X_1 or X_2 from the channel phase alone and report its rate.

    X_1 is chosen when sqrt(2) sin(pi/4 - theta) < sin(theta) for the folded
    phase theta. Returns (rate in bits, chosen power level).
    """
    H = as_real(h)
    if H.M != 1:
        raise ValueError("phase_threshold_rate needs a single-antenna channel")
    hc = complex(H.h1[0], H.h2[0])
    if hc == 0:
        return 0.0, 2
    theta = fold_phase(math.atan2(hc.imag, hc.real))
    u = 1 if math.sqrt(2) * math.sin(math.pi / 4 - theta) < math.sin(theta) else 2
    x = [1, 0] if u == 1 else [1, 1]
    return 2.0 - subset_entropy(H, x, sigma2), u


class PowerLossBounds(NamedTuple):
    worst_case_db: float
    ergodic_db: float


def _retained(theta):
    return np.maximum(np.sin(theta) ** 2, 1.0 - np.sin(2 * theta))


def power_loss_bounds(grid_points: int = 20001) -> PowerLossBounds:
    """Worst-case and phase-averaged power loss of the threshold strategy, in dB."""
    grid = np.linspace(0.0, math.pi / 4, grid_points)
    vals = _retained(grid)
    j = int(np.argmin(vals))
    lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, grid_points - 1)]
    res = optimize.minimize_scalar(_retained, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    worst = min(float(res.fun), float(vals[j]))

    cross = optimize.brentq(lambda t: math.sin(t) ** 2 - (1.0 - math.sin(2 * t)), 0.1, math.pi / 4)
    part1, _ = integrate.quad(lambda t: 1.0 - math.sin(2 * t), 0.0, cross)
    part2, _ = integrate.quad(lambda t: math.sin(t) ** 2, cross, math.pi / 4)
    mean = 4.0 / math.pi * (part1 + part2)
    return PowerLossBounds(-10.0 * math.log10(worst), -10.0 * math.log10(mean))
