"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in
the terminal summary. Criteria 7 to 9 run at full Monte Carlo scale and
carry the ``slow`` marker.
"""

import math
import time
from math import comb

import numpy as np
import pytest

from onebit_miso.capacity import (
    InputDistribution,
    capacity,
    mi_bruteforce,
    miso_capacity,
    output_distribution,
    power_loss_bounds,
    siso_capacity,
    subset_entropies,
    THRESHOLD_ANGLE,
)
from onebit_miso.channel import realify
from onebit_miso.constellation import enumerate_constellation, level_size, rotate
from onebit_miso.simulate import (
    SweepConfig,
    draw_channels,
    ergodic_sweep,
    horizontal_gap_db,
    parse_snr_grid,
    stream_rng,
)
from onebit_miso.training import TrainingSweepConfig, ergodic_training_sweep, full_training
from oracles import lp_full_vertex_enumeration, random_channel, transitions_direct

SEED = 7


def test_1_combinatorial_counts(accept):
    ok = True
    for M, total in [(1, 2), (2, 20), (3, 182), (4, 1640)]:
        t0 = time.perf_counter()
        cons = enumerate_constellation.__wrapped__(M)
        elapsed = time.perf_counter() - t0
        ok &= len(cons) == total
        for u in range(1, 2 * M + 1):
            ok &= level_size(M, u) == comb(2 * M, u) * 2**u
            ok &= int(np.sum(cons.u == u)) * 4 == comb(2 * M, u) * 2**u
        if M == 4:
            ok &= elapsed < 5.0
            m4 = elapsed
    accept(1, ok, f"totals 2/20/182/1640 and |X_u| = C(2M,u) 2^u exact; M=4 in {m4:.3f} s")


def test_2_siso_oracle(accept):
    rng = np.random.default_rng(2)
    cons = enumerate_constellation(1)
    grid = np.linspace(0.0, 1.0, 201)
    sigmas = [0.1, 0.3, 1.0, 3.0, 10.0]
    worst_grid, worst_excess = 0.0, -math.inf
    t0 = time.perf_counter()
    for _ in range(200):
        H = realify(random_channel(rng, 1))
        for s2 in sigmas:
            cap = siso_capacity(H, s2, 2.0).capacity_bits
            best = max(
                mi_bruteforce(H, InputDistribution({(1, 1): 1 - q, (2, 1): q}).expand(cons), s2) for q in grid
            )
            worst_grid = max(worst_grid, abs(cap - best))
            for j in range(100):
                alpha = 1.0 if j % 2 else 0.3
                p = rng.dirichlet(np.full(8, alpha))
                worst_excess = max(worst_excess, mi_bruteforce(H, p, s2) - cap)
    elapsed = time.perf_counter() - t0
    ok = worst_grid <= 2e-3 and worst_excess <= 1e-9 and elapsed < 60
    accept(2, ok, f"grid gap {worst_grid:.2e} <= 2e-3, max excess {worst_excess:.2e} <= 1e-9, {elapsed:.1f} s")


def test_3_miso_oracle(accept):
    rng = np.random.default_rng(3)
    cons = enumerate_constellation(2)
    worst, worst_full = 0.0, 0.0
    for _ in range(100):
        H = realify(random_channel(rng, 2, scale=rng.uniform(0.3, 3.0)))
        s2 = 10 ** rng.uniform(-1.0, 1.0)
        ent = subset_entropies(H, s2, cons)
        for Pt in (1.0, 1.5, 2.0, 3.0, 4.0):
            cap = miso_capacity(H, s2, Pt, cons).capacity_bits
            worst = max(worst, abs(cap - (2 - lp_full_vertex_enumeration(ent, cons.u, Pt))))
            if Pt == 4.0:
                worst_full = max(worst_full, abs(cap - (2 - ent.min())))
    ok = worst <= 1e-10 and worst_full <= 1e-10
    accept(3, ok, f"max |LP - vertex enumeration| {worst:.1e}, max |C(4) - (2 - min H_b)| {worst_full:.1e}")


def test_4_uniform_output(accept):
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(50):
        M = int(rng.integers(1, 4))
        cons = enumerate_constellation(M)
        h = random_channel(rng, M, scale=rng.uniform(0.2, 3.0))
        s2 = 10 ** rng.uniform(-1.5, 1.5)
        masses = rng.dirichlet(np.full(len(cons), 0.5))
        probs = InputDistribution({(int(u), int(k)): float(p) for u, k, p in zip(cons.u, cons.k, masses)}).expand(cons)
        py_pkg = output_distribution(h, probs, s2)
        py_ref = probs @ transitions_direct(h, cons.all_vectors(), s2)
        worst = max(worst, np.abs(py_pkg - 0.25).max(), np.abs(py_ref - 0.25).max())
    accept(4, worst <= 1e-12, f"max |P[y] - 1/4| = {worst:.1e} over 50 triples")


def test_5_regime_flip(accept):
    lo = capacity([2 + 2j], 1.0, 2.0).support
    hi = capacity([2 + 2j], 9.0, 2.0).support
    accept(5, lo == [(1, 1)] and hi == [(2, 1)], f"sigma2=1 -> {lo}, sigma2=9 -> {hi}")


def test_6_loss_bounds(accept):
    t0 = time.perf_counter()
    b = power_loss_bounds()
    elapsed = time.perf_counter() - t0
    a = THRESHOLD_ANGLE
    part1 = (a + math.cos(2 * a) / 2) - 0.5
    part2 = (math.pi / 8 - 0.25) - (a / 2 - math.sin(2 * a) / 4)
    closed = -10 * math.log10(4 / math.pi * (part1 + part2))
    ok = (
        abs(b.worst_case_db - 6.99) <= 0.02
        and abs(b.ergodic_db - 3.21) <= 0.02
        and abs(b.ergodic_db - closed) <= 1e-9
        and elapsed < 1.0
    )
    accept(6, ok, f"worst {b.worst_case_db:.4f} dB, ergodic {b.ergodic_db:.4f} dB (closed form {closed:.4f}), {elapsed:.3f} s")


@pytest.mark.slow
def test_7_saturation_and_trend(accept):
    high = ergodic_sweep(SweepConfig(4, [30.0], 1000, SEED))
    m30, s30 = high.mean["onebit_both_csit"][0], high.stderr["onebit_both_csit"][0]
    means, ses = [], []
    for M in (1, 2, 4):
        r = ergodic_sweep(SweepConfig(M, [5.0], 1000, SEED))
        means.append(r.mean["onebit_both_csit"][0])
        ses.append(r.stderr["onebit_both_csit"][0])
    margins = [
        (means[i + 1] - means[i]) / math.hypot(ses[i], ses[i + 1]) for i in range(2)
    ]
    ok = m30 >= 1.95 and min(margins) >= 3.0
    accept(
        7, ok,
        f"M=4 @30 dB mean {m30:.4f} (se {s30:.1e}); @5 dB M=1,2,4 means "
        + ", ".join(f"{m:.4f}" for m in means)
        + f", steps {margins[0]:.1f} and {margins[1]:.1f} se",
    )


@pytest.mark.slow
def test_8_mid_snr_dac_loss(accept):
    cfg = SweepConfig(4, parse_snr_grid("-10:1:30"), 1000, SEED, ("onebit_both_csit", "onebit_adc_inf_dac"))
    res = ergodic_sweep(cfg)
    gap = horizontal_gap_db(res.snr_db, res.mean["onebit_adc_inf_dac"], res.mean["onebit_both_csit"], 1.0)
    accept(8, 1.0 <= gap <= 3.0, f"horizontal gap at 1.0 bit = {gap:.2f} dB (band [1, 3])")


_TRAINING_SECONDS = {}


@pytest.mark.slow
def test_9a_full_training_recovers_argmin(accept):
    # a fresh channel and fresh training noise in every trial
    t0 = time.perf_counter()
    cons = enumerate_constellation(2)
    s2 = 2 * 2 / 10**0.5
    h = draw_channels(2, 100, SEED)
    hits = 0
    for d in range(100):
        H = realify(h[d])
        ent = subset_entropies(H, s2, cons)
        out = full_training(H, s2, cons, 10_000, stream_rng(SEED, 1, d))
        hits += ent[cons.index_of(*out.selected)] <= ent.min()
    _TRAINING_SECONDS["a"] = time.perf_counter() - t0
    accept("9a", hits >= 95, f"{hits}/100 trials select the true argmin (need >= 95)")


@pytest.mark.slow
def test_9b_dominant_training_tracks_capacity(accept):
    t0 = time.perf_counter()
    grid = parse_snr_grid("-10:1:20")
    res = ergodic_training_sweep(TrainingSweepConfig(4, grid, 1000, SEED, ("dominant",), (20,)))
    gaps = res.capacity_mean - res.mean("dominant", 20)
    _TRAINING_SECONDS["b"] = time.perf_counter() - t0
    worst = int(np.argmax(gaps))
    accept("9b", bool(np.all(gaps <= 0.25)), f"max gap {gaps[worst]:.4f} bits at {grid[worst]:g} dB (need <= 0.25)")


@pytest.mark.slow
def test_9c_dominant_beats_full_at_low_snr(accept):
    t0 = time.perf_counter()
    res = ergodic_training_sweep(TrainingSweepConfig(4, [-5.0], 1000, SEED, ("full", "dominant"), (20,)))
    dom, full = res.rates[("dominant", 20)][0], res.rates[("full", 20)][0]
    # paired standard error on the common draws
    se = (dom - full).std(ddof=1) / math.sqrt(dom.size)
    _TRAINING_SECONDS["c"] = time.perf_counter() - t0
    total = sum(_TRAINING_SECONDS.values())
    ok = dom.mean() >= full.mean() - se and total < 600
    accept("9c", ok, f"dominant {dom.mean():.4f} vs full {full.mean():.4f} (se {se:.4f}); criterion 9 took {total:.0f} s")


def test_10_rotation_properties(accept):
    rng = np.random.default_rng(10)
    worst_inv, worst_dom = 0.0, -math.inf
    for _ in range(50):
        M = int(rng.integers(1, 3))
        cons = enumerate_constellation(M)
        inputs = cons.all_vectors()
        where = {tuple(v): i for i, v in enumerate(inputs)}
        perm = np.array([where[tuple(rotate(v, 1))] for v in inputs])
        h = random_channel(rng, M, scale=rng.uniform(0.3, 3.0))
        s2 = 10 ** rng.uniform(-1.0, 1.0)
        p = rng.dirichlet(np.full(len(inputs), 0.5))
        base = mi_bruteforce(h, p, s2, inputs)
        rotated, avg = p.copy(), p / 4
        for _ in range(3):
            nxt = np.empty_like(rotated)
            nxt[perm] = rotated
            rotated = nxt
            worst_inv = max(worst_inv, abs(mi_bruteforce(h, rotated, s2, inputs) - base))
            avg = avg + rotated / 4
        worst_dom = max(worst_dom, base - mi_bruteforce(h, avg, s2, inputs))
    ok = worst_inv <= 1e-9 and worst_dom <= 1e-9
    accept(10, ok, f"max rotation change {worst_inv:.1e}; max shortfall of averaged law {worst_dom:.1e}")
