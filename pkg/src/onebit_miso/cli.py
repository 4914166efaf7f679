"""Command-line front end.

    onebit-miso constellation --M 2 --out subsets.csv
    onebit-miso capacity --h "2+2j" --sigma2 1 --pt 2
    onebit-miso sweep --M 4 --snr -10:2:20 --n 1000 --seed 7 --variant inf-dac --out sweep.csv
    onebit-miso train --M 4 --mode dominant --L 20 --n 1000 --seed 7 --out train.csv

Exit codes: 0 success, 2 usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .capacity import capacity, capacity_full_power
from .channel import realify
from .constellation import enumerate_constellation
from .report import csv_text, write_csv, write_manifest
from .simulate import SweepConfig, ergodic_sweep, parse_snr_grid
from .training import TrainingSweepConfig, ergodic_training_sweep, training_length

log = logging.getLogger("onebit_miso")

VARIANT_FLAGS = {
    "onebit-both": "onebit_both_csit",
    "inf-dac": "onebit_adc_inf_dac",
    "csir-only": "siso_csir_only",
}
SWEEP_COLUMNS = ["variant", "snr_db", "mean_bits", "stderr_bits", "num_channels", "seed"]
TRAIN_COLUMNS = [
    "mode", "L", "snr_db", "mean_rate_bits", "capacity_bits", "gap_bits",
    "training_length", "feedback_bits", "seed",
]


class UsageError(Exception):
    pass


def parse_complex_list(text: str) -> list[complex]:
    """Parse "a+bj, c-dj, ..." into complex numbers; whitespace is ignored."""
    out = []
    for part in text.split(","):
        token = "".join(part.split())
        if not token:
            raise UsageError(f"empty channel entry in {text!r}")
        try:
            out.append(complex(token))
        except ValueError:
            raise UsageError(f"cannot parse {part.strip()!r} as a complex number (use a+bj)") from None
    return out


def _grid(text: str) -> list[float]:
    try:
        return parse_snr_grid(text)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _emit(rows, columns, out, command, params, seed=None):
    if out is None:
        sys.stdout.write(csv_text(rows, columns))
        return None
    path = write_csv(out, rows, columns)
    write_manifest(path, command, params, seed)
    log.info("wrote %s", path)
    return path


def cmd_constellation(args) -> int:
    cons = enumerate_constellation(args.M)
    n = 2 * args.M
    columns = ["u", "k"] + [f"x{j + 1}" for j in range(n)] + ["members"]

    def rows():
        for u, k, rep in zip(cons.u, cons.k, cons.reps):
            row = {"u": u, "k": k, "members": 4}
            row.update({f"x{j + 1}": int(rep[j]) for j in range(n)})
            yield row

    _emit(rows(), columns, args.out, "constellation", {"M": args.M})
    return 0


def cmd_capacity(args) -> int:
    h = parse_complex_list(args.h)
    H = realify(h)
    res = capacity(H, args.sigma2, args.pt)
    cons = enumerate_constellation(H.M)
    _, best = capacity_full_power(H, args.sigma2, cons)
    print(f"capacity_bits: {res.capacity_bits:.12g}")
    print(f"case: {res.case_tag}")
    print("support:")
    rows = []
    for (u, k) in res.support:
        p = res.distribution.masses[(u, k)]
        idx = cons.index_of(u, k)
        print(f"  u={u} k={k} p={p:.12g} index={idx}")
        rows.append({"u": u, "k": k, "p": p, "feedback_index": idx,
                     "capacity_bits": res.capacity_bits, "case": res.case_tag})
    print(f"best_subset_at_full_power: u={best[0]} k={best[1]} feedback_index={cons.index_of(*best)}")
    if args.out:
        params = {"h": [str(c) for c in h], "sigma2": args.sigma2, "pt": args.pt}
        _emit(rows, ["u", "k", "p", "feedback_index", "capacity_bits", "case"], args.out, "capacity", params)
    return 0


def cmd_sweep(args) -> int:
    variants = ["onebit_both_csit"]
    for flag in args.variant or []:
        v = VARIANT_FLAGS[flag]
        if v not in variants:
            variants.append(v)
    cfg = SweepConfig(args.M, _grid(args.snr), args.n, args.seed, tuple(variants))
    result = ergodic_sweep(cfg)
    params = {"M": cfg.M, "snr_grid_db": list(cfg.snr_grid_db), "num_channels": cfg.num_channels,
              "variants": list(cfg.variants)}
    path = _emit(result.rows(), SWEEP_COLUMNS, args.out, "sweep", params, cfg.seed)
    if args.plot:
        from .plotting import plot_sweep

        plot_sweep(result, _figure_path(args, path, "sweep"))
    return 0


def cmd_train(args) -> int:
    modes = ("full", "dominant") if args.mode == "both" else (args.mode,)
    Ls = tuple(args.L or [20])
    cfg = TrainingSweepConfig(args.M, _grid(args.snr), args.n, args.seed, modes, Ls)
    for mode in modes:
        for L in Ls:
            log.info("%s training, L=%d: training length %d", mode, L, training_length(cfg.M, L, mode))
    result = ergodic_training_sweep(cfg)
    params = {"M": cfg.M, "snr_grid_db": list(cfg.snr_grid_db), "num_channels": cfg.num_channels,
              "modes": list(modes), "L": list(Ls)}
    path = _emit(result.rows(), TRAIN_COLUMNS, args.out, "train", params, cfg.seed)
    if args.plot:
        from .plotting import plot_training

        plot_training(result, _figure_path(args, path, "train"))
    return 0


def _figure_path(args, csv_path, stem):
    if csv_path is not None:
        return Path(csv_path).with_suffix(".png")
    return Path(f"{stem}.png")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="onebit-miso", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constellation", help="list the rotation orbits for M antennas")
    c.add_argument("--M", type=int, required=True)
    c.add_argument("--out", help="CSV path (stdout if omitted)")
    c.set_defaults(func=cmd_constellation)

    c = sub.add_parser("capacity", help="capacity of one channel realisation")
    c.add_argument("--h", required=True, help='comma-separated complex gains, e.g. "1+2j, 0.5-1j"')
    c.add_argument("--sigma2", type=float, required=True)
    c.add_argument("--pt", type=float, required=True, help="average power budget in [1, 2M]")
    c.add_argument("--out", help="optional CSV of the optimal support")
    c.set_defaults(func=cmd_capacity)

    c = sub.add_parser("sweep", help="ergodic capacity over Rayleigh draws")
    c.add_argument("--M", type=int, required=True)
    c.add_argument("--snr", default="-10:2:20", help="start:step:stop in dB, stop included")
    c.add_argument("--n", type=int, default=1000, help="channel draws per SNR point")
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--variant", action="append", choices=sorted(VARIANT_FLAGS),
                   help="extra curve; onebit-both is always included")
    c.add_argument("--out", help="CSV path (stdout if omitted)")
    c.add_argument("--plot", action="store_true", help="also render a PNG next to the CSV")
    c.set_defaults(func=cmd_sweep)

    c = sub.add_parser("train", help="rate achieved after channel training and feedback")
    c.add_argument("--M", type=int, required=True)
    c.add_argument("--mode", choices=["full", "dominant", "both"], default="dominant")
    c.add_argument("--L", type=int, action="append", help="repetitions per training vector (repeatable)")
    c.add_argument("--snr", default="-10:2:20", help="start:step:stop in dB, stop included")
    c.add_argument("--n", type=int, default=1000, help="channel draws per SNR point")
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--out", help="CSV path (stdout if omitted)")
    c.add_argument("--plot", action="store_true", help="also render a PNG next to the CSV")
    c.set_defaults(func=cmd_train)
    return p


def _join_negative_values(argv):
    # "--snr -10:2:20" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--snr", "--h"):
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"onebit-miso: error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"onebit-miso: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
