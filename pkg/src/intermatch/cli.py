"""Command-line entry point.

Subcommands: demo, sweep, compare, ideal, heatmap, oracle. Options can also
come from ``--config FILE`` (YAML or JSON mapping whose keys mirror the long
flag names); flags given on the command line win.

Exit codes: 0 success, 1 check failed (demo/oracle mismatch), 2 usage error,
3 output not writable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import yaml

from . import experiments as ex
from .core import Side, compare_welfare
from .engines import two_step
from .fixtures import hoarding_arrangements, hoarding_expected, hoarding_market
from .prefgen import DEFAULT_SEED, GenParams
from .stability import blocking_pairs, match_rate
from .theory import oracle_grid

EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_UNWRITABLE = 3

DEFAULTS = {
    "doctors": 470,
    "hospitals": 400,
    "beta": 40.0,
    "gamma": 20.0,
    "l": 25,
    "k_min": 1,
    "k_max": 100,
    "k_cap": 5,
    "l_min": 1,
    "l_max": 40,
    "reps": 100,
    "seed": DEFAULT_SEED,
    "out": "results",
    "threads": "1",
    "grid": 12,
    "formula": "printed",
}

HEATMAP_DEFAULTS = {"k_min": 1, "k_max": 40}


class UsageError(Exception):
    pass


def _add_market_flags(p):
    p.add_argument("--doctors", type=int, help="number of doctors (default 470)")
    p.add_argument("--hospitals", type=int, help="number of hospitals (default 400)")
    p.add_argument("--beta", type=float, help="common-quality weight (default 40)")
    p.add_argument("--gamma", type=float, help="fit weight (default 20)")
    p.add_argument("--reps", type=int, help="replications (default 100)")
    p.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED})")
    p.add_argument("--threads", help="worker processes, or 'auto' (default 1)")


def _add_io_flags(p):
    p.add_argument("--out", help="output directory (default ./results)")
    p.add_argument("--config", help="YAML/JSON file with option values; flags override it")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intermatch", description="Interview-then-match market experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", help="run the 4x4 hoarding example and check it")
    demo.add_argument("--json", action="store_true", help="machine-readable output")

    sweep = sub.add_parser("sweep", help="vary the doctors' cap k with the hospitals' cap fixed")
    _add_market_flags(sweep)
    sweep.add_argument("--l", type=int, help="hospital interview cap (default 25)")
    sweep.add_argument("--k-min", type=int, dest="k_min")
    sweep.add_argument("--k-max", type=int, dest="k_max")
    _add_io_flags(sweep)

    for name, text in (("compare", "capped vs unconstrained doctors"), ("ideal", "capped pipeline vs no interview stage")):
        p = sub.add_parser(name, help=text)
        _add_market_flags(p)
        p.add_argument("--l", type=int, help="hospital interview cap (default 25)")
        p.add_argument("--k-cap", type=int, dest="k_cap", help="doctor interview cap (default 5)")
        _add_io_flags(p)

    heat = sub.add_parser("heatmap", help="mean match rate over an l x k grid")
    _add_market_flags(heat)
    heat.add_argument("--l-min", type=int, dest="l_min")
    heat.add_argument("--l-max", type=int, dest="l_max")
    heat.add_argument("--k-min", type=int, dest="k_min")
    heat.add_argument("--k-max", type=int, dest="k_max")
    _add_io_flags(heat)

    oracle = sub.add_parser("oracle", help="closed-form counts vs pipeline on common markets")
    oracle.add_argument("--grid", type=int, help="max market size and cap (default 12)")
    oracle.add_argument("--formula", choices=("printed", "exact"), help="closed form to compare (default printed)")
    _add_io_flags(oracle)
    return parser


def _load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must be a mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def resolve_options(args) -> dict:
    opts = dict(DEFAULTS)
    if args.command == "heatmap":
        opts.update(HEATMAP_DEFAULTS)
    if getattr(args, "config", None):
        cfg = _load_config(args.config)
        unknown = set(cfg) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        opts.update(cfg)
    for key, value in vars(args).items():
        if key in DEFAULTS and value is not None:
            opts[key] = value
    return opts


def _positive(opts, *keys):
    for key in keys:
        try:
            value = int(opts[key])
        except (TypeError, ValueError):
            raise UsageError(f"--{key.replace('_', '-')} must be an integer") from None
        if value < 1:
            raise UsageError(f"--{key.replace('_', '-')} must be >= 1")
        opts[key] = value


def _gen(opts) -> GenParams:
    _positive(opts, "doctors", "hospitals", "reps")
    if opts["doctors"] < 2 or opts["hospitals"] < 2:
        raise UsageError("--doctors and --hospitals must be >= 2")
    if float(opts["beta"]) < 0 or float(opts["gamma"]) < 0:
        raise UsageError("--beta and --gamma must be >= 0")
    threads = str(opts["threads"])
    if threads != "auto" and (not threads.isdigit() or int(threads) < 1):
        raise UsageError("--threads must be a positive integer or 'auto'")
    return GenParams(float(opts["beta"]), float(opts["gamma"]), opts["doctors"], opts["hospitals"], int(opts["seed"]))


def _outdir(opts) -> str:
    out = str(opts["out"])
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as exc:
        raise PermissionError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")
    return out


def _emit(out, name, rows, header=None) -> None:
    path = os.path.join(out, name)
    n = ex.write_rows(path, rows, header)
    print(f"wrote {path} ({n} rows)")


# subcommands


def run_demo(as_json: bool = False) -> int:
    market = hoarding_market()
    expected = hoarding_expected()
    before, after = hoarding_arrangements()
    result = {}
    ok = True
    for label, arrangement in (("before", before), ("after", after)):
        nu, mu = two_step(market, arrangement)
        report = blocking_pairs(mu, market)
        ok &= nu == expected[f"nu_{label}"] and mu == expected[f"mu_{label}"]
        result[label] = {
            "kappa": list(arrangement.kappa),
            "iota": list(arrangement.iota),
            "interviews": [sorted(hs) for hs in nu.of_doctor],
            "matching": mu.to_records(),
            "blocking_pairs": sorted([list(p) for p in report.pairs]),
            "stable": report.count == 0,
            "match_rate": match_rate(mu, market),
        }
    ok &= result["before"]["stable"] and not result["after"]["stable"]
    mu_b = expected["mu_before"]
    mu_a = expected["mu_after"]
    docs = compare_welfare(mu_b, mu_a, market, Side.DOCTOR)
    hosps = compare_welfare(mu_b, mu_a, market, Side.HOSPITAL)
    result["doctors_prefer_before_after_same"] = list(docs)
    result["hospitals_prefer_before_after_same"] = list(hosps)
    result["matches_expected"] = bool(ok)

    if as_json:
        print(json.dumps(result, sort_keys=True))
    else:
        for label in ("before", "after"):
            r = result[label]
            print(f"[{label}] kappa={r['kappa']} iota={r['iota']}")
            print("  interviews: " + ", ".join(
                f"d{d + 1}:{{{','.join(f'h{h + 1}' for h in hs)}}}" for d, hs in enumerate(r["interviews"])))
            print("  matching:   " + ", ".join(
                f"d{d + 1}-{'h' + str(h + 1) if h is not None else 'unmatched'}" for d, h in r["matching"]))
            pairs = ", ".join(f"(d{d + 1},h{h + 1})" for d, h in r["blocking_pairs"]) or "none"
            print(f"  blocking pairs ({len(r['blocking_pairs'])}): {pairs}")
            print(f"  stable: {r['stable']}  match rate: {r['match_rate']:.2f}")
        print(f"doctors prefer before/after/same: {docs}")
        print(f"hospitals prefer before/after/same: {hosps}")
        print("matches expected tables" if ok else "MISMATCH with expected tables")
    return 0 if ok else EXIT_MISMATCH


def run_sweep(opts) -> int:
    gen = _gen(opts)
    _positive(opts, "l", "k_min", "k_max")
    if opts["k_min"] > opts["k_max"]:
        raise UsageError("--k-min must not exceed --k-max")
    out = _outdir(opts)
    config = ex.SweepConfig(gen, opts["l"], opts["k_min"], opts["k_max"], opts["reps"], opts["k_cap"], opts["threads"])
    rows = ex.sweep_k(config)
    agg = ex.aggregate_sweep(rows)
    _emit(out, "sweep.csv", rows)
    _emit(out, "sweep_agg.csv", agg)
    k_top, rate, k_low, bp = ex.best_k(agg)
    print(f"max mean match rate {rate:.5f} at k={k_top}; min mean blocking pairs {bp:.2f} at k={k_low}")
    return 0


def run_compare(opts) -> int:
    gen = _gen(opts)
    _positive(opts, "l", "k_cap")
    out = _outdir(opts)
    rows, hist = ex.compare_policies(gen, opts["l"], opts["k_cap"], opts["reps"], opts["threads"])
    _emit(out, "compare.csv", rows)
    _emit(out, "hist.csv", hist)
    return 0


def run_ideal(opts) -> int:
    gen = _gen(opts)
    _positive(opts, "l", "k_cap")
    out = _outdir(opts)
    _emit(out, "ideal.csv", ex.ideal_comparison(gen, opts["l"], opts["k_cap"], opts["reps"], opts["threads"]))
    return 0


def run_heatmap(opts) -> int:
    gen = _gen(opts)
    _positive(opts, "l_min", "l_max", "k_min", "k_max")
    if opts["l_min"] > opts["l_max"] or opts["k_min"] > opts["k_max"]:
        raise UsageError("range minimum exceeds maximum")
    out = _outdir(opts)
    rows = ex.heatmap_lk(
        gen,
        range(opts["l_min"], opts["l_max"] + 1),
        range(opts["k_min"], opts["k_max"] + 1),
        opts["reps"],
        opts["threads"],
    )
    _emit(out, "heatmap.csv", rows)
    return 0


def run_oracle(opts) -> int:
    _positive(opts, "grid")
    if opts["grid"] < 2:
        raise UsageError("--grid must be >= 2")
    if opts["formula"] not in ("printed", "exact"):
        raise UsageError("--formula must be 'printed' or 'exact'")
    out = _outdir(opts)
    rows = oracle_grid(opts["grid"], opts["grid"], exact=opts["formula"] == "exact")
    _emit(out, "oracle.csv", rows)
    bad = 0
    for branch in ("k>l", "k<l", "k=l"):
        sel = [r for r in rows if r.branch == branch]
        bm = sum(not r.matched_ok for r in sel)
        bb = sum(not r.blocking_ok for r in sel)
        print(f"{branch}: {len(sel)} cells, matched mismatches {bm}, blocking mismatches {bb}")
        if branch != "k<l":
            bad += bm + bb
    return 0 if bad == 0 else EXIT_MISMATCH


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "demo":
        return run_demo(args.json)
    try:
        opts = resolve_options(args)
        handler = {
            "sweep": run_sweep,
            "compare": run_compare,
            "ideal": run_ideal,
            "heatmap": run_heatmap,
            "oracle": run_oracle,
        }[args.command]
        return handler(opts)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, TypeError) as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE


if __name__ == "__main__":
    sys.exit(main())
