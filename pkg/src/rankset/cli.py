"""Command-line interface.

Exit codes: 0 ok, 2 usage, 3 data/format, 4 numerical or infeasible.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import __version__
from .allocate import design_report
from .bench import BenchConfig, run_bench
from .core import Allocation
from .errors import DataError, RankSetError
from .infer import (
    rss_auc_test,
    rss_elr_test,
    rss_prop_test,
    rss_sign_test,
    rss_t_test,
    rss_z_test,
)
from .io import read_population, read_rss, rss_to_csv, to_json
from .sampling import SamplingConfig, rss_prop_sample, rss_sample
from .simulate import SimConfig, rss_prop_simulate, rss_simulate

EXIT_USAGE = 2

_POOL = {"discard": "discard_set", "return": "return_unmeasured"}


def _nsamp(text: str) -> Allocation:
    try:
        return Allocation(int(v) for v in text.split(","))
    except (ValueError, DataError):
        raise argparse.ArgumentTypeError(f"expected comma-separated counts, got {text!r}") from None


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_h(args) -> None:
    if len(args.nsamp) != args.H:
        raise DataError(f"--nsamp has {len(args.nsamp)} entries but --H is {args.H}")


def cmd_sample(args) -> int:
    _check_h(args)
    pop = read_population(args.pop)
    cfg = SamplingConfig(args.H, args.nsamp, _POOL[args.pool], args.seed)
    fn = rss_prop_sample if args.command == "prop-sample" else rss_sample
    data = fn(pop, cfg)
    with_y = pop.has_y or args.command == "prop-sample"
    _emit(rss_to_csv(data, with_ids=True, with_y=with_y), args.out)
    return 0


def cmd_simulate(args) -> int:
    _check_h(args)
    if args.command == "prop-simulate":
        data = rss_prop_simulate(args.H, args.nsamp, args.p, seed=args.seed)
    else:
        cfg = SimConfig(
            args.H, args.nsamp, args.dist, args.rho, args.delta, args.t_df, args.sdlog, args.seed
        )
        data = rss_simulate(cfg)
    _emit(rss_to_csv(data, with_ids=False, with_y=True), args.out)
    return 0


def cmd_design(args) -> int:
    kind = "binary" if args.prop else "continuous"
    data = read_rss(args.data, kind=kind, set_size=args.H)
    report = design_report(data, prop=args.prop)
    _emit(to_json(report.to_dict()) + "\n", args.out)
    return 0


def cmd_test(args) -> int:
    method = args.method
    kind = "binary" if method == "prop" else "continuous"
    data = read_rss(args.data, kind=kind, set_size=args.H)
    if data.has_missing:
        sys.stderr.write(f"note: dropping {sum(r.missing for r in data.records)} record(s) with missing y\n")
        data = data.dropna()
    data2 = None
    if args.data2:
        data2 = read_rss(args.data2, kind=kind, set_size=args.H2).dropna()
    if method in ("elr", "sign", "prop") and data2 is not None:
        raise DataError(f"the {method} test is one-sample; drop --data2")
    if method == "auc" and data2 is None:
        raise DataError("the auc test needs --data2")
    if method == "z":
        res = rss_z_test(data, data2, args.mu0, args.alpha, args.alternative)
    elif method == "t":
        res = rss_t_test(data, data2, args.mu0, args.alpha, args.alternative, args.df_method)
    elif method == "elr":
        res = rss_elr_test(data, args.mu0, args.alpha)
    elif method == "sign":
        res = rss_sign_test(data, args.median0, args.alpha, args.alternative)
    elif method == "prop":
        if args.p0 is None:
            raise DataError("the prop test needs --p0")
        res = rss_prop_test(data, args.p0, args.alpha, args.alternative)
    else:
        res = rss_auc_test(data, data2, args.delta0, args.alpha)
    _emit(to_json(res.to_dict()) + "\n", args.out)
    return 0


def cmd_bench(args) -> int:
    cfg = BenchConfig.from_json(args.config)
    if args.replicates is not None:
        cfg = BenchConfig(**{**cfg.__dict__, "replicates": args.replicates})
    result = run_bench(cfg)
    if args.out:
        _emit(result.to_csv(), args.out)
    sys.stdout.write(result.to_csv() if args.format == "csv" else result.to_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankset", description="Balanced and unbalanced ranked set sampling toolkit."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("sample", "prop-sample"):
        p = sub.add_parser(name, help="draw a ranked set sample from a population CSV")
        p.add_argument("--pop", required=True, help="population CSV with ID,X[,Y]")
        p.add_argument("--H", type=int, required=True, help="set size")
        p.add_argument("--nsamp", type=_nsamp, required=True, help="per-rank counts, e.g. 2,2,2")
        p.add_argument("--pool", choices=sorted(_POOL), default="discard")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        p.set_defaults(func=cmd_sample)

    p = sub.add_parser("simulate", help="simulate RSS data from a named distribution")
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--nsamp", type=_nsamp, required=True)
    p.add_argument("--dist", choices=("normal", "t", "lognormal"), default="normal")
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--t-df", dest="t_df", type=float, default=3.0)
    p.add_argument("--sdlog", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("prop-simulate", help="simulate binary RSS data")
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--nsamp", type=_nsamp, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("design", help="evaluate an allocation and recommend improvements")
    p.add_argument("--data", required=True)
    p.add_argument("--prop", action="store_true")
    p.add_argument("--H", type=int, default=None, help="set size (default: largest rank)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("test", help="run an inference procedure")
    p.add_argument("method", choices=("z", "t", "elr", "sign", "prop", "auc"))
    p.add_argument("--data", required=True)
    p.add_argument("--data2")
    p.add_argument("--H", type=int, default=None)
    p.add_argument("--H2", type=int, default=None)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument(
        "--alternative", choices=("two.sided", "less", "greater"), default="two.sided"
    )
    p.add_argument("--mu0", type=float, default=0.0)
    p.add_argument("--median0", type=float, default=0.0)
    p.add_argument("--p0", type=float, default=None)
    p.add_argument("--delta0", type=float, default=0.5)
    p.add_argument("--df-method", dest="df_method", choices=("naive", "sample"), default="sample")
    p.add_argument("--out")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("bench", help="Monte Carlo coverage study")
    p.add_argument("--config", required=True, help="BenchConfig JSON")
    p.add_argument("--replicates", type=int, default=None, help="override the config")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out", help="also write the CSV table here")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except RankSetError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
