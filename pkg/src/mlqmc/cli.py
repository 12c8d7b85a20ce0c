"""``price-asian`` command line.

    price-asian --method regression --multilevel --L 10 --m 2 --nl 16 --runs 100
    price-asian --method pca --L 10 --n 4096 --format md
    price-asian table1 [--runs 100] [--nl 2 4 8 ...] [--methods mc forward ...]
    price-asian table2 [--runs 100] [--nl 64] [--n 4096]
"""

from __future__ import annotations

import argparse
import sys

from .asian import METHODS, ConfigurationError, MarketParams, OptionParams
from .harness import (
    TABLE1_METHODS,
    TABLE1_NL,
    ExperimentConfig,
    emit,
    emit_table2,
    run_experiment,
    run_table1,
    run_table2,
    table2_configs,
)
from .low_discrepancy import QMCSource

SUBCOMMANDS = ("table1", "table2")


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--L", type=int, default=10, help="finest level (n = m**L time steps)")
    p.add_argument("--m", type=int, default=2, help="refinement base")
    p.add_argument("--runs", type=int, default=100, help="independent replications")
    p.add_argument("--rate", type=float, default=0.04)
    p.add_argument("--sigma", type=float, default=0.3)
    p.add_argument("--spot", type=float, default=100.0)
    p.add_argument("--strike", type=float, default=100.0)
    p.add_argument("--maturity", type=float, default=1.0)
    p.add_argument("--seed", type=_u64, default=2012)
    p.add_argument("--shift", choices=QMCSource.RANDOMIZATIONS, default="digital",
                   help="QMC randomization: digital (XOR) or cp (modulo-1) shift")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("csv", "md"), default="csv")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")


def _price_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="price-asian",
        description="Price a discrete Asian call by (multilevel) MC/QMC. "
        "Subcommands: table1, table2.",
    )
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--multilevel", action="store_true")
    size = p.add_mutually_exclusive_group(required=True)
    size.add_argument("--nl", type=int, help="finest-level sample count (multilevel)")
    size.add_argument("--n", type=int, help="sample count (single level)")
    _common(p)
    return p


def _table_parser(name: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=f"price-asian {name}")
    if name == "table1":
        p.add_argument("--nl", type=int, nargs="+", default=list(TABLE1_NL))
        p.add_argument("--methods", choices=METHODS, nargs="+", default=list(TABLE1_METHODS))
        _common(p)
    else:
        p.add_argument("--method", choices=METHODS, default="regression")
        p.add_argument("--nl", type=int, default=64)
        p.add_argument("--n", type=int, default=4096)
        _common(p)
        p.set_defaults(format="md")
    return p


def _market(a) -> dict:
    return dict(
        L=a.L, m=a.m,
        market=MarketParams(a.rate, a.sigma, a.spot),
        option=OptionParams(a.strike, a.maturity),
        randomization=a.shift,
        workers=a.workers,
    )


def run(argv: list[str]) -> tuple[str, argparse.Namespace]:
    if argv and argv[0] in SUBCOMMANDS:
        name, rest = argv[0], argv[1:]
        a = _table_parser(name).parse_args(rest)
        if name == "table1":
            stats = run_table1(runs=a.runs, seed=a.seed, nl_values=a.nl, methods=a.methods, **_market(a))
            return emit(stats, a.format), a
        ml, sl = table2_configs(runs=a.runs, seed=a.seed, N_L=a.nl, N=a.n, method=a.method, **_market(a))
        return emit_table2(run_table2(ml, sl), a.format), a

    a = _price_parser().parse_args(argv)
    if a.multilevel and a.nl is None:
        raise ConfigurationError("--multilevel needs --nl")
    if not a.multilevel and a.n is None:
        raise ConfigurationError("single-level runs need --n (or pass --multilevel --nl)")
    cfg = ExperimentConfig(
        method=a.method, multilevel=a.multilevel, N_L=a.nl, N=a.n,
        runs=a.runs, seed=a.seed, **_market(a),
    )
    return emit(run_experiment(cfg), a.format), a


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        text, args = run(argv)
    except ValueError as exc:  # ConfigurationError and friends
        print(f"price-asian: error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
