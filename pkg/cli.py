"""
Command-line entry point: every experiment and primitive as a subcommand.
"""
import argparse
import logging
import sys
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import pandas as pd
from dotenv import load_dotenv
from sqlalchemy.exc import SQLAlchemyError

from constants import (
    AppConstants,
    HistogramConstants,
    MonteCarloConstants,
    NumberTheoryConstants,
    OutputConstants,
    SpacingKind,
    SubCommand,
    SuccessMessages,
    SweepConstants,
    WordKind,
)
from database_utils import RunLedger
from exceptions import SpacingComplexityError
from experiments import (
    McConfig,
    SweepSummary,
    format_histogram,
    format_tally_table,
    legendre_check,
    mc_run,
    parse_threshold,
    pr_sweep,
    qr_sweep,
    spacing_distribution,
)
from linear_complexity import FieldSeq, berlekamp_massey, periodic_complexity
from numtheory import is_prime, nth_prime, require_odd_prime
from results_io import write_results
from sequences import legendre_sequence, pr_parity_word, qr_parity_word
from utils import get_output_dir, set_global_level, setup_logger

logger = setup_logger("cli")


class UsageError(Exception):
    """Bad flag value found after parsing; reported as exit status 2"""


def big_int(text: str) -> int:
    """'1000', '1e30' or '10**40' as an exact integer."""
    text = text.strip()
    try:
        if "**" in text:
            base, exponent = text.split("**", 1)
            return int(base) ** int(exponent)
        value = Decimal(text)
    except (ValueError, InvalidOperation):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value != value.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def positive_int(text: str) -> int:
    value = big_int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def non_negative_int(text: str) -> int:
    value = big_int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must not be negative: {text!r}")
    return value


def threshold(text: str) -> Fraction:
    try:
        return parse_threshold(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def bin_width(text: str) -> Fraction:
    value = threshold(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("bin width must be positive")
    return value


def _add_summary_flags(parser: argparse.ArgumentParser, default_name: str) -> None:
    parser.add_argument("--out", default=None,
                        help=f"CSV path, '-' for stdout; omitted means $LC_OUTPUT_DIR/{default_name}.csv")
    parser.add_argument("--threshold", type=threshold, action="append", default=[],
                        help="extra tally threshold, decimal or num/den; repeatable")
    parser.add_argument("--bin-width", type=bin_width, default=HistogramConstants.BIN_WIDTH,
                        help="histogram bin width (default: %(default)s)")
    parser.add_argument("--jobs", type=positive_int, default=1,
                        help="worker processes (default: %(default)s)")
    parser.add_argument("--record", action="store_true",
                        help="also store the run in the ledger at $DATABASE_URL")
    parser.add_argument("--histogram", action="store_true",
                        help="print the text histogram")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=AppConstants.NAME,
        description="Linear complexity of spacing parities of quadratic residues and primitive roots.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {AppConstants.VERSION}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    verbosity.add_argument("--quiet", action="store_true", help="warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    fmt = argparse.ArgumentDefaultsHelpFormatter

    for command, start, code_index in (
        (SubCommand.QR_SWEEP, SweepConstants.QR_DEFAULT_START, SweepConstants.QR_CODE_FIRST_INDEX),
        (SubCommand.PR_SWEEP, SweepConstants.PR_DEFAULT_START, SweepConstants.PR_CODE_FIRST_INDEX),
    ):
        what = "quadratic residue" if command is SubCommand.QR_SWEEP else "primitive root"
        p = sub.add_parser(command, formatter_class=fmt,
                           help=f"{what} spacing parities over consecutive primes")
        first = p.add_mutually_exclusive_group()
        first.add_argument("--start", "--start-prime", dest="start", type=positive_int, default=start,
                           help="first prime (or the next one)")
        first.add_argument("--start-index", type=positive_int, default=None,
                           help=f"start at the n-th prime instead, 1-based; {code_index} is ithprime(r+{code_index - 1}) at r=1")
        p.add_argument("--count", type=positive_int, default=SweepConstants.DEFAULT_COUNT,
                       help="number of consecutive primes")
        _add_summary_flags(p, command)

    for command in (SubCommand.MC_QR, SubCommand.MC_PR):
        p = sub.add_parser(command, formatter_class=fmt,
                           help="Monte Carlo windows over random large primes")
        p.add_argument("--trials", type=positive_int, default=MonteCarloConstants.DEFAULT_TRIALS,
                       help="number of trials N")
        p.add_argument("--window", type=positive_int, default=MonteCarloConstants.DEFAULT_WINDOW,
                       help="window size K")
        p.add_argument("--min", dest="prime_lo", type=big_int,
                       default=MonteCarloConstants.DEFAULT_PRIME_LO, help="lower end of the prime range")
        p.add_argument("--max", dest="prime_hi", type=big_int,
                       default=MonteCarloConstants.DEFAULT_PRIME_HI, help="upper end of the prime range")
        p.add_argument("--seed", type=big_int, default=MonteCarloConstants.DEFAULT_SEED,
                       help="64-bit RNG seed")
        p.add_argument("--rho-budget", type=positive_int, default=NumberTheoryConstants.DEFAULT_RHO_BUDGET,
                       help="Brent-Pollard rho iterations per factor")
        p.add_argument("--ecm-curves", type=non_negative_int, default=NumberTheoryConstants.DEFAULT_ECM_CURVES,
                       help="elliptic curves tried after rho gives up; 0 means rho only")
        _add_summary_flags(p, command)

    p = sub.add_parser(SubCommand.LEGENDRE_CHECK, formatter_class=fmt,
                       help="closed-form Legendre complexity vs Berlekamp-Massey")
    p.add_argument("--max-prime", type=positive_int, default=257, help="largest prime checked")

    p = sub.add_parser(SubCommand.BM, formatter_class=fmt, help="Berlekamp-Massey on a digit string")
    p.add_argument("--bits", required=True, help="sequence digits, first term first")
    p.add_argument("--char", type=positive_int, default=2, help="field characteristic (prime)")

    p = sub.add_parser(SubCommand.WORD, formatter_class=fmt, help="print a parity word as bits")
    p.add_argument("--prime", type=big_int, required=True, help="odd prime p")
    p.add_argument("--kind", type=WordKind, choices=list(WordKind), required=True, help="word kind")

    p = sub.add_parser(SubCommand.SPACING_DIST, formatter_class=fmt, help="raw spacing histogram as CSV")
    p.add_argument("--prime", type=big_int, required=True, help="odd prime p")
    p.add_argument("--kind", type=SpacingKind, choices=list(SpacingKind), required=True,
                   help="spacing kind")

    p = sub.add_parser(SubCommand.HISTORY, formatter_class=fmt, help="list runs stored in the ledger")
    p.add_argument("--limit", type=positive_int, default=20, help="number of runs shown")

    return parser


def _output_path(args: argparse.Namespace) -> str:
    """'-' as is; bare file names and the default go under LC_OUTPUT_DIR."""
    if args.out == OutputConstants.STDOUT_PATH:
        return args.out
    name = Path(args.out) if args.out is not None else Path(f"{args.command}.csv")
    if name.parent == Path(".") and not name.is_absolute():
        return str(get_output_dir() / name)
    return str(name)


def _report(summary: SweepSummary, args: argparse.Namespace) -> None:
    """Write files, then the tally table (to stderr when stdout carries CSV)."""
    out = _output_path(args)
    write_results(summary, out)
    stream = sys.stderr if out == OutputConstants.STDOUT_PATH else sys.stdout
    print(format_tally_table(summary), file=stream)
    if args.histogram:
        print(format_histogram(summary), file=stream)
    if args.record:
        run_id = RunLedger.save_summary(summary)
        logger.info(SuccessMessages.RUN_RECORDED.format(run_id=run_id))


def _run_sweep(args: argparse.Namespace) -> int:
    sweep = qr_sweep if args.command == SubCommand.QR_SWEEP else pr_sweep
    start = nth_prime(args.start_index) if args.start_index is not None else args.start
    if start < 5:
        raise UsageError(f"the first prime must be at least 5 for {args.command}, got {start}")
    summary = sweep(start, args.count, args.threshold, args.jobs, args.bin_width)
    _report(summary, args)
    return 0


def _run_monte_carlo(args: argparse.Namespace) -> int:
    mode = SpacingKind.QR if args.command == SubCommand.MC_QR else SpacingKind.PR
    try:
        cfg = McConfig(
            mode=mode,
            trials=args.trials,
            window=args.window,
            prime_lo=args.prime_lo,
            prime_hi=args.prime_hi,
            seed=args.seed,
            rho_budget=args.rho_budget,
            ecm_curves=args.ecm_curves,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None
    summary = mc_run(cfg, args.threshold, args.jobs, args.bin_width)
    _report(summary, args)
    return 0


def _run_legendre_check(args: argparse.Namespace) -> int:
    check = legendre_check(args.max_prime)
    frame = pd.DataFrame(
        [
            {"p": r.p, "p mod 8": r.p % 8, "closed_form": r.closed_form,
             "berlekamp_massey": r.berlekamp_massey, "ok": "yes" if r.agrees else "NO"}
            for r in check.rows
        ],
        columns=["p", "p mod 8", "closed_form", "berlekamp_massey", "ok"],
    )
    print(frame.to_string(index=False))
    template = SuccessMessages.ORACLE_PASS if check.passed else SuccessMessages.ORACLE_FAIL
    print(template.format(ok=check.agreeing, total=len(check.rows)))
    return 0 if check.passed else 1


def _run_bm(args: argparse.Namespace) -> int:
    if not is_prime(args.char):
        raise UsageError(f"--char {args.char} is not prime")
    try:
        seq = FieldSeq.from_string(args.bits, args.char)
    except ValueError as e:
        raise UsageError(f"--bits: {e}") from None
    if not seq.elems:
        raise UsageError("--bits is empty")
    poly = berlekamp_massey(seq)
    print(f"L={poly.degree}; {poly.render()}")
    print(f"C(x) = {poly.render_connection()}")
    print(f"periodic L={periodic_complexity(seq)} (period {len(seq)})")
    return 0


def _run_word(args: argparse.Namespace) -> int:
    p = _odd_prime(args.prime)
    builders: dict[WordKind, Callable] = {
        WordKind.QR: qr_parity_word,
        WordKind.PR: pr_parity_word,
        WordKind.LEGENDRE: legendre_sequence,
    }
    print(builders[args.kind](p).as_bitstring())
    return 0


def _run_spacing_dist(args: argparse.Namespace) -> int:
    p = _odd_prime(args.prime)
    counts = spacing_distribution(p, args.kind)
    frame = pd.DataFrame({"spacing": list(counts), "count": list(counts.values())})
    sys.stdout.write(frame.to_csv(index=False, lineterminator="\n"))
    return 0


def _run_history(args: argparse.Namespace) -> int:
    runs = RunLedger.list_runs(args.limit)
    print(runs.to_string(index=False) if not runs.empty else "no runs recorded")
    return 0


def _odd_prime(p: int) -> int:
    try:
        return require_odd_prime(p)
    except ValueError as e:
        raise UsageError(f"--prime: {e}") from None


HANDLERS: dict[SubCommand, Callable[[argparse.Namespace], int]] = {
    SubCommand.QR_SWEEP: _run_sweep,
    SubCommand.PR_SWEEP: _run_sweep,
    SubCommand.MC_QR: _run_monte_carlo,
    SubCommand.MC_PR: _run_monte_carlo,
    SubCommand.LEGENDRE_CHECK: _run_legendre_check,
    SubCommand.BM: _run_bm,
    SubCommand.WORD: _run_word,
    SubCommand.SPACING_DIST: _run_spacing_dist,
    SubCommand.HISTORY: _run_history,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        set_global_level(logging.DEBUG)
    elif args.quiet:
        set_global_level(logging.WARNING)

    try:
        return HANDLERS[SubCommand(args.command)](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2
    except (SpacingComplexityError, OSError, SQLAlchemyError) as e:
        logger.error(f"❌ {args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
