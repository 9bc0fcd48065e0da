"""Command-line entry point.

Usage:
    thue-family coeffs --n 0 --a 5
    thue-family eval --n 4 --a 2 --x 3 --y 2
    thue-family search --n-max 4 --a-max 10 --m 1 --y-max 200 --checkpoint run.jsonl
    thue-family table --format pretty
    thue-family verify --suite all

Every subcommand accepts the global flags --prec, --out, --format,
--config, --threads, --checkpoint and --log-level. A --config file holds
flat ``key = value`` lines named like the long flags; flags on the command
line win over the file, the file over THUE_FAMILY_* variables.
"""

import argparse
import logging
import sys
from fractions import Fraction
from typing import Callable, Sequence

from pydantic import BaseModel, ValidationError

from app.config import Settings, read_config_file, settings
from app.exceptions import (
    CheckpointMismatchError,
    DecompositionNotNormalizedError,
    DegenerateFormError,
    ParameterMismatchError,
    PreconditionError,
    SearchInterruptedError,
    ThueFamilyError,
    ZeroValueError,
)
from app.schemas.reports import (
    CoefficientsRow,
    DecompositionReport,
    EvalRow,
    RegulatorReport,
    RootReport,
    SiegelReport,
    WitnessRow,
)
from app.schemas.common import IntervalOut
from app.schemas.search import SearchConfig, SolutionRow, table_config
from app.services import laws
from app.services.diophantine import small_value_witnesses
from app.services.forms import coeffs, coeffs_oracle, configure_cache, eval_form
from app.services.report import open_output, write_rows
from app.services.roots import check_root_bounds, isolate_roots
from app.services.search import reproduce_table
from app.services.units import (
    decompose,
    gamma_triple,
    lambda_diagnostics,
    regulator_diagnostics,
    siegel_check,
)
from app.worker import run_grid_parallel

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CHECK_FAILED = 3
EXIT_INTERNAL = 4
EXIT_INTERRUPTED = 130

_USAGE_ERRORS = (
    PreconditionError,
    DegenerateFormError,
    ZeroValueError,
    ParameterMismatchError,
    CheckpointMismatchError,
)


class CommandResult:
    """Rows to print, the template for --format pretty, and whether checks passed."""

    def __init__(self, rows: Sequence[BaseModel], template: str = "generic", ok: bool = True):
        self.rows = rows
        self.template = template
        self.ok = ok


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, help="working precision in bits (default 128)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=["jsonl", "csv", "pretty"], help="output format (default jsonl)")
    common.add_argument("--config", help="flat key = value file mirroring the long flags")
    common.add_argument("--threads", type=int, help="worker processes for grid searches")
    common.add_argument("--checkpoint", help="JSON-lines checkpoint for grid searches")
    common.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR")
    return common


def _point_args(parser: argparse.ArgumentParser) -> None:
    for name in ("n", "a", "x", "y"):
        parser.add_argument(f"--{name}", type=int)


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="thue-family",
        description="Exact computations on the Thue forms F_{n,a} of the simplest cubic fields.",
    )
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers: dict[str, argparse.ArgumentParser] = {}

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        subparsers[name] = p
        return p

    p = add("coeffs", "coefficients (u_a, v_a) of F_{n,a}")
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--a-max", dest="a_max", type=int, help="emit rows a..a_max")
    p.add_argument("--oracle", action="store_true", help="cross-check with companion-matrix traces")

    p = add("eval", "exact value F_{n,a}(x, y)")
    _point_args(p)
    p.add_argument("--degenerate", action="store_true", help="allow a = 0")

    p = add("roots", "certified brackets for the roots of f_n")
    p.add_argument("--n", type=int)
    p.add_argument("--digits", type=int, default=30)
    p.add_argument(
        "--no-bounds", dest="bounds", action="store_false", help="skip the closed-form root bounds (checked for n >= 1)"
    )
    p.add_argument("--regulator", action="store_true", help="also report the regulator diagnostics")

    p = add("witness", "small values of F_{n,a} at convergents of λ2^a")
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--epsilon", help="rational in (0, 3) for the refined bound")

    p = add("search", "all solutions of |F_{n,a}(x, y)| <= m over a grid of (n, a)")
    p.add_argument("--n-min", dest="n_min", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--a-min", dest="a_min", type=int)
    p.add_argument("--a-max", dest="a_max", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--y-max", dest="y_max", type=int)
    p.add_argument("--x-max", dest="x_max", type=int)
    p.add_argument("--strategy", choices=["naive", "proximity"])

    p = add("table", "recompute the exotic solutions and diff them against the published table")
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--a-min", dest="a_min", type=int)
    p.add_argument("--a-max", dest="a_max", type=int)
    p.add_argument("--y-max", dest="y_max", type=int)
    p.add_argument("--x-max", dest="x_max", type=int)

    p = add("decompose", "γ_0 = δ·λ0^A·λ2^B for the factor x - λ0^a y")
    _point_args(p)
    p.add_argument("--radius", type=int, help="neighbour radius in the (A, B) lattice")
    p.add_argument("--strict", action="store_true", help="fail when δ cannot be normalized")

    p = add("siegel", "exact Siegel identity and the linear form in logarithms")
    _point_args(p)

    p = add("verify", "exact checks of the published inequalities")
    p.add_argument("--suite", choices=["recurrence", "pm-one", "diagonal", "all"], default="all")
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--a-max", dest="a_max", type=int)
    p.add_argument("--x-max", dest="x_max", type=int)
    p.add_argument("--stability", action="store_true", help="also re-run on the doubled grid")

    return parser, subparsers


def _require(parser: argparse.ArgumentParser, args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name, None) is None]
    if missing:
        parser.error(f"the following arguments are required: {', '.join(missing)}")


def resolve_settings(args: argparse.Namespace) -> Settings:
    """Settings from flags and --config values, falling back to the environment."""
    overrides = {
        name: getattr(args, name)
        for name in Settings.model_fields
        if getattr(args, name, None) is not None
    }
    return Settings(**overrides)


def _apply(resolved: Settings) -> None:
    for name in Settings.model_fields:
        setattr(settings, name, getattr(resolved, name))
    configure_cache(resolved.memo_limit)


def _configure_logging() -> None:
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
    )


def cmd_coeffs(args: argparse.Namespace) -> CommandResult:
    last = args.a_max if args.a_max is not None else args.a
    rows = []
    for a in range(args.a, last + 1):
        form = coeffs(args.n, a)
        if args.oracle and coeffs_oracle(args.n, a) != form:
            logger.error("oracle_mismatch n=%d a=%d", args.n, a)
            return CommandResult(rows, ok=False)
        rows.append(CoefficientsRow.from_form(form))
    return CommandResult(rows)


def cmd_eval(args: argparse.Namespace) -> CommandResult:
    value = eval_form(args.n, args.a, args.x, args.y, degenerate=args.degenerate)
    return CommandResult([EvalRow(n=args.n, a=args.a, x=args.x, y=args.y, value=value)])


def cmd_roots(args: argparse.Namespace) -> CommandResult:
    triple = isolate_roots(args.n, settings.prec)
    bounds = check_root_bounds(args.n) if args.bounds and args.n >= 1 else None
    rows: list[BaseModel] = [RootReport.build(triple, bounds, args.digits)]
    if args.regulator:
        diag = regulator_diagnostics(args.n)
        rows.append(
            RegulatorReport(
                n=diag.n,
                R=IntervalOut.from_iv(diag.R),
                log_lambda0_squared=IntervalOut.from_iv(diag.log_lambda0_squared),
                R_exceeds_square=diag.R_exceeds_square,
                log_lambda2_near_reciprocal=diag.log_lambda2_near_reciprocal,
                root_product_is_one=diag.root_product_is_one,
            )
        )
    return CommandResult(rows, ok=bounds.ok if bounds else True)


def cmd_witness(args: argparse.Namespace) -> CommandResult:
    epsilon = Fraction(args.epsilon) if args.epsilon else None
    witnesses = small_value_witnesses(args.n, args.a, args.count, epsilon=epsilon)
    return CommandResult([WitnessRow.from_witness(w, settings.prec) for w in witnesses])


def _solution_rows(solutions) -> list[SolutionRow]:
    return [
        SolutionRow(n=s.n, a=s.a, x=s.x, y=s.y, value=s.value, kind=s.kind.value) for s in solutions
    ]


def cmd_search(args: argparse.Namespace) -> CommandResult:
    fields = ("n_min", "n_max", "a_min", "a_max", "m", "y_max", "x_max", "strategy")
    values = {name: getattr(args, name) for name in fields if getattr(args, name) is not None}
    config = SearchConfig(**values, checkpoint=settings.checkpoint)
    solutions = run_grid_parallel(config, settings.threads)
    return CommandResult(_solution_rows(solutions), template="solutions")


def cmd_table(args: argparse.Namespace) -> CommandResult:
    config = table_config(
        n_max=args.n_max,
        a_min=args.a_min,
        a_max=args.a_max,
        y_max=args.y_max,
        x_max=args.x_max,
        checkpoint=settings.checkpoint,
    )
    report = reproduce_table(config, run=lambda c: run_grid_parallel(c, settings.threads))
    return CommandResult([report], template="table", ok=report.ok)


def cmd_decompose(args: argparse.Namespace) -> CommandResult:
    g = gamma_triple(args.n, args.a, args.x, args.y)
    try:
        d = decompose(g, radius=args.radius, strict=args.strict)
    except DecompositionNotNormalizedError as e:
        logger.error("decomposition_failed n=%d a=%d x=%d y=%d: %s", args.n, args.a, args.x, args.y, e)
        return CommandResult([], ok=False)
    return CommandResult([DecompositionReport.build(g, d)], ok=d.conjugate_bounds_ok is not False)


def cmd_siegel(args: argparse.Namespace) -> CommandResult:
    g = gamma_triple(args.n, args.a, args.x, args.y)
    zero = siegel_check(g)
    d = diag = None
    if g.y >= 1 and g.n >= 0:
        d = decompose(g)
        diag = lambda_diagnostics(g, d)
    else:
        logger.info("lambda_skipped n=%d y=%d", g.n, g.y)
    return CommandResult([SiegelReport.build(g, zero, d, diag)], ok=zero)


def cmd_verify(args: argparse.Namespace) -> CommandResult:
    suites = ["recurrence", "pm-one", "diagonal"] if args.suite == "all" else [args.suite]
    grid = {"n_max": args.n_max, "a_max": args.a_max, "x_max": args.x_max}
    rows: list[BaseModel] = []
    ok = True
    for suite in suites:
        relevant = {k: v for k, v in grid.items() if k in laws.DEFAULT_GRIDS[suite]}
        report = laws.run_suite(suite, **relevant)
        rows.append(report)
        ok = ok and report.ok
        if args.stability:
            stability = laws.stability_check(suite, **relevant)
            ok = ok and stability.stable
            if not stability.stable:
                logger.error("unstable suite=%s new=%s", suite, stability.new_violations)
    return CommandResult(rows, template="laws", ok=ok)


_REQUIRED = {
    "coeffs": ("n", "a"),
    "eval": ("n", "a", "x", "y"),
    "roots": ("n",),
    "witness": ("n", "a"),
    "decompose": ("n", "a", "x", "y"),
    "siegel": ("n", "a", "x", "y"),
}

COMMANDS: dict[str, Callable[[argparse.Namespace], CommandResult]] = {
    "coeffs": cmd_coeffs,
    "eval": cmd_eval,
    "roots": cmd_roots,
    "witness": cmd_witness,
    "search": cmd_search,
    "table": cmd_table,
    "decompose": cmd_decompose,
    "siegel": cmd_siegel,
    "verify": cmd_verify,
}


def _parse(argv: list[str]) -> tuple[argparse.ArgumentParser, argparse.Namespace]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)

    parser, subparsers = build_parser()
    if known.config:
        try:
            file_values = read_config_file(known.config)
        except OSError as e:
            parser.error(f"cannot read config file {known.config}: {e}")
        # string defaults go through each argument's type
        for sub in subparsers.values():
            sub.set_defaults(**file_values)
    args = parser.parse_args(argv)
    _require(subparsers[args.command], args, *_REQUIRED.get(args.command, ()))
    return subparsers[args.command], args


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser, args = _parse(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        _apply(resolve_settings(args))
    except ValidationError as e:
        parser.print_usage(sys.stderr)
        print(f"invalid settings: {e}", file=sys.stderr)
        return EXIT_USAGE
    _configure_logging()

    try:
        result = COMMANDS[args.command](args)
        with open_output(settings.out) as stream:
            write_rows(result.rows, settings.format, stream, result.template)
    except (SearchInterruptedError, KeyboardInterrupt) as e:
        logger.warning("interrupted command=%s: %s", args.command, e)
        return EXIT_INTERRUPTED
    except ValidationError as e:
        logger.error("invalid arguments command=%s: %s", args.command, e)
        return EXIT_USAGE
    except _USAGE_ERRORS as e:
        logger.error("usage_error command=%s: %s", args.command, e)
        return EXIT_USAGE
    except ThueFamilyError as e:
        logger.error("internal_error command=%s: %s", args.command, e, exc_info=True)
        return EXIT_INTERNAL
    except Exception as e:
        logger.error("unexpected_error command=%s: %s", args.command, e, exc_info=True)
        return EXIT_INTERNAL

    if not result.ok:
        logger.error("check_failed command=%s", args.command)
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
