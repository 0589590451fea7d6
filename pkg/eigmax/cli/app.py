import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from ..__version__ import __version__
from ..data import errorhandler
from ..data.constants import (AUTO, COLLAPSE, COMBO, DEFAULT_MAX_ITER, DEFAULT_TOL, EXIT_COLLAPSE, EXIT_INVALID,
                              EXIT_OK, EXIT_SINGULAR, KILL_FACTOR, MAX_ITER, NEXT_VARIANTS, NEXT_XI, NORMS, PURE,
                              R_GRID, SINGULAR_SHIFT, SKIP_THRESHOLD)
from ..data.errorhandler import (EigmaxError, InvalidInputError, error_console_load_soft, error_console_set_soft,
                                 get_logger)
from ..core.bounds import MATRIX_MODE, Q_MODE, collatz_wielandt
from ..core.iteration import IterationOptions
from ..core.pipeline import STRATEGIES, SolveResult, solve_maximal, solve_next
from ..pmath.lanczos import lanczos_tridiagonalize
from .bench import BENCH_STRATEGIES, bench_sweep
from .families import CUSTOM_BD, FAMILIES
from .matrixio import format_table, read_matrix, read_vector, write_matrix

__all__ = ["RunConfig", "build_parser", "main"]

_log = get_logger("cli")

COMMANDS = ("solve", "next", "bounds", "lanczos", "bench")
OUTPUTS = ("table", "json")


def _xi(text: str) -> Union[float, str]:
    if text in (AUTO, PURE):
        return text
    try:
        return float(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a number, {AUTO!r} or {PURE!r}, got {text!r}") from e


def _anchor(text: str) -> Union[int, str]:
    if text == AUTO:
        return text
    try:
        return int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected an index or {AUTO!r}, got {text!r}") from e


def _threshold(text: str) -> Optional[float]:
    return None if text.lower() == "none" else float(text)


def _sizes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma separated sizes, got {text!r}") from e


def _rates(text: str) -> tuple[float, float, float]:
    try:
        rates = tuple(float(s) for s in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a,b,c_N, got {text!r}") from e
    if len(rates) != 3:
        raise argparse.ArgumentTypeError(f"expected three rates a,b,c_N, got {text!r}")
    return rates


@dataclass(frozen=True)
class RunConfig:
    """
    RunConfig
    =========
    Validated parameters of one CLI run.
    """
    command: str
    input: Optional[Path] = None
    strategy: str = "general"
    xi: Union[float, str, None] = None
    anchor: Union[int, str] = 0
    skip_threshold: Optional[float] = SKIP_THRESHOLD
    symmetrize: bool = True
    z0: Optional[float] = None
    norm: Optional[str] = None
    variant: str = COMBO
    c: float = KILL_FACTOR
    r_grid: int = R_GRID
    reproject: bool = False
    vector: Optional[Path] = None
    mode: str = Q_MODE
    family: str = "quadratic_bd"
    rates: Optional[tuple[float, float, float]] = None
    sizes: tuple[int, ...] = ()
    steps: int = 2
    jobs: int = 1
    csv: Optional[Path] = None
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    output: str = "table"
    trace: Optional[Path] = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise InvalidInputError(f"Expected a command in {COMMANDS}, got {self.command!r}")
        if self.command in ("solve", "next", "bounds", "lanczos") and self.input is None:
            raise InvalidInputError(f"{self.command} needs --input")
        if self.command == "bounds" and self.vector is None:
            raise InvalidInputError("bounds needs --vector")
        if self.command == "bench" and not self.sizes:
            raise InvalidInputError("bench needs --sizes")
        if self.command == "bench" and self.family == CUSTOM_BD and self.rates is None:
            raise InvalidInputError("custom_bd needs --rates")
        if self.output not in OUTPUTS:
            raise InvalidInputError(f"Expected an output in {OUTPUTS}, got {self.output!r}")
        if isinstance(self.xi, float) and not 0 <= self.xi <= 1:
            raise InvalidInputError(f"Expected xi in [0, 1], got {self.xi}")

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        fields = {k: v for k, v in vars(ns).items() if k in cls.__dataclass_fields__}
        return cls(**fields)

    @property
    def options(self) -> IterationOptions:
        return IterationOptions(tol=self.tol, max_iter=self.max_iter)


def build_parser() -> argparse.ArgumentParser:
    """
    the ``eigmax`` argument parser
    """
    parser = argparse.ArgumentParser(prog="eigmax", description="maximal and next-to-maximal eigenpairs")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs")
    parser.add_argument("--all-warnings", dest="all_warnings", action="store_true",
                        help="repeat a warning every time it is raised")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_input: bool = True) -> None:
        if with_input:
            p.add_argument("--input", type=Path, required=True, help="matrix file")
        p.add_argument("--output", choices=OUTPUTS, default="table")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--max-iter", dest="max_iter", type=int, default=DEFAULT_MAX_ITER)

    p = sub.add_parser("solve", help="maximal eigenpair")
    common(p)
    p.add_argument("--strategy", choices=STRATEGIES, default="general")
    p.add_argument("--xi", type=_xi, help="number in [0, 1], 'auto' or 'pure'")
    p.add_argument("--anchor", type=_anchor, default=0, help="state index or 'auto'")
    p.add_argument("--skip-threshold", dest="skip_threshold", type=_threshold, default=SKIP_THRESHOLD)
    p.add_argument("--no-symmetrize", dest="symmetrize", action="store_false")
    p.add_argument("--z0", type=float, help="upper bound of rho(A) for uniform-I, starting value for general")
    p.add_argument("--norm", choices=NORMS)
    p.add_argument("--trace", type=Path, help="write the iteration trace as JSON lines")

    p = sub.add_parser("next", help="next-to-maximal eigenpair of a conservative Q-matrix")
    common(p)
    p.add_argument("--variant", choices=NEXT_VARIANTS, default=COMBO)
    p.add_argument("--xi", type=float, default=NEXT_XI)
    p.add_argument("--c", type=float, default=KILL_FACTOR)
    p.add_argument("--r-grid", dest="r_grid", type=int, default=R_GRID)
    p.add_argument("--reproject", action="store_true")
    p.add_argument("--trace", type=Path, help="write the iteration trace as JSON lines")

    p = sub.add_parser("bounds", help="Collatz-Wielandt bounds from a positive vector")
    common(p)
    p.add_argument("--vector", type=Path, required=True)
    p.add_argument("--mode", choices=(MATRIX_MODE, Q_MODE), default=Q_MODE)

    p = sub.add_parser("lanczos", help="two-sided Lanczos tridiagonalization")
    common(p)

    p = sub.add_parser("bench", help="sweep a matrix family over sizes")
    common(p, with_input=False)
    p.add_argument("--family", choices=FAMILIES, default="quadratic_bd")
    p.add_argument("--rates", type=_rates, help="constant a,b,c_N of custom_bd")
    p.add_argument("--sizes", type=_sizes, required=True, help="comma separated N+1 values")
    p.add_argument("--strategy", choices=BENCH_STRATEGIES, default="tridiag")
    p.add_argument("--xi", type=_xi)
    p.add_argument("--steps", type=int, default=2)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", type=Path, help="also write the rows as CSV")
    return parser


def _exit_code(outcome: str) -> int:
    if outcome == COLLAPSE:
        return EXIT_COLLAPSE
    if outcome == SINGULAR_SHIFT:
        return EXIT_SINGULAR
    if outcome == MAX_ITER:
        _log.warning("iteration cap reached before z settled")
    return EXIT_OK


def _report(result: SolveResult, cfg: RunConfig) -> int:
    if cfg.trace is not None:
        cfg.trace.write_text(result.trace.to_jsonl(), encoding="utf-8")
    if cfg.output == "json":
        print(json.dumps(result.to_dict(), indent=2))
    else:
        rows = [[s.k, s.z, result.shift - s.z, s.residual, ",".join(s.flags)] for s in result.trace.steps]
        print(format_table(("k", "z", "value", "residual", "flags"), rows))
        print(f"{result.strategy}: {result.outcome}, value = {result.value:.12g}")
    return _exit_code(result.outcome)


def _solve(cfg: RunConfig) -> int:
    A = read_matrix(cfg.input)
    result = solve_maximal(A, cfg.strategy, cfg.xi, cfg.anchor, cfg.skip_threshold, cfg.symmetrize, cfg.z0,
                           cfg.norm, cfg.options)
    return _report(result, cfg)


def _next(cfg: RunConfig) -> int:
    Q = read_matrix(cfg.input)
    xi = cfg.xi if isinstance(cfg.xi, float) else NEXT_XI
    result = solve_next(Q, cfg.variant, xi, cfg.c, cfg.r_grid, cfg.reproject, cfg.options)
    return _report(result, cfg)


def _bounds(cfg: RunConfig) -> int:
    M = read_matrix(cfg.input)
    x = read_vector(cfg.vector, M.shape[0])
    b = collatz_wielandt(M, x, cfg.mode)
    if cfg.output == "json":
        print(json.dumps(b.to_dict(), indent=2))
    else:
        print(format_table(("lower", "upper", "ratio"), [[b.lower, b.upper, b.ratio]], digits=12))
    return EXIT_OK


def _lanczos(cfg: RunConfig) -> int:
    A = read_matrix(cfg.input)
    result = lanczos_tridiagonalize(A)
    if cfg.output == "json":
        print(json.dumps({
            "T": result.T.tolist(),
            "breakdown_at": result.breakdown_at,
            "eligible": result.eligible,
        }, indent=2))
    else:
        sys.stdout.write(write_matrix(result.T))
    return EXIT_OK if result.complete else EXIT_SINGULAR


def _bench(cfg: RunConfig) -> int:
    report = bench_sweep(cfg.family, cfg.sizes, cfg.strategy, cfg.xi, cfg.steps, cfg.jobs, cfg.rates)
    if cfg.csv is not None:
        report.to_csv(cfg.csv)
    print(report.to_json() if cfg.output == "json" else report.to_table())
    return EXIT_OK


HANDLERS = {"solve": _solve, "next": _next, "bounds": _bounds, "lanczos": _lanczos, "bench": _bench}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    entry point of the ``eigmax`` command

    Returns
    -------
        int : 0 converged, 2 collapse, 3 singular shift or breakdown, 4 invalid input
    """
    parser = build_parser()
    ns = parser.parse_args(argv)
    level = logging.WARNING if ns.verbose == 0 else (logging.INFO if ns.verbose == 1 else logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    error_console_load_soft()
    error_console_set_soft(not ns.all_warnings)
    try:
        cfg = RunConfig.from_namespace(ns)
        code = HANDLERS[cfg.command](cfg)
    except EigmaxError as e:
        print(f"ERROR [{ns.command}] : {e}", file=sys.stderr)
        code = e.exit_code
    except OSError as e:
        print(f"ERROR [{ns.command}] : {e}", file=sys.stderr)
        code = EXIT_INVALID
    errorhandler.err.display_all()
    return code
