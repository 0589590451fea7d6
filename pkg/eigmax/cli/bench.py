import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from ..data.constants import AUTO, DEFAULT_XI, DENSE_MAX_SIZE
from ..data.errorhandler import EigmaxError, InvalidInputError, get_logger
from ..core.bounds import refined_birthdeath_bounds
from ..core.general import initials_general
from ..core.iteration import IterationOptions, rqi
from ..core.tridiagonal import initials_tridiagonal
from .families import CUSTOM_BD, FAMILIES, generate_family
from .matrixio import format_table

__all__ = ["BenchRow", "BenchReport", "bench_sweep"]

_log = get_logger("bench")

BENCH_STRATEGIES = ("tridiag", "general")
FIELDS = ("size", "z0", "z1", "z2", "lower", "upper", "ratio", "outcome", "seconds")


@dataclass(frozen=True)
class BenchRow:
    """
    one size of a sweep; ``lower``/``upper`` bracket ``lambda_0`` from the last iterate
    """
    size: int
    z0: float
    z1: float
    z2: float
    lower: float
    upper: float
    ratio: float
    outcome: str
    seconds: float


@dataclass(frozen=True)
class BenchReport:
    """
    BenchReport
    ===========
    Rows of a sweep ordered by size.
    """
    family: str
    strategy: str
    xi: Union[float, str]
    rows: tuple[BenchRow, ...]

    def to_json(self) -> str:
        return json.dumps({
            "family": self.family,
            "strategy": self.strategy,
            "xi": self.xi,
            "rows": [asdict(r) for r in self.rows],
        }, indent=2)

    def to_table(self) -> str:
        rows = [[r.size, r.z0, r.z1, r.z2, f"1{r.ratio - 1:+.1e}", r.outcome, f"{r.seconds:.3f}"]
                for r in self.rows]
        return format_table(("N+1", "z0", "z1", "z2", "ratio", "outcome", "seconds"), rows)

    def to_csv(self, path: Union[str, Path]) -> None:
        """
        one line per size, for external plotting
        """
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=FIELDS)
            writer.writeheader()
            for r in self.rows:
                writer.writerow(asdict(r))


def _family_member(family: str, N: int, rates: Optional[tuple[float, float, float]]):
    if family == CUSTOM_BD:
        a, b, c_N = rates
        return generate_family(family, N, np.full(N, a), np.full(N, b), c_N)
    return generate_family(family, N)


def _run_size(family: str, size: int, strategy: str, xi: Union[float, str], steps: int,
              rates: Optional[tuple[float, float, float]] = None) -> BenchRow:
    start = time.perf_counter()
    T = _family_member(family, size - 1, rates)
    init = initials_tridiagonal(T, xi) if strategy == "tridiag" else initials_general(T.to_qmat(), xi)
    # T is already a Q-matrix, the pair carries no shift
    trace = rqi(T, init, opts=IterationOptions(norm=init.norm, mu=init.mu, max_iter=steps, track_vectors=False))
    z = trace.z_values
    z = np.concatenate((z, np.full(max(0, 3 - z.size), z[-1])))
    try:
        b = refined_birthdeath_bounds(T, trace.final_v.oriented(), trace.final_z)
        lower, upper, ratio = b.lower, b.upper, b.ratio
    except EigmaxError as e:
        _log.warning("size %d: no certificate (%s)", size, e)
        lower = upper = ratio = float("nan")
    seconds = time.perf_counter() - start
    _log.info("size %d done in %.3fs", size, seconds)
    return BenchRow(size, float(z[0]), float(z[1]), float(z[2]), lower, upper, ratio, trace.outcome, seconds)


def bench_sweep(family: str,
                sizes: Iterable[int],
                strategy: str = "tridiag",
                xi: Union[float, str, None] = None,
                steps: int = 2,
                jobs: int = 1,
                rates: Optional[tuple[float, float, float]] = None) -> BenchReport:
    """
    runs the initials and ``steps`` RQI steps for every size of a family

    Sizes are ``N + 1``. The ``tridiag`` strategy stays on the banded O(N)
    path; ``general`` densifies and is limited to ``DENSE_MAX_SIZE`` states.
    Up to ``jobs`` sizes run concurrently, rows come back ordered by size.

    Parameters
    ----------
        family : str
            ``quadratic_bd`` or ``custom_bd``
        sizes : Iterable[int]
            numbers of states, each at least 2
        strategy : str, (optional)
            defaults to ``tridiag``
        xi : float | str, (optional)
            defaults to 7/8 for ``tridiag`` and ``"auto"`` for ``general``
        steps : int, (optional)
            defaults to 2
        jobs : int, (optional)
            defaults to 1
        rates : tuple, (optional)
            constant ``(a, b, c_N)`` of ``custom_bd``, required by it
    """
    sizes = sorted(set(int(s) for s in sizes))
    if not sizes or sizes[0] < 2:
        raise InvalidInputError("sizes must be at least 2")
    if strategy not in BENCH_STRATEGIES:
        raise InvalidInputError(f"Expected a strategy in {BENCH_STRATEGIES}, got {strategy!r}")
    if strategy == "general" and sizes[-1] > DENSE_MAX_SIZE:
        raise InvalidInputError(f"general strategy is limited to {DENSE_MAX_SIZE} states")
    if family not in FAMILIES:
        raise InvalidInputError(f"Expected a family in {FAMILIES}, got {family!r}")
    if family == CUSTOM_BD and (rates is None or len(rates) != 3 or min(rates) <= 0):
        raise InvalidInputError(f"custom_bd needs three positive rates a, b, c_N, got {rates!r}")
    if jobs < 1:
        raise InvalidInputError(f"Expected jobs >= 1, got {jobs}")
    if xi is None:
        xi = DEFAULT_XI if strategy == "tridiag" else AUTO

    with ThreadPoolExecutor(max_workers=jobs) as executor:
        futures = {executor.submit(_run_size, family, s, strategy, xi, steps, rates): s for s in sizes}
        rows = [fut.result() for fut in as_completed(futures)]
    rows.sort(key=lambda r: r.size)
    return BenchReport(family, strategy, xi, tuple(rows))
