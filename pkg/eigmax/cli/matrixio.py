from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from ..data.errorhandler import DimensionMismatchError, InvalidInputError, get_logger
from ..pmath.linalg import Vec

__all__ = ["parse_entry", "parse_matrix", "read_matrix", "read_vector", "write_matrix", "format_table"]

_log = get_logger("matrixio")

PathLike = Union[str, Path]


def parse_entry(token: str) -> float:
    """
    a decimal or rational ``p/q`` literal as a float

    Rationals are reduced exactly before the single rounding to float.
    """
    try:
        return float(Fraction(token))
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidInputError(f"cannot read matrix entry {token!r}") from e


def _tokens(text: str) -> list[list[str]]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line.split())
    return lines


def parse_matrix(text: str) -> np.ndarray:
    """
    reads the matrix text format

    The first line holds ``n``, then come ``n`` rows of ``n``
    whitespace-separated entries. Blank lines and ``#`` comments are ignored.

    Raises
    ------
        DimensionMismatchError : wrong number of rows or columns
        InvalidInputError : unreadable size or entry
    """
    lines = _tokens(text)
    if not lines or len(lines[0]) != 1:
        raise InvalidInputError("matrix text must start with a line holding n")
    try:
        n = int(lines[0][0])
    except ValueError as e:
        raise InvalidInputError(f"cannot read matrix size {lines[0][0]!r}") from e
    if n < 1:
        raise InvalidInputError(f"Expected a positive size, got {n}")
    rows = lines[1:]
    if len(rows) != n:
        raise DimensionMismatchError(f"Expected {n} rows, got {len(rows)}")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise DimensionMismatchError(f"row {i} has {len(row)} entries, expected {n}")
    return np.array([[parse_entry(t) for t in row] for row in rows])


def read_matrix(path: PathLike) -> np.ndarray:
    """
    reads a matrix file, see ``parse_matrix``
    """
    text = Path(path).read_text(encoding="utf-8")
    m = parse_matrix(text)
    _log.debug("read %dx%d matrix from %s", m.shape[0], m.shape[1], path)
    return m


def read_vector(path: PathLike, n: Optional[int] = None) -> Vec:
    """
    reads a vector file, ``n`` on the first line then ``n`` entries on any number of lines
    """
    lines = _tokens(Path(path).read_text(encoding="utf-8"))
    if not lines or len(lines[0]) != 1:
        raise InvalidInputError("vector text must start with a line holding n")
    size = int(lines[0][0])
    entries = [parse_entry(t) for row in lines[1:] for t in row]
    if len(entries) != size:
        raise DimensionMismatchError(f"Expected {size} entries, got {len(entries)}")
    if n is not None and size != n:
        raise DimensionMismatchError(f"vector has {size} entries, matrix has {n} states")
    return Vec(entries)


def write_matrix(M: Union[np.ndarray, Iterable], path: Optional[PathLike] = None) -> str:
    """
    the matrix text format of ``M``, written to ``path`` if given

    Entries use ``repr`` so reading the text back gives the same floats.
    """
    a = np.asarray(M, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"Expected a square matrix, got shape {a.shape}")
    text = f"{a.shape[0]}\n" + "\n".join(" ".join(repr(float(x)) for x in row) for row in a) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def format_table(headers: Sequence[str], rows: Sequence[Sequence], digits: int = 6) -> str:
    """
    aligned text table, floats printed with ``digits`` significant digits
    """
    def cell(x) -> str:
        if isinstance(x, (float, np.floating)):
            return f"{float(x):.{digits}g}"
        return str(x)

    body = [[cell(x) for x in row] for row in rows]
    widths = [max([len(h)] + [len(r[j]) for r in body]) for j, h in enumerate(headers)]
    out = ["  ".join(h.rjust(w) for h, w in zip(headers, widths))]
    out += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in body]
    return "\n".join(out)
