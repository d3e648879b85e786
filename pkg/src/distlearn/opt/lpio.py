"""Plain-text LP files and solver result CSVs.

An LP file holds ``n d`` on the first line, then ``n`` lines of ``d + 1``
reals (a row of ``A`` followed by its ``b``), one line with ``g`` and two
lines with the box bounds ``lo`` and ``hi``.  ``inf`` and ``-inf`` are
accepted for unbounded coordinates.  Blank lines and ``#`` comments are
skipped.
"""

from __future__ import annotations

import csv

import numpy as np

from .simplex import LinearProgram

RESULT_CSV_HEADER = ("z_guess", "iterations", "min_slack", "words")


class LPFormatError(ValueError):
    pass


def _numbers(line: str, count: int, lineno: int) -> list[float]:
    parts = line.split()
    if len(parts) != count:
        raise LPFormatError(f"line {lineno}: expected {count} numbers, found {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise LPFormatError(f"line {lineno}: non-numeric field") from None


def parse_lp(text: str) -> LinearProgram:
    lines = [(i, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines(), start=1)]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise LPFormatError("empty LP file")
    lineno, head = lines[0]
    n_f, d_f = _numbers(head, 2, lineno)
    n, d = int(n_f), int(d_f)
    if n != n_f or d != d_f or n < 0 or d < 1:
        raise LPFormatError(f"line {lineno}: bad sizes {head!r}")
    if len(lines) != n + 4:
        raise LPFormatError(f"expected {n + 4} non-blank lines, found {len(lines)}")
    rows = np.array([_numbers(ln, d + 1, i) for i, ln in lines[1:n + 1]]).reshape(n, d + 1)
    g, lo, hi = (np.array(_numbers(ln, d, i)) for i, ln in lines[n + 1:])
    return LinearProgram(rows[:, :d], rows[:, d], g, lo, hi)


def read_lp(path) -> LinearProgram:
    with open(path) as fh:
        return parse_lp(fh.read())


def format_lp(lp: LinearProgram) -> str:
    def fmt(values):
        return " ".join(format(float(v), ".17g") for v in values)

    out = [f"{lp.n} {lp.d}"]
    out += [fmt([*row, rhs]) for row, rhs in zip(lp.A, lp.b)]
    out += [fmt(lp.g), fmt(lp.lo), fmt(lp.hi)]
    return "\n".join(out) + "\n"


def write_lp(lp: LinearProgram, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_lp(lp))


def write_results_csv(path, rows) -> None:
    """``rows`` are ``(z_guess, iterations, min_slack, words)`` tuples."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULT_CSV_HEADER)
        w.writerows(rows)
