"""Fraction-free Gaussian elimination over the rationals (Bareiss)."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


def _integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in rows:
        fr = [Fraction(x) for x in row]
        den = lcm(*(f.denominator for f in fr)) if fr else 1
        out.append([int(f * den) for f in fr])
    return out


def bareiss(rows: Sequence[Sequence]) -> tuple[int, Fraction]:
    """Return ``(rank, determinant)``; the determinant is only meaningful for square input.

    Rows are scaled to integers first, which changes the determinant by a known
    factor that is undone before returning.
    """
    fr_rows = [[Fraction(x) for x in row] for row in rows]
    m = [list(r) for r in _integer_rows(fr_rows)]
    scale = Fraction(1)
    for r_f, r_i in zip(fr_rows, m):
        nz = next((i for i, v in enumerate(r_f) if v), None)
        if nz is not None:
            scale *= r_f[nz] / r_i[nz]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    rank = 0
    prev = 1
    sign = 1
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if piv is None:
            continue
        if piv != rank:
            m[rank], m[piv] = m[piv], m[rank]
            sign = -sign
        for r in range(rank + 1, nrows):
            for c in range(col + 1, ncols):
                m[r][c] = (m[r][c] * m[rank][col] - m[rank][c] * m[r][col]) // prev
            m[r][col] = 0
        prev = m[rank][col]
        rank += 1
        if rank == nrows:
            break
    if nrows == ncols and rank == nrows:
        det = Fraction(sign * m[-1][-1]) * scale
    else:
        det = Fraction(0)
    return rank, det


def exact_rank(rows: Sequence[Sequence]) -> int:
    return bareiss(rows)[0]


def exact_det(rows: Sequence[Sequence]) -> Fraction:
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("determinant needs a square matrix")
    return bareiss(rows)[1]
