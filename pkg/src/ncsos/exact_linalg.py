"""Dense exact linear algebra over the rationals.

Certified rank computations must not depend on floating-point thresholds,
so elimination here is fraction-free (Bareiss): rows are scaled to integers
and every division in the update is exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


def _integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = lcm(den, x.denominator)
            elif not isinstance(x, int):
                raise TypeError(f"exact elimination needs int or Fraction entries, got {type(x).__name__}")
        out.append([int(x * den) for x in row])
    return out


def exact_rank(rows: Sequence[Sequence]) -> int:
    """Matrix rank by fraction-free Gaussian elimination with full pivot search.

    Row scaling does not change rank, so each row is cleared to integers
    first.  The pivot search scans the whole remaining submatrix and stops
    as soon as it is identically zero, which keeps the cost at
    O(rank * size^2) entry updates for low-rank inputs.
    """
    a = _integer_rows(rows)
    nr = len(a)
    nc = len(a[0]) if nr else 0
    for row in a:
        if len(row) != nc:
            raise ValueError("ragged matrix")
    k = 0
    prev = 1
    while k < nr and k < nc:
        pr = -1
        pc = -1
        for j in range(k, nc):
            for i in range(k, nr):
                if a[i][j]:
                    pr, pc = i, j
                    break
            if pr >= 0:
                break
        if pr < 0:
            break
        if pr != k:
            a[k], a[pr] = a[pr], a[k]
        if pc != k:
            for row in a:
                row[k], row[pc] = row[pc], row[k]
        piv = a[k][k]
        rowk = a[k]
        for i in range(k + 1, nr):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, nc):
                rowi[j] = (rowi[j] * piv - aik * rowk[j]) // prev
            rowi[k] = 0
        prev = piv
        k += 1
    return k
