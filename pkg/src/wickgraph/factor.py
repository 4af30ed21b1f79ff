"""Exact symmetry factors for labeled multigraphs.

Everything here is integer or :class:`fractions.Fraction` arithmetic; the
single division in :func:`c_graph` happens last and is checked to be exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import ValidationError
from .graph import Multigraph

ExactRational = Fraction

Matrix = tuple[tuple[int, ...], ...]


def _as_matrix(A) -> Matrix:
    rows = tuple(tuple(int(v) for v in row) for row in A)
    if rows and len({len(r) for r in rows}) != 1:
        raise ValidationError("ragged matrix")
    if any(v < 0 for r in rows for v in r):
        raise ValidationError("matrix entries must be non-negative")
    return rows


@dataclass(frozen=True)
class MatrixStats:
    total: int
    column_sums: tuple[int, ...]
    row_sums: tuple[int, ...]
    factorial_product: int
    entry_product: int
    trace: int | None

    def SC(self, i: int) -> int:
        return self.column_sums[i]

    def SR(self, i: int) -> int:
        return self.row_sums[i]


def factorial_stats(A: Sequence[Sequence[int]]) -> MatrixStats:
    """Sum, column/row sums, product of entry factorials, product of entries, trace.

    The trace is ``None`` for non-square input.
    """
    A = _as_matrix(A)
    ncols = len(A[0]) if A else 0
    flat = [v for row in A for v in row]
    return MatrixStats(
        total=sum(flat),
        column_sums=tuple(sum(row[c] for row in A) for c in range(ncols)),
        row_sums=tuple(sum(row) for row in A),
        factorial_product=math.prod(math.factorial(v) for v in flat),
        entry_product=math.prod(flat),
        trace=sum(A[i][i] for i in range(len(A))) if len(A) == ncols else None,
    )


def c_graph(g: Multigraph) -> int:
    """Number of pairings of the occurrence multiset that induce ``g``.

    ``prod_j deg(v_j)! / (2^tr(M) * prod_{i<=j} M_ij!)``.
    """
    num = math.prod(math.factorial(d) for d in g.degrees())
    den = 2 ** sum(g.upper[i][i] for i in range(g.n))
    den *= math.prod(math.factorial(h) for row in g.upper for h in row)
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError(f"non-integral symmetry factor for {g}")
    return q


def c_general(M: Sequence[Sequence[int]], A: Sequence[Sequence[int]]) -> int:
    """Integer value of :func:`c_general_exact`; raises if it is not integral."""
    value = c_general_exact(M, A)
    if value.denominator != 1:
        raise ArithmeticError(f"non-integral C(M, A) = {value}")
    return value.numerator


def c_general_exact(M: Sequence[Sequence[int]], A: Sequence[Sequence[int]]) -> Fraction:
    """Combinatorial factor for a square ``M`` (n x n) and ``A`` (n x l).

    Sums ``prod_k 1/P(M_k!)`` over all decompositions ``M = M_1 + ... + M_l``
    in which every ``M_k`` has ``SC(M_k, j) + SR(M_k, j) = A[j][k]``, then scales
    by ``P(A!) / 2^tr(M)``. Zero when no decomposition exists.
    """
    M = _as_matrix(M)
    A = _as_matrix(A)
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValidationError("M must be square")
    if len(A) != n:
        raise ValidationError(f"A must have {n} rows, got {len(A)}")
    l = len(A[0]) if A else 0
    if l == 0:
        return Fraction(int(not any(v for r in M for v in r)))
    columns = tuple(tuple(A[j][k] for j in range(n)) for k in range(l))
    cells = [(p, q) for p in range(n) for q in range(n)]

    def parts(budget: Matrix, target: tuple[int, ...]):
        """All M_k <= budget (entrywise) whose vertex degrees equal ``target``."""
        used = [0] * n
        chosen = [[0] * n for _ in range(n)]

        def rec(c: int):
            if c == len(cells):
                if used == list(target):
                    yield tuple(tuple(r) for r in chosen)
                return
            p, q = cells[c]
            step = 2 if p == q else 1
            hi = budget[p][q]
            if p == q:
                hi = min(hi, (target[p] - used[p]) // 2)
            else:
                hi = min(hi, target[p] - used[p], target[q] - used[q])
            for h in range(hi + 1):
                chosen[p][q] = h
                if p == q:
                    used[p] += step * h
                else:
                    used[p] += h
                    used[q] += h
                yield from rec(c + 1)
                if p == q:
                    used[p] -= step * h
                else:
                    used[p] -= h
                    used[q] -= h
            chosen[p][q] = 0

        yield from rec(0)

    @lru_cache(maxsize=None)
    def tail(k: int, budget: Matrix) -> Fraction:
        if k == l - 1:
            # the last part must take the whole remaining budget
            degs = tuple(
                sum(budget[j]) + sum(budget[i][j] for i in range(n)) for j in range(n)
            )
            if degs != columns[k]:
                return Fraction(0)
            return Fraction(1, math.prod(math.factorial(v) for r in budget for v in r))
        total = Fraction(0)
        for Mk in parts(budget, columns[k]):
            rest = tuple(
                tuple(b - x for b, x in zip(br, mr)) for br, mr in zip(budget, Mk)
            )
            sub = tail(k + 1, rest)
            if sub:
                total += sub / math.prod(math.factorial(v) for r in Mk for v in r)
        return total

    stats = factorial_stats(A)
    return Fraction(stats.factorial_product, 2 ** sum(M[i][i] for i in range(n))) * tail(0, M)
