"""Brute-force references: Wick pairings, the hafnian identity, pairing counts.

These are deliberately naive full enumerations with hard size guards. They
are the ground truth the graph-based engine is checked against, so none of
them touch the graph enumeration or symmetry-factor code.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction
from typing import Callable, Hashable, Iterator, Mapping, Sequence

import numpy as np

from .errors import GuardError, ValidationError
from .graph import Multigraph
from .kernel import CovarianceKernel
from .poly import AlphaTuple, Polynomial, alpha_tuples, occurrence_set
from .quad import QuadratureRule, integrate_cube

Pairing = tuple[tuple[Hashable, Hashable], ...]

LHS_MAX_SLOTS = 4
LHS_MAX_OCCURRENCES = 10
COUNT_MAX_DEGREE = 12
HAFNIAN_MAX_N = 8


def enumerate_pairings(items: Sequence) -> Iterator[Pairing]:
    """All perfect matchings of ``items``; the first unpaired item is matched first."""
    items = list(items)
    if len(items) % 2:
        raise ValidationError(f"cannot pair an odd number ({len(items)}) of items")
    yield from _pairings(items)


def _pairings(items: list) -> Iterator[Pairing]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        for tail in _pairings(rest[:i] + rest[i + 1 :]):
            yield ((first, partner),) + tail


def double_factorial(k: int) -> int:
    """``k!!``, with ``(-1)!! = 0!! = 1``."""
    return math.prod(range(k, 0, -2)) if k > 0 else 1


Covariance = Callable[[int, int, int, int], float] | Mapping[tuple[int, int, int, int], float]


def wick_expectation(t: AlphaTuple, covariances: Covariance) -> float:
    """``E[prod_k (Y^(k))^alpha^(k)]`` for zero-mean Gaussian vectors ``Y^(k)``.

    ``covariances`` gives ``Cov(Y^(k)_i, Y^(l)_j)`` either as a callable
    ``(k, i, l, j) -> float`` or a mapping keyed by ``(k, i, l, j)``; a mapping
    may store only one orientation of each pair.
    """
    occ = occurrence_set(t)
    if len(occ) % 2:
        return 0.0
    if callable(covariances):
        cov = covariances
    else:
        def cov(k, i, l, j):
            if (k, i, l, j) in covariances:
                return covariances[(k, i, l, j)]
            return covariances[(l, j, k, i)]
    total = 0.0
    for pairing in enumerate_pairings(occ):
        total += math.prod(cov(a.slot, a.coord, b.slot, b.coord) for a, b in pairing)
    return total


def lhs_bruteforce(t: AlphaTuple, kernel: CovarianceKernel, rule: QuadratureRule) -> float:
    """Cube integral of the pairing sum ``sum_P prod delta_ij f(s_k, s_l)``.

    The full ``n``-dimensional integrand is built pairing by pairing and integrated
    as one function; nothing is factorized.
    """
    n = len(t)
    occ = occurrence_set(t)
    if n > LHS_MAX_SLOTS or len(occ) > LHS_MAX_OCCURRENCES:
        raise GuardError(
            f"lhs_bruteforce limited to {LHS_MAX_SLOTS} slots and {LHS_MAX_OCCURRENCES} occurrences"
        )
    if len(occ) % 2:
        return 0.0
    # pairings with a cross-coordinate pair vanish; group the rest by slot pairs
    slot_pairs: Counter[tuple[tuple[int, int], ...]] = Counter()
    for pairing in enumerate_pairings(occ):
        if all(a.coord == b.coord for a, b in pairing):
            slot_pairs[tuple(sorted((a.slot, b.slot) for a, b in pairing))] += 1
    if not slot_pairs:
        return 0.0

    def func(s: np.ndarray) -> np.ndarray:
        out = np.zeros(len(s))
        for pairs, mult in slot_pairs.items():
            term = np.full(len(s), float(mult))
            for k, l in pairs:
                term *= kernel(s[:, k], s[:, l])
            out += term
        return out

    return integrate_cube(
        func, n, rule, diagonal_kink=kernel.diagonal_kink, breakpoints=kernel.breakpoints
    )


def time_ordered_total(Q: Polynomial, n: int, kernel: CovarianceKernel, rule: QuadratureRule) -> float:
    """``(1/n!) sum_tuples coeff * lhs_bruteforce(tuple)``: the engine's target without graphs."""
    if n == 0:
        return 1.0
    total = 0.0
    for t, coeff in alpha_tuples(Q, n):
        total += coeff * lhs_bruteforce(t, kernel, rule)
    return total / math.factorial(n)


def hafnian_identity_check(A) -> tuple:
    """Both sides of the pairing-sum / permutation-sum identity for symmetric ``A``.

    Returns ``(sum over pairings of prod A_ij, sum over S_n of
    A_s1s2 ... A_s(n-1)sn / (l! 2^l))``. Entries may be ints or Fractions for
    exact evaluation.
    """
    rows = [list(r) for r in A]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValidationError("matrix must be square")
    if n % 2:
        raise ValidationError("hafnian identity needs even n")
    if n > HAFNIAN_MAX_N:
        raise GuardError(f"hafnian identity check limited to n <= {HAFNIAN_MAX_N}")
    pairing_sum = 0
    for pairing in enumerate_pairings(range(n)):
        pairing_sum += math.prod(rows[i][j] for i, j in pairing)
    perm_sum = 0
    for sigma in itertools.permutations(range(n)):
        perm_sum += math.prod(rows[sigma[2 * a]][sigma[2 * a + 1]] for a in range(n // 2))
    l = n // 2
    norm = math.factorial(l) * 2**l
    if isinstance(perm_sum, int):
        return pairing_sum, Fraction(perm_sum, norm)
    return pairing_sum, perm_sum / norm


def _flat_occurrences(degrees: Sequence[int]) -> list[tuple[int, int]]:
    return [(v, r) for v, d in enumerate(degrees) for r in range(d)]


def _induced_counts(pairing) -> Counter:
    return Counter(tuple(sorted((a[0], b[0]))) for a, b in pairing)


def pairing_count_for_graph(g: Multigraph) -> int:
    """How many pairings of the flat occurrence multiset induce exactly ``g``.

    Vertex ``j`` contributes ``deg(v_j)`` occurrences; a pair joining occurrences
    of vertices ``a`` and ``b`` is read as an edge ``{a, b}`` (a loop when equal).
    """
    degrees = g.degrees()
    if sum(degrees) > COUNT_MAX_DEGREE:
        raise GuardError(f"pairing count limited to total degree {COUNT_MAX_DEGREE}")
    target = Counter({(i, j): h for i, j, h in g.edges()})
    return sum(
        1 for p in enumerate_pairings(_flat_occurrences(degrees)) if _induced_counts(p) == target
    )


def pairing_counts_by_graph(degrees: Sequence[int]) -> Counter:
    """Histogram of induced edge multisets over all pairings for a degree vector."""
    if sum(degrees) > COUNT_MAX_DEGREE:
        raise GuardError(f"pairing count limited to total degree {COUNT_MAX_DEGREE}")
    if sum(degrees) % 2:
        return Counter()
    hist: Counter = Counter()
    for p in enumerate_pairings(_flat_occurrences(degrees)):
        hist[tuple(sorted(_induced_counts(p).items()))] += 1
    return hist


def pairing_count_split(M, A) -> int:
    """Tuples of per-class pairings whose union induces the upper-triangular ``M``.

    Column ``k`` of ``A`` gives the occurrence count of each vertex in class ``k``;
    each class is paired separately, and pairs are read as edges as in
    :func:`pairing_count_for_graph`.
    """
    n = len(M)
    if any(M[i][j] for i in range(n) for j in range(i)):
        raise ValidationError("pairing_count_split expects upper-triangular M")
    l = len(A[0]) if n else 0
    total_degree = sum(sum(r) for r in A)
    if total_degree > COUNT_MAX_DEGREE:
        raise GuardError(f"pairing count limited to total degree {COUNT_MAX_DEGREE}")
    target = Counter({(i, j): M[i][j] for i in range(n) for j in range(i, n) if M[i][j]})
    per_class = []
    for k in range(l):
        degs = [A[j][k] for j in range(n)]
        if sum(degs) % 2:
            return 0
        per_class.append(list(enumerate_pairings(_flat_occurrences(degs))))
    count = 0
    for combo in itertools.product(*per_class):
        induced: Counter = Counter()
        for p in combo:
            induced += _induced_counts(p)
        if induced == target:
            count += 1
    return count
