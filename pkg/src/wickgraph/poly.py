"""Multi-index polynomials and the occurrence bookkeeping of their products.

Multi-indices are plain tuples of non-negative ints. An alpha tuple is a
tuple of ``n`` multi-indices, one per time slot. Occurrences are
``(slot, coordinate, replica)`` triples, all 0-based.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

from .errors import ValidationError

MultiIndex = tuple[int, ...]
AlphaTuple = tuple[MultiIndex, ...]


class Occurrence(NamedTuple):
    slot: int
    coord: int
    replica: int


def unit(m: int, i: int, power: int = 1) -> MultiIndex:
    """Multi-index ``power * e_i`` in dimension ``m``."""
    alpha = [0] * m
    alpha[i] = power
    return tuple(alpha)


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial ``sum_alpha q_alpha x^alpha`` in ``m`` variables.

    Terms are kept sorted by multi-index; zero coefficients are dropped.
    """

    m: int
    terms: tuple[tuple[MultiIndex, float], ...] = field(default=())

    def __init__(self, m: int, terms=()):
        if int(m) < 1:
            raise ValidationError(f"dimension must be positive, got {m}")
        m = int(m)
        items = terms.items() if isinstance(terms, dict) else terms
        acc: dict[MultiIndex, float] = {}
        for alpha, q in items:
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != m:
                raise ValidationError(f"multi-index {alpha} has length {len(alpha)}, expected {m}")
            if any(a < 0 for a in alpha):
                raise ValidationError(f"negative exponent in {alpha}")
            acc[alpha] = acc.get(alpha, 0.0) + float(q)
        cleaned = tuple(sorted((a, q) for a, q in acc.items() if q != 0.0))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "terms", cleaned)

    @property
    def support(self) -> tuple[MultiIndex, ...]:
        return tuple(a for a, _ in self.terms)

    @property
    def coefficients(self) -> dict[MultiIndex, float]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def to_json(self) -> dict:
        return {"m": self.m, "terms": [{"alpha": list(a), "q": q} for a, q in self.terms]}

    @classmethod
    def from_json(cls, data) -> "Polynomial":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            m = data["m"]
            terms = [(t["alpha"], t["q"]) for t in data["terms"]]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad polynomial JSON: {exc!r}") from exc
        return cls(m, terms)

    @classmethod
    def quadratic(cls, D, c) -> "Polynomial":
        """``(x, D x) + (c, x)`` for symmetric ``D``."""
        m = len(c)
        terms: list[tuple[MultiIndex, float]] = []
        for i in range(m):
            terms.append((unit(m, i), c[i]))
            terms.append((unit(m, i, 2), D[i][i]))
            for j in range(i + 1, m):
                if abs(D[i][j] - D[j][i]) > 1e-12 * (1 + abs(D[i][j])):
                    raise ValidationError("D must be symmetric")
                alpha = [0] * m
                alpha[i] = alpha[j] = 1
                terms.append((tuple(alpha), 2.0 * D[i][j]))
        return cls(m, terms)


def evaluate(Q: Polynomial, x: Sequence[float]) -> float:
    if len(x) != Q.m:
        raise ValidationError(f"point has length {len(x)}, polynomial dimension is {Q.m}")
    total = 0.0
    for alpha, q in Q.terms:
        total += q * math.prod(xi**a for xi, a in zip(x, alpha))
    return total


def alpha_tuples(Q: Polynomial, n: int) -> Iterator[tuple[AlphaTuple, float]]:
    """All ``n``-tuples over the support with their coefficient products.

    Lexicographic in the (sorted) support.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    for combo in itertools.product(Q.terms, repeat=n):
        yield tuple(a for a, _ in combo), math.prod(q for _, q in combo)


def occurrence_set(t: AlphaTuple) -> list[Occurrence]:
    return [
        Occurrence(k, i, r)
        for k, alpha in enumerate(t)
        for i, a in enumerate(alpha)
        for r in range(a)
    ]


def total_degree(t: AlphaTuple) -> int:
    return sum(sum(alpha) for alpha in t)


def total_degree_is_even(t: AlphaTuple) -> bool:
    return total_degree(t) % 2 == 0


def coordinate_degrees(t: AlphaTuple) -> list[tuple[int, ...]]:
    """Per coordinate ``i``, the degree vector ``(alpha^(1)_i, ..., alpha^(n)_i)``."""
    if not t:
        return []
    return [tuple(col) for col in zip(*t)]
