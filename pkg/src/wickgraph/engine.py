"""Time-ordered Gaussian moment integrals via labeled multigraphs.

For a polynomial ``Q`` in ``m`` variables and order ``n`` the engine computes

    int_{0 <= s_1 <= ... <= s_n <= 1} E[ prod_k Q(X(s_k)) ] ds

for a zero-mean process with ``Cov(X_i(s), X_j(t)) = f(s, t) delta_ij`` as

    1/n! * sum over alpha tuples (prod_k q_alpha(k))
         * sum over (Gamma_1, ..., Gamma_m) (prod_q C(Gamma_q))
         * prod over components Lambda of Gamma_1 + ... + Gamma_m of int_Lambda f

where ``Gamma_q`` ranges over multigraphs on ``n`` labeled vertices whose degree
at vertex ``j`` is the ``q``-th exponent of the ``j``-th multi-index.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import GuardError, ValidationError
from .factor import c_graph
from .graph import (
    Multigraph,
    canonical_key,
    components,
    enumerate_graphs,
    graph_from_key,
    graph_sum,
    key_label,
)
from .kernel import CovarianceKernel
from .poly import AlphaTuple, Polynomial, alpha_tuples, coordinate_degrees
from .quad import DEFAULT_DIM_CAP, ComponentIntegrals, QuadratureRule

DEFAULT_BUDGET = 10_000_000
FK_MAX_ORDER = 6

ComponentMultiset = tuple[tuple[bytes, int], ...]


@dataclass
class Term:
    """One summand of the graph expansion.

    ``value`` is ``None`` for symbolic terms. Aggregated symbolic terms carry
    ``graphs=None`` and a sorted ``alpha_tuple`` standing for the multiset.
    """

    alpha_tuple: AlphaTuple
    coeff_q: float
    coeff_comb: Fraction
    graphs: tuple[Multigraph, ...] | None
    components: ComponentMultiset
    value: float | None = None

    @property
    def weight(self) -> float:
        return self.coeff_q * float(self.coeff_comb)

    @property
    def edge_count(self) -> int:
        return sum(graph_from_key(k).edge_count() * c for k, c in self.components)


@dataclass
class EvaluationResult:
    total: float
    n: int
    terms: list[Term]
    diagnostics: dict = field(default_factory=dict)
    integrals: dict[bytes, float] = field(default_factory=dict)

    def to_json(self, include_terms: bool = True) -> dict:
        out = {"total": self.total, "n": self.n}
        if include_terms:
            out["terms"] = [term_to_json(t, self.integrals) for t in self.terms]
        out["diagnostics"] = dict(self.diagnostics)
        return out


def term_to_json(t: Term, integrals: dict[bytes, float] | None = None) -> dict:
    integrals = integrals or {}
    out = {
        "alphas": [list(a) for a in t.alpha_tuple],
        "coeff_q": t.coeff_q,
        "coeff_comb": f"{t.coeff_comb.numerator}/{t.coeff_comb.denominator}",
        "components": [
            {
                "key": key.decode(),
                "label": key_label(key),
                "count": count,
                **({"integral": integrals[key]} if key in integrals else {}),
            }
            for key, count in t.components
        ],
        "value": t.value,
    }
    if t.graphs is not None:
        out["graphs"] = [g.to_text() for g in t.graphs]
    return out


def term_from_json(data: dict) -> Term:
    try:
        num, _, den = str(data["coeff_comb"]).partition("/")
        return Term(
            alpha_tuple=tuple(tuple(int(v) for v in a) for a in data["alphas"]),
            coeff_q=float(data["coeff_q"]),
            coeff_comb=Fraction(int(num), int(den or 1)),
            graphs=None,
            components=tuple((c["key"].encode(), int(c["count"])) for c in data["components"]),
            value=data.get("value"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad term JSON: {exc!r}") from exc


def _component_multiset(g: Multigraph) -> ComponentMultiset:
    counts = Counter(canonical_key(c.graph) for c in components(g))
    return tuple(sorted(counts.items()))


def _check_order(Q: Polynomial, n: int) -> None:
    if not isinstance(n, int) or n < 0:
        raise ValidationError(f"order n must be a non-negative integer, got {n!r}")


def _graph_choices(t: AlphaTuple) -> list[list[tuple[Multigraph, int]]] | None:
    """Per coordinate, the admissible graphs with their symmetry factors; ``None`` on odd parity."""
    n = len(t)
    choices = []
    for degs in coordinate_degrees(t):
        if sum(degs) % 2:
            return None
        choices.append([(g, c_graph(g)) for g in enumerate_graphs(n, degs)])
    return choices


def count_terms(Q: Polynomial, n: int) -> dict:
    """Dry run: how many graph tuples an evaluation would visit, without integrating."""
    _check_order(Q, n)
    if n == 0:
        return {"alpha_tuples": 0, "terms": 1, "skipped_parity": 0}
    tuples = terms = skipped = 0
    for t, _ in alpha_tuples(Q, n):
        tuples += 1
        choices = _graph_choices(t)
        if choices is None:
            skipped += 1
            continue
        terms += math.prod(len(c) for c in choices)
    return {"alpha_tuples": tuples, "terms": terms, "skipped_parity": skipped}


def _terms_for_tuple(t: AlphaTuple, coeff_q: float, choices, n_fact: int) -> Iterator[Term]:
    for combo in itertools.product(*choices):
        graphs = tuple(g for g, _ in combo)
        comb = Fraction(math.prod(c for _, c in combo), n_fact)
        yield Term(
            alpha_tuple=t,
            coeff_q=coeff_q,
            coeff_comb=comb,
            graphs=graphs,
            components=_component_multiset(graph_sum(*graphs)),
        )


def _structural_terms(Q: Polynomial, n: int, stats: dict) -> Iterator[Term]:
    n_fact = math.factorial(n)
    for t, coeff_q in alpha_tuples(Q, n):
        stats["alpha_tuples"] += 1
        choices = _graph_choices(t)
        if choices is None:
            stats["skipped_parity"] += 1
            continue
        yield from _terms_for_tuple(t, coeff_q, choices, n_fact)


def _empty_product_result() -> EvaluationResult:
    term = Term((), 1.0, Fraction(1), (), (), 1.0)
    return EvaluationResult(
        total=1.0,
        n=0,
        terms=[term],
        diagnostics={"term_count": 1, "skipped_parity": 0, "alpha_tuples": 0, "error_envelope": 0.0},
    )


def _assign_value(term: Term, memo: ComponentIntegrals) -> tuple[float, float]:
    """Set ``term.value``; returns (value, propagated quadrature error bound)."""
    exact = 1.0
    upper = 1.0
    for key, count in term.components:
        qv = memo.by_key(key)
        exact *= qv.value**count
        upper *= (abs(qv.value) + qv.error) ** count
    weight = term.weight
    term.value = weight * exact
    return term.value, abs(weight) * (upper - abs(exact))


def evaluate(
    Q: Polynomial,
    n: int,
    kernel: CovarianceKernel,
    rule: QuadratureRule | None = None,
    *,
    budget: int = DEFAULT_BUDGET,
    dim_cap: int = DEFAULT_DIM_CAP,
    threads: int = 1,
    keep_terms: bool = True,
    memo: ComponentIntegrals | None = None,
) -> EvaluationResult:
    """Time-ordered integral of ``E[prod_k Q(X(s_k))]`` over the ``n``-simplex.

    ``n = 0`` gives 1 (empty product). A zero polynomial gives 0 for ``n >= 1``.
    The term count is checked against ``budget`` before any integration.
    """
    _check_order(Q, n)
    rule = rule or QuadratureRule()
    if n == 0:
        return _empty_product_result()
    planned = count_terms(Q, n)
    if planned["terms"] > budget:
        raise GuardError(f"expansion has {planned['terms']} terms, above the budget {budget}")
    if memo is None:
        memo = ComponentIntegrals(kernel, rule, dim_cap)
    elif memo.kernel != kernel or memo.rule != rule:
        raise ValidationError("memo table belongs to a different kernel or rule")

    n_fact = math.factorial(n)
    tuples = list(alpha_tuples(Q, n))

    def work(chunk: list[tuple[AlphaTuple, float]]) -> tuple[list[Term], list[float], float, int]:
        terms, values, envelope, skipped = [], [], 0.0, 0
        for t, coeff_q in chunk:
            choices = _graph_choices(t)
            if choices is None:
                skipped += 1
                continue
            for term in _terms_for_tuple(t, coeff_q, choices, n_fact):
                v, e = _assign_value(term, memo)
                values.append(v)
                envelope += e
                if keep_terms:
                    terms.append(term)
        return terms, values, envelope, skipped

    if threads > 1 and len(tuples) > 1:
        size = math.ceil(len(tuples) / threads)
        chunks = [tuples[i : i + size] for i in range(0, len(tuples), size)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(tuples)]

    terms: list[Term] = []
    total = 0.0
    envelope = 0.0
    skipped = 0
    count = 0
    # fixed reduction order: tuple order, then graph order within a tuple
    for p_terms, p_values, p_env, p_skip in parts:
        terms.extend(p_terms)
        for v in p_values:
            total += v
        count += len(p_values)
        envelope += p_env
        skipped += p_skip
    return EvaluationResult(
        total=total,
        n=n,
        terms=terms,
        diagnostics={
            "term_count": count,
            "alpha_tuples": len(tuples),
            "skipped_parity": skipped,
            "component_classes": len(memo),
            "error_envelope": envelope,
            "kernel": kernel.to_config(),
            "quadrature": rule.to_config(),
        },
        integrals={k: qv.value for k, qv in memo.items()},
    )


def expand_symbolic(Q: Polynomial, n: int, *, aggregate: bool = True, budget: int = DEFAULT_BUDGET) -> list[Term]:
    """The graph expansion with exact coefficients and no kernel chosen.

    With ``aggregate`` terms sharing the same multiset of multi-indices and the
    same multiset of component classes are merged by adding their exact
    combinatorial coefficients.
    """
    _check_order(Q, n)
    if n == 0:
        return [Term((), 1.0, Fraction(1), (), ())]
    planned = count_terms(Q, n)
    if planned["terms"] > budget:
        raise GuardError(f"expansion has {planned['terms']} terms, above the budget {budget}")
    stats = {"alpha_tuples": 0, "skipped_parity": 0}
    raw = _structural_terms(Q, n, stats)
    if not aggregate:
        return list(raw)
    merged: dict[tuple, Term] = {}
    for term in raw:
        alphas = tuple(sorted(term.alpha_tuple))
        key = (alphas, term.components)
        hit = merged.get(key)
        if hit is None:
            merged[key] = Term(alphas, term.coeff_q, term.coeff_comb, None, term.components)
        else:
            hit.coeff_comb += term.coeff_comb
    return list(merged.values())


def evaluate_terms(
    terms: Iterable[Term],
    kernel: CovarianceKernel,
    rule: QuadratureRule | None = None,
    *,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> float:
    """Sum of symbolic terms against a concrete kernel; fills in each ``value``."""
    memo = ComponentIntegrals(kernel, rule or QuadratureRule(), dim_cap)
    total = 0.0
    for term in terms:
        total += _assign_value(term, memo)[0]
    return total


def shapes(terms: Iterable[Term]) -> dict[ComponentMultiset, float]:
    """Total weight ``coeff_q * coeff_comb`` per component multiset."""
    out: dict[ComponentMultiset, float] = {}
    for t in terms:
        out[t.components] = out.get(t.components, 0.0) + t.weight
    return out


@dataclass
class PartialSum:
    n: int
    term: float
    partial_sum: float


def fk_partial_sum(
    Q: Polynomial,
    N: int,
    kernel: CovarianceKernel,
    rule: QuadratureRule | None = None,
    *,
    budget: int = DEFAULT_BUDGET,
) -> list[PartialSum]:
    """Partial sums ``S_N = sum_{n <= N} (-1)^n I_n`` of the formal exponential series.

    This is a formal diagnostic only; the series need not converge.
    """
    if N < 0 or N > FK_MAX_ORDER:
        raise GuardError(f"truncation order must lie in 0..{FK_MAX_ORDER}, got {N}")
    rule = rule or QuadratureRule()
    memo = ComponentIntegrals(kernel, rule)
    out: list[PartialSum] = []
    running = 0.0
    for n in range(N + 1):
        In = evaluate(Q, n, kernel, rule, budget=budget, keep_terms=False, memo=memo).total
        running += (-1) ** n * In
        out.append(PartialSum(n, In, running))
    return out
