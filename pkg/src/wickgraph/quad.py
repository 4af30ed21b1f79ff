"""Quadrature of covariance products along multigraphs.

Three integration schemes, picked from the kernel:

* smooth kernels: tensor Gauss-Legendre (optionally composite) on the cube;
* kernels kinked only on the diagonal (min- or |s-t|-based): the cube is cut
  into its ``d!`` ordering simplices, each integrated with a collapsed-coordinate
  (Duffy) Gauss-Legendre rule. On every simplex the brownian kernels are
  polynomials, so this is exact once ``order`` covers the polynomial degree;
* tabulated kernels: composite tensor rule with panel edges at the grid nodes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

from .errors import GuardError, ValidationError
from .graph import Multigraph, canonical_key, components, graph_from_key
from .kernel import CovarianceKernel

KINDS = ("gauss_legendre", "trapezoid")
DEFAULT_DIM_CAP = 8
DEFAULT_MAX_EVALS = 50_000_000
_CHUNK = 1 << 17


@dataclass(frozen=True)
class QuadratureRule:
    kind: str = "gauss_legendre"
    order: int = 8
    panels: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown quadrature kind {self.kind!r}; choose from {KINDS}")
        if int(self.order) < 1 or int(self.panels) < 1:
            raise ValidationError("quadrature order and panels must be >= 1")

    def coarse(self) -> "QuadratureRule":
        """Half-resolution companion used for the error envelope."""
        return QuadratureRule(self.kind, max(1, self.order // 2), self.panels)

    @classmethod
    def from_config(cls, spec: dict | None) -> "QuadratureRule":
        spec = dict(spec or {})
        unknown = set(spec) - {"kind", "order", "panels"}
        if unknown:
            raise ValidationError(f"unknown quadrature keys {sorted(unknown)}")
        try:
            return cls(spec.get("kind", "gauss_legendre"), int(spec.get("order", 8)), int(spec.get("panels", 1)))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"bad quadrature config: {exc}") from exc

    def to_config(self) -> dict:
        return {"kind": self.kind, "order": self.order, "panels": self.panels}


@lru_cache(maxsize=128)
def gauss_legendre_01(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def nodes_1d(rule: QuadratureRule, breakpoints=None) -> tuple[np.ndarray, np.ndarray]:
    """Composite 1-D rule on [0, 1]: ``rule.panels`` uniform panels, refined by ``breakpoints``."""
    edges = np.linspace(0.0, 1.0, rule.panels + 1)
    if breakpoints is not None:
        edges = np.union1d(edges, np.asarray(breakpoints, dtype=float))
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        if rule.kind == "gauss_legendre":
            x, w = gauss_legendre_01(rule.order)
        elif rule.order == 1:
            x, w = np.array([0.5]), np.array([1.0])
        else:
            x = np.linspace(0.0, 1.0, rule.order)
            w = np.full(rule.order, 1.0 / (rule.order - 1))
            w[0] = w[-1] = 0.5 / (rule.order - 1)
        xs.append(a + (b - a) * x)
        ws.append((b - a) * w)
    return np.concatenate(xs), np.concatenate(ws)


def _tensor_chunks(x: np.ndarray, w: np.ndarray, dim: int) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Tensor grid ``x^dim`` with product weights, yielded in bounded chunks."""
    K = len(x)
    if dim == 0:
        yield np.zeros((1, 0)), np.ones(1)
        return
    rest = dim
    while rest > 1 and K**rest > _CHUNK:
        rest -= 1
    lead = dim - rest
    idx = np.indices((K,) * rest).reshape(rest, -1).T
    rest_pts = x[idx]
    rest_w = np.prod(w[idx], axis=1)
    for head in itertools.product(range(K), repeat=lead):
        head = list(head)
        prefix = np.broadcast_to(x[head], (len(rest_pts), lead))
        yield np.hstack([prefix, rest_pts]), rest_w * np.prod(w[head])


def _duffy(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map the unit cube onto ``0 <= t_1 <= ... <= t_d <= 1``; returns points and Jacobian."""
    d = u.shape[1]
    t = np.empty_like(u)
    acc = np.ones(len(u))
    for k in range(d - 1, -1, -1):
        acc = acc * u[:, k]
        t[:, k] = acc
    jac = np.ones(len(u))
    for k in range(1, d):
        jac = jac * u[:, k] ** k
    return t, jac


Integrand = Callable[[np.ndarray], np.ndarray]


def integrate_cube(
    func: Integrand,
    dim: int,
    rule: QuadratureRule,
    *,
    diagonal_kink: bool = False,
    breakpoints=None,
    max_evals: int = DEFAULT_MAX_EVALS,
) -> float:
    """Integrate ``func`` over ``[0, 1]^dim``.

    ``func`` receives an ``(N, dim)`` array of points and returns ``N`` values.
    With ``diagonal_kink`` and a Gauss-Legendre rule the cube is split into its
    ordering simplices (see module docstring).
    """
    if dim == 0:
        return float(np.asarray(func(np.zeros((1, 0))))[0])
    x, w = nodes_1d(rule, breakpoints)
    split = diagonal_kink and rule.kind == "gauss_legendre" and dim > 1
    perms = list(itertools.permutations(range(dim))) if split else [None]
    cost = len(x) ** dim * len(perms)
    if cost > max_evals:
        raise GuardError(
            f"quadrature needs {cost:.3g} evaluations in dimension {dim} (limit {max_evals:.3g}); "
            "lower the order or raise the limit"
        )
    total = 0.0
    for pts, wts in _tensor_chunks(x, w, dim):
        if not split:
            total += float(np.dot(wts, func(pts)))
            continue
        t, jac = _duffy(pts)
        wj = wts * jac
        for p in perms:
            total += float(np.dot(wj, func(t[:, p])))
    return total


def integrate_simplex(func: Integrand, dim: int, rule: QuadratureRule) -> float:
    """Integrate ``func`` over the time-ordered simplex ``0 <= s_1 <= ... <= s_dim <= 1``."""
    if dim == 0:
        return float(np.asarray(func(np.zeros((1, 0))))[0])
    x, w = nodes_1d(rule)
    total = 0.0
    for pts, wts in _tensor_chunks(x, w, dim):
        t, jac = _duffy(pts)
        total += float(np.dot(wts * jac, func(t)))
    return total


def edge_product(g: Multigraph, kernel: CovarianceKernel) -> Integrand:
    """Integrand ``prod f(s_a, s_b)`` over every edge occurrence of ``g``."""
    edges = g.edges()

    def func(s: np.ndarray) -> np.ndarray:
        out = np.ones(len(s))
        for a, b, h in edges:
            v = kernel(s[:, a], s[:, b])
            out *= v if h == 1 else v**h
        return out

    return func


def _integrate_connected(c: Multigraph, kernel: CovarianceKernel, rule: QuadratureRule, dim_cap: int) -> float:
    if c.n == 1 and not c.edges():
        return 1.0
    if c.n > dim_cap:
        raise GuardError(f"component has {c.n} vertices, above the dimension cap {dim_cap}")
    return integrate_cube(
        edge_product(c, kernel),
        c.n,
        rule,
        diagonal_kink=kernel.diagonal_kink,
        breakpoints=kernel.breakpoints,
    )


def integrate_component(
    c: Multigraph, kernel: CovarianceKernel, rule: QuadratureRule, dim_cap: int = DEFAULT_DIM_CAP
) -> float:
    """Integral over ``[0,1]^l`` of the edge product of a connected multigraph.

    A degree-0 singleton integrates to exactly 1.
    """
    if c.n > 1 and not c.is_connected():
        raise ValidationError("integrate_component expects a connected multigraph")
    return _integrate_connected(c, kernel, rule, dim_cap)


@dataclass(frozen=True)
class QuadValue:
    value: float
    error: float


class ComponentIntegrals:
    """Memo table of component integrals keyed by isomorphism class.

    Each entry also carries the two-resolution error estimate
    ``|I(rule) - I(rule.coarse())|``.
    """

    def __init__(self, kernel: CovarianceKernel, rule: QuadratureRule, dim_cap: int = DEFAULT_DIM_CAP):
        self.kernel = kernel
        self.rule = rule
        self.dim_cap = dim_cap
        self._table: dict[bytes, QuadValue] = {}

    def __len__(self):
        return len(self._table)

    def items(self):
        return self._table.items()

    def by_key(self, key: bytes) -> QuadValue:
        hit = self._table.get(key)
        if hit is None:
            c = graph_from_key(key)
            fine = _integrate_connected(c, self.kernel, self.rule, self.dim_cap)
            if c.n == 1 and not c.edges():
                err = 0.0
            else:
                err = abs(fine - _integrate_connected(c, self.kernel, self.rule.coarse(), self.dim_cap))
            hit = self._table.setdefault(key, QuadValue(fine, err))
        return hit

    def __call__(self, c: Multigraph) -> QuadValue:
        return self.by_key(canonical_key(c))


def integrate_graph(
    g: Multigraph,
    kernel: CovarianceKernel,
    rule: QuadratureRule,
    memo: ComponentIntegrals | None = None,
) -> float:
    """Product over connected components of their integrals (Fubini factorization)."""
    if memo is None:
        return math.prod(
            _integrate_connected(comp.graph, kernel, rule, DEFAULT_DIM_CAP) for comp in components(g)
        )
    return math.prod(memo(comp.graph).value for comp in components(g))
