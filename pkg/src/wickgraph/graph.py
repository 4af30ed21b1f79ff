"""Labeled multigraphs with loops on a fixed vertex set.

A multigraph on vertices ``0..n-1`` is stored as its upper-triangular
adjacency matrix: ``upper[i][j]`` (``i < j``) is the number of edges between
``i`` and ``j``, ``upper[i][i]`` the number of loops at ``i``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import GuardError, ValidationError

CANONICAL_MAX_VERTICES = 8


@dataclass(frozen=True)
class Multigraph:
    n: int
    upper: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0 or len(self.upper) != self.n or any(len(r) != self.n for r in self.upper):
            raise ValidationError(f"adjacency must be {self.n}x{self.n}")
        for i, row in enumerate(self.upper):
            for j, h in enumerate(row):
                if h < 0:
                    raise ValidationError("edge multiplicities must be non-negative")
                if j < i and h != 0:
                    raise ValidationError("adjacency must be upper triangular")

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[int]]) -> "Multigraph":
        return cls(len(matrix), tuple(tuple(int(h) for h in row) for row in matrix))

    @classmethod
    def zero(cls, n: int) -> "Multigraph":
        return cls(n, tuple((0,) * n for _ in range(n)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Multigraph":
        """Build from an edge list; ``(i, i)`` is a loop, repeats add up."""
        adj = [[0] * n for _ in range(n)]
        for a, b in edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValidationError(f"edge ({a}, {b}) out of range for n={n}")
            i, j = min(a, b), max(a, b)
            adj[i][j] += 1
        return cls.from_matrix(adj)

    def multiplicity(self, a: int, b: int) -> int:
        i, j = min(a, b), max(a, b)
        return self.upper[i][j]

    def degree(self, j: int) -> int:
        if not 0 <= j < self.n:
            raise ValidationError(f"vertex {j} out of range for n={self.n}")
        return (
            2 * self.upper[j][j]
            + sum(self.upper[i][j] for i in range(j))
            + sum(self.upper[j][k] for k in range(j + 1, self.n))
        )

    def degrees(self) -> tuple[int, ...]:
        return tuple(self.degree(j) for j in range(self.n))

    def edge_count(self) -> int:
        """Total edge multiplicity, loops included."""
        return sum(map(sum, self.upper))

    def edges(self) -> list[tuple[int, int, int]]:
        """``(i, j, multiplicity)`` for every nonzero entry, ``i <= j``."""
        return [
            (i, j, h)
            for i, row in enumerate(self.upper)
            for j, h in enumerate(row)
            if h
        ]

    def __add__(self, other: "Multigraph") -> "Multigraph":
        if not isinstance(other, Multigraph):
            return NotImplemented
        if other.n != self.n:
            raise ValidationError(f"cannot add graphs on {self.n} and {other.n} vertices")
        return Multigraph(
            self.n,
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.upper, other.upper)),
        )

    def permuted(self, perm: Sequence[int]) -> "Multigraph":
        """Relabel vertex ``v`` as ``perm[v]``."""
        return Multigraph.from_edges(
            self.n,
            [(perm[i], perm[j]) for i, j, h in self.edges() for _ in range(h)],
        )

    def induced(self, vertices: Sequence[int]) -> "Multigraph":
        """Sub-multigraph on ``vertices``, relabeled ``0..len-1`` in the given order."""
        return Multigraph.from_matrix(
            [
                [self.multiplicity(a, b) if q >= p else 0 for q, b in enumerate(vertices)]
                for p, a in enumerate(vertices)
            ]
        )

    def is_connected(self) -> bool:
        return len(components(self)) <= 1

    def to_json(self) -> dict:
        return {"n": self.n, "upper": [list(r) for r in self.upper]}

    @classmethod
    def from_json(cls, data: dict) -> "Multigraph":
        try:
            g = cls.from_matrix(data["upper"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad graph JSON: {exc!r}") from exc
        if g.n != data.get("n", g.n):
            raise ValidationError("graph JSON: n does not match matrix size")
        return g

    def to_text(self) -> str:
        """Compact 1-based edge list, e.g. ``"1-2:2, 3-3:1"``; empty graph gives ``""``."""
        return ", ".join(f"{i + 1}-{j + 1}:{h}" for i, j, h in self.edges())

    @classmethod
    def from_text(cls, n: int, text: str) -> "Multigraph":
        adj = [[0] * n for _ in range(n)]
        for item in filter(None, (s.strip() for s in text.split(","))):
            m = re.fullmatch(r"(\d+)-(\d+):(\d+)", item)
            if not m:
                raise ValidationError(f"bad edge token {item!r}")
            a, b, h = (int(g) for g in m.groups())
            if not (1 <= a <= n and 1 <= b <= n):
                raise ValidationError(f"edge {item!r} out of range for n={n}")
            adj[min(a, b) - 1][max(a, b) - 1] += h
        return cls.from_matrix(adj)

    def __str__(self) -> str:
        return f"Multigraph(n={self.n}; {self.to_text() or 'no edges'})"


def degree(g: Multigraph, j: int) -> int:
    return g.degree(j)


def graph_sum(*graphs: Multigraph) -> Multigraph:
    if not graphs:
        raise ValidationError("graph_sum needs at least one graph")
    total = graphs[0]
    for g in graphs[1:]:
        total = total + g
    return total


class _DisjointSet:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller label wins so block representatives are stable
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass(frozen=True)
class Component:
    vertices: tuple[int, ...]
    graph: Multigraph


def components(g: Multigraph) -> list[Component]:
    """Connected components, ordered by smallest vertex.

    Isolated vertices (degree 0) come out as singleton components with no edges.
    """
    ds = _DisjointSet(g.n)
    for i, j, _ in g.edges():
        ds.union(i, j)
    blocks: dict[int, list[int]] = {}
    for v in range(g.n):
        blocks.setdefault(ds.find(v), []).append(v)
    return [Component(tuple(vs), g.induced(vs)) for vs in sorted(blocks.values())]


def enumerate_graphs(n: int, degrees: Sequence[int]) -> list[Multigraph]:
    """Every multigraph on ``n`` labeled vertices with the given degree vector.

    Entries of the upper-triangular matrix are filled row by row, each value
    tried in increasing order, so the output is sorted lexicographically by
    the row-major flattening. The last entry of every row is forced by the
    remaining degree of that row's vertex.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    if len(degrees) != n:
        raise ValidationError(f"degree spec has length {len(degrees)}, expected {n}")
    if any(d < 0 for d in degrees):
        raise ValidationError("degrees must be non-negative")
    return [Multigraph.from_matrix(m) for m in _enumerate_cached(tuple(int(d) for d in degrees))]


@lru_cache(maxsize=4096)
def _enumerate_cached(degrees: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], ...], ...]:
    n = len(degrees)
    if sum(degrees) % 2:
        return ()
    rem = list(degrees)
    adj = [[0] * n for _ in range(n)]
    positions = [(i, j) for i in range(n) for j in range(i, n)]
    out: list[tuple[tuple[int, ...], ...]] = []

    def place(p: int) -> None:
        if p == len(positions):
            out.append(tuple(tuple(r) for r in adj))
            return
        i, j = positions[p]
        if j == n - 1:
            # last entry of row i: whatever degree is left must go here
            if i == j:
                if rem[i] % 2:
                    return
                values = [rem[i] // 2]
            else:
                if rem[i] > rem[j]:
                    return
                values = [rem[i]]
        elif i == j:
            values = range(rem[i] // 2 + 1)
        else:
            values = range(min(rem[i], rem[j]) + 1)
        for h in values:
            cost_i = 2 * h if i == j else h
            rem[i] -= cost_i
            if i != j:
                rem[j] -= h
            adj[i][j] = h
            place(p + 1)
            adj[i][j] = 0
            rem[i] += cost_i
            if i != j:
                rem[j] += h

    place(0)
    return tuple(out)


def canonical_key(g: Multigraph) -> bytes:
    """Lexicographically smallest serialized upper matrix over all relabelings.

    Two graphs get equal keys iff they are isomorphic as multigraphs with loops.
    Brute force over ``n!`` permutations, so capped at 8 vertices.
    """
    if g.n > CANONICAL_MAX_VERTICES:
        raise GuardError(f"canonical_key supports at most {CANONICAL_MAX_VERTICES} vertices, got {g.n}")
    return _canonical_cached(g)


@lru_cache(maxsize=65536)
def _canonical_cached(g: Multigraph) -> bytes:
    n = g.n
    full = [[g.multiplicity(a, b) for b in range(n)] for a in range(n)]
    best = None
    for order in itertools.permutations(range(n)):
        # order[p] is the old vertex placed at new position p
        flat = tuple(full[order[p]][order[q]] for p in range(n) for q in range(p, n))
        if best is None or flat < best:
            best = flat
    assert best is not None or n == 0
    body = ",".join(map(str, best or ()))
    return f"{n}:{body}".encode()


def graph_from_key(key: bytes | str) -> Multigraph:
    """Inverse of :func:`canonical_key`: the canonical representative."""
    if isinstance(key, bytes):
        key = key.decode()
    head, _, body = key.partition(":")
    n = int(head)
    flat = [int(v) for v in body.split(",")] if body else []
    if len(flat) != n * (n + 1) // 2:
        raise ValidationError(f"malformed canonical key {key!r}")
    adj = [[0] * n for _ in range(n)]
    it = iter(flat)
    for p in range(n):
        for q in range(p, n):
            adj[p][q] = next(it)
    return Multigraph.from_matrix(adj)


def key_label(key: bytes | str) -> str:
    """Human-readable label for a canonical key, e.g. ``"v3[1-2:1, 1-3:1, 2-3:1]"``."""
    g = graph_from_key(key)
    return f"v{g.n}[{g.to_text()}]"
