"""Undirected simple graphs with O(1) edge membership and O(degree) neighbor scans."""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = ["UndirectedGraph", "NodeAttributes", "random_graph"]


class UndirectedGraph:
    """Mutable simple graph on nodes ``0..n-1``.

    Edges are unordered pairs without self-loops. The adjacency is a list of
    neighbor sets, which gives constant-time membership tests, degree reads
    and edge toggles, plus linear-time neighbor iteration. The edge count is
    maintained incrementally so long toggle sequences stay cheap.
    """

    __slots__ = ("n", "_adj", "_edge_count")

    def __init__(self, n: int):
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError(f"node count must be a positive integer, got {n!r}")
        self.n = int(n)
        self._adj: list[set[int]] = [set() for _ in range(self.n)]
        self._edge_count = 0

    # -- construction ------------------------------------------------------

    @classmethod
    def from_edge_list(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "UndirectedGraph":
        """Build a graph from 0-based integer pairs.

        Self-loops, duplicate edges (after canonicalizing to i < j) and
        out-of-range endpoints each raise a ValueError naming the offender.
        """
        g = cls(n)
        for i, j in pairs:
            g.add_edge(i, j)
        return g

    def to_edge_list(self) -> list[tuple[int, int]]:
        """Canonical edge list: pairs with i < j, sorted ascending."""
        return sorted(self.edges())

    def copy(self) -> "UndirectedGraph":
        g = UndirectedGraph.__new__(UndirectedGraph)
        g.n = self.n
        g._adj = [set(s) for s in self._adj]
        g._edge_count = self._edge_count
        return g

    # -- queries -----------------------------------------------------------

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @property
    def dyad_count(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def density(self) -> float:
        m = self.dyad_count
        return self._edge_count / m if m else 0.0

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def degrees(self) -> list[int]:
        return [len(s) for s in self._adj]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._adj[i]

    def neighbors(self, i: int) -> set[int]:
        """Live neighbor set of node i; callers must not mutate it."""
        return self._adj[i]

    def edges(self) -> Iterator[tuple[int, int]]:
        for i, adj in enumerate(self._adj):
            for j in adj:
                if j > i:
                    yield (i, j)

    def shared_partners(self, i: int, j: int) -> int:
        """Number of common neighbors of i and j (never counts i or j)."""
        if i == j:
            raise ValueError(f"shared_partners needs two distinct nodes, got {i} twice")
        return len(self._adj[i] & self._adj[j])

    def adjacency_matrix(self, dtype=np.float64) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        for i, j in self.edges():
            a[i, j] = 1
            a[j, i] = 1
        return a

    # -- mutation ----------------------------------------------------------

    def _check_pair(self, i: int, j: int) -> None:
        if i == j:
            raise ValueError(f"self-loop rejected: node {i} paired with itself")
        if not (0 <= i < self.n) or not (0 <= j < self.n):
            raise ValueError(f"node index out of range for n={self.n}: ({i}, {j})")

    def add_edge(self, i: int, j: int) -> None:
        self._check_pair(i, j)
        if j in self._adj[i]:
            a, b = (i, j) if i < j else (j, i)
            raise ValueError(f"duplicate edge rejected: ({a}, {b})")
        self._adj[i].add(j)
        self._adj[j].add(i)
        self._edge_count += 1

    def toggle(self, i: int, j: int) -> bool:
        """Flip the edge state of dyad (i, j); returns True if the edge is now present."""
        self._check_pair(i, j)
        adj_i = self._adj[i]
        if j in adj_i:
            adj_i.discard(j)
            self._adj[j].discard(i)
            self._edge_count -= 1
            return False
        adj_i.add(j)
        self._adj[j].add(i)
        self._edge_count += 1
        return True

    # -- dunder ------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UndirectedGraph):
            return NotImplemented
        return self.n == other.n and self._adj == other._adj

    def __repr__(self) -> str:
        return f"UndirectedGraph(n={self.n}, edges={self._edge_count})"


def random_graph(n: int, p: float, seed=None) -> UndirectedGraph:
    """Bernoulli graph: each of the C(n, 2) dyads present independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    g = UndirectedGraph(n)
    if n < 2 or p == 0.0:
        return g
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(iu.shape[0]) < p
    for i, j in zip(iu[mask].tolist(), ju[mask].tolist()):
        g.add_edge(i, j)
    return g


class NodeAttributes:
    """Named per-node attribute columns, each with exactly one value per node.

    Columns are numpy arrays: float64 when every value is numeric, otherwise
    strings (categorical). ``values_list`` returns a cached plain-Python list
    for hot loops.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"node count must be >= 1, got {n}")
        self.n = int(n)
        self._cols: dict[str, np.ndarray] = {}
        self._lists: dict[str, list] = {}

    def add(self, name: str, values: Sequence) -> "NodeAttributes":
        if len(values) != self.n:
            raise ValueError(
                f"attribute {name!r} has {len(values)} values for {self.n} nodes"
            )
        arr = np.asarray(values)
        if arr.dtype.kind in "iufb":
            arr = arr.astype(np.float64)
        else:
            arr = arr.astype(str)
        self._cols[name] = arr
        self._lists[name] = arr.tolist()
        return self

    @property
    def names(self) -> list[str]:
        return list(self._cols)

    def __contains__(self, name: str) -> bool:
        return name in self._cols

    def __getitem__(self, name: str) -> np.ndarray:
        from .errors import MissingAttribute

        if name not in self._cols:
            raise MissingAttribute(
                f"node attribute {name!r} not found (have: {sorted(self._cols)})"
            )
        return self._cols[name]

    def values_list(self, name: str) -> list:
        self[name]
        return self._lists[name]

    def numeric(self, name: str) -> np.ndarray:
        from .errors import InputError

        col = self[name]
        if col.dtype.kind != "f":
            raise InputError(f"attribute {name!r} is categorical; a numeric column is required")
        return col

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NodeAttributes):
            return NotImplemented
        return self.n == other.n and self.names == other.names and all(
            np.array_equal(self._cols[k], other._cols[k]) for k in self._cols
        )

    def __repr__(self) -> str:
        return f"NodeAttributes(n={self.n}, names={self.names})"
