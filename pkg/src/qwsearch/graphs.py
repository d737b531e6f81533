"""Random-graph ensembles: Erdos-Renyi G(n, p), random d-regular graphs and
the complete graph.

All randomness comes from ``numpy.random.default_rng(seed)``, i.e. the PCG64
bit generator seeded through ``SeedSequence``. Seed semantics:

* ``erdos_renyi``: one ``rng.random((n, n))`` draw; edge ``(i, j)`` with
  ``i < j`` is present iff ``U[i, j] < p``.
* ``random_regular``: each attempt draws ``rng.permutation`` of the ``n*d``
  stubs ``[0]*d + [1]*d + ...``; consecutive stubs are paired.

Vertices are 0-indexed.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MODELS = ("erdos_renyi", "random_regular", "complete", "custom")

REGULAR_MAX_ATTEMPTS = 1000


class GraphGenerationError(RuntimeError):
    """Raised when rejection sampling exhausts its retry budget."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph stored as a dense 0/1 adjacency matrix.

    ``param`` is the edge probability for ``erdos_renyi`` and the degree for
    ``random_regular``; ``None`` otherwise.
    """

    adjacency: np.ndarray
    model: str = "custom"
    seed: int | None = None
    param: float | int | None = None
    n: int = field(init=False)

    def __post_init__(self):
        A = np.array(self.adjacency, dtype=np.int8)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise ValueError(f"adjacency must be a non-empty square matrix, got shape {A.shape}")
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if not np.isin(A, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        if not np.array_equal(A, A.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(A)):
            raise ValueError("adjacency must have a zero diagonal (no self-loops)")
        A.setflags(write=False)
        object.__setattr__(self, "adjacency", A)
        object.__setattr__(self, "n", A.shape[0])

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1, dtype=np.int64)

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.sum(dtype=np.int64) // 2)

    def edges(self) -> np.ndarray:
        """Edge list as an ``(m, 2)`` int array with ``i < j``, sorted."""
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return np.column_stack([i, j]).astype(np.int64)

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[v])

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adjacency[i, j])

    def as_float(self) -> np.ndarray:
        return self.adjacency.astype(float)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.model == other.model
            and self.seed == other.seed
            and self.param == other.param
            and np.array_equal(self.adjacency, other.adjacency)
        )

    __hash__ = None

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "model": self.model,
            "seed": self.seed,
            "param": self.param,
            "edges": self.edges().tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Graph":
        return from_edges(
            data["n"], data["edges"], model=data.get("model", "custom"),
            seed=data.get("seed"), param=data.get("param"),
        )

    def to_json(self, path: str | Path | None = None) -> str:
        text = json.dumps(self.to_dict())
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    @classmethod
    def from_json(cls, source: str | Path) -> "Graph":
        """Load from a JSON string or from a path to a JSON file."""
        if isinstance(source, Path) or not str(source).lstrip().startswith("{"):
            source = Path(source).read_text()
        return cls.from_dict(json.loads(source))

    def to_edgelist(self, path: str | Path | None = None) -> str:
        text = "".join(f"{i} {j}\n" for i, j in self.edges())
        if path is not None:
            Path(path).write_text(text)
        return text


def from_edges(n: int, edges, model: str = "custom", seed=None, param=None) -> Graph:
    """Build a graph from 0-indexed ``(i, j)`` pairs."""
    A = np.zeros((n, n), dtype=np.int8)
    for i, j in edges:
        i, j = int(i), int(j)
        if i == j:
            raise ValueError(f"self-loop at vertex {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
        A[i, j] = A[j, i] = 1
    return Graph(A, model=model, seed=seed, param=param)


def read_edgelist(path: str | Path, n: int | None = None) -> Graph:
    """Read the ``i j`` per line format. ``n`` defaults to max index + 1."""
    pairs = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        i, j = line.split()[:2]
        pairs.append((int(i), int(j)))
    if n is None:
        n = 1 + max((max(p) for p in pairs), default=0)
    return from_edges(n, pairs)


def erdos_renyi(n: int, p: float, seed: int = 0) -> Graph:
    """Sample G(n, p): every one of the n(n-1)/2 pairs is an edge
    independently with probability p."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, k=1)
    A = (upper | upper.T).astype(np.int8)
    return Graph(A, model="erdos_renyi", seed=seed, param=float(p))


def random_regular(n: int, d: int, seed: int = 0, max_attempts: int = REGULAR_MAX_ATTEMPTS) -> Graph:
    """Sample a simple d-regular graph with the pairing model.

    The whole matching is redrawn whenever it contains a self-loop or a
    repeated pair.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= d < n:
        raise ValueError(f"degree d must satisfy 0 <= d < n, got d={d}, n={n}")
    if (n * d) % 2:
        raise ValueError(f"n*d must be even (handshake lemma), got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_attempts):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        lo = pairs.min(axis=1)
        hi = pairs.max(axis=1)
        if np.unique(lo * n + hi).size != lo.size:
            continue
        A = np.zeros((n, n), dtype=np.int8)
        A[lo, hi] = 1
        A[hi, lo] = 1
        return Graph(A, model="random_regular", seed=seed, param=int(d))
    raise GraphGenerationError(
        f"pairing model failed to produce a simple {d}-regular graph on {n} vertices "
        f"after {max_attempts} attempts"
    )


def complete(n: int) -> Graph:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    A = np.ones((n, n), dtype=np.int8) - np.eye(n, dtype=np.int8)
    return Graph(A, model="complete")


def is_connected(g: Graph) -> bool:
    """Breadth-first traversal from vertex 0."""
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        fresh = np.flatnonzero(g.adjacency[v] & ~seen)
        seen[fresh] = True
        queue.extend(fresh.tolist())
    return bool(seen.all())


def independent_vertices(g: Graph, k: int, first: int | None = None) -> tuple[int, ...]:
    """Lexicographically smallest k-tuple of pairwise non-adjacent vertices.

    ``first`` pins the first vertex. Raises ``ValueError`` if none exists.
    """
    A = g.adjacency

    def extend(chosen, start):
        if len(chosen) == k:
            return chosen
        for v in range(start, g.n):
            if v in chosen or any(A[v, u] for u in chosen):
                continue
            found = extend(chosen + (v,), v + 1)
            if found is not None:
                return found
        return None

    result = extend((first,), 0) if first is not None else extend((), 0)
    if result is None:
        raise ValueError(f"graph has no {k} pairwise non-adjacent vertices")
    return result
