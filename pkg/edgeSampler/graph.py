from __future__ import annotations

import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Iterator, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import scipy.sparse as sp

if TYPE_CHECKING:
    from numpy.random import SeedSequence

LOG = logging.getLogger(__name__)

Edge = Tuple[int, int]

# raw words are 64-bit; randbelow rejects the top partial block so draws stay exactly uniform
_WORD_RANGE = 1 << 64
_WORD_BUFFER = 4096


class VertexError(ValueError):
    """A query named a vertex outside [0, n), or a pair query named the same vertex twice."""


class GraphTooLargeError(ValueError):
    """An operation with a hard size limit was asked for a larger graph."""


class GraphFormatError(ValueError):
    def __init__(self, message: str, lineno: Optional[int] = None) -> None:
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


class Graph:
    """
    Immutable simple undirected graph on vertices 0..n-1.

    Neighbor lists are kept in order of first appearance in the edge sequence the graph was
    built from; that order is what ``neighbor_query(v, i)`` answers and never changes.
    """

    __slots__ = ("_n", "_edges", "_adj", "_nbrsets")

    def __init__(self, n: int, edges: Iterable[Edge], linenos: Optional[Sequence[int]] = None) -> None:
        # linenos maps each edge to its source line for error messages
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        edge_list = [(int(u), int(v)) for u, v in edges]
        self._n = n
        self._edges, self._adj, self._nbrsets = _assemble(n, edge_list, linenos)

    @classmethod
    def from_networkx(cls, g: "nx.Graph[int]") -> Graph:
        """Build from a networkx graph whose nodes are 0..n-1; edge order follows ``g.edges()``."""
        n = g.number_of_nodes()
        if set(g.nodes) != set(range(n)):
            raise ValueError("networkx graph nodes must be exactly 0..n-1")
        return cls(n, ((int(u), int(v)) for u, v in g.edges()))

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def average_degree(self) -> float:
        return 2.0 * self.m / self._n if self._n else 0.0

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._nbrsets[u]

    def edges(self) -> tuple[Edge, ...]:
        """Unordered edges in construction order."""
        return self._edges

    def ordered_edges(self) -> Iterator[Edge]:
        for u, nbrs in enumerate(self._adj):
            for w in nbrs:
                yield (u, w)

    def to_networkx(self) -> "nx.Graph[int]":
        g: "nx.Graph[int]" = nx.Graph()
        g.add_nodes_from(range(self._n))
        g.add_edges_from(self._edges)
        return g

    def to_csr(self) -> sp.csr_array:
        """Symmetric 0/1 adjacency matrix."""
        if not self._edges:
            return sp.csr_array((self._n, self._n), dtype=np.float64)
        arr = np.asarray(self._edges, dtype=np.int64)
        rows = np.concatenate([arr[:, 0], arr[:, 1]])
        cols = np.concatenate([arr[:, 1], arr[:, 0]])
        data = np.ones(rows.shape[0], dtype=np.float64)
        return sp.csr_array((data, (rows, cols)), shape=(self._n, self._n))

    def relabeled(self, seed: int | None = None) -> tuple[Graph, list[int]]:
        """
        Isomorphic copy under a random vertex labeling and random neighbor orders.

        Returns the new graph and ``perm`` with ``perm[old] == new``.
        """
        rng = np.random.default_rng(seed)
        perm = [int(x) for x in rng.permutation(self._n)]
        order = rng.permutation(len(self._edges))
        flips = rng.integers(0, 2, size=len(self._edges))
        out: list[Edge] = []
        for idx, flip in zip(order.tolist(), flips.tolist()):
            u, v = self._edges[idx]
            out.append((perm[v], perm[u]) if flip else (perm[u], perm[v]))
        return Graph(self._n, out), perm

    def to_edge_list_text(self, header: bool = True) -> str:
        lines = [f"n={self._n}"] if header else []
        lines.extend(f"{u} {v}" for u, v in self._edges)
        return "\n".join(lines) + "\n"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self._n, self._adj))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m})"


def _assemble(
    n: int, edges: list[Edge], linenos: Optional[Sequence[int]]
) -> tuple[tuple[Edge, ...], tuple[tuple[int, ...], ...], tuple[frozenset[int], ...]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    seen: set[tuple[int, int]] = set()
    for idx, (u, v) in enumerate(edges):
        where = linenos[idx] if linenos is not None else None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"edge ({u}, {v}) outside vertex range [0, {n})", where)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", where)
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise GraphFormatError(f"duplicate edge {{{u}, {v}}}", where)
        seen.add(key)
        adj[u].append(v)
        adj[v].append(u)
    return tuple(edges), tuple(tuple(a) for a in adj), tuple(frozenset(a) for a in adj)


def load_graph(text: str, n: Optional[int] = None) -> Graph:
    """
    Parse the edge-list format: one ``u v`` pair per line, ``#`` comments, optional ``n=<int>``
    header declaring isolated vertices. ``n`` overrides both the header and the inferred count.
    """
    header_n: Optional[int] = None
    pairs: list[Edge] = []
    linenos: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("n="):
            if header_n is not None or pairs:
                raise GraphFormatError("vertex count header must precede all edges and appear once", lineno)
            try:
                header_n = int(line[2:])
            except ValueError:
                raise GraphFormatError(f"malformed header {line!r}", lineno) from None
            if header_n < 0:
                raise GraphFormatError("vertex count must be non-negative", lineno)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer vertex id in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"negative vertex id in {line!r}", lineno)
        pairs.append((u, v))
        linenos.append(lineno)

    inferred = 1 + max((max(u, v) for u, v in pairs), default=-1)
    declared = n if n is not None else header_n
    if declared is None:
        declared = inferred
    elif declared < inferred:
        raise GraphFormatError(f"declared n={declared} but edges reference vertex {inferred - 1}")
    g = Graph(declared, pairs, linenos)
    LOG.debug("loaded graph n=%d m=%d", g.n, g.m)
    return g


def read_graph(path: str | Path, n: Optional[int] = None) -> Graph:
    return load_graph(Path(path).read_text(encoding="utf-8"), n=n)


def write_graph(graph: Graph, path: str | Path) -> None:
    Path(path).write_text(graph.to_edge_list_text(), encoding="utf-8")


@dataclass(frozen=True)
class QueryCounts:
    degree: int = 0
    neighbor: int = 0
    pair: int = 0
    uniform: int = 0

    @property
    def total(self) -> int:
        return self.degree + self.neighbor + self.pair + self.uniform

    def __add__(self, other: QueryCounts) -> QueryCounts:
        return QueryCounts(
            self.degree + other.degree,
            self.neighbor + other.neighbor,
            self.pair + other.pair,
            self.uniform + other.uniform,
        )

    def __sub__(self, other: QueryCounts) -> QueryCounts:
        return QueryCounts(
            self.degree - other.degree,
            self.neighbor - other.neighbor,
            self.pair - other.pair,
            self.uniform - other.uniform,
        )

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)} | {"total": self.total}


class OracleSession:
    """
    Query-counted access to a Graph: degree, neighbor and pair queries plus uniform vertex draws.

    The session also owns the random stream the sampling procedures use for their own coins
    (``randbelow``); those draws are not oracle queries and are not counted. Identical seeds and
    identical call sequences give identical answers.
    """

    def __init__(
        self,
        graph: Graph,
        seed: int | SeedSequence | None = None,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self.graph = graph
        self.logger = logger or LOG
        self._bitgen = np.random.default_rng(seed).bit_generator
        self._words: list[int] = []
        self._pos = 0
        self._degree = 0
        self._neighbor = 0
        self._pair = 0
        self._uniform = 0

    @property
    def counts(self) -> QueryCounts:
        return QueryCounts(self._degree, self._neighbor, self._pair, self._uniform)

    def _check(self, v: int) -> None:
        if not 0 <= v < self.graph.n:
            raise VertexError(f"vertex {v} outside [0, {self.graph.n})")

    def degree_query(self, v: int) -> int:
        self._check(v)
        self._degree += 1
        return self.graph.degree(v)

    def neighbor_query(self, v: int, i: int) -> Optional[int]:
        """The i-th (1-based) neighbor of v, or None when i > d(v)."""
        self._check(v)
        if i < 1:
            raise ValueError(f"neighbor index is 1-based, got {i}")
        self._neighbor += 1
        nbrs = self.graph.neighbors(v)
        return nbrs[i - 1] if i <= len(nbrs) else None

    def pair_query(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        if u == v:
            raise VertexError(f"pair query needs distinct vertices, got {u} twice")
        self._pair += 1
        return self.graph.has_edge(u, v)

    def uniform_vertex(self) -> int:
        if self.graph.n < 1:
            raise ValueError("cannot draw a vertex from an empty graph")
        self._uniform += 1
        return self.randbelow(self.graph.n)

    def randbelow(self, k: int) -> int:
        """Exactly uniform integer in [0, k)."""
        if k < 1:
            raise ValueError(f"randbelow needs k >= 1, got {k}")
        limit = _WORD_RANGE - _WORD_RANGE % k
        while True:
            if self._pos >= len(self._words):
                # one raw call per buffer; scalar draws from numpy are slow
                self._words = self._bitgen.random_raw(_WORD_BUFFER).tolist()
                self._pos = 0
            word = self._words[self._pos]
            self._pos += 1
            if word < limit:
                return word % k
