from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Sequence

import networkx as nx
import numpy as np

from .graph import Edge, Graph, GraphTooLargeError, write_graph

LOG = logging.getLogger(__name__)

MAX_TREE_VERTICES = 10**7
REALIZE_RETRIES = 1000

FAMILIES = (
    "path",
    "star",
    "complete",
    "kary_tree",
    "alpha_forests",
    "alpha_regular",
    "matching_plus_clique",
    "matching_plus_regular",
    "disjointness_embedding",
)


@dataclass(frozen=True)
class GenSpec:
    """A named family plus its integer (or bit-vector) parameters and seed."""

    family: str
    params: Mapping[str, Any] = field(default_factory=lambda: {})
    seed: int = 0
    # arboricity bound handed to the sampler; None means the generator's declared bound
    alpha: Optional[int] = None

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> GenSpec:
        family = raw.get("family")
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
        params = raw.get("params", {})
        if not isinstance(params, Mapping):
            raise ValueError(f"params of {family} must be an object")
        alpha = raw.get("alpha")
        return cls(
            family=str(family),
            params=dict(params),
            seed=int(raw.get("seed", 0)),
            alpha=None if alpha is None else int(alpha),
        )

    def label(self) -> str:
        inner = ",".join(f"{k}={_param_text(v)}" for k, v in sorted(self.params.items()))
        return f"{self.family}({inner})"


def _param_text(v: Any) -> str:
    if isinstance(v, (list, tuple)):
        return "".join(str(int(b)) for b in v)
    return str(v)


@dataclass
class GeneratedGraph:
    """
    A graph with its arboricity certificate: ``declared_alpha`` is the construction bound and
    ``forests`` an explicit decomposition of E into at most that many forests.
    """

    graph: Graph
    family: str
    declared_alpha: int
    forests: list[list[Edge]]
    metadata: Dict[str, Any] = field(default_factory=lambda: {})

    def check_certificate(self) -> bool:
        """Forests partition E, each one is acyclic, and there are at most declared_alpha of them."""
        if len(self.forests) > self.declared_alpha:
            return False
        seen: set[tuple[int, int]] = set()
        for forest in self.forests:
            g: "nx.Graph[int]" = nx.Graph()
            g.add_edges_from(forest)
            if forest and (g.number_of_edges() != len(forest) or not nx.is_forest(g)):
                return False
            for u, v in forest:
                key = (min(u, v), max(u, v))
                if key in seen:
                    return False
                seen.add(key)
        return seen == {(min(u, v), max(u, v)) for u, v in self.graph.edges()}

    def sidecar(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "n": self.graph.n,
            "m": self.graph.m,
            "declared_alpha": self.declared_alpha,
            "forests": [[list(e) for e in forest] for forest in self.forests],
            "metadata": self.metadata,
        }


def write_generated(gen: GeneratedGraph, path: str | Path) -> Path:
    """Write the edge list to ``path`` and the certificate to ``<stem>.meta.json`` beside it."""
    out = Path(path)
    write_graph(gen.graph, out)
    meta = out.with_suffix(".meta.json")
    meta.write_text(json.dumps(gen.sidecar(), sort_keys=True) + "\n", encoding="utf-8")
    return meta


def _rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def _zigzag(start: int, q: int) -> list[int]:
    """start, start+1, start-1, start+2, start-2, ... mod q: a Hamiltonian path of K_q."""
    order = [start]
    step = 1
    while len(order) < q:
        order.append((start + step) % q)
        if len(order) < q:
            order.append((start - step) % q)
        step += 1
    return order


def _walecki_forests(n: int) -> list[list[Edge]]:
    """ceil(n/2) zigzag Hamiltonian paths of K_{2k} covering K_n; edges to the padding vertex dropped."""
    size = n + (n % 2)
    forests: list[list[Edge]] = []
    for i in range(size // 2):
        order = _zigzag(i, size)
        forests.append([(a, b) for a, b in zip(order, order[1:]) if a < n and b < n])
    return forests


def gen_basic(family: str, n: int) -> GeneratedGraph:
    """path(n), star(n) with center 0, or complete(n); neighbor order follows networkx edge order."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if family == "path":
        graph = Graph.from_networkx(nx.path_graph(n))
        return GeneratedGraph(graph, family, 1, [list(graph.edges())])
    if family == "star":
        graph = Graph.from_networkx(nx.star_graph(n - 1))
        return GeneratedGraph(graph, family, 1, [list(graph.edges())])
    if family == "complete":
        graph = Graph.from_networkx(nx.complete_graph(n))
        forests = _walecki_forests(n)
        return GeneratedGraph(graph, family, len(forests), forests)
    raise ValueError(f"gen_basic handles path, star and complete, not {family!r}")


def kary_tree_size(k: int, depth: int) -> int:
    """1 + sum over levels 1..depth of k (k-1)^(level-1)."""
    return 1 + sum(k * (k - 1) ** (level - 1) for level in range(1, depth + 1))


def gen_kary_tree(k: int, depth: int, critical_depth: int = 1) -> GeneratedGraph:
    """
    Complete tree where every internal vertex has degree k: the root has k children, every other
    internal vertex k-1. Vertices are numbered breadth first from the root 0.

    Metadata counts critical (depth <= L), shallow (depth <= 2L) and deep (depth > 2L) vertices.
    """
    if k < 2 or depth < 1:
        raise ValueError(f"need k >= 2 and depth >= 1, got k={k}, depth={depth}")
    n = kary_tree_size(k, depth)
    if n > MAX_TREE_VERTICES:
        raise GraphTooLargeError(f"tree would have {n} vertices (limit {MAX_TREE_VERTICES})")
    depths = [0]
    edges: list[Edge] = []
    frontier = [0]
    for level in range(1, depth + 1):
        nxt: list[int] = []
        for parent in frontier:
            for _ in range(k if parent == 0 else k - 1):
                child = len(depths)
                depths.append(level)
                edges.append((parent, child))
                nxt.append(child)
        frontier = nxt
    n_c = sum(1 for d in depths if d <= critical_depth)
    n_s = sum(1 for d in depths if d <= 2 * critical_depth)
    metadata = {
        "k": k,
        "depth": depth,
        "critical_depth": critical_depth,
        "n_c": n_c,
        "n_s": n_s,
        "n_d": n - n_s,
        "depths": depths,
    }
    return GeneratedGraph(Graph(n, edges), "kary_tree", 1, [edges], metadata)


def _random_tree(vertices: Sequence[int], rng: np.random.Generator) -> list[Edge]:
    """Random-attachment spanning tree: each vertex in a random order hooks onto an earlier one."""
    order = [int(v) for v in rng.permutation(np.asarray(vertices))]
    return [(order[int(rng.integers(0, i))], order[i]) for i in range(1, len(order))]


def gen_alpha_forests(n: int, alpha: int, seed: Optional[int] = 0, span: Optional[int] = None) -> GeneratedGraph:
    """
    Union of ``alpha`` random trees, each spanning ``span`` random vertices (default all n);
    an edge already taken by an earlier tree is dropped, so each tree leaves a forest behind.
    """
    if alpha < 1 or n < 2:
        raise ValueError(f"need alpha >= 1 and n >= 2, got alpha={alpha}, n={n}")
    span = n if span is None else span
    if not 2 <= span <= n:
        raise ValueError(f"span must lie in [2, {n}], got {span}")
    rng = _rng(seed)
    seen: set[tuple[int, int]] = set()
    edges: list[Edge] = []
    forests: list[list[Edge]] = []
    for _ in range(alpha):
        members = range(n) if span == n else [int(v) for v in rng.choice(n, size=span, replace=False)]
        forest: list[Edge] = []
        for u, v in _random_tree(list(members), rng):
            key = (min(u, v), max(u, v))
            if key not in seen:
                seen.add(key)
                forest.append((u, v))
        edges.extend(forest)
        forests.append(forest)
    metadata = {"alpha": alpha, "span": span, "seed": seed}
    return GeneratedGraph(Graph(n, edges), "alpha_forests", alpha, forests, metadata)


def _hub_cycles(size: int, count: int) -> tuple[list[list[int]], list[Edge]]:
    """
    ``count`` edge-disjoint Hamiltonian cycles of K_size, each given as a vertex order starting at
    the hub ``size - 1``, plus a perfect matching disjoint from all of them (empty for odd size).

    The other vertices form Z_q, q = size - 1. Cycle i runs hub, zigzag(i), hub and uses exactly the
    pairs with sum 2i or 2i + 1 mod q. For even size the pairs with sum -1 mod q, together with the
    hub and the one vertex (q - 1) / 2 it never meets, are left over as the matching.
    """
    q = size - 1
    hub = q
    if count > q // 2:
        raise ValueError(f"K_{size} has only {q // 2} edge-disjoint Hamiltonian cycles here, asked for {count}")
    orders = [[hub] + _zigzag(i, q) for i in range(count)]
    matching: list[Edge] = []
    if size % 2 == 0:
        fixed = (q - 1) // 2
        matching = [(x, (-1 - x) % q) for x in range(q) if x < (-1 - x) % q]
        matching.append((hub, fixed))
    return orders, matching


def _regular_block(
    vertices: Sequence[int], degree: int, rng: np.random.Generator
) -> tuple[list[Edge], list[list[Edge]]]:
    """
    ``degree``-regular graph on ``vertices`` under a random labeling: degree // 2 edge-disjoint
    Hamiltonian cycles through a common hub, plus a perfect matching when the degree is odd.

    Forests returned: each cycle without its first hub edge (a Hamiltonian path), then the removed
    hub edges (a star), then the matching.
    """
    size = len(vertices)
    cycles, odd = divmod(degree, 2)
    if degree < 1 or degree > size - 1:
        raise ValueError(f"no {degree}-regular graph on {size} vertices")
    if odd and size % 2:
        raise ValueError(f"odd degree {degree} needs an even vertex count, got {size}")
    orders, matching = _hub_cycles(size, cycles)
    paths = [list(zip(order[1:], order[2:] + order[:1])) for order in orders]
    star = [(order[0], order[1]) for order in orders]
    forests = paths + ([star] if star else []) + ([matching] if odd else [])
    label = [int(v) for v in rng.permutation(np.asarray(vertices))]
    forests = [[(label[u], label[v]) for u, v in forest] for forest in forests]
    return [e for forest in forests for e in forest], forests


def gen_alpha_regular(n: int, alpha: int, seed: Optional[int] = 0) -> GeneratedGraph:
    rng = _rng(seed)
    edges, forests = _regular_block(list(range(n)), alpha, rng)
    return GeneratedGraph(Graph(n, edges), "alpha_regular", alpha, forests, {"alpha": alpha, "seed": seed})


def gen_matching_plus_regular(n: int, alpha_tilde: int, seed: Optional[int] = 0) -> GeneratedGraph:
    """
    Perfect matching over n - n/alpha_tilde vertices and an alpha_tilde-regular graph over the
    other n/alpha_tilde, under a random vertex labeling.
    """
    if alpha_tilde < 1 or n < 2:
        raise ValueError(f"need alpha_tilde >= 1 and n >= 2, got {alpha_tilde}, {n}")
    if n % alpha_tilde:
        raise ValueError(f"alpha_tilde={alpha_tilde} must divide n={n}")
    block = n // alpha_tilde
    if (alpha_tilde * block) % 2 or (n - block) % 2:
        raise ValueError(f"n={n}, alpha_tilde={alpha_tilde}: matching and regular part cannot both be perfect")
    rng = _rng(seed)
    labels = [int(v) for v in rng.permutation(n)]
    regular_part, matched_part = labels[:block], labels[block:]
    edges, forests = _regular_block(regular_part, alpha_tilde, rng)
    matching = list(zip(matched_part[0::2], matched_part[1::2]))
    # matched vertices are disjoint from the regular block, so the matching joins its first forest
    forests[0] = forests[0] + matching
    metadata = {"alpha_tilde": alpha_tilde, "regular_vertices": sorted(regular_part), "seed": seed}
    return GeneratedGraph(Graph(n, edges + matching), "matching_plus_regular", alpha_tilde, forests, metadata)


def _sparse_forest_union(n: int, m: int, alpha: int, rng: np.random.Generator) -> list[list[Edge]]:
    """``alpha`` forests on 0..n-1 with exactly m distinct edges in total, cut from random spanning trees."""
    if m > alpha * (n - 1):
        raise ValueError(f"{m} edges do not fit in {alpha} forests on {n} vertices")
    for _ in range(REALIZE_RETRIES):
        seen: set[tuple[int, int]] = set()
        forests: list[list[Edge]] = []
        for _ in range(alpha):
            forest: list[Edge] = []
            for u, v in _random_tree(list(range(n)), rng):
                if len(seen) == m:
                    break
                key = (min(u, v), max(u, v))
                if key not in seen:
                    seen.add(key)
                    forest.append((u, v))
            forests.append(forest)
        if len(seen) == m:
            return forests
    raise ValueError(f"could not place {m} edges in {alpha} random forests on {n} vertices")


def gen_disjointness_embedding(
    nprime: int,
    mprime: int,
    alpha: int,
    x: Sequence[int],
    y: Sequence[int],
    seed: Optional[int] = 0,
) -> GeneratedGraph:
    """
    Set-disjointness instance: W_0 holds H (n' vertices, m' edges, at most alpha forests); block
    W_i, i >= 1, holds a copy of K (2m' edges on 2m'/alpha vertices) when x_i = y_i = 1 and is
    isolated otherwise. With N = n' alpha / 2m' blocks the instance has 2n' vertices.
    """
    if alpha < 1 or nprime < 2 or mprime < 1:
        raise ValueError(f"need alpha >= 1, n' >= 2, m' >= 1; got {alpha}, {nprime}, {mprime}")
    if (2 * mprime) % alpha:
        raise ValueError(f"alpha={alpha} must divide 2m'={2 * mprime}")
    block = 2 * mprime // alpha
    if (nprime * alpha) % (2 * mprime):
        raise ValueError(f"N = n' alpha / 2m' = {nprime * alpha}/{2 * mprime} is not an integer")
    blocks = nprime * alpha // (2 * mprime)
    if len(x) != blocks or len(y) != blocks:
        raise ValueError(f"x and y must have length N={blocks}, got {len(x)} and {len(y)}")
    if any(b not in (0, 1) for b in list(x) + list(y)):
        raise ValueError("x and y must be bit vectors")
    # only 2m'/alpha (the vertex count of K) gives n = 2n'; 2m' alpha / n' does not
    LOG.info("disjointness block size 2m'/alpha=%d (2m'alpha/n' would be %s)", block, 2 * mprime * alpha / nprime)
    rng = _rng(seed)
    forests = _sparse_forest_union(nprime, mprime, alpha, rng)
    # K = union of alpha Hamiltonian cycles: 2 alpha-regular, exactly 2m' edges
    k_edges, k_forests = _regular_block(list(range(block)), 2 * alpha, rng)
    forests += [[] for _ in range(len(k_forests) - len(forests))]
    edges = [e for forest in forests for e in forest]
    intersecting = [i for i in range(1, blocks + 1) if x[i - 1] and y[i - 1]]
    for i in intersecting:
        offset = nprime + (i - 1) * block
        for t, forest in enumerate(k_forests):
            shifted = [(u + offset, v + offset) for u, v in forest]
            forests[t] = forests[t] + shifted
            edges.extend(shifted)
    n = nprime + blocks * block
    metadata = {
        "nprime": nprime,
        "mprime": mprime,
        "alpha": alpha,
        "blocks": blocks,
        "block_size": block,
        "k_edges": len(k_edges),
        "intersecting": intersecting,
        "w0": [0, nprime],
        "edges_outside_w0": len(edges) - mprime,
        "seed": seed,
    }
    forests = [f for f in forests if f]
    # 2 alpha-regular blocks push the Nash-Williams bound to alpha + 1
    return GeneratedGraph(Graph(n, edges), "disjointness_embedding", alpha + 1, forests, metadata)


def _int(params: Mapping[str, Any], key: str, default: Optional[int] = None) -> int:
    if key not in params:
        if default is None:
            raise ValueError(f"missing parameter {key!r}")
        return default
    return int(params[key])


def _bits(params: Mapping[str, Any], key: str) -> list[int]:
    raw = params.get(key)
    if raw is None:
        raise ValueError(f"missing parameter {key!r}")
    if isinstance(raw, str):
        return [int(c) for c in raw]
    return [int(b) for b in raw]


_BUILDERS: Dict[str, Callable[[Mapping[str, Any], int], GeneratedGraph]] = {
    "path": lambda p, s: gen_basic("path", _int(p, "n")),
    "star": lambda p, s: gen_basic("star", _int(p, "n")),
    "complete": lambda p, s: gen_basic("complete", _int(p, "n")),
    "kary_tree": lambda p, s: gen_kary_tree(_int(p, "k"), _int(p, "depth"), _int(p, "critical_depth", 1)),
    "alpha_forests": lambda p, s: gen_alpha_forests(
        _int(p, "n"), _int(p, "alpha"), s, int(p["span"]) if "span" in p else None
    ),
    "alpha_regular": lambda p, s: gen_alpha_regular(_int(p, "n"), _int(p, "alpha"), s),
    "matching_plus_regular": lambda p, s: gen_matching_plus_regular(_int(p, "n"), _int(p, "alpha_tilde"), s),
    "matching_plus_clique": lambda p, s: gen_matching_plus_regular(_int(p, "n"), _int(p, "alpha_tilde"), s),
    "disjointness_embedding": lambda p, s: gen_disjointness_embedding(
        _int(p, "nprime"), _int(p, "mprime"), _int(p, "alpha"), _bits(p, "x"), _bits(p, "y"), s
    ),
}


def generate(spec: GenSpec) -> GeneratedGraph:
    builder = _BUILDERS.get(spec.family)
    if builder is None:
        raise ValueError(f"unknown family {spec.family!r}")
    gen = builder(spec.params, spec.seed)
    LOG.debug("generated %s: n=%d m=%d alpha<=%d", spec.label(), gen.graph.n, gen.graph.m, gen.declared_alpha)
    return gen
