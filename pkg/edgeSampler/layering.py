from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .graph import Graph, GraphTooLargeError
from .sampler import SamplerParams, log2_ceil, to_fraction

LOG = logging.getLogger(__name__)

BRUTEFORCE_MAX_N = 16


class LayeringNotCovered(RuntimeError):
    """
    The greedy sweep stalled with vertices left over: the graph admits no (theta, beta)-layered
    partition. ``levels`` holds the partial assignment, -1 for the vertices in ``unassigned``.
    """

    def __init__(self, levels: list[int], theta: int, beta: Fraction) -> None:
        self.levels = levels
        self.theta = theta
        self.beta = beta
        self.unassigned = [v for v, lvl in enumerate(levels) if lvl < 0]
        super().__init__(
            f"no ({theta}, {beta})-layering: {len(self.unassigned)} vertices unassigned "
            f"after level {max(levels, default=-1)}"
        )


@dataclass(frozen=True)
class LayeredPartition:
    levels: tuple[int, ...]
    theta: int
    beta: Fraction

    @property
    def depth(self) -> int:
        return max(self.levels, default=0)

    def level(self, v: int) -> int:
        return self.levels[v]

    def layer(self, i: int) -> list[int]:
        return [v for v, lvl in enumerate(self.levels) if lvl == i]

    def layer_sizes(self) -> list[int]:
        sizes = [0] * (self.depth + 1)
        for lvl in self.levels:
            sizes[lvl] += 1
        return sizes

    def remaining_sizes(self) -> list[int]:
        """|W_i| = |V minus L_0..L_{i-1}| for i = 0..depth+1 (the last entry is always 0)."""
        out = [len(self.levels)]
        for size in self.layer_sizes():
            out.append(out[-1] - size)
        return out

    def halves(self) -> bool:
        """True when every |W_{i+1}| <= ceil(|W_i| / 2)."""
        w = self.remaining_sizes()
        return all(w[i + 1] <= -(-w[i] // 2) for i in range(len(w) - 1))


def compute_layering(g: Graph, theta: int, beta: float | Fraction) -> LayeredPartition:
    """
    Level-synchronous greedy (theta, beta)-layering.

    L_0 is every vertex of degree <= theta. A vertex joins L_{i+1} in the sweep where at least a
    (1 - beta) fraction of its neighbors already sit in L_0..L_i, which makes each level minimal.
    Raises LayeringNotCovered when a sweep assigns nothing while vertices remain.
    """
    b = to_fraction(beta)
    if theta < 1:
        raise ValueError(f"theta must be >= 1, got {theta}")
    if not 0 < b < 1:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    # |Γ(v) ∩ L_{≤i}| >= (1 - β) d(v)  <=>  below * den >= (den - num) * d(v)
    num, den = b.numerator, b.denominator
    degrees = g.degrees()
    levels = [-1] * g.n
    below = [0] * g.n

    def assign(vertices: list[int], lvl: int) -> None:
        for v in vertices:
            levels[v] = lvl
        for v in vertices:
            for w in g.neighbors(v):
                below[w] += 1

    current = [v for v in range(g.n) if degrees[v] <= theta]
    pending = [v for v in range(g.n) if degrees[v] > theta]
    assign(current, 0)
    lvl = 0
    while pending:
        ready = [v for v in pending if below[v] * den >= (den - num) * degrees[v]]
        if not ready:
            LOG.debug("layering stalled at level %d with %d vertices pending", lvl, len(pending))
            raise LayeringNotCovered(levels, theta, b)
        lvl += 1
        assign(ready, lvl)
        pending = [v for v in pending if levels[v] < 0]
    LOG.debug("layering theta=%d beta=%s depth=%d", theta, b, lvl)
    return LayeredPartition(levels=tuple(levels), theta=theta, beta=b)


def default_params(n: int, alpha: int, eps: float | Fraction) -> SamplerParams:
    """theta = ceil(4 alpha ceil(log2 n) / eps), beta = eps / (2 ceil(log2 n)), ell = ceil(log2 n)."""
    e = to_fraction(eps)
    if not 0 < e < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    logn = log2_ceil(n)
    theta = math.ceil(4 * alpha * logn / e)
    return SamplerParams(n=n, theta=theta, beta=e / (2 * logn), ell=logn, eps=e, alpha=alpha)


def degeneracy(g: Graph) -> int:
    """Largest minimum degree over all subgraphs, by repeatedly peeling a minimum-degree vertex."""
    deg = g.degrees()
    removed = [False] * g.n
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    best = 0
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        best = max(best, d)
        for w in g.neighbors(v):
            if not removed[w]:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], w))
    return best


def arboricity_bruteforce(g: Graph) -> int:
    """
    Exact arboricity max ceil(m_H / (n_H - 1)) over induced subgraphs with at least two vertices.

    Exponential in n; refuses graphs with more than 16 vertices. An edgeless graph has arboricity 0.
    """
    if g.n > BRUTEFORCE_MAX_N:
        raise GraphTooLargeError(f"brute-force arboricity needs n <= {BRUTEFORCE_MAX_N}, got {g.n}")
    adjmask = [sum(1 << w for w in g.neighbors(v)) for v in range(g.n)]
    edges_in = [0] * (1 << g.n)
    best = 0
    for subset in range(1, 1 << g.n):
        low = subset & -subset
        rest = subset ^ low
        v = low.bit_length() - 1
        e = edges_in[rest] + (adjmask[v] & rest).bit_count()
        edges_in[subset] = e
        size = subset.bit_count()
        if size >= 2 and e:
            best = max(best, -(-e // (size - 1)))
    return best
