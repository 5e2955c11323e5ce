from __future__ import annotations

from fractions import Fraction

import networkx as nx
import pytest

from edgeSampler.generators import (
    GeneratedGraph,
    gen_alpha_forests,
    gen_basic,
    gen_kary_tree,
    gen_matching_plus_regular,
)
from edgeSampler.graph import Graph, GraphTooLargeError
from edgeSampler.layering import (
    LayeredPartition,
    LayeringNotCovered,
    arboricity_bruteforce,
    compute_layering,
    default_params,
    degeneracy,
)


def _complete(n: int) -> Graph:
    return Graph.from_networkx(nx.complete_graph(n))


def test_path_is_all_level_zero() -> None:
    g = Graph.from_networkx(nx.path_graph(8))
    for beta in (0.01, 0.5, 0.99):
        layering = compute_layering(g, 2, beta)
        assert layering.levels == (0,) * 8
        assert layering.depth == 0


def test_star_center_on_level_one(star9: Graph) -> None:
    """8 of 8 neighbors below and 8/8 >= 0.9: the center joins level 1."""
    layering = compute_layering(star9, 2, 0.1)
    assert layering.level(0) == 1
    assert layering.layer(0) == list(range(1, 9))
    assert layering.depth == 1
    assert layering.layer_sizes() == [8, 1]
    assert layering.remaining_sizes() == [9, 1, 0]


def test_complete_graph_not_covered() -> None:
    with pytest.raises(LayeringNotCovered) as ei:
        compute_layering(_complete(5), 1, 0.01)
    assert ei.value.unassigned == [0, 1, 2, 3, 4]
    assert ei.value.levels == [-1] * 5


def test_partial_layering_reported() -> None:
    """A K_5 hanging off a path: the path is assigned, the clique is not."""
    edges = [(0, 1), (1, 2)] + [(u, v) for u in range(2, 7) for v in range(u + 1, 7)]
    with pytest.raises(LayeringNotCovered) as ei:
        compute_layering(Graph(7, edges), 2, 0.1)
    assert ei.value.levels[0] == 0
    assert set(ei.value.unassigned) >= {3, 4, 5, 6}


def test_levels_are_minimal() -> None:
    """Each vertex sits on the first level where its (1 - beta) condition holds."""
    # hubs 1 and 2 share an edge; 1 has four leaves, 2 has three, 0 is isolated
    edges = [(1, i) for i in range(3, 7)] + [(2, i) for i in range(7, 10)] + [(1, 2)]
    g = Graph(10, edges)
    layering = compute_layering(g, 3, Fraction(1, 4))
    assert layering.level(2) == 1
    assert layering.level(1) == 1
    assert layering.halves()


def test_compute_layering_validates_arguments(single_edge: Graph) -> None:
    with pytest.raises(ValueError):
        compute_layering(single_edge, 0, 0.5)
    with pytest.raises(ValueError):
        compute_layering(single_edge, 2, 0)
    with pytest.raises(ValueError):
        compute_layering(single_edge, 2, 1)


def test_halves_detects_slow_shrink() -> None:
    assert not LayeredPartition(levels=(0, 1, 1, 1), theta=1, beta=Fraction(1, 2)).halves()
    assert LayeredPartition(levels=(0, 0, 1, 2), theta=1, beta=Fraction(1, 2)).halves()


@pytest.mark.parametrize(
    "n, alpha, eps, theta, ell, beta, rho",
    [
        (1024, 2, 0.5, 160, 10, Fraction(1, 40), 1024 * 160 * 11),
        (2, 1, 0.5, 8, 1, Fraction(1, 4), 32),
        (2, 1, 1 - 1e-9, 5, 1, None, 2 * 5 * 2),
    ],
)
def test_default_params(
    n: int, alpha: int, eps: float, theta: int, ell: int, beta: Fraction | None, rho: int
) -> None:
    params = default_params(n, alpha, eps)
    assert (params.theta, params.ell, params.rho) == (theta, ell, rho)
    if beta is not None:
        assert params.beta == beta
    assert params.theta * params.eps >= 4 * alpha * params.ell


@pytest.mark.parametrize("n, alpha, eps", [(1, 1, 0.5), (4, 0, 0.5), (4, 1, 0.0), (4, 1, 1.0)])
def test_default_params_domain(n: int, alpha: int, eps: float) -> None:
    with pytest.raises(ValueError):
        default_params(n, alpha, eps)


def test_degeneracy_examples() -> None:
    assert degeneracy(Graph.from_networkx(nx.balanced_tree(2, 4))) == 1
    assert degeneracy(_complete(5)) == 4
    assert degeneracy(Graph.from_networkx(nx.cubical_graph())) == 3
    assert degeneracy(Graph(3, [])) == 0


def test_degeneracy_matches_networkx_core_number() -> None:
    for seed in range(10):
        nxg = nx.gnp_random_graph(40, 0.15, seed=seed)
        assert degeneracy(Graph.from_networkx(nxg)) == max(nx.core_number(nxg).values())


def test_arboricity_bruteforce_examples() -> None:
    assert arboricity_bruteforce(Graph.from_networkx(nx.balanced_tree(3, 2))) == 1
    assert arboricity_bruteforce(_complete(4)) == 2
    assert arboricity_bruteforce(_complete(5)) == 3
    assert arboricity_bruteforce(Graph(5, [])) == 0
    with pytest.raises(GraphTooLargeError):
        arboricity_bruteforce(Graph(17, []))


def _certified_suite() -> list[GeneratedGraph]:
    return [
        gen_basic("path", 64),
        gen_basic("star", 65),
        *(gen_alpha_forests(256, a, seed=a) for a in (1, 2, 4)),
        gen_matching_plus_regular(64, 4, seed=1),
        gen_kary_tree(4, 3),
    ]


@pytest.mark.parametrize("eps", [0.1, 0.5])
def test_layering_depth_and_halving_on_certified_graphs(eps: float) -> None:
    """Depth at most ceil(log2 n) and every remaining set at most half the previous one."""
    for gen in _certified_suite():
        g = gen.graph
        params = default_params(g.n, gen.declared_alpha, eps)
        layering = compute_layering(g, params.theta, params.beta)
        assert layering.depth <= params.ell
        assert layering.halves(), gen.family


def test_tight_threshold_layering_still_halves() -> None:
    """A k-ary tree with theta below the internal degree needs several levels."""
    g = gen_kary_tree(4, 4).graph
    layering = compute_layering(g, 3, Fraction(1, 4))
    assert layering.depth >= 1
    assert layering.halves()
