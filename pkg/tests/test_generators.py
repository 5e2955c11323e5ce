from __future__ import annotations

import json
from pathlib import Path

import pytest

from edgeSampler.generators import (
    GeneratedGraph,
    GenSpec,
    gen_alpha_forests,
    gen_alpha_regular,
    gen_basic,
    gen_disjointness_embedding,
    gen_kary_tree,
    gen_matching_plus_regular,
    generate,
    kary_tree_size,
    write_generated,
)
from edgeSampler.graph import GraphTooLargeError, read_graph
from edgeSampler.layering import arboricity_bruteforce, degeneracy


def test_basic_families() -> None:
    path = gen_basic("path", 3)
    assert set(path.graph.edges()) == {(0, 1), (1, 2)}
    star = gen_basic("star", 9)
    assert star.graph.m == 8 and star.graph.degree(0) == 8
    complete = gen_basic("complete", 5)
    assert complete.graph.m == 10
    assert complete.declared_alpha == 3
    for gen in (path, star, complete, gen_basic("complete", 8)):
        assert gen.check_certificate(), gen.family
    with pytest.raises(ValueError):
        gen_basic("path", 1)
    with pytest.raises(ValueError):
        gen_basic("wheel", 5)


def test_kary_tree_shapes() -> None:
    """k=3, D=1 is a star on 4 vertices; k=3, D=2 has 1 + 3 + 6 vertices."""
    small = gen_kary_tree(3, 1)
    assert small.graph.n == 4 and small.graph.degree(0) == 3
    tree = gen_kary_tree(3, 2)
    assert tree.graph.n == kary_tree_size(3, 2) == 10
    assert tree.graph.m == 9
    assert tree.declared_alpha == 1 and tree.check_certificate()
    assert tree.metadata["depths"] == [0, 1, 1, 1, 2, 2, 2, 2, 2, 2]
    assert (tree.metadata["n_c"], tree.metadata["n_s"], tree.metadata["n_d"]) == (4, 10, 0)
    assert all(tree.graph.degree(v) == 3 for v in range(4))


def test_kary_tree_critical_counts() -> None:
    tree = gen_kary_tree(4, 5, critical_depth=2)
    depths = tree.metadata["depths"]
    assert tree.metadata["n_c"] == sum(1 for d in depths if d <= 2) == 1 + 4 + 12
    assert tree.metadata["n_d"] == sum(1 for d in depths if d > 4)


def test_kary_tree_limits() -> None:
    with pytest.raises(GraphTooLargeError):
        gen_kary_tree(10, 8)
    with pytest.raises(ValueError):
        gen_kary_tree(1, 3)


def test_alpha_forests() -> None:
    tree = gen_alpha_forests(50, 1, seed=4)
    assert tree.graph.m == 49
    two = gen_alpha_forests(100, 2, seed=4)
    assert two.graph.m <= 2 * 99
    assert len(two.forests) == 2 and two.check_certificate()
    assert degeneracy(two.graph) <= 4
    assert gen_alpha_forests(100, 2, seed=4).graph == two.graph


def test_alpha_forests_span_keeps_edges_near_n() -> None:
    for alpha in (1, 2, 4, 8):
        gen = gen_alpha_forests(512, alpha, seed=alpha, span=512 // alpha)
        assert 480 <= gen.graph.m <= 512
        assert gen.check_certificate()
    with pytest.raises(ValueError):
        gen_alpha_forests(10, 2, span=1)


def test_alpha_regular() -> None:
    gen = gen_alpha_regular(20, 5, seed=2)
    assert gen.graph.degrees() == [5] * 20
    assert gen.check_certificate()
    with pytest.raises(ValueError):
        gen_alpha_regular(9, 3)
    with pytest.raises(ValueError):
        gen_alpha_regular(5, 5)


@pytest.mark.parametrize("n,degree", [(9, 8), (10, 6), (12, 8), (12, 11), (2, 1), (3, 2), (64, 31)])
def test_alpha_regular_dense_blocks(n: int, degree: int) -> None:
    """Dense degrees, up to the complete graph, are built without retries."""
    gen = gen_alpha_regular(n, degree, seed=7)
    assert gen.graph.degrees() == [degree] * n
    assert gen.graph.m == n * degree // 2
    assert gen.check_certificate()
    # degree // 2 Hamiltonian paths, a star of closing edges, and the matching for odd degree
    assert len(gen.forests) == degree // 2 + (1 if degree >= 2 else 0) + degree % 2


@pytest.mark.parametrize(
    "nprime,mprime,alpha",
    [(9, 18, 4), (10, 15, 3), (12, 24, 4)],
)
def test_disjointness_dense_blocks(nprime: int, mprime: int, alpha: int) -> None:
    """K is the complete graph or close to it: still realized, still alpha + 1 forests."""
    gen = gen_disjointness_embedding(nprime, mprime, alpha, [1], [1], seed=2)
    block = 2 * mprime // alpha
    assert gen.graph.n == nprime + block
    assert gen.graph.m == 3 * mprime
    assert all(gen.graph.degree(v) == 2 * alpha for v in range(nprime, nprime + block))
    assert gen.check_certificate()


def test_matching_plus_regular() -> None:
    gen = gen_matching_plus_regular(64, 4, seed=0)
    assert gen.graph.m == (64 - 16) // 2 + 32 == 56
    assert gen.graph.max_degree() == 4
    assert gen.check_certificate()
    matching = gen_matching_plus_regular(10, 1, seed=0)
    assert matching.graph.m == 5
    assert matching.graph.degrees() == [1] * 10
    with pytest.raises(ValueError):
        gen_matching_plus_regular(10, 3)


def test_matching_plus_clique_alias() -> None:
    a = generate(GenSpec("matching_plus_clique", {"n": 64, "alpha_tilde": 4}, seed=3))
    b = generate(GenSpec("matching_plus_regular", {"n": 64, "alpha_tilde": 4}, seed=3))
    assert a.graph == b.graph


def _disjointness(x: list[int], y: list[int]) -> GeneratedGraph:
    return gen_disjointness_embedding(32, 16, 2, x, y, seed=5)


def test_disjointness_single_intersection() -> None:
    """One common index: m = 3m' with 2/3 of the edges outside W_0."""
    gen = _disjointness([1, 0], [1, 1])
    assert gen.graph.n == 64
    assert gen.graph.m == 48
    outside = [e for e in gen.graph.edges() if min(e) >= 32]
    assert len(outside) == 32 == gen.metadata["edges_outside_w0"]
    assert 3 * len(outside) == 2 * gen.graph.m
    assert gen.metadata["intersecting"] == [1]
    assert gen.declared_alpha == 3 and gen.check_certificate()


def test_disjointness_disjoint_inputs() -> None:
    gen = _disjointness([1, 0], [0, 1])
    assert gen.graph.m == 16
    assert all(max(e) < 32 for e in gen.graph.edges())
    assert gen.check_certificate()


def test_disjointness_block_structure() -> None:
    gen = _disjointness([1, 1], [1, 1])
    assert gen.graph.m == 16 * 5
    for v in range(32, 64):
        assert gen.graph.degree(v) == 4
    assert gen.metadata["block_size"] == 16 and gen.metadata["blocks"] == 2


@pytest.mark.parametrize(
    "args",
    [
        (32, 16, 3, [1, 0], [1, 0]),
        (30, 16, 2, [1, 0], [1, 0]),
        (32, 16, 2, [1], [1]),
        (32, 16, 2, [1, 2], [1, 0]),
    ],
)
def test_disjointness_rejects_bad_parameters(args: tuple[int, int, int, list[int], list[int]]) -> None:
    with pytest.raises(ValueError):
        gen_disjointness_embedding(*args)


def _small_generated() -> list[GeneratedGraph]:
    return [
        gen_basic("path", 10),
        gen_basic("star", 12),
        gen_basic("complete", 6),
        gen_basic("complete", 7),
        gen_kary_tree(3, 2),
        gen_alpha_forests(12, 2, seed=1),
        gen_alpha_forests(12, 3, seed=2),
        gen_alpha_regular(10, 3, seed=3),
        gen_alpha_regular(11, 4, seed=3),
        gen_matching_plus_regular(12, 3, seed=4),
        gen_disjointness_embedding(6, 3, 1, [1], [1], seed=6),
    ]


def test_bruteforce_agrees_with_declared_bounds() -> None:
    """arboricity <= declared alpha and degeneracy <= 2 arboricity on every small generated graph."""
    for gen in _small_generated():
        assert gen.graph.n <= 12
        exact = arboricity_bruteforce(gen.graph)
        assert exact <= gen.declared_alpha, gen.family
        assert degeneracy(gen.graph) <= 2 * exact, gen.family
        assert gen.check_certificate(), gen.family


def test_check_certificate_detects_bad_forests() -> None:
    gen = gen_basic("complete", 4)
    merged = GeneratedGraph(gen.graph, gen.family, 1, [[e for f in gen.forests for e in f]])
    assert not merged.check_certificate()
    missing = GeneratedGraph(gen.graph, gen.family, gen.declared_alpha, gen.forests[:-1])
    assert not missing.check_certificate()
    cyclic = GeneratedGraph(gen.graph, gen.family, 3, [[(0, 1), (1, 2), (0, 2)], [(0, 3), (1, 3), (2, 3)]])
    assert not cyclic.check_certificate()


def test_genspec_from_dict_and_label() -> None:
    spec = GenSpec.from_dict({"family": "disjointness_embedding", "params": {"x": "10", "y": [1, 1]}, "seed": 2})
    assert spec.seed == 2 and spec.alpha is None
    assert spec.label() == "disjointness_embedding(x=10,y=11)"
    assert GenSpec.from_dict({"family": "path", "params": {"n": 4}, "alpha": 2}).alpha == 2
    with pytest.raises(ValueError):
        GenSpec.from_dict({"family": "torus"})
    with pytest.raises(ValueError):
        GenSpec.from_dict({"family": "path", "params": [1]})
    with pytest.raises(ValueError):
        generate(GenSpec("path", {}))


def test_write_generated_sidecar(tmp_path: Path) -> None:
    gen = generate(GenSpec("kary_tree", {"k": 3, "depth": 2}))
    out = tmp_path / "tree.txt"
    meta_path = write_generated(gen, out)
    assert meta_path == tmp_path / "tree.meta.json"
    assert read_graph(out) == gen.graph
    meta = json.loads(meta_path.read_text())
    assert meta["n"] == 10 and meta["m"] == 9 and meta["declared_alpha"] == 1
    assert meta["metadata"]["n_c"] == 4
    assert len(meta["forests"]) == 1
