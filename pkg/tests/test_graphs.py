"""Structural tests for the colored-graph layer.

Residue counts asserted here were derived with the miniature
component counter below, which shares no code with the package.
"""

import random

import pytest

from gemtrisect.graphs import (
    DimensionMismatchError,
    DisconnectedError,
    GemError,
    LoopEdgeError,
    NotProperError,
    NotRegularError,
    Residue,
    bicolored_cycles,
    blob_insert,
    build_graph,
    connected_sum,
    is_bipartite,
    residue_census,
    residue_subgem,
    residues,
    standard_sphere_gem,
)

from conftest import embedding_corpus, prism_gem, torus_gem


def _oracle_components(nv, pairs):
    """Independent component counter: plain iterative merging."""
    label = list(range(nv))

    def find(x):
        while label[x] != x:
            label[x] = label[label[x]]
            x = label[x]
        return x

    for u, v in pairs:
        label[find(u)] = find(v)
    return len({find(v) for v in range(nv)})


def _oracle_census(g, colorset):
    pairs = [(u, v) for (u, v, c) in g.edges if c in colorset]
    nv = g.nv
    # restrict to vertices only; every vertex is in some residue
    return _oracle_components(nv, pairs)


# -- construction -------------------------------------------------------


def test_sphere_gem_shape(s4_gem):
    assert s4_gem.nv == 2
    assert len(s4_gem.edges) == 5
    assert [c for (_, _, c) in s4_gem.edges] == [0, 1, 2, 3, 4]


def test_loop_rejected():
    with pytest.raises(LoopEdgeError):
        build_graph(1, [(0, 0, 0), (0, 1, 1), (0, 1, 0), (1, 1, 1)])


def test_duplicate_color_rejected():
    edges = [(0, 1, 0), (0, 1, 0), (0, 1, 1), (0, 1, 2)]
    with pytest.raises(NotProperError):
        build_graph(2, edges)


def test_missing_color_rejected():
    with pytest.raises(NotRegularError):
        build_graph(2, [(0, 1, 0), (0, 1, 1)])


def test_disconnected_rejected():
    edges = [(0, 1, c) for c in range(3)] + [(2, 3, c) for c in range(3)]
    with pytest.raises(DisconnectedError):
        build_graph(2, edges)


def test_edge_order_canonical(blob4_gem):
    assert list(blob4_gem.edges) == sorted(
        blob4_gem.edges, key=lambda e: (e[2], e[0], e[1]))


# -- residues -----------------------------------------------------------


def test_sphere_residue_counts(s4_gem):
    census = residue_census(s4_gem)
    for key, count in census.counts.items():
        assert count == 1, key
    assert census.g_of(0, 1, 2, 3) == 1


def test_blob_gem_residue_counts(blob4_gem):
    census = residue_census(blob4_gem)
    for a in range(5):
        for b in range(a + 1, 5):
            expect = _oracle_census(blob4_gem, {a, b})
            assert census.g_of(a, b) == expect
            assert census.g_of(a, b) == (1 if 4 in (a, b) else 2)


def test_residue_counts_match_oracle_on_corpus():
    import itertools
    for g in embedding_corpus(count=12, seed=5):
        census = residue_census(g)
        for r in (2, 3):
            for sub in itertools.combinations(range(5), r):
                assert census.g_of(*sub) == _oracle_census(g, set(sub))


def test_empty_colorset_residues(s4_gem):
    rs = residues(s4_gem, ())
    assert len(rs) == 2
    assert all(len(r.vertices) == 1 for r in rs)


def test_residues_ordered_by_min_vertex(blob4_gem):
    rs = residues(blob4_gem, frozenset({0, 1}))
    starts = [r.vertices[0] for r in rs]
    assert starts == sorted(starts)


def test_residue_partitions_vertices(blob4_gem):
    rs = residues(blob4_gem, frozenset({1, 2, 4}))
    seen = [v for r in rs for v in r.vertices]
    assert sorted(seen) == list(range(blob4_gem.nv))


# -- bipartiteness ------------------------------------------------------


def test_sphere_bipartite(s4_gem):
    flag, cls = is_bipartite(s4_gem)
    assert flag and cls == (0, 1)


def test_prism_not_bipartite():
    g = prism_gem()
    flag, walk = is_bipartite(g)
    assert not flag
    assert len(walk) % 2 == 1
    # witness must be a closed walk in the graph
    for i, v in enumerate(walk):
        w = walk[(i + 1) % len(walk)]
        assert any({u, t} == {v, w} for (u, t, _) in g.edges)


def test_torus_gem_bipartite():
    flag, cls = is_bipartite(torus_gem())
    assert flag
    assert set(cls[:3]) == {0} and set(cls[3:]) == {1}


# -- bicolored cycles ---------------------------------------------------


def test_cycles_alternate_and_cover():
    for g in embedding_corpus(count=8, seed=11):
        rng = random.Random(3)
        for _ in range(4):
            c, d = rng.sample(range(5), 2)
            cycles = bicolored_cycles(g, c, d)
            covered = []
            for cyc in cycles:
                assert len(cyc) % 2 == 0
                cols = [g.edges[e][2] for e, _ in cyc.steps]
                assert set(cols) == {c, d}
                assert all(x != y for x, y in zip(cols, cols[1:]))
                # walk consistency: each step leaves the listed vertex
                for i, (eid, direction) in enumerate(cyc.steps):
                    u, v, _ = g.edges[eid]
                    tail = u if direction == 1 else v
                    head = v if direction == 1 else u
                    assert tail == cyc.vertices[i]
                    assert head == cyc.vertices[(i + 1) % len(cyc)]
                covered.extend(cyc.vertices)
            assert sorted(covered) == list(range(g.nv))
            assert len(cycles) == _oracle_census(g, {c, d})


# -- constructions ------------------------------------------------------


def test_blob_insert_grows_by_two(s4_gem):
    g = blob_insert(s4_gem, 0)
    assert g.nv == s4_gem.nv + 2
    assert len(g.edges) == len(s4_gem.edges) + 5


def test_blob_preserves_bipartite():
    rng = random.Random(0)
    g = standard_sphere_gem(4)
    for _ in range(6):
        g = blob_insert(g, rng.randrange(len(g.edges)))
        assert is_bipartite(g)[0]


def test_connected_sum_of_spheres_is_sphere(s4_gem):
    out = connected_sum(s4_gem, s4_gem, 0, 1)
    assert out == s4_gem


def test_connected_sum_same_class_rejected(s4_gem):
    with pytest.raises(GemError):
        connected_sum(s4_gem, s4_gem, 0, 0)


def test_connected_sum_dimension_mismatch(s4_gem, s3_gem):
    with pytest.raises(DimensionMismatchError):
        connected_sum(s4_gem, s3_gem, 0, 1)


def test_connected_sum_order():
    g1 = blob_insert(standard_sphere_gem(4), 2)
    g2 = blob_insert(standard_sphere_gem(4), 4)
    out = connected_sum(g1, g2, 1, 0)
    assert out.nv == g1.nv + g2.nv - 2


def test_residue_subgem_roundtrip(blob4_gem):
    res = residues(blob4_gem, frozenset({0, 1, 2, 3}))[0]
    sub, vmap, cmap = residue_subgem(blob4_gem, res)
    assert sub.n == 3
    assert sub.nv == len(res.vertices)
    assert len(sub.edges) == len(res.edge_ids)
