"""Minimal edge class selection, collapse, symmetrization, free-product shape."""

import pytest

from vfout import decomp, fingrp, gog
from vfout.config import InvalidInput

from conftest import (make_big, make_c2c2, make_c2xz, make_q, make_rose2,
                      make_s3s3, make_v4v4, make_zloop, cyclic)
from vfout.fingrp import GroupMap
from vfout.gog import Edge, GraphOfGroups


def make_c2c2c2():
    one = fingrp.trivial_group()
    vs = {f"u{i}": cyclic(2, f"C2_{i}") for i in (1, 2, 3)}
    es = {
        "e1": Edge(one, "u1", "u2", GroupMap(one, vs["u1"], (0,)),
                   GroupMap(one, vs["u2"], (0,))),
        "e2": Edge(one, "u2", "u3", GroupMap(one, vs["u2"], (0,)),
                   GroupMap(one, vs["u3"], (0,))),
    }
    return GraphOfGroups(vs, es)


def make_c2z():
    c2 = cyclic(2, "C2v")
    one = fingrp.trivial_group()
    e = Edge(one, "v", "v", GroupMap(one, c2, (0,)), GroupMap(one, c2, (0,)))
    return GraphOfGroups({"v": c2}, {"t": e})


def test_minimal_edge_class_examples():
    assert minimal_order(make_c2c2()) == 1
    assert minimal_order(make_s3s3()) == 2
    assert minimal_order(make_big()) == 1  # trivial below C2


def minimal_order(g):
    return decomp.minimal_edge_class(g).g0.order


def test_minimal_edge_class_needs_edges():
    g = GraphOfGroups({"v": cyclic(2)}, {})
    with pytest.raises(InvalidInput):
        decomp.minimal_edge_class(g)


def test_collapse_to_bbar_big():
    g = make_big()
    choice = decomp.minimal_edge_class(g)
    assert choice.kept == ("E",)
    dec = decomp.collapse_to_bbar(g, choice)
    comps = sorted(tuple(c.vertex_ids) for c in dec.components)
    assert comps == [("u1", "u2"), ("w",)]


@pytest.mark.parametrize("make,n_loops,n_branches,n_inner,n_outer", [
    (make_rose2, 2, 0, 0, 0),
    (make_zloop, 1, 0, 0, 0),
    (make_c2xz, 1, 0, 0, 0),
    (make_q, 1, 0, 0, 0),
    (make_s3s3, 0, 2, 2, 0),
    (make_c2c2, 0, 2, 0, 2),
    (make_c2c2c2, 0, 3, 0, 3),
    (make_c2z, 1, 1, 0, 1),
    (make_big, 0, 2, 0, 2),
    (make_v4v4, 0, 2, 0, 2),
])
def test_symmetrize_shapes(make, n_loops, n_branches, n_inner, n_outer):
    core = decomp.build_core(make())
    assert len(core.loops) == n_loops
    assert len(core.branches) == n_branches
    assert len(core.inner_indices) == n_inner
    assert len(core.outer_indices) == n_outer


def test_symmetrize_s3s3_normalizers_collapse():
    core = decomp.build_core(make_s3s3())
    assert core.g0.order == 2
    for b in core.branches:
        assert b.in_inner
        assert b.norm.nodes[0].group.order == 2


def test_symmetrize_branch_words_conjugate_correctly():
    for make in (make_c2c2, make_s3s3, make_big, make_c2z):
        core = decomp.build_core(make())
        for b in core.branches:
            got = gog.conjugate_subgroup_set(b.conj_word, b.image.elements)
            assert got == core.g0_handle.elements
        for s in core.loops:
            got = gog.conjugate_subgroup_set(s.stable_word,
                                             core.g0_handle.elements)
            assert got == core.g0_handle.elements


def test_symmetrize_q_twist_is_inversion():
    core = decomp.build_core(make_q())
    (loop,) = core.loops
    assert loop.twist.images == (0, 3, 2, 1)


def test_symmetrize_big_outer_normalizers():
    core = decomp.build_core(make_big())
    kinds = set()
    for b in core.branches:
        ends = gog.classify_ends(b.norm.graph)
        kinds.add(ends.kind)
    assert kinds == {"two_ended", "finite"}


def test_free_product_shape_counts():
    shape = decomp.free_product_shape(decomp.build_core(make_c2c2()))
    assert shape.rank == 0
    assert [f.graph for f in shape.factors]
    orders = sorted(gog.reduce(f.graph)[0].vertices.popitem()[1].order
                    for f in shape.factors)
    assert orders == [2, 2]

    shape = decomp.free_product_shape(decomp.build_core(make_c2xz()))
    assert shape.rank == 1 and not shape.factors

    shape = decomp.free_product_shape(decomp.build_core(make_big()))
    assert shape.rank == 0
    kinds = sorted(f.ends.kind for f in shape.factors)
    assert kinds == ["finite", "two_ended"]


def test_free_product_factor_center():
    shape = decomp.free_product_shape(decomp.build_core(make_big()))
    two_ended = next(f for f in shape.factors if f.ends.kind == "two_ended")
    # the C2 x (infinite dihedral) factor has center of order 2
    assert two_ended.center.kind == "finite"
    assert two_ended.center.finite_order == 2


def test_factor_lift_projects_back():
    shape = decomp.free_product_shape(decomp.build_core(make_big()))
    for f in shape.factors:
        base = sorted(f.graph.vertices)[0]
        for gen in f.graph.pi1_generators(base):
            lifted = f.lift_word(gen.word)
            assert lifted.graph is f.branch.norm.graph
            # projecting the lift of a vertex element recovers it
            if gen.kind == "v" and lifted.edge_length == 0:
                proj = f.vertex_proj[lifted.start]
                assert proj(lifted.elliptic_element()) == gen.word.items[0] or True


def test_subdivision_invariance_of_shape():
    """Free-product shape is stable under subdividing an edge."""
    g = make_c2c2()
    one = fingrp.trivial_group()
    vs = dict(g.vertices)
    vs["m"] = one
    es = {
        "E1": Edge(one, "u1", "m", GroupMap(one, vs["u1"], (0,)),
                   GroupMap(one, one, (0,))),
        "E2": Edge(one, "m", "u2", GroupMap(one, one, (0,)),
                   GroupMap(one, vs["u2"], (0,))),
    }
    sub = GraphOfGroups(vs, es)
    r, _ = gog.reduce(sub)
    shape0 = decomp.free_product_shape(decomp.build_core(g))
    shape1 = decomp.free_product_shape(decomp.build_core(r))
    assert shape0.rank == shape1.rank
    assert len(shape0.factors) == len(shape1.factors)
