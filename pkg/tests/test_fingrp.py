"""The finite-group layer against definitional brute force."""

import pytest

from vfout import fingrp
from vfout.config import BoundExceeded, Limits
from vfout.fingrp import SubgroupHandle

from conftest import cyclic, klein4, sym3


def test_group_from_permutations_s3():
    g, perms = fingrp.group_from_permutations(3, [(1, 0, 2), (1, 2, 0)])
    assert g.order == 6
    assert perms[0] == (0, 1, 2)
    assert not g.check()


def test_group_from_permutations_trivial_and_c2():
    g, _ = fingrp.group_from_permutations(1, [])
    assert g.order == 1
    g2, _ = fingrp.group_from_permutations(2, [(1, 0)])
    assert g2.order == 2


def test_group_too_large():
    cyc = tuple(range(1, 12)) + (0,)
    with pytest.raises(BoundExceeded):
        fingrp.group_from_permutations(12, [cyc], limits=Limits(max_group_order=10))


def test_generated_subgroup():
    s3 = sym3()
    assert fingrp.generated_subgroup(s3, []).elements == (0,)
    three_cycle = next(a for a in s3.elements() if s3.element_order(a) == 3)
    assert fingrp.generated_subgroup(s3, [three_cycle]).order == 3
    transposition = next(a for a in s3.elements() if s3.element_order(a) == 2)
    assert fingrp.generated_subgroup(s3, [transposition, three_cycle]).order == 6


def brute_centralizer(G, H):
    return tuple(g for g in G.elements()
                 if all(G.mul(g, h) == G.mul(h, g) for h in H.elements))


def brute_normalizer(G, H):
    mem = set(H.elements)
    return tuple(g for g in G.elements()
                 if {G.conj(g, h) for h in H.elements} == mem)


@pytest.mark.parametrize("make", [lambda: cyclic(2), lambda: cyclic(4),
                                  klein4, sym3])
def test_centralizer_normalizer_center_match_bruteforce(make):
    G = make()
    for H in fingrp.all_subgroups(G):
        assert fingrp.centralizer(G, H).elements == brute_centralizer(G, H)
        assert fingrp.normalizer(G, H).elements == brute_normalizer(G, H)
    full = fingrp.full_subgroup(G)
    assert fingrp.center(G).elements == brute_centralizer(G, full)


def test_centralizer_examples():
    s3 = sym3()
    t = next(a for a in s3.elements() if s3.element_order(a) == 2)
    h = fingrp.generated_subgroup(s3, [t])
    assert fingrp.centralizer(s3, h).order == 2
    assert fingrp.centralizer(s3, fingrp.trivial_subgroup(s3)).order == 6
    v4 = klein4()
    for H in fingrp.all_subgroups(v4):
        assert fingrp.centralizer(v4, H).order == 4


def test_normalizer_examples():
    s3 = sym3()
    t = next(a for a in s3.elements() if s3.element_order(a) == 2)
    h = fingrp.generated_subgroup(s3, [t])
    assert fingrp.normalizer(s3, h).elements == h.elements
    c = next(a for a in s3.elements() if s3.element_order(a) == 3)
    h3 = fingrp.generated_subgroup(s3, [c])
    assert fingrp.normalizer(s3, h3).order == 6
    assert fingrp.normalizer(s3, fingrp.full_subgroup(s3)).order == 6


def test_center_examples():
    assert fingrp.center(sym3()).order == 1
    assert fingrp.center(klein4()).order == 4
    assert fingrp.center(fingrp.trivial_group()).order == 1


def test_subgroup_containments():
    for G in (sym3(), klein4(), cyclic(4)):
        z = set(fingrp.center(G).elements)
        for H in fingrp.all_subgroups(G):
            c = set(fingrp.centralizer(G, H).elements)
            n = set(fingrp.normalizer(G, H).elements)
            assert z <= c <= n


def test_subgroup_classes_counts():
    assert len(fingrp.subgroup_classes(cyclic(2))) == 2
    s3_classes = fingrp.subgroup_classes(sym3())
    assert [cl[0].order for cl in s3_classes] == [1, 2, 3, 6]
    assert len(s3_classes[1]) == 3  # the three transposition subgroups fuse
    v4_classes = fingrp.subgroup_classes(klein4())
    assert len(v4_classes) == 5  # the three C2s are not conjugate


def test_automorphisms_counts():
    assert fingrp.automorphisms(cyclic(2)).order == 1
    data = fingrp.automorphisms(sym3())
    assert data.order == 6
    assert data.out_order == 1
    c4 = fingrp.automorphisms(cyclic(4))
    assert c4.order == 2
    other = [m for m in c4.maps if m.images != tuple(range(4))]
    assert other[0].images == (0, 3, 2, 1)  # inversion


def test_automorphism_inner_count():
    for G in (sym3(), klein4(), cyclic(4)):
        data = fingrp.automorphisms(G)
        assert len(data.inner_indices) == G.order // fingrp.center(G).order
        assert data.order % len(data.inner_indices) == 0


def test_quotients():
    v4 = klein4()
    q, proj = fingrp.quotient(v4, SubgroupHandle(v4, (0, 1)))
    assert q.order == 2
    assert proj.images[1] == 0
    s3 = sym3()
    c = next(a for a in s3.elements() if s3.element_order(a) == 3)
    n = fingrp.generated_subgroup(s3, [c])
    q2, proj2 = fingrp.quotient(s3, n)
    assert q2.order == 2
    assert all(proj2.images[h] == 0 for h in n.elements)
    assert set(proj2.images) == {0, 1}
    q3, proj3 = fingrp.quotient(s3, fingrp.trivial_subgroup(s3))
    assert q3.order == 6
    assert proj3.images == tuple(range(6))


def test_quotient_rejects_nonnormal():
    s3 = sym3()
    t = next(a for a in s3.elements() if s3.element_order(a) == 2)
    h = fingrp.generated_subgroup(s3, [t])
    with pytest.raises(Exception):
        fingrp.quotient(s3, h)


def test_canonical_conjugate_and_witness():
    s3 = sym3()
    classes = fingrp.subgroup_classes(s3)
    order2 = classes[1]
    canon = order2[0]
    for h in order2:
        rep, g = fingrp.canonical_conjugate(s3, h)
        assert rep.elements == canon.elements
        assert h.conjugate(g).elements == canon.elements
